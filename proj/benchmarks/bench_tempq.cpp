#include <benchmark/benchmark.h>

#include <filesystem>

#include "tempq/pipeline.hpp"
#include "tempq/query_graph.hpp"
#include "tempq/time.hpp"

namespace {

const tempq::KnowledgeGraph& graph() {
  static const auto g =
      tempq::KnowledgeGraph::load(std::filesystem::path(TEMPQ_DATA_DIR) / "fixture_kg.json");
  return g;
}

const tempq::ScorerModel& model() {
  static const auto m =
      tempq::ScorerModel::load(std::filesystem::path(TEMPQ_DATA_DIR) / "fixture_model.json");
  return m;
}

void BM_AllenRelation(benchmark::State& state) {
  for (auto _ : state) {
    for (int a = 0; a < 6; ++a) {
      for (int b = a + 1; b < 6; ++b) {
        for (int c = 0; c < 6; ++c) {
          for (int d = c + 1; d < 6; ++d) benchmark::DoNotOptimize(tempq::allen_relation(a, b, c, d));
        }
      }
    }
  }
}
BENCHMARK(BM_AllenRelation);

void BM_ExecuteOrdinal(benchmark::State& state) {
  const auto& g = graph();
  tempq::QueryGraph q;
  const auto henry = q.add_entity(g.entity_index("Henry_VIII_of_England"));
  const auto s = q.add_statement();
  const auto wife = q.add_variable();
  const auto t = q.add_variable();
  const auto spouse = *g.find_predicate("spouse");
  q.add_edge({tempq::EdgeKind::kStatementSubject, henry, spouse, s});
  q.add_edge({tempq::EdgeKind::kStatementObject, s, spouse, wife});
  q.add_edge({tempq::EdgeKind::kTime, s, {}, t});
  q.set_ordinal({t, 1, tempq::OrdinalDirection::kFromFirst});
  q.set_answer(wife);
  for (auto _ : state) benchmark::DoNotOptimize(tempq::execute(q, g));
}
BENCHMARK(BM_ExecuteOrdinal);

void BM_AnswerQuestion(benchmark::State& state) {
  const char* questions[] = {
      "Which movie did Alfred Hitchcock direct in 1960?",
      "Where was John Lennon standing when he was shot?",
      "Who became the president after J.F. Kennedy was shot?",
  };
  const char* q = questions[state.range(0)];
  for (auto _ : state) benchmark::DoNotOptimize(tempq::answer_question(graph(), q, model()));
}
BENCHMARK(BM_AnswerQuestion)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
