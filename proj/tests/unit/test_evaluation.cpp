#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fixture.hpp"
#include "tempq/error.hpp"
#include "tempq/evaluation.hpp"
#include "tempq/pipeline.hpp"

namespace tempq {
namespace {

using testing::data_path;
using testing::fixture_graph;

const ScorerModel& fixture_model() {
  static const ScorerModel m = ScorerModel::load(data_path("fixture_model.json"));
  return m;
}

TEST(Benchmark, ParsesJsonLines) {
  const auto b = parse_benchmark(
      "{\"id\": \"a\", \"question\": \"Q1?\", \"answers\": [\"x\", \"y\"]}\n"
      "\n"
      "{\"id\": \"b\", \"question\": \"Q2?\", \"answers\": [\"z\"]}\n");
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].answers, (AnswerSet{"x", "y"}));
  EXPECT_EQ(b[1].id, "b");
}

TEST(Benchmark, ErrorsNameTheLine) {
  const char* bad[] = {
      "{\"id\": \"a\", \"question\": \"Q?\", \"answers\": [\"x\"]}\n{broken\n",
      "{\"id\": \"a\", \"question\": \"Q?\", \"answers\": [\"x\"]}\n{\"id\": \"b\", \"question\": \"\", \"answers\": [\"x\"]}\n",
      "{\"id\": \"a\", \"question\": \"Q?\", \"answers\": [\"x\"]}\n{\"id\": \"b\", \"question\": \"Q?\", \"answers\": []}\n",
  };
  for (const char* text : bad) {
    try {
      parse_benchmark(text);
      ADD_FAILURE() << text;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
  EXPECT_THROW(load_benchmark("/nonexistent.jsonl"), Error);
}

TEST(Metrics, UnansweredQuestion) {
  const auto r = score_question({"q", "Q?", {"a"}}, {}, std::nullopt, "");
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f1, 0.0);
  EXPECT_EQ(r.hit_at_1, 0.0);
}

TEST(Metrics, HitUsesSelectedAnswer) {
  const BenchmarkQuestion q{"q", "Q?", {"a"}};
  EXPECT_EQ(score_question(q, {"a", "b"}, "a", "query").hit_at_1, 1.0);
  EXPECT_EQ(score_question(q, {"a", "b"}, "b", "query").hit_at_1, 0.0);
}

TEST(Metrics, AggregateIsPerMetricMean) {
  std::vector<QuestionReport> rs(4);
  rs[0].f1 = 1.0;
  rs[1].f1 = 0.5;
  rs[2].precision = 1.0;
  rs[3].hit_at_1 = 1.0;
  rs[3].recall = 0.25;
  const auto a = aggregate(rs);
  EXPECT_EQ(a.count, 4u);
  EXPECT_DOUBLE_EQ(a.f1, 0.375);
  EXPECT_DOUBLE_EQ(a.precision, 0.25);
  EXPECT_DOUBLE_EQ(a.recall, 0.0625);
  EXPECT_DOUBLE_EQ(a.hit_at_1, 0.25);
  EXPECT_EQ(aggregate({}).count, 0u);
}

TEST(Pipeline, AnswersWorkedExamplesWithShippedModel) {
  const auto bench = load_benchmark(data_path("fixture_benchmark.jsonl"));
  for (const auto& q : bench) {
    const auto r = answer_question(fixture_graph(), q.question, fixture_model());
    EXPECT_EQ(r.answers, q.answers) << q.id;
    EXPECT_FALSE(r.selected_query.empty());
  }
}

// The selected query of each worked example, in the command-line answer format.
TEST(Pipeline, WorkedExampleQueriesMatchGolden) {
  std::ifstream in(std::string(TEMPQ_GOLDEN_DIR) + "/worked_examples.txt");
  ASSERT_TRUE(in);
  std::stringstream golden;
  golden << in.rdbuf();
  std::string got;
  for (const auto& q : load_benchmark(data_path("fixture_benchmark.jsonl"))) {
    const auto r = answer_question(fixture_graph(), q.question, fixture_model());
    got += "## " + q.id + "\n";
    for (const auto& a : r.answers) got += a + "\n";
    got += "\n" + r.selected_query + "\n\n";
  }
  EXPECT_EQ(got, golden.str());
}

TEST(Pipeline, UnanswerableQuestion) {
  const auto r = answer_question(fixture_graph(), "Colorless green ideas sleep furiously?",
                                 ScorerModel::untrained());
  EXPECT_FALSE(r.answerable());
  EXPECT_TRUE(r.answers.empty());
  EXPECT_FALSE(r.selected_answer);
  // Linked, but the entity has no facts.
  EXPECT_FALSE(answer_question(fixture_graph(), "When was the Zanzibar Lighthouse built?",
                               ScorerModel::untrained())
                   .answerable());
}

TEST(Pipeline, SelectAnswer) {
  const AnswerSet answers{"c", "a", "b"};
  EXPECT_EQ(select_answer(answers, AnswerSelection::kSmallest, 0), "a");
  EXPECT_EQ(select_answer(answers, AnswerSelection::kSeeded, 5),
            select_answer(answers, AnswerSelection::kSeeded, 5));
  EXPECT_TRUE(answers.count(*select_answer(answers, AnswerSelection::kSeeded, 9)));
  EXPECT_FALSE(select_answer({}, AnswerSelection::kSmallest, 0));
}

TEST(Trace, ShowsConstraintNotationAndSlotFills) {
  const auto& g = fixture_graph();
  const auto lennon = format_trace(
      answer_question(g, "Where was John Lennon standing when he was shot?", fixture_model()), g);
  EXPECT_NE(lennon.find(R"(Relation(SIMULTANEOUS, "standing", "shot"))"), std::string::npos);
  EXPECT_NE(lennon.find("<TLINK"), std::string::npos);

  const auto henry = format_trace(
      answer_question(g, "When did Henry the VIII marry his first wife?", fixture_model()), g);
  EXPECT_NE(henry.find("HAS_VALUE_ORDINAL"), std::string::npos);

  const auto fishburne = format_trace(
      answer_question(g, "What award did Laurence Fishburne received at the 46th Tony Awards?",
                      fixture_model()),
      g);
  EXPECT_NE(fishburne.find("IS-5"), std::string::npos);
  EXPECT_NE(fishburne.find("[PART_OF]"), std::string::npos);
}

TEST(Evaluate, FixtureReport) {
  const auto bench = load_benchmark(data_path("fixture_benchmark.jsonl"));
  const auto report = evaluate(fixture_graph(), bench, fixture_model());
  EXPECT_EQ(report.aggregate.count, 6u);
  EXPECT_EQ(report.aggregate.f1, 1.0);
  EXPECT_EQ(report.aggregate.hit_at_1, 1.0);
  ASSERT_EQ(report.questions.size(), bench.size());
  for (std::size_t i = 0; i < bench.size(); ++i) EXPECT_EQ(report.questions[i].id, bench[i].id);

  const auto doc = nlohmann::json::parse(to_json(report));
  ASSERT_TRUE(doc.contains("questions"));
  ASSERT_TRUE(doc.contains("aggregate"));
  for (const char* key : {"id", "question", "hit_at_1", "precision", "recall", "f1",
                          "selected_query", "selected_answer", "answers"}) {
    EXPECT_TRUE(doc["questions"][0].contains(key)) << key;
  }
  EXPECT_EQ(doc["aggregate"]["count"], 6);
  EXPECT_NE(to_table(report).find("is6-kennedy"), std::string::npos);
}

TEST(Evaluate, ShippedModelMatchesFreshTraining) {
  const auto pool = training_pool(fixture_graph(), load_benchmark(data_path("fixture_train.jsonl")));
  const auto model = train(build_training_set(pool).examples);
  EXPECT_EQ(model.to_json(), fixture_model().to_json());
}

}  // namespace
}  // namespace tempq
