// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fixture.hpp"
#include "oracles.hpp"
#include "process.hpp"
#include "tempq/evaluation.hpp"
#include "tempq/pipeline.hpp"
#include "tempq/ranker.hpp"

namespace {

using namespace tempq;
using testing::data_path;
using testing::fixture_graph;
using Clock = std::chrono::steady_clock;

// Collects failure reasons for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string join(const AnswerSet& s) {
  std::string out = "{";
  for (const auto& a : s) out += (out.size() > 1 ? ", " : "") + a;
  return out + "}";
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ScorerModel train_on(const std::string& benchmark, SamplingOptions sampling = {}) {
  const auto pool = training_pool(fixture_graph(), load_benchmark(data_path(benchmark)));
  return train(build_training_set(pool, sampling).examples);
}

std::vector<BenchmarkQuestion> fixture_benchmark() {
  return load_benchmark(data_path("fixture_benchmark.jsonl"));
}

void worked_examples(Check& c, std::string& detail) {
  const auto t0 = Clock::now();
  const ScorerModel model = train_on("fixture_train.jsonl");
  const auto bench = fixture_benchmark();
  const std::vector<std::pair<std::string, AnswerSet>> expected = {
      {"is1-hitchcock", {"Psycho"}},
      {"is2-henry", {"1506"}},
      {"is3-potter", {"Harry_Potter_and_the_Deathly_Hallows"}},
      {"is4-lennon", {"The_Dakota"}},
      {"is5-fishburne", {"Best_Featured_Actor"}},
      {"is6-kennedy", {"Lyndon_B._Johnson"}},
  };
  c.expect(bench.size() == expected.size(), "fixture benchmark has six questions");
  for (std::size_t i = 0; i < bench.size() && i < expected.size(); ++i) {
    c.expect(bench[i].id == expected[i].first, "benchmark order at " + bench[i].id);
    const auto r = answer_question(fixture_graph(), bench[i].question, model);
    c.expect(r.answers == expected[i].second,
             bench[i].id + " answered " + join(r.answers) + ", expected " + join(expected[i].second));
  }
  const auto report = evaluate(fixture_graph(), bench, model);
  c.expect(report.aggregate.f1 == 1.0, "aggregate f1 " + std::to_string(report.aggregate.f1));
  const double s = seconds_since(t0);
  c.expect(s < 5.0, "runtime " + std::to_string(s) + " s");
  detail = "f1=" + std::to_string(report.aggregate.f1) + " runtime=" + std::to_string(s) + "s";
}

void president_when_shot(Check& c, std::string& detail) {
  const auto& g = fixture_graph();
  const std::string q = "Who was the president of the U.S. when John Lennon was shot?";
  const auto cands = generate_candidates(make_context(g, q));
  bool found = false;
  for (const auto& cand : cands) {
    for (const auto& f : cand.graph.filters()) {
      const auto* ref = std::get_if<NodeId>(&f.reference);
      if (f.predicate != ComparisonPredicate::kOverlaps || !ref) continue;
      // Both sides must be time variables: the time of a statement, or the
      // value of a temporal attribute in triple or statement form.
      auto is_time_var = [&](NodeId n) {
        if (cand.graph.nodes()[n].kind != NodeKind::kVariable) return false;
        for (const auto& e : cand.graph.edges()) {
          if (e.to != n) continue;
          if (e.kind == EdgeKind::kTime) return true;
          const bool attribute = e.kind == EdgeKind::kTriple || e.kind == EdgeKind::kStatementObject;
          if (attribute && g.predicate(e.predicate).flags.temporal()) return true;
        }
        return false;
      };
      if (is_time_var(*ref) && is_time_var(f.subject) &&
          execute(cand.graph, g) == AnswerSet{"Jimmy_Carter"}) {
        found = true;
        detail = serialize(cand.graph, g, SerializationMode::kDebug);
      }
    }
  }
  c.expect(found, "no OVERLAPS candidate over two time variables executing to {Jimmy_Carter}");
  const auto r = answer_question(g, q, train_on("fixture_train.jsonl"));
  c.expect(r.answers == AnswerSet{"Jimmy_Carter"}, "pipeline answered " + join(r.answers));
}

void allen_oracle(Check& c, std::string& detail) {
  const auto t0 = Clock::now();
  int pairs = 0, agree = 0;
  for (int a = 0; a <= 5; ++a) {
    for (int b = a + 1; b <= 5; ++b) {
      for (int x = 0; x <= 5; ++x) {
        for (int y = x + 1; y <= 5; ++y) {
          ++pairs;
          if (testing::count_holding_relations(a, b, x, y) != 1) {
            c.expect(false, "oracle is not a partition");
            continue;
          }
          agree += allen_relation(a, b, x, y) == testing::allen_oracle(a, b, x, y);
        }
      }
    }
  }
  const double s = seconds_since(t0);
  c.expect(agree == pairs, std::to_string(pairs - agree) + " disagreements");
  c.expect(s < 1.0, "took " + std::to_string(s) + " s");
  detail = std::to_string(agree) + "/" + std::to_string(pairs) + " pairs";
}

void metric_conventions(Check& c, std::string& detail) {
  const Scores empty = f1_score({}, {"a"});
  c.expect(empty.precision == 1.0 && empty.recall == 0.0 && empty.f1 == 0.0,
           "empty prediction scores");
  // Hand-computed: f1 = 1, 2/3, 0, 0, 2/3; precision = 1, 1/2, 1, 0, 1;
  // recall = 1, 1, 0, 0, 1/2.
  struct Toy {
    AnswerSet predicted, gold;
  };
  const std::vector<Toy> toys = {
      {{"a"}, {"a"}}, {{"a", "b"}, {"a"}}, {{}, {"a"}}, {{"b"}, {"a"}}, {{"a"}, {"a", "b"}},
  };
  std::vector<QuestionReport> reports;
  for (std::size_t i = 0; i < toys.size(); ++i) {
    const BenchmarkQuestion q{"t" + std::to_string(i), "toy", toys[i].gold};
    reports.push_back(score_question(q, toys[i].predicted,
                                     select_answer(toys[i].predicted, AnswerSelection::kSmallest, 0),
                                     "toy"));
  }
  const double two_thirds = 2.0 / 3.0;
  const double f1s[] = {1.0, two_thirds, 0.0, 0.0, two_thirds};
  for (std::size_t i = 0; i < 5; ++i) {
    c.expect(std::abs(reports[i].f1 - f1s[i]) < 1e-15, "toy " + std::to_string(i) + " f1");
  }
  double mean = 0.0;
  for (const auto& r : reports) mean += r.f1;
  mean /= 5.0;
  const auto agg = aggregate(reports);
  c.expect(agg.f1 == mean, "aggregate f1 is not the per-question mean");
  c.expect(std::abs(agg.f1 - 7.0 / 15.0) < 1e-15, "aggregate f1 differs from 7/15");
  c.expect(agg.precision == 0.7, "aggregate precision " + std::to_string(agg.precision));
  c.expect(agg.recall == 0.5, "aggregate recall " + std::to_string(agg.recall));
  c.expect(agg.hit_at_1 == 0.6, "aggregate hit@1 " + std::to_string(agg.hit_at_1));
  c.expect(agg.count == 5, "count");
  detail = "f1=" + std::to_string(agg.f1);
}

void ablation(Check& c, std::string& detail) {
  const ScorerModel model = train_on("fixture_train.jsonl");
  const auto bench = fixture_benchmark();
  const double full = evaluate(fixture_graph(), bench, model).aggregate.f1;
  PipelineOptions ablated;
  for (auto s : parse_structure_list("4,5,6")) ablated.grounding.disable(s);
  const double without = evaluate(fixture_graph(), bench, model, ablated).aggregate.f1;
  c.expect(without < full, "ablated f1 " + std::to_string(without) + " not below " + std::to_string(full));
  detail = "full=" + std::to_string(full) + " without IS-4..6=" + std::to_string(without);
}

TrainingQuestion pool(const std::string& id, int pos, int conf, int irr) {
  TrainingQuestion q{id, "toy question " + id, {"g"}, {}};
  int k = 0;
  auto add = [&](AnswerSet a) {
    q.candidates.push_back({id + "#" + std::to_string(k++), {Structure::kBasic}, std::move(a)});
  };
  for (int i = 0; i < pos; ++i) add({"g"});
  for (int i = 0; i < conf; ++i) add({"g", "c" + std::to_string(i)});
  for (int i = 0; i < irr; ++i) add({"i" + std::to_string(i)});
  return q;
}

void sampling_policy(Check& c, std::string& detail) {
  auto counts = [](const TrainingSet& s) {
    return std::array<std::size_t, 3>{s.count(ExampleLabel::kPositive),
                                      s.count(ExampleLabel::kConfusing),
                                      s.count(ExampleLabel::kIrrelevant)};
  };
  // Both pools suffice: 1 positive draws 10 + 10.
  const auto even = build_training_set({pool("a", 1, 30, 30)});
  c.expect(counts(even) == std::array<std::size_t, 3>{1, 10, 10}, "1:20 with even split");
  // Confusing pool short: 3 confusing, 17 irrelevant.
  const auto short_c = build_training_set({pool("b", 1, 3, 40)});
  c.expect(counts(short_c) == std::array<std::size_t, 3>{1, 3, 17}, "back-fill from irrelevant");
  // Two positives double the negatives.
  const auto two = build_training_set({pool("c", 2, 50, 50)});
  c.expect(counts(two) == std::array<std::size_t, 3>{2, 20, 20}, "ratio scales with positives");
  // A question with no overlapping candidate is skipped.
  const auto skipped = build_training_set({pool("d", 0, 0, 10)});
  c.expect(skipped.examples.empty() && skipped.skipped == std::vector<std::string>{"d"}, "skip");

  // Partition invariants over a mixed pool, with every candidate kept.
  const auto all = build_training_set({pool("e", 3, 4, 5)}, {100, SamplingMode::kFull, 0});
  c.expect(counts(all) == std::array<std::size_t, 3>{3, 4, 5}, "exhaustive draw keeps all");
  std::set<std::string> seen;
  for (const auto& e : all.examples) {
    c.expect(seen.insert(e.serialization).second, "duplicate example " + e.serialization);
    const bool pos = e.f1 == 1.0;
    const bool conf = !pos && e.intersects_gold;
    const bool irr = !pos && !e.intersects_gold;
    c.expect((e.label == ExampleLabel::kPositive) == pos &&
                 (e.label == ExampleLabel::kConfusing) == conf &&
                 (e.label == ExampleLabel::kIrrelevant) == irr,
             "label of " + e.serialization);
  }
  detail = "1:" + std::to_string(even.count(ExampleLabel::kConfusing) +
                                 even.count(ExampleLabel::kIrrelevant)) +
           " (" + std::to_string(even.count(ExampleLabel::kConfusing)) + " confusing / " +
           std::to_string(even.count(ExampleLabel::kIrrelevant)) + " irrelevant)";
}

void sampling_direction(Check& c, std::string& detail) {
  const auto bench = fixture_benchmark();
  auto accuracy = [&](SamplingMode mode) {
    SamplingOptions o;
    o.mode = mode;
    o.seed = 1;
    return evaluate(fixture_graph(), bench, train_on("fixture_train.jsonl", o)).aggregate.hit_at_1;
  };
  const double full = accuracy(SamplingMode::kFull);
  const double no_irr = accuracy(SamplingMode::kNoIrrelevant);
  c.expect(no_irr <= full, "no-irrelevant " + std::to_string(no_irr) + " above full " + std::to_string(full));
  c.expect(accuracy(SamplingMode::kNoIrrelevant) == no_irr, "no-irrelevant run is not repeatable");
  c.expect(accuracy(SamplingMode::kFull) == full, "full run is not repeatable");
  detail = "full=" + std::to_string(full) + " no-irrelevant=" + std::to_string(no_irr);
}

void pattern_oracle(Check& c, std::string& detail) {
  testing::CaseGenerator gen(9);
  int agree = 0, nonempty = 0, filtered = 0;
  for (int i = 0; i < 100; ++i) {
    const auto tc = gen.next(50);
    c.expect(tc.graph.statement_count() <= 50 && tc.query.edges().size() <= 3, "case bounds");
    const auto got = execute(tc.query, tc.graph);
    const auto want = testing::PatternOracle(tc.graph).run(tc.query);
    if (got == want) ++agree;
    else c.expect(false, "case " + std::to_string(i) + ": " + serialize(tc.query, tc.graph, SerializationMode::kDebug));
    nonempty += !want.empty();
    filtered += !tc.query.filters().empty();
  }
  detail = std::to_string(agree) + "/100 agree (" + std::to_string(nonempty) + " nonempty, " +
           std::to_string(filtered) + " with filters)";
}

void determinism(Check& c, std::string& detail) {
#ifdef TEMPQ_CLI
  const std::string cli = TEMPQ_CLI;
  const std::string graph = data_path("fixture_kg.json").string();
  const std::string bench = data_path("fixture_benchmark.jsonl").string();
  const std::string train = data_path("fixture_train.jsonl").string();
  const auto dir = std::filesystem::temp_directory_path() / "tempq_acceptance";
  std::filesystem::create_directories(dir);
  const std::string model = (dir / "model.json").string();
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };

  const std::vector<std::vector<std::string>> commands = {
      {"train", "--graph", graph, "--benchmark", train, "--seed", "1", "-o", model},
      {"train", "--json", "--graph", graph, "--benchmark", train, "--sampling-mode", "random",
       "--seed", "3", "-o", model},
      {"answer", "--graph", graph, "--model", model, "Who became the president after J.F. Kennedy was shot?"},
      {"answer", "--json", "--graph", graph, "--seeded-answer", "--seed", "4",
       "Who was the president of the U.S. when John Lennon was shot?"},
      {"answer", "--graph", graph, "Colorless green ideas sleep furiously?"},
      {"trace", "--graph", graph, "--model", model, "Where was John Lennon standing when he was shot?"},
      {"evaluate", "--graph", graph, "--model", model, "--benchmark", bench},
      {"evaluate", "--json", "--graph", graph, "--disable-is", "4,5,6", "--benchmark", bench},
  };
  int identical = 0;
  for (const auto& args : commands) {
    const auto first = testing::run(cli, args);
    const std::string model_first = args[0] == "train" ? slurp(model) : "";
    const auto second = testing::run(cli, args);
    const std::string model_second = args[0] == "train" ? slurp(model) : "";
    const bool same = first.status == second.status && first.out == second.out &&
                      model_first == model_second && !first.out.empty();
    c.expect(same, "tempq " + args[0] + " output differs between runs");
    c.expect(first.status == 0 || first.status == 2, "tempq " + args[0] + " failed");
    identical += same;
  }
  detail = std::to_string(identical) + "/" + std::to_string(commands.size()) + " commands identical";
#else
  c.expect(false, "built without the command-line tool");
  detail = "";
#endif
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&, std::string&)>>> criteria = {
      {"worked examples end to end", worked_examples},
      {"president when Lennon was shot: OVERLAPS joins two times", president_when_shot},
      {"Allen relation oracle", allen_oracle},
      {"metric conventions", metric_conventions},
      {"ablation of IS-4..IS-6 lowers f1", ablation},
      {"negative sampling policy", sampling_policy},
      {"sampling strategy direction", sampling_direction},
      {"graph pattern oracle", pattern_oracle},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    std::string detail;
    try {
      criteria[i].second(c, detail);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += !ok;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << i + 1 << ": " << criteria[i].first;
    if (!detail.empty() && detail.find('\n') == std::string::npos) std::cout << " (" << detail << ")";
    std::cout << "\n";
    for (const auto& f : c.failures) std::cout << "       " << f << "\n";
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
