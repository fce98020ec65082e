#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "paths.hpp"
#include "process.hpp"

namespace {

using tempq::testing::data_path;
using tempq::testing::run;

const std::string kCli = TEMPQ_CLI;

std::string graph() { return data_path("fixture_kg.json").string(); }
std::string model() { return data_path("fixture_model.json").string(); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tempq_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

TEST(Cli, AnswerPrintsAnswersAndQuery) {
  const auto r = run(kCli, {"answer", "--graph", graph(), "--model", model(),
                            "Where was John Lennon standing when he was shot?"});
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("The_Dakota\n", 0), 0u) << r.out;
}

TEST(Cli, AnswerJson) {
  const auto r = run(kCli, {"answer", "--json", "--graph", graph(), "--model", model(),
                            "Who became the president after J.F. Kennedy was shot?"});
  ASSERT_EQ(r.status, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["answers"], nlohmann::json::array({"Lyndon_B._Johnson"}));
  EXPECT_EQ(doc["selected_answer"], "Lyndon_B._Johnson");
  EXPECT_TRUE(doc["answerable"].get<bool>());
}

TEST(Cli, UnanswerableExitStatus) {
  const auto r = run(kCli, {"answer", "--graph", graph(), "Colorless green ideas sleep furiously?"});
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(r.out, "unanswerable\n");
}

TEST(Cli, ErrorsExitOne) {
  EXPECT_EQ(run(kCli, {"answer", "--graph", "/nonexistent.json", "Who?"}).status, 1);
  EXPECT_EQ(run(kCli, {"answer", "--graph", graph(), "--disable-is", "9", "Who?"}).status, 1);
  EXPECT_EQ(run(kCli, {"frobnicate"}).status, 1);
  EXPECT_EQ(run(kCli, {"evaluate", "--graph", graph()}).status, 1);

  const auto bad = scratch("bad.jsonl");
  std::ofstream(bad) << "{\"id\": \"a\", \"question\": \"Q?\", \"answers\": [\"x\"]}\nnot json\n";
  EXPECT_EQ(run(kCli, {"evaluate", "--graph", graph(), "--benchmark", bad.string()}).status, 1);
}

TEST(Cli, TraceShowsConstraints) {
  const auto r = run(kCli, {"trace", "--graph", graph(), "--model", model(),
                            "Where was John Lennon standing when he was shot?"});
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find(R"(Relation(SIMULTANEOUS, "standing", "shot"))"), std::string::npos);
}

TEST(Cli, EvaluateJsonReport) {
  const auto r = run(kCli, {"evaluate", "--json", "--graph", graph(), "--model", model(),
                            "--benchmark", data_path("fixture_benchmark.jsonl").string()});
  ASSERT_EQ(r.status, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["aggregate"]["f1"], 1.0);
  EXPECT_EQ(doc["questions"].size(), 6u);
}

TEST(Cli, EvaluateUnanswerableBenchmark) {
  const auto bench = scratch("one.jsonl");
  std::ofstream(bench) << "{\"id\": \"u\", \"question\": \"Colorless green ideas sleep furiously?\", "
                          "\"answers\": [\"x\"]}\n";
  const auto r = run(kCli, {"evaluate", "--json", "--graph", graph(), "--benchmark", bench.string()});
  ASSERT_EQ(r.status, 0);
  const auto agg = nlohmann::json::parse(r.out)["aggregate"];
  EXPECT_EQ(agg["precision"], 1.0);
  EXPECT_EQ(agg["recall"], 0.0);
  EXPECT_EQ(agg["f1"], 0.0);
}

TEST(Cli, TrainCountsAndModes) {
  const auto out = scratch("no_irrelevant.json");
  const auto r = run(kCli, {"train", "--graph", graph(), "--benchmark",
                            data_path("fixture_train.jsonl").string(), "--sampling-mode",
                            "no-irrelevant", "-o", out.string()});
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("IRRELEVANT_NEG 0\n"), std::string::npos) << r.out;
  EXPECT_TRUE(std::filesystem::exists(out));
  EXPECT_EQ(run(kCli, {"train", "--graph", graph(), "--benchmark",
                       data_path("fixture_train.jsonl").string(), "--sampling-mode", "most",
                       "-o", out.string()})
                .status,
            1);
}

TEST(Cli, TrainWithSeedIsReproducible) {
  const auto a = scratch("seed_a.json"), b = scratch("seed_b.json");
  for (const auto& p : {a, b}) {
    ASSERT_EQ(run(kCli, {"train", "--graph", graph(), "--benchmark",
                         data_path("fixture_train.jsonl").string(), "--seed", "1", "-o", p.string()})
                  .status,
              0);
  }
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Cli, DefaultTrainingReproducesShippedModel) {
  const auto out = scratch("default.json");
  ASSERT_EQ(run(kCli, {"train", "--graph", graph(), "--benchmark",
                       data_path("fixture_train.jsonl").string(), "-o", out.string()})
                .status,
            0);
  EXPECT_EQ(slurp(out), slurp(model()));
}

}  // namespace
