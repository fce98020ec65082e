#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tempq/error.hpp"
#include "tempq/evaluation.hpp"
#include "tempq/knowledge_graph.hpp"
#include "tempq/pipeline.hpp"
#include "tempq/ranker.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnanswerable = 2;

struct CommonArgs {
  std::string graph;
  std::string model;
  std::string config;
  std::string disable_is;
  std::uint64_t seed = 0;
  bool seeded_answer = false;
  bool json = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--graph", args.graph, "Knowledge graph JSON file")->required();
  cmd->add_option("--model", args.model, "Scorer model JSON (untrained scorer when omitted)");
  cmd->add_option("--config", args.config, "Grounding configuration JSON");
  cmd->add_option("--disable-is", args.disable_is,
                  "Comma-separated interpretation structures to disable, e.g. 4,5,6");
  cmd->add_option("--seed", args.seed, "Seed for sampling and seeded answer selection");
  cmd->add_flag("--seeded-answer", args.seeded_answer,
                "Pick the Hit@1 answer with the seed instead of the smallest id");
}

tempq::PipelineOptions pipeline_options(const CommonArgs& args) {
  tempq::PipelineOptions o;
  if (!args.config.empty()) o.grounding = tempq::GroundingConfig::from_file(args.config);
  if (!args.disable_is.empty()) {
    for (auto s : tempq::parse_structure_list(args.disable_is)) o.grounding.disable(s);
  }
  o.seed = args.seed;
  o.selection = args.seeded_answer ? tempq::AnswerSelection::kSeeded
                                   : tempq::AnswerSelection::kSmallest;
  return o;
}

tempq::ScorerModel load_model(const CommonArgs& args) {
  return args.model.empty() ? tempq::ScorerModel::untrained()
                            : tempq::ScorerModel::load(args.model);
}

int cmd_answer(const CommonArgs& args, const std::string& question) {
  const auto g = tempq::KnowledgeGraph::load(args.graph);
  const auto r = tempq::answer_question(g, question, load_model(args), pipeline_options(args));
  if (args.json) {
    nlohmann::json out{{"question", question},
                       {"answerable", r.answerable()},
                       {"answers", r.answers},
                       {"selected_answer",
                        r.selected_answer ? nlohmann::json(*r.selected_answer) : nlohmann::json()},
                       {"query", r.answerable() ? nlohmann::json(r.selected_query)
                                                : nlohmann::json()}};
    std::cout << out.dump(2) << "\n";
  } else if (!r.answerable()) {
    std::cout << "unanswerable\n";
  } else {
    for (const auto& a : r.answers) std::cout << a << "\n";
    std::cout << "\n" << r.selected_query << "\n";
  }
  return r.answerable() ? kExitOk : kExitUnanswerable;
}

int cmd_trace(const CommonArgs& args, const std::string& question) {
  const auto g = tempq::KnowledgeGraph::load(args.graph);
  const auto r = tempq::answer_question(g, question, load_model(args), pipeline_options(args));
  std::cout << tempq::format_trace(r, g);
  return r.answerable() ? kExitOk : kExitUnanswerable;
}

int cmd_evaluate(const CommonArgs& args, const std::string& benchmark) {
  const auto g = tempq::KnowledgeGraph::load(args.graph);
  const auto questions = tempq::load_benchmark(benchmark);
  const auto report = tempq::evaluate(g, questions, load_model(args), pipeline_options(args));
  std::cout << (args.json ? tempq::to_json(report) : tempq::to_table(report));
  return kExitOk;
}

int cmd_train(const CommonArgs& args, const std::string& benchmark, const std::string& output,
              const std::string& mode, std::size_t negatives) {
  const auto g = tempq::KnowledgeGraph::load(args.graph);
  const auto questions = tempq::load_benchmark(benchmark);
  if (questions.empty()) throw tempq::UsageError("training benchmark is empty");
  const auto pool = tempq::training_pool(g, questions, pipeline_options(args));
  tempq::SamplingOptions sampling;
  sampling.mode = tempq::sampling_mode_from_string(mode);
  sampling.negatives_per_positive = negatives;
  sampling.seed = args.seed;
  const auto set = tempq::build_training_set(pool, sampling);
  for (const auto& id : set.skipped) {
    std::cerr << "tempq: skipping " << id << ": no candidate overlaps the gold answers\n";
  }
  if (set.count(tempq::ExampleLabel::kPositive) == 0) {
    throw tempq::UsageError("no trainable questions in " + benchmark);
  }
  const auto model = tempq::train(set.examples);
  model.save(output);
  using tempq::ExampleLabel;
  if (args.json) {
    nlohmann::json out{{"model", output},
                       {"sampling_mode", std::string(tempq::to_string(sampling.mode))},
                       {"POSITIVE", set.count(ExampleLabel::kPositive)},
                       {"CONFUSING_NEG", set.count(ExampleLabel::kConfusing)},
                       {"IRRELEVANT_NEG", set.count(ExampleLabel::kIrrelevant)},
                       {"skipped", set.skipped}};
    std::cout << out.dump(2) << "\n";
  } else {
    for (auto l : {ExampleLabel::kPositive, ExampleLabel::kConfusing, ExampleLabel::kIrrelevant}) {
      std::cout << tempq::to_string(l) << " " << set.count(l) << "\n";
    }
    std::cout << "skipped " << set.skipped.size() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal question answering over a qualifier-aware knowledge graph"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string question, benchmark, output, mode = "full";
  std::size_t negatives = 20;

  auto* answer = app.add_subcommand("answer", "Answer one question");
  add_common(answer, args);
  answer->add_option("question", question, "Question text")->required();
  answer->add_flag("--json", args.json, "Print JSON");

  auto* trace = app.add_subcommand("trace", "Show annotation, constraints and ranked candidates");
  add_common(trace, args);
  trace->add_option("question", question, "Question text")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score a JSON-lines benchmark");
  add_common(evaluate, args);
  evaluate->add_option("--benchmark", benchmark, "Benchmark JSON-lines file")->required();
  evaluate->add_flag("--json", args.json, "Print the JSON report instead of a table");

  auto* train = app.add_subcommand("train", "Fit a scorer model on a benchmark");
  add_common(train, args);
  train->add_option("--benchmark", benchmark, "Benchmark JSON-lines file")->required();
  train->add_option("--output,-o", output, "Where to write the model")->required();
  train->add_option("--sampling-mode", mode, "full, no-confusing, no-irrelevant or random");
  train->add_option("--negatives-per-positive", negatives, "Negatives drawn per positive");
  train->add_flag("--json", args.json, "Print class counts as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*answer) return cmd_answer(args, question);
    if (*trace) return cmd_trace(args, question);
    if (*evaluate) return cmd_evaluate(args, benchmark);
    if (*train) return cmd_train(args, benchmark, output, mode, negatives);
  } catch (const tempq::Error& e) {
    std::cerr << "tempq: error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "tempq: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
