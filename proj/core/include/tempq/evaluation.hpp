#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tempq/pipeline.hpp"
#include "tempq/ranker.hpp"

namespace tempq {

struct BenchmarkQuestion {
  std::string id;
  std::string question;
  AnswerSet answers;
};

// JSON lines: {"id": "...", "question": "...", "answers": ["...", ...]}.
// Blank lines are skipped. Throws ParseError naming the offending line.
std::vector<BenchmarkQuestion> parse_benchmark(std::string_view text);
std::vector<BenchmarkQuestion> load_benchmark(const std::filesystem::path& path);

struct QuestionReport {
  std::string id;
  std::string question;
  double hit_at_1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::string selected_query;  // empty when unanswerable
  std::optional<std::string> selected_answer;
  AnswerSet answers;
};

struct AggregateScores {
  double hit_at_1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t count = 0;
};

struct EvalReport {
  std::vector<QuestionReport> questions;
  AggregateScores aggregate;
};

// Scores one prediction. Unanswered questions count precision 1, recall 0.
QuestionReport score_question(const BenchmarkQuestion& q, const AnswerSet& predicted,
                              const std::optional<std::string>& selected_answer,
                              std::string selected_query);

// Per-metric mean over questions.
AggregateScores aggregate(const std::vector<QuestionReport>& questions);

EvalReport evaluate(const KnowledgeGraph& g, const std::vector<BenchmarkQuestion>& benchmark,
                    const ScorerModel& model, const PipelineOptions& options = {});

std::string to_json(const EvalReport& report);
std::string to_table(const EvalReport& report);

// Candidate pools for training, one entry per benchmark question.
std::vector<TrainingQuestion> training_pool(const KnowledgeGraph& g,
                                            const std::vector<BenchmarkQuestion>& benchmark,
                                            const PipelineOptions& options = {});

}  // namespace tempq
