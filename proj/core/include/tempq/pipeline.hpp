#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tempq/grounding.hpp"
#include "tempq/ranker.hpp"

namespace tempq {

enum class AnswerSelection {
  kSmallest,  // lexicographically smallest answer key
  kSeeded,    // uniform pick driven by the seed
};

struct PipelineOptions {
  GroundingConfig grounding;
  AnswerSelection selection = AnswerSelection::kSmallest;
  std::uint64_t seed = 0;
};

struct AnswerResult {
  GroundingContext context;
  std::vector<ScoredCandidate> ranked;
  // Answers of the top-ranked query; empty when nothing grounded.
  AnswerSet answers;
  std::optional<std::string> selected_answer;
  std::string selected_query;  // DEBUG serialization of the head

  bool answerable() const { return !ranked.empty(); }
};

// annotate -> evoke -> ground -> rank -> execute
AnswerResult answer_question(const KnowledgeGraph& g, std::string_view question,
                             const ScorerModel& model, const PipelineOptions& options = {},
                             const Lexicon& lexicon = Lexicon::defaults(),
                             const RankerLexicon& terms = RankerLexicon::defaults());

std::optional<std::string> select_answer(const AnswerSet& answers, AnswerSelection selection,
                                         std::uint64_t seed);

// Annotation, constraints, templates and every candidate with provenance,
// slot fills and score.
std::string format_trace(const AnswerResult& result, const KnowledgeGraph& g);

}  // namespace tempq
