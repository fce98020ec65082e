#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tempq/grounding.hpp"
#include "tempq/lexicon.hpp"
#include "tempq/query_graph.hpp"

namespace tempq {

// Linear scorer over lexical-overlap features between the question and a
// RANKING serialization, plus one bias per interpretation structure.
class ScorerModel {
 public:
  static const std::vector<std::string>& feature_names();

  // Untrained models score by the fraction of question terms the
  // serialization covers.
  static ScorerModel untrained() { return ScorerModel(); }

  static ScorerModel from_json(std::string_view json_text);
  static ScorerModel load(const std::filesystem::path& path);
  std::string to_json() const;
  void save(const std::filesystem::path& path) const;

  bool trained() const { return trained_; }
  const std::map<std::string, double>& weights() const { return weights_; }
  void set_weights(std::map<std::string, double> w);

  friend bool operator==(const ScorerModel&, const ScorerModel&) = default;

 private:
  bool trained_ = false;
  std::map<std::string, double> weights_;
};

// Feature values by name. `structures` lists the provenance of the candidate.
std::map<std::string, double> extract_features(std::string_view question,
                                               std::string_view serialization,
                                               const std::vector<Structure>& structures,
                                               const RankerLexicon& terms = RankerLexicon::defaults());

double score(const ScorerModel& model, std::string_view question, std::string_view serialization,
             const std::vector<Structure>& structures = {},
             const RankerLexicon& terms = RankerLexicon::defaults());

struct ScoredCandidate {
  Candidate candidate;
  std::string serialization;  // RANKING mode
  double score = 0.0;
  AnswerSet answers;
};

std::vector<Structure> structures_of(const Candidate& c);

// Descending score; ties go to the lexicographically smaller serialization.
std::vector<ScoredCandidate> rank(const ScorerModel& model, std::string_view question,
                                  std::vector<Candidate> candidates, const KnowledgeGraph& g,
                                  const RankerLexicon& terms = RankerLexicon::defaults());

enum class ExampleLabel { kPositive, kConfusing, kIrrelevant };
std::string_view to_string(ExampleLabel l);

enum class SamplingMode { kFull, kNoConfusing, kNoIrrelevant, kRandom };
std::string_view to_string(SamplingMode m);
// Throws ParseError for unknown names.
SamplingMode sampling_mode_from_string(std::string_view s);

struct PoolCandidate {
  std::string serialization;
  std::vector<Structure> structures;
  AnswerSet answers;
};

struct TrainingQuestion {
  std::string id;
  std::string question;
  AnswerSet gold;
  std::vector<PoolCandidate> candidates;
};

struct TrainingExample {
  std::string question;
  std::string serialization;
  std::vector<Structure> structures;
  ExampleLabel label = ExampleLabel::kPositive;
  double f1 = 0.0;
  bool intersects_gold = false;
};

struct SamplingOptions {
  std::size_t negatives_per_positive = 20;
  SamplingMode mode = SamplingMode::kFull;
  std::uint64_t seed = 0;
};

struct TrainingSet {
  std::vector<TrainingExample> examples;
  std::vector<std::string> skipped;  // ids of questions without a positive

  std::size_t count(ExampleLabel l) const;
};

// Positives are every candidate with the question's maximal f1 (> 0). Each
// positive draws `negatives_per_positive` negatives, split evenly between
// confusing (0 < f1 < max) and irrelevant (disjoint from gold) pools with the
// shortfall of one pool taken from the other.
TrainingSet build_training_set(const std::vector<TrainingQuestion>& questions,
                               const SamplingOptions& options = {});

struct TrainOptions {
  double learning_rate = 0.05;
  int steps = 200;
};

// Full-batch logistic regression from zero weights. Throws UsageError when
// there is no positive example.
ScorerModel train(const std::vector<TrainingExample>& examples, const TrainOptions& options = {},
                  const RankerLexicon& terms = RankerLexicon::defaults());

}  // namespace tempq
