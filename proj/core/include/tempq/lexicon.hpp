#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tempq/time.hpp"

namespace tempq {

enum class OrdinalDirection { kFromFirst, kFromLast };

std::string_view to_string(OrdinalDirection d);

// Closed-class words, event triggers, ordinals and signals used by the
// rule-based annotator. Loaded from JSON so it can be edited without a rebuild.
struct Lexicon {
  struct SignalEntry {
    TimeMLRelType with_event;
    TimeMLRelType with_timex;
    // Prepositions such as "in" only act as signals before a time expression
    // or a named event.
    bool needs_anchor = false;
  };
  struct OrdinalEntry {
    int rank = 1;
    OrdinalDirection direction = OrdinalDirection::kFromFirst;
  };

  std::set<std::string> determiners;
  std::set<std::string> auxiliaries;
  std::set<std::string> pronouns;
  std::set<std::string> prepositions;
  std::set<std::string> conjunctions;
  std::set<std::string> interrogatives;
  std::map<std::string, std::string> verbs;           // surface form -> lemma
  std::map<std::string, std::string> eventive_nouns;  // surface form -> lemma
  std::map<std::string, OrdinalEntry> ordinals;
  std::map<std::string, SignalEntry> signals;
  std::map<std::string, unsigned> months;

  static const Lexicon& defaults();
  static Lexicon from_json(std::string_view json_text);
  static Lexicon from_file(const std::filesystem::path& path);

  bool is_closed_class(const std::string& lower) const;
};

// Lexical resources for the candidate scorer.
struct RankerLexicon {
  std::set<std::string> stopwords;
  // Expansions that apply only to a question-initial interrogative.
  std::map<std::string, std::vector<std::string>> interrogatives;
  std::map<std::string, std::vector<std::string>> terms;

  static const RankerLexicon& defaults();
  static RankerLexicon from_json(std::string_view json_text);

  // Lowercased words of `s` without stopwords.
  std::vector<std::string> content_words(std::string_view s) const;
  // Content words of a question plus synonym expansions.
  std::set<std::string> question_terms(std::string_view question) const;
};

namespace resources {
std::string_view default_lexicon_json();
std::string_view default_synonyms_json();
}  // namespace resources

}  // namespace tempq
