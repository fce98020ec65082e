#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tempq/lexicon.hpp"
#include "tempq/text.hpp"
#include "tempq/time.hpp"

namespace tempq {

enum class CoarseTag {
  kWord,
  kProperNoun,
  kNumber,
  kDeterminer,
  kAuxiliary,
  kPronoun,
  kPreposition,
  kConjunction,
  kInterrogative,
  kVerb,
  kEventNoun,
  kPunctuation,
};

std::string_view to_string(CoarseTag t);

struct TaggedToken {
  text::Token token;
  CoarseTag tag = CoarseTag::kWord;
};

// Half-open range of token indices.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

enum class EventKind { kNominal, kPredicative };
std::string_view to_string(EventKind k);

struct EventMention {
  TokenSpan span;
  EventKind kind = EventKind::kPredicative;
  std::string lemma;
  std::string text;
  // Capitalized description that may itself be a graph entity
  // ("the 46th Tony Awards").
  bool named = false;
};

struct TimexMention {
  TokenSpan span;
  TimeValue value;
  std::string text;
};

struct OrdinalMention {
  TokenSpan span;
  int rank = 1;
  OrdinalDirection direction = OrdinalDirection::kFromFirst;
  std::string text;
  std::optional<std::size_t> event;  // index into events
};

struct SignalMention {
  TokenSpan span;
  std::string lexeme;
};

enum class MentionKind { kEvent, kTimex };

struct MentionRef {
  MentionKind kind = MentionKind::kEvent;
  std::size_t index = 0;

  friend bool operator==(const MentionRef&, const MentionRef&) = default;
};

struct TLink {
  TimeMLRelType reltype = TimeMLRelType::kSimultaneous;
  std::size_t target = 0;  // event index
  MentionRef related;
  std::size_t signal = 0;
};

struct AnnotationDoc {
  std::string question;
  std::vector<TaggedToken> tokens;
  std::vector<EventMention> events;
  std::vector<TimexMention> timexes;
  std::vector<OrdinalMention> ordinals;
  std::vector<SignalMention> signals;
  std::vector<TLink> tlinks;
  // Set when the question opens with "when" or "what year".
  bool asks_time = false;

  // Byte range of a token span in the question.
  std::size_t char_begin(TokenSpan s) const;
  std::size_t char_end(TokenSpan s) const;
  TokenSpan span_of(MentionRef r) const;
  std::string text_of(MentionRef r) const;

  // Inline TimeML-style markup of the question followed by TLINK elements.
  std::string to_timeml() const;
};

// Rule-based annotation; a pure function of the question and the lexicon.
AnnotationDoc annotate(std::string_view question, const Lexicon& lexicon = Lexicon::defaults());

// Relation type evoked by a signal toward an event or a time expression.
// Throws UsageError for lexemes absent from the lexicon.
TimeMLRelType signal_to_reltype(std::string_view lexeme, MentionKind related_kind,
                                const Lexicon& lexicon = Lexicon::defaults());

}  // namespace tempq
