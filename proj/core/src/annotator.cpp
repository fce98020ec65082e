#include "tempq/annotator.hpp"

#include <algorithm>
#include <map>

#include "tempq/error.hpp"

namespace tempq {

namespace {

bool is_year_token(const text::Token& t) {
  if (t.text.size() != 4 || !text::is_number(t.text)) return false;
  const int y = std::stoi(t.text);
  return y >= 1000 && y <= 2999;
}

std::optional<unsigned> day_number(const text::Token& t) {
  if (t.text.empty() || t.text.size() > 2 || !text::is_number(t.text)) {
    const int r = text::numeric_ordinal(t.text);
    if (r >= 1 && r <= 31) return static_cast<unsigned>(r);
    return std::nullopt;
  }
  const int d = std::stoi(t.text);
  if (d < 1 || d > 31) return std::nullopt;
  return static_cast<unsigned>(d);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Annotator {
 public:
  Annotator(std::string_view question, const Lexicon& lex) : lex_(lex) {
    doc_.question = std::string(question);
  }

  AnnotationDoc run() {
    tag();
    find_interrogative();
    find_timexes();
    find_signals_and_named_events();
    find_events();
    find_ordinals();
    build_tlinks();
    return std::move(doc_);
  }

 private:
  const text::Token& tok(std::size_t i) const { return doc_.tokens[i].token; }
  CoarseTag tag_at(std::size_t i) const { return doc_.tokens[i].tag; }
  std::size_t size() const { return doc_.tokens.size(); }

  std::string span_text(TokenSpan s) const {
    const auto b = doc_.char_begin(s);
    return doc_.question.substr(b, doc_.char_end(s) - b);
  }

  void tag() {
    for (auto& t : text::tokenize(doc_.question)) {
      TaggedToken tt{t, CoarseTag::kWord};
      const std::string& w = t.lower;
      const bool first = doc_.tokens.empty();
      if (!t.word) {
        tt.tag = CoarseTag::kPunctuation;
      } else if (lex_.interrogatives.count(w)) {
        tt.tag = CoarseTag::kInterrogative;
      } else if (lex_.determiners.count(w)) {
        tt.tag = CoarseTag::kDeterminer;
      } else if (lex_.auxiliaries.count(w)) {
        tt.tag = CoarseTag::kAuxiliary;
      } else if (lex_.pronouns.count(w)) {
        tt.tag = CoarseTag::kPronoun;
      } else if (lex_.prepositions.count(w)) {
        tt.tag = CoarseTag::kPreposition;
      } else if (lex_.conjunctions.count(w)) {
        tt.tag = CoarseTag::kConjunction;
      } else if (text::is_number(t.text) || text::numeric_ordinal(t.text) > 0) {
        tt.tag = CoarseTag::kNumber;
      } else if (text::is_capitalized(t.text) && !first) {
        tt.tag = CoarseTag::kProperNoun;
      } else if (lex_.verbs.count(w)) {
        tt.tag = CoarseTag::kVerb;
      } else if (lex_.eventive_nouns.count(w)) {
        tt.tag = CoarseTag::kEventNoun;
      } else if (text::is_capitalized(t.text)) {
        tt.tag = CoarseTag::kProperNoun;
      }
      doc_.tokens.push_back(std::move(tt));
    }
  }

  void find_interrogative() {
    std::size_t i = 0;
    if (i < size() && tok(i).lower == "in") ++i;
    if (i >= size()) return;
    if (tok(i).lower == "when") {
      doc_.asks_time = true;
      interrogative_token_ = i;
    } else if ((tok(i).lower == "what" || tok(i).lower == "which") && i + 1 < size() &&
               (tok(i + 1).lower == "year" || tok(i + 1).lower == "date")) {
      doc_.asks_time = true;
      interrogative_token_ = i;
    }
  }

  bool covered(std::size_t i) const {
    for (const auto& e : doc_.events) {
      if (e.named && i >= e.span.begin && i < e.span.end) return true;
    }
    for (const auto& t : doc_.timexes) {
      if (i >= t.span.begin && i < t.span.end) return true;
    }
    return false;
  }

  void find_timexes() {
    std::size_t i = 0;
    while (i < size()) {
      const auto& t = tok(i);
      auto month_of = [&](std::size_t k) -> std::optional<unsigned> {
        if (k >= size()) return std::nullopt;
        auto it = lex_.months.find(tok(k).lower);
        if (it == lex_.months.end()) return std::nullopt;
        return it->second;
      };
      auto skip_comma = [&](std::size_t k) {
        return (k < size() && tok(k).text == ",") ? k + 1 : k;
      };
      auto add = [&](std::size_t b, std::size_t e, TimeValue v) {
        doc_.timexes.push_back({TokenSpan{b, e}, std::move(v), span_text(TokenSpan{b, e})});
        i = e;
      };

      if (t.text.find('-') != std::string::npos) {
        if (auto v = TimeValue::try_parse(t.text)) {
          add(i, i + 1, *v);
          continue;
        }
      }
      if (auto m = month_of(i)) {
        // "October 7, 1960" / "October 1960"
        std::size_t k = i + 1;
        if (k < size()) {
          if (auto d = day_number(tok(k))) {
            std::size_t y = skip_comma(k + 1);
            if (y < size() && is_year_token(tok(y))) {
              try {
                add(i, y + 1, TimeValue(Granularity::kDay, std::stoi(tok(y).text), *m, *d));
                continue;
              } catch (const Error&) {
              }
            }
          }
          std::size_t y = skip_comma(k);
          if (y < size() && is_year_token(tok(y))) {
            add(i, y + 1, TimeValue(Granularity::kMonth, std::stoi(tok(y).text), *m));
            continue;
          }
        }
      }
      if (auto d = day_number(t)) {
        // "7 October 1960"
        std::size_t k = i + 1;
        if (k < size() && tok(k).lower == "of") ++k;
        if (auto m = month_of(k)) {
          std::size_t y = skip_comma(k + 1);
          if (y < size() && is_year_token(tok(y))) {
            try {
              add(i, y + 1, TimeValue(Granularity::kDay, std::stoi(tok(y).text), *m, *d));
              continue;
            } catch (const Error&) {
            }
          }
        }
      }
      if (is_year_token(t)) {
        add(i, i + 1, TimeValue(Granularity::kYear, std::stoi(t.text)));
        continue;
      }
      ++i;
    }
  }

  bool is_ordinal_token(std::size_t i) const {
    return text::numeric_ordinal(tok(i).text) > 0 || lex_.ordinals.count(tok(i).lower) > 0;
  }

  bool capitalized_word(std::size_t i) const {
    return i < size() && tok(i).word && tag_at(i) == CoarseTag::kProperNoun;
  }

  // A capitalized noun phrase directly after a signal that does not open a
  // clause of its own: "at the 46th Tony Awards?", "during World War II,".
  std::optional<EventMention> named_event_at(std::size_t j) {
    std::size_t start = j;
    while (j < size() && tag_at(j) == CoarseTag::kDeterminer) ++j;
    std::size_t head = j;
    if (j < size() && is_ordinal_token(j) && capitalized_word(j + 1)) ++j;
    if (!capitalized_word(j)) return std::nullopt;
    std::size_t k = j;
    while (k < size()) {
      if (capitalized_word(k)) {
        ++k;
      } else if ((tok(k).lower == "of" || tok(k).lower == "the") && capitalized_word(k + 1)) {
        k += 2;
      } else {
        break;
      }
    }
    if (k < size()) {
      switch (tag_at(k)) {
        case CoarseTag::kPunctuation:
        case CoarseTag::kPreposition:
        case CoarseTag::kConjunction:
        case CoarseTag::kInterrogative:
          break;
        default:
          return std::nullopt;
      }
    }
    EventMention e;
    e.span = TokenSpan{start, k};
    e.kind = EventKind::kNominal;
    e.lemma = text::to_lower(span_text(TokenSpan{head, k}));
    e.text = span_text(e.span);
    e.named = true;
    return e;
  }

  void find_signals_and_named_events() {
    for (std::size_t i = 0; i < size(); ++i) {
      if (interrogative_token_ && *interrogative_token_ == i) continue;
      auto it = lex_.signals.find(tok(i).lower);
      if (it == lex_.signals.end()) continue;
      std::size_t j = i + 1;
      auto named = (j < size()) ? named_event_at(j) : std::nullopt;
      if (it->second.needs_anchor) {
        std::size_t k = j;
        while (k < size() && tag_at(k) == CoarseTag::kDeterminer) ++k;
        const bool timex_anchor =
            std::any_of(doc_.timexes.begin(), doc_.timexes.end(),
                        [&](const TimexMention& t) { return t.span.begin == k; });
        if (!timex_anchor && !named) continue;
      }
      doc_.signals.push_back({TokenSpan{i, i + 1}, tok(i).text});
      if (named) {
        // Time expressions inside the name belong to the event.
        std::erase_if(doc_.timexes, [&](const TimexMention& t) {
          return t.span.begin >= named->span.begin && t.span.end <= named->span.end;
        });
        doc_.events.push_back(std::move(*named));
      }
    }
  }

  void find_events() {
    std::vector<EventMention> found;
    for (std::size_t i = 0; i < size(); ++i) {
      if (covered(i)) continue;
      const auto tg = tag_at(i);
      if (tg != CoarseTag::kVerb && tg != CoarseTag::kEventNoun) continue;
      EventMention e;
      e.span = TokenSpan{i, i + 1};
      e.text = tok(i).text;
      if (tg == CoarseTag::kVerb) {
        e.kind = EventKind::kPredicative;
        e.lemma = lex_.verbs.at(tok(i).lower);
      } else {
        e.kind = EventKind::kNominal;
        e.lemma = lex_.eventive_nouns.at(tok(i).lower);
        // The complement of a verb ("became the president") is part of the
        // verb's event, not a separate one.
        std::size_t k = i;
        while (k > 0 && (tag_at(k - 1) == CoarseTag::kDeterminer || is_ordinal_token(k - 1))) --k;
        if (k < i && k > 0 && tag_at(k - 1) == CoarseTag::kVerb) continue;
      }
      found.push_back(std::move(e));
    }
    for (auto& e : found) doc_.events.push_back(std::move(e));
    std::stable_sort(doc_.events.begin(), doc_.events.end(),
                     [](const EventMention& a, const EventMention& b) {
                       return a.span.begin < b.span.begin;
                     });
  }

  void find_ordinals() {
    for (std::size_t i = 0; i < size(); ++i) {
      if (covered(i) || !is_ordinal_token(i)) continue;
      OrdinalMention o;
      o.span = TokenSpan{i, i + 1};
      o.text = tok(i).text;
      if (const int r = text::numeric_ordinal(tok(i).text); r > 0) {
        o.rank = r;
      } else {
        const auto& entry = lex_.ordinals.at(tok(i).lower);
        o.rank = entry.rank;
        o.direction = entry.direction;
      }
      // "second last", "2nd last"
      if (i + 1 < size() && lex_.ordinals.count(tok(i + 1).lower) &&
          lex_.ordinals.at(tok(i + 1).lower).direction == OrdinalDirection::kFromLast &&
          o.direction == OrdinalDirection::kFromFirst) {
        o.direction = OrdinalDirection::kFromLast;
        o.span.end = i + 2;
        o.text = span_text(o.span);
      }
      o.event = attach(o.span);
      i = o.span.end - 1;
      doc_.ordinals.push_back(std::move(o));
    }
  }

  std::optional<std::size_t> attach(TokenSpan s) const {
    for (std::size_t k = s.end; k < size(); ++k) {
      const auto tg = tag_at(k);
      if (tg != CoarseTag::kWord && tg != CoarseTag::kProperNoun && tg != CoarseTag::kNumber &&
          tg != CoarseTag::kEventNoun) {
        break;
      }
      for (std::size_t e = 0; e < doc_.events.size(); ++e) {
        if (doc_.events[e].span.begin == k && doc_.events[e].kind == EventKind::kNominal) return e;
      }
    }
    std::optional<std::size_t> best;
    std::size_t best_dist = 0;
    for (std::size_t e = 0; e < doc_.events.size(); ++e) {
      const auto& es = doc_.events[e].span;
      const std::size_t dist = es.end <= s.begin ? s.begin - es.end : es.begin - s.end;
      // Events are sorted, so the first of two equidistant events precedes.
      if (!best || dist < best_dist) {
        best = e;
        best_dist = dist;
      }
    }
    return best;
  }

  void build_tlinks() {
    for (std::size_t si = 0; si < doc_.signals.size(); ++si) {
      const auto& sig = doc_.signals[si];
      std::optional<std::size_t> target;
      for (std::size_t e = 0; e < doc_.events.size(); ++e) {
        if (doc_.events[e].span.end <= sig.span.begin) target = e;
      }
      std::optional<MentionRef> related;
      std::size_t related_begin = 0;
      auto consider = [&](MentionKind kind, std::size_t idx, TokenSpan span) {
        if (span.begin < sig.span.end) return;
        if (!related || span.begin < related_begin) {
          related = MentionRef{kind, idx};
          related_begin = span.begin;
        }
      };
      for (std::size_t e = 0; e < doc_.events.size(); ++e) {
        consider(MentionKind::kEvent, e, doc_.events[e].span);
      }
      for (std::size_t t = 0; t < doc_.timexes.size(); ++t) {
        consider(MentionKind::kTimex, t, doc_.timexes[t].span);
      }
      if (!target || !related) continue;
      doc_.tlinks.push_back(
          {signal_to_reltype(sig.lexeme, related->kind, lex_), *target, *related, si});
    }
  }

  const Lexicon& lex_;
  AnnotationDoc doc_;
  std::optional<std::size_t> interrogative_token_;
};

}  // namespace

std::string_view to_string(CoarseTag t) {
  switch (t) {
    case CoarseTag::kWord: return "WORD";
    case CoarseTag::kProperNoun: return "PROPN";
    case CoarseTag::kNumber: return "NUM";
    case CoarseTag::kDeterminer: return "DET";
    case CoarseTag::kAuxiliary: return "AUX";
    case CoarseTag::kPronoun: return "PRON";
    case CoarseTag::kPreposition: return "ADP";
    case CoarseTag::kConjunction: return "CONJ";
    case CoarseTag::kInterrogative: return "WH";
    case CoarseTag::kVerb: return "VERB";
    case CoarseTag::kEventNoun: return "NOUN";
    case CoarseTag::kPunctuation: return "PUNCT";
  }
  return "?";
}

std::string_view to_string(EventKind k) {
  return k == EventKind::kNominal ? "NOMINAL" : "PREDICATIVE";
}

std::size_t AnnotationDoc::char_begin(TokenSpan s) const {
  return tokens.at(s.begin).token.begin;
}

std::size_t AnnotationDoc::char_end(TokenSpan s) const {
  return tokens.at(s.end - 1).token.end;
}

TokenSpan AnnotationDoc::span_of(MentionRef r) const {
  return r.kind == MentionKind::kEvent ? events.at(r.index).span : timexes.at(r.index).span;
}

std::string AnnotationDoc::text_of(MentionRef r) const {
  return r.kind == MentionKind::kEvent ? events.at(r.index).text : timexes.at(r.index).text;
}

std::string AnnotationDoc::to_timeml() const {
  // Mentions never overlap, so a flat list of insertions suffices.
  std::multimap<std::size_t, std::string> opens, closes;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    opens.emplace(char_begin(e.span), "<EVENT eid=\"Event" + std::to_string(i + 1) +
                                          "\" class=\"" + std::string(to_string(e.kind)) +
                                          "\" lemma=\"" + xml_escape(e.lemma) + "\">");
    closes.emplace(char_end(e.span), "</EVENT>");
  }
  for (std::size_t i = 0; i < timexes.size(); ++i) {
    const auto& t = timexes[i];
    opens.emplace(char_begin(t.span), "<TIMEX3 tid=\"Time" + std::to_string(i + 1) +
                                          "\" type=\"DATE\" value=\"" + t.value.text() + "\">");
    closes.emplace(char_end(t.span), "</TIMEX3>");
  }
  for (std::size_t i = 0; i < signals.size(); ++i) {
    opens.emplace(char_begin(signals[i].span), "<SIGNAL sid=\"Signal" + std::to_string(i + 1) + "\">");
    closes.emplace(char_end(signals[i].span), "</SIGNAL>");
  }
  for (std::size_t i = 0; i < ordinals.size(); ++i) {
    const auto& o = ordinals[i];
    std::string tag = "<ORDINAL oid=\"Ordinal" + std::to_string(i + 1) + "\" rank=\"" +
                      std::to_string(o.rank) + "\" direction=\"" +
                      std::string(to_string(o.direction)) + "\"";
    if (o.event) tag += " event=\"Event" + std::to_string(*o.event + 1) + "\"";
    opens.emplace(char_begin(o.span), tag + ">");
    closes.emplace(char_end(o.span), "</ORDINAL>");
  }

  std::string out;
  for (std::size_t c = 0; c <= question.size(); ++c) {
    for (auto [it, end] = closes.equal_range(c); it != end; ++it) out += it->second;
    for (auto [it, end] = opens.equal_range(c); it != end; ++it) out += it->second;
    if (c < question.size()) out += xml_escape(std::string_view(&question[c], 1));
  }
  out += '\n';
  for (const auto& l : tlinks) {
    out += "<TLINK reltype=\"" + std::string(to_string(l.reltype)) + "\" target=\"Event" +
           std::to_string(l.target + 1) + "\" relatedTo=\"" +
           (l.related.kind == MentionKind::kEvent ? "Event" : "Time") +
           std::to_string(l.related.index + 1) + "\" signal=\"Signal" +
           std::to_string(l.signal + 1) + "\"/>\n";
  }
  return out;
}

AnnotationDoc annotate(std::string_view question, const Lexicon& lexicon) {
  return Annotator(question, lexicon).run();
}

TimeMLRelType signal_to_reltype(std::string_view lexeme, MentionKind related_kind,
                                const Lexicon& lexicon) {
  auto it = lexicon.signals.find(text::to_lower(lexeme));
  if (it == lexicon.signals.end()) {
    throw UsageError("'" + std::string(lexeme) + "' is not a signal");
  }
  return related_kind == MentionKind::kEvent ? it->second.with_event : it->second.with_timex;
}

}  // namespace tempq
