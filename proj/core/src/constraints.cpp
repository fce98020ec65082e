#include "tempq/constraints.hpp"

#include <algorithm>

#include "tempq/text.hpp"

namespace tempq {

namespace {

std::string in_quotes(std::string_view s) { return "\"" + std::string(s) + "\""; }

struct Positioned {
  std::size_t position;
  TemporalConstraint constraint;
};

std::size_t nearest_event(const AnnotationDoc& doc, TokenSpan s) {
  std::size_t best = 0, best_dist = 0;
  bool found = false;
  for (std::size_t e = 0; e < doc.events.size(); ++e) {
    const auto& es = doc.events[e].span;
    const std::size_t dist = es.end <= s.begin ? s.begin - es.end : es.begin - s.end;
    if (!found || dist < best_dist) {
      best = e;
      best_dist = dist;
      found = true;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(ConstraintType t) {
  switch (t) {
    case ConstraintType::kHasValueTime: return "HAS_VALUE_TIME";
    case ConstraintType::kHasValueOrdinal: return "HAS_VALUE_ORDINAL";
    case ConstraintType::kRelationET: return "RELATION_ET";
    case ConstraintType::kRelationEE: return "RELATION_EE";
    case ConstraintType::kWhenQuery: return "WHEN_QUERY";
  }
  return "?";
}

std::string notation(const TemporalConstraint& c, const AnnotationDoc& doc) {
  const std::string e = in_quotes(doc.events.at(c.event).text);
  switch (c.type) {
    case ConstraintType::kHasValueTime:
      return "HasValue(" + e + ", " + in_quotes(doc.timexes.at(*c.timex).text) + ")";
    case ConstraintType::kHasValueOrdinal:
      return "HasValue(" + e + ", " + in_quotes(doc.ordinals.at(*c.ordinal).text) + ")";
    case ConstraintType::kRelationET:
      return "Relation(" + std::string(to_string(*c.reltype)) + ", " + e + ", " +
             in_quotes(doc.timexes.at(*c.timex).text) + ")";
    case ConstraintType::kRelationEE:
      return "Relation(" + std::string(to_string(*c.reltype)) + ", " + e + ", " +
             in_quotes(doc.events.at(*c.related_event).text) + ")";
    case ConstraintType::kWhenQuery:
      return "HasValue(" + e + ", T?)";
  }
  return {};
}

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::kBasic: return "BASIC";
    case Structure::kIS1: return "IS-1";
    case Structure::kIS2: return "IS-2";
    case Structure::kIS3: return "IS-3";
    case Structure::kIS4: return "IS-4";
    case Structure::kIS5: return "IS-5";
    case Structure::kIS6: return "IS-6";
  }
  return "?";
}

std::string_view structure_name(Structure s) {
  switch (s) {
    case Structure::kBasic: return "BASIC";
    case Structure::kIS1: return "IS1_COMPARISON";
    case Structure::kIS2: return "IS2_ORDERING";
    case Structure::kIS3: return "IS3_DIRECT";
    case Structure::kIS4: return "IS4_SAME_ENTITY";
    case Structure::kIS5: return "IS5_PART_OF";
    case Structure::kIS6: return "IS6_SEQUENT";
  }
  return "?";
}

std::optional<Structure> structure_from_string(std::string_view s) {
  std::string t = text::to_lower(s);
  if (t.rfind("is-", 0) == 0) t = t.substr(3);
  else if (t.rfind("is", 0) == 0) t = t.substr(2);
  if (t == "basic") return Structure::kBasic;
  if (t.size() == 1 && t[0] >= '1' && t[0] <= '6') {
    return static_cast<Structure>(t[0] - '0');
  }
  return std::nullopt;
}

std::string notation(const InterpretationTemplate& t) {
  std::string out(to_string(t.structure));
  if (t.projection) return out + "(projection)";
  if (t.predicate) out += "(" + std::string(to_string(*t.predicate)) + ")";
  return out;
}

std::vector<TemporalConstraint> evoke_constraints(const AnnotationDoc& doc) {
  std::vector<TemporalConstraint> out;
  if (doc.events.empty()) return out;

  if (doc.asks_time) {
    std::size_t main = 0;
    for (std::size_t e = 0; e < doc.events.size(); ++e) {
      if (doc.events[e].kind == EventKind::kPredicative) {
        main = e;
        break;
      }
    }
    out.push_back({ConstraintType::kWhenQuery, main, {}, {}, {}, {}, {}});
  }

  std::vector<Positioned> rest;
  std::vector<bool> linked_timex(doc.timexes.size(), false);
  for (const auto& l : doc.tlinks) {
    TemporalConstraint c;
    c.event = l.target;
    c.reltype = l.reltype;
    c.signal = l.signal;
    if (l.related.kind == MentionKind::kTimex) {
      c.type = ConstraintType::kRelationET;
      c.timex = l.related.index;
      linked_timex[l.related.index] = true;
    } else {
      c.type = ConstraintType::kRelationEE;
      c.related_event = l.related.index;
    }
    rest.push_back({doc.signals.at(l.signal).span.begin, c});
  }
  for (std::size_t t = 0; t < doc.timexes.size(); ++t) {
    if (linked_timex[t]) continue;
    TemporalConstraint c;
    c.type = ConstraintType::kHasValueTime;
    c.event = nearest_event(doc, doc.timexes[t].span);
    c.timex = t;
    rest.push_back({doc.timexes[t].span.begin, c});
  }
  for (std::size_t o = 0; o < doc.ordinals.size(); ++o) {
    if (!doc.ordinals[o].event) continue;
    TemporalConstraint c;
    c.type = ConstraintType::kHasValueOrdinal;
    c.event = *doc.ordinals[o].event;
    c.ordinal = o;
    rest.push_back({doc.ordinals[o].span.begin, c});
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [](const Positioned& a, const Positioned& b) { return a.position < b.position; });
  for (auto& p : rest) out.push_back(std::move(p.constraint));
  return out;
}

std::vector<InterpretationTemplate> evoke_interpretations(const TemporalConstraint& c,
                                                          std::size_t constraint_index) {
  auto make = [&](Structure s, std::optional<ComparisonPredicate> p = std::nullopt,
                  bool projection = false) {
    return InterpretationTemplate{s, constraint_index, p, projection};
  };
  switch (c.type) {
    case ConstraintType::kHasValueTime:
      return {make(Structure::kIS1, ComparisonPredicate::kEqual), make(Structure::kIS3)};
    case ConstraintType::kHasValueOrdinal:
      return {make(Structure::kIS2), make(Structure::kIS3)};
    case ConstraintType::kWhenQuery:
      return {make(Structure::kIS1, std::nullopt, true)};
    case ConstraintType::kRelationET:
      return {make(Structure::kIS1, normalize_reltype(*c.reltype))};
    case ConstraintType::kRelationEE: {
      // The intrinsic structure follows the normalized comparison, so every
      // relation type gets one alongside the quantitative comparison.
      const ComparisonPredicate p = normalize_reltype(*c.reltype);
      switch (p) {
        case ComparisonPredicate::kOverlaps:
        case ComparisonPredicate::kEqual:
          return {make(Structure::kIS4), make(Structure::kIS1, p)};
        case ComparisonPredicate::kIncludes:
        case ComparisonPredicate::kIsIncluded:
          return {make(Structure::kIS5), make(Structure::kIS1, p)};
        case ComparisonPredicate::kBefore:
        case ComparisonPredicate::kAfter:
          return {make(Structure::kIS6, p), make(Structure::kIS1, p)};
      }
      break;
    }
  }
  return {};
}

}  // namespace tempq
