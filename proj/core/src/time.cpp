#include "tempq/time.hpp"

#include <charconv>
#include <cstdio>
#include <vector>

#include "tempq/error.hpp"

namespace tempq {

namespace chr = std::chrono;

Day make_day(int year, unsigned month, unsigned day) {
  chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
  if (!ymd.ok()) {
    throw ParseError("invalid calendar date " + std::to_string(year) + "-" +
                     std::to_string(month) + "-" + std::to_string(day));
  }
  return Day{ymd};
}

std::string format_day(Day d) {
  chr::year_month_day ymd{d};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Interval::Interval(Day s, Day e) : start(s), end(e) {
  if (!(start < end)) {
    throw DataError("empty interval [" + format_day(start) + ", " + format_day(end) + ")");
  }
}

Interval Interval::of_days(std::int64_t start, std::int64_t end) {
  return Interval(Day{chr::days{start}}, Day{chr::days{end}});
}

Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.start, b.start), std::max(a.end, b.end));
}

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::kYear: return "YEAR";
    case Granularity::kMonth: return "MONTH";
    case Granularity::kDay: return "DAY";
  }
  return "?";
}

namespace {

Interval unit_interval(Granularity g, int year, unsigned month, unsigned day) {
  const Day start = make_day(year, month, day);
  switch (g) {
    case Granularity::kYear:
      return Interval(start, make_day(year + 1, 1, 1));
    case Granularity::kMonth:
      return Interval(start, month == 12 ? make_day(year + 1, 1, 1) : make_day(year, month + 1, 1));
    case Granularity::kDay:
      return Interval(start, start + chr::days{1});
  }
  throw ParseError("unknown granularity");
}

std::string canonical_text(Granularity g, int year, unsigned month, unsigned day) {
  char buf[32];
  switch (g) {
    case Granularity::kYear: std::snprintf(buf, sizeof(buf), "%04d", year); break;
    case Granularity::kMonth: std::snprintf(buf, sizeof(buf), "%04d-%02u", year, month); break;
    case Granularity::kDay:
      std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
      break;
  }
  return buf;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

unsigned to_unsigned(std::string_view s) {
  unsigned v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

}  // namespace

TimeValue::TimeValue(Granularity granularity, int year, unsigned month, unsigned day)
    : text_(canonical_text(granularity, year, month, day)),
      granularity_(granularity),
      year_(year),
      interval_(unit_interval(granularity, year, month, day)) {}

TimeValue TimeValue::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dash = text.find('-', pos);
    parts.push_back(text.substr(pos, dash == std::string_view::npos ? dash : dash - pos));
    if (dash == std::string_view::npos) break;
    pos = dash + 1;
  }
  const std::string quoted = "'" + std::string(text) + "'";
  if (parts.size() > 3) {
    throw ParseError("invalid time value " + quoted + ": too many components");
  }
  if (parts[0].size() != 4 || !all_digits(parts[0])) {
    throw ParseError("invalid time value " + quoted + ": bad year component '" +
                     std::string(parts[0]) + "'");
  }
  const int year = static_cast<int>(to_unsigned(parts[0]));
  unsigned month = 1;
  unsigned day = 1;
  if (parts.size() >= 2) {
    if (parts[1].empty() || parts[1].size() > 2 || !all_digits(parts[1]) ||
        to_unsigned(parts[1]) < 1 || to_unsigned(parts[1]) > 12) {
      throw ParseError("invalid time value " + quoted + ": bad month component '" +
                       std::string(parts[1]) + "'");
    }
    month = to_unsigned(parts[1]);
  }
  if (parts.size() == 3) {
    const bool shaped = !parts[2].empty() && parts[2].size() <= 2 && all_digits(parts[2]);
    if (!shaped || !chr::year_month_day{chr::year{year}, chr::month{month},
                                        chr::day{to_unsigned(parts[2])}}
                        .ok()) {
      throw ParseError("invalid time value " + quoted + ": bad day component '" +
                       std::string(parts[2]) + "'");
    }
    day = to_unsigned(parts[2]);
  }
  const Granularity g = parts.size() == 1   ? Granularity::kYear
                        : parts.size() == 2 ? Granularity::kMonth
                                            : Granularity::kDay;
  return TimeValue(g, year, month, day);
}

std::optional<TimeValue> TimeValue::try_parse(std::string_view text) {
  try {
    return parse(text);
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

std::string_view to_string(AllenRelation r) {
  switch (r) {
    case AllenRelation::kBefore: return "BEFORE";
    case AllenRelation::kAfter: return "AFTER";
    case AllenRelation::kMeets: return "MEETS";
    case AllenRelation::kMetBy: return "MET_BY";
    case AllenRelation::kOverlaps: return "OVERLAPS";
    case AllenRelation::kOverlappedBy: return "OVERLAPPED_BY";
    case AllenRelation::kStarts: return "STARTS";
    case AllenRelation::kStartedBy: return "STARTED_BY";
    case AllenRelation::kDuring: return "DURING";
    case AllenRelation::kContains: return "CONTAINS";
    case AllenRelation::kFinishes: return "FINISHES";
    case AllenRelation::kFinishedBy: return "FINISHED_BY";
    case AllenRelation::kEqual: return "EQUAL";
  }
  return "?";
}

AllenRelation converse(AllenRelation r) {
  switch (r) {
    case AllenRelation::kBefore: return AllenRelation::kAfter;
    case AllenRelation::kAfter: return AllenRelation::kBefore;
    case AllenRelation::kMeets: return AllenRelation::kMetBy;
    case AllenRelation::kMetBy: return AllenRelation::kMeets;
    case AllenRelation::kOverlaps: return AllenRelation::kOverlappedBy;
    case AllenRelation::kOverlappedBy: return AllenRelation::kOverlaps;
    case AllenRelation::kStarts: return AllenRelation::kStartedBy;
    case AllenRelation::kStartedBy: return AllenRelation::kStarts;
    case AllenRelation::kDuring: return AllenRelation::kContains;
    case AllenRelation::kContains: return AllenRelation::kDuring;
    case AllenRelation::kFinishes: return AllenRelation::kFinishedBy;
    case AllenRelation::kFinishedBy: return AllenRelation::kFinishes;
    case AllenRelation::kEqual: return AllenRelation::kEqual;
  }
  return r;
}

std::string_view to_string(TimeMLRelType r) {
  switch (r) {
    case TimeMLRelType::kBefore: return "BEFORE";
    case TimeMLRelType::kAfter: return "AFTER";
    case TimeMLRelType::kIncludes: return "INCLUDES";
    case TimeMLRelType::kIsIncluded: return "IS_INCLUDED";
    case TimeMLRelType::kDuring: return "DURING";
    case TimeMLRelType::kSimultaneous: return "SIMULTANEOUS";
    case TimeMLRelType::kIAfter: return "IAFTER";
    case TimeMLRelType::kIBefore: return "IBEFORE";
    case TimeMLRelType::kIdentity: return "IDENTITY";
    case TimeMLRelType::kBegins: return "BEGINS";
    case TimeMLRelType::kEnds: return "ENDS";
    case TimeMLRelType::kBegunBy: return "BEGUN_BY";
    case TimeMLRelType::kEndedBy: return "ENDED_BY";
  }
  return "?";
}

std::optional<TimeMLRelType> reltype_from_string(std::string_view name) {
  for (TimeMLRelType r : kAllRelTypes) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view to_string(ComparisonPredicate p) {
  switch (p) {
    case ComparisonPredicate::kEqual: return "EQUAL";
    case ComparisonPredicate::kBefore: return "BEFORE";
    case ComparisonPredicate::kAfter: return "AFTER";
    case ComparisonPredicate::kIncludes: return "INCLUDES";
    case ComparisonPredicate::kIsIncluded: return "IS_INCLUDED";
    case ComparisonPredicate::kOverlaps: return "OVERLAPS";
  }
  return "?";
}

std::optional<ComparisonPredicate> predicate_from_string(std::string_view name) {
  for (ComparisonPredicate p : kAllPredicates) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

ComparisonPredicate converse(ComparisonPredicate p) {
  switch (p) {
    case ComparisonPredicate::kBefore: return ComparisonPredicate::kAfter;
    case ComparisonPredicate::kAfter: return ComparisonPredicate::kBefore;
    case ComparisonPredicate::kIncludes: return ComparisonPredicate::kIsIncluded;
    case ComparisonPredicate::kIsIncluded: return ComparisonPredicate::kIncludes;
    case ComparisonPredicate::kEqual:
    case ComparisonPredicate::kOverlaps: return p;
  }
  return p;
}

bool accepts(ComparisonPredicate p, AllenRelation r) {
  using A = AllenRelation;
  switch (p) {
    case ComparisonPredicate::kEqual:
      return r == A::kEqual;
    case ComparisonPredicate::kBefore:
      return r == A::kBefore || r == A::kMeets;
    case ComparisonPredicate::kAfter:
      return r == A::kAfter || r == A::kMetBy;
    // Containment is non-strict: a year value includes itself.
    case ComparisonPredicate::kIncludes:
      return r == A::kContains || r == A::kStartedBy || r == A::kFinishedBy || r == A::kEqual;
    case ComparisonPredicate::kIsIncluded:
      return r == A::kDuring || r == A::kStarts || r == A::kFinishes || r == A::kEqual;
    case ComparisonPredicate::kOverlaps:
      return r != A::kBefore && r != A::kAfter && r != A::kMeets && r != A::kMetBy;
  }
  return false;
}

bool satisfies(ComparisonPredicate pred, const Interval& reference, const Interval& subject) {
  return accepts(pred, allen_relation(reference, subject));
}

ComparisonPredicate normalize_reltype(TimeMLRelType r) {
  switch (r) {
    case TimeMLRelType::kSimultaneous: return ComparisonPredicate::kOverlaps;
    case TimeMLRelType::kIncludes:
    case TimeMLRelType::kBegunBy:
    case TimeMLRelType::kEndedBy: return ComparisonPredicate::kIncludes;
    case TimeMLRelType::kIsIncluded:
    case TimeMLRelType::kDuring: return ComparisonPredicate::kIsIncluded;
    case TimeMLRelType::kBefore:
    case TimeMLRelType::kIBefore:
    case TimeMLRelType::kEnds: return ComparisonPredicate::kBefore;
    case TimeMLRelType::kAfter:
    case TimeMLRelType::kIAfter:
    case TimeMLRelType::kBegins: return ComparisonPredicate::kAfter;
    case TimeMLRelType::kIdentity: return ComparisonPredicate::kEqual;
  }
  return ComparisonPredicate::kOverlaps;
}

}  // namespace tempq
