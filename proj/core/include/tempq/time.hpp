#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tempq {

// Calendar instants are proleptic-Gregorian days; there are no time zones.
using Day = std::chrono::sys_days;

Day make_day(int year, unsigned month, unsigned day);
std::string format_day(Day d);

// Half-open interval [start, end) of days.
struct Interval {
  Day start;
  Day end;

  Interval(Day s, Day e);

  // Convenience for tests and tools that think in day numbers.
  static Interval of_days(std::int64_t start, std::int64_t end);

  bool intersects(const Interval& other) const { return start < other.end && other.start < end; }
  bool contains(const Interval& other) const { return start <= other.start && other.end <= end; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Smallest interval covering both.
Interval hull(const Interval& a, const Interval& b);

enum class Granularity { kYear, kMonth, kDay };

std::string_view to_string(Granularity g);

// A lexical time point. Its interval spans exactly one unit of its granularity,
// so "1960" covers the whole year and "1960-10-07" a single day.
class TimeValue {
 public:
  // Accepts "YYYY", "YYYY-MM" and "YYYY-MM-DD"; month and day may be unpadded.
  static TimeValue parse(std::string_view text);
  static std::optional<TimeValue> try_parse(std::string_view text);

  TimeValue(Granularity granularity, int year, unsigned month = 1, unsigned day = 1);

  // Canonical zero-padded form.
  const std::string& text() const { return text_; }
  Granularity granularity() const { return granularity_; }
  const Interval& interval() const { return interval_; }
  Day start() const { return interval_.start; }
  Day end() const { return interval_.end; }
  int year() const { return year_; }

  friend bool operator==(const TimeValue& a, const TimeValue& b) {
    return a.granularity_ == b.granularity_ && a.interval_ == b.interval_;
  }

 private:
  std::string text_;
  Granularity granularity_;
  int year_;
  Interval interval_;
};

inline TimeValue parse_time_value(std::string_view text) { return TimeValue::parse(text); }

// The thirteen qualitative relations between two intervals.
enum class AllenRelation {
  kBefore,
  kAfter,
  kMeets,
  kMetBy,
  kOverlaps,
  kOverlappedBy,
  kStarts,
  kStartedBy,
  kDuring,
  kContains,
  kFinishes,
  kFinishedBy,
  kEqual,
};

inline constexpr std::array<AllenRelation, 13> kAllAllenRelations = {
    AllenRelation::kBefore,   AllenRelation::kAfter,      AllenRelation::kMeets,
    AllenRelation::kMetBy,    AllenRelation::kOverlaps,   AllenRelation::kOverlappedBy,
    AllenRelation::kStarts,   AllenRelation::kStartedBy,  AllenRelation::kDuring,
    AllenRelation::kContains, AllenRelation::kFinishes,   AllenRelation::kFinishedBy,
    AllenRelation::kEqual,
};

std::string_view to_string(AllenRelation r);
AllenRelation converse(AllenRelation r);

// Relation of [a_start, a_end) to [b_start, b_end); both intervals must be
// nonempty. Works for any totally ordered endpoint type.
template <typename T>
constexpr AllenRelation allen_relation(const T& a_start, const T& a_end, const T& b_start,
                                       const T& b_end) {
  if (a_end < b_start) return AllenRelation::kBefore;
  if (b_end < a_start) return AllenRelation::kAfter;
  if (a_end == b_start) return AllenRelation::kMeets;
  if (b_end == a_start) return AllenRelation::kMetBy;
  if (a_start == b_start) {
    if (a_end == b_end) return AllenRelation::kEqual;
    return a_end < b_end ? AllenRelation::kStarts : AllenRelation::kStartedBy;
  }
  if (a_end == b_end) {
    return a_start < b_start ? AllenRelation::kFinishedBy : AllenRelation::kFinishes;
  }
  if (a_start < b_start) {
    return a_end < b_end ? AllenRelation::kOverlaps : AllenRelation::kContains;
  }
  return a_end < b_end ? AllenRelation::kDuring : AllenRelation::kOverlappedBy;
}

inline AllenRelation allen_relation(const Interval& a, const Interval& b) {
  return allen_relation(a.start, a.end, b.start, b.end);
}

// The thirteen TimeML TLINK relation types.
enum class TimeMLRelType {
  kBefore,
  kAfter,
  kIncludes,
  kIsIncluded,
  kDuring,
  kSimultaneous,
  kIAfter,
  kIBefore,
  kIdentity,
  kBegins,
  kEnds,
  kBegunBy,
  kEndedBy,
};

inline constexpr std::array<TimeMLRelType, 13> kAllRelTypes = {
    TimeMLRelType::kBefore,   TimeMLRelType::kAfter,        TimeMLRelType::kIncludes,
    TimeMLRelType::kIsIncluded, TimeMLRelType::kDuring,     TimeMLRelType::kSimultaneous,
    TimeMLRelType::kIAfter,   TimeMLRelType::kIBefore,      TimeMLRelType::kIdentity,
    TimeMLRelType::kBegins,   TimeMLRelType::kEnds,         TimeMLRelType::kBegunBy,
    TimeMLRelType::kEndedBy,
};

std::string_view to_string(TimeMLRelType r);
std::optional<TimeMLRelType> reltype_from_string(std::string_view name);

// Algebraic comparison used by temporal filters.
enum class ComparisonPredicate { kEqual, kBefore, kAfter, kIncludes, kIsIncluded, kOverlaps };

inline constexpr std::array<ComparisonPredicate, 6> kAllPredicates = {
    ComparisonPredicate::kEqual,    ComparisonPredicate::kBefore,
    ComparisonPredicate::kAfter,    ComparisonPredicate::kIncludes,
    ComparisonPredicate::kIsIncluded, ComparisonPredicate::kOverlaps,
};

std::string_view to_string(ComparisonPredicate p);
std::optional<ComparisonPredicate> predicate_from_string(std::string_view name);

// The predicate that holds for (b, a) whenever `p` holds for (a, b).
ComparisonPredicate converse(ComparisonPredicate p);

// Whether `r`, the relation of the reference interval to the subject interval,
// is accepted by `p`.
bool accepts(ComparisonPredicate p, AllenRelation r);

// True iff allen_relation(reference, subject) is accepted by `pred`; the
// reference sits on the left, so satisfies(INCLUDES, "1960", "1960-10-07").
bool satisfies(ComparisonPredicate pred, const Interval& reference, const Interval& subject);
inline bool satisfies(ComparisonPredicate pred, const TimeValue& reference,
                      const TimeValue& subject) {
  return satisfies(pred, reference.interval(), subject.interval());
}

ComparisonPredicate normalize_reltype(TimeMLRelType r);

}  // namespace tempq
