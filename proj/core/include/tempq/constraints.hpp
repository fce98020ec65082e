#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tempq/annotator.hpp"
#include "tempq/time.hpp"

namespace tempq {

enum class ConstraintType {
  kHasValueTime,     // VC-1: HasValue(E, T)
  kHasValueOrdinal,  // VC-2: HasValue(E, O)
  kRelationET,       // RC-1: Relation(reltype, E, T)
  kRelationEE,       // RC-2: Relation(reltype, E1, E2)
  kWhenQuery,        // HasValue(E, T?)
};

std::string_view to_string(ConstraintType t);

// Mention indexes refer to the AnnotationDoc the constraint was evoked from.
struct TemporalConstraint {
  ConstraintType type = ConstraintType::kWhenQuery;
  std::size_t event = 0;
  std::optional<TimeMLRelType> reltype;
  std::optional<std::size_t> timex;
  std::optional<std::size_t> ordinal;
  std::optional<std::size_t> related_event;
  std::optional<std::size_t> signal;

  friend bool operator==(const TemporalConstraint&, const TemporalConstraint&) = default;
};

// Human-readable form, e.g. Relation(SIMULTANEOUS, "standing", "shot").
std::string notation(const TemporalConstraint& c, const AnnotationDoc& doc);

enum class Structure { kBasic, kIS1, kIS2, kIS3, kIS4, kIS5, kIS6 };

// "BASIC", "IS-1", ... "IS-6".
std::string_view to_string(Structure s);
// "IS1_COMPARISON", ... for traces.
std::string_view structure_name(Structure s);
// Parses "4" or "IS-4".
std::optional<Structure> structure_from_string(std::string_view s);

struct InterpretationTemplate {
  Structure structure = Structure::kIS1;
  std::size_t constraint = 0;
  // IS-1: the comparison; IS-6: BEFORE or AFTER giving the sequence direction.
  std::optional<ComparisonPredicate> predicate;
  // IS-1 for WHEN questions: return the time instead of filtering by it.
  bool projection = false;

  friend bool operator==(const InterpretationTemplate&, const InterpretationTemplate&) = default;
};

std::string notation(const InterpretationTemplate& t);

// WHEN_QUERY first, then the remaining constraints in textual order.
std::vector<TemporalConstraint> evoke_constraints(const AnnotationDoc& doc);

std::vector<InterpretationTemplate> evoke_interpretations(const TemporalConstraint& c,
                                                          std::size_t constraint_index = 0);

}  // namespace tempq
