#include <gtest/gtest.h>

#include "tempq/constraints.hpp"

namespace tempq {
namespace {

std::vector<ConstraintType> types(const std::vector<TemporalConstraint>& cs) {
  std::vector<ConstraintType> out;
  for (const auto& c : cs) out.push_back(c.type);
  return out;
}

TEST(Evoke, RelationToTime) {
  const auto doc = annotate("Which movie did Alfred Hitchcock direct in 1960?");
  const auto cs = evoke_constraints(doc);
  ASSERT_EQ(types(cs), std::vector{ConstraintType::kRelationET});
  EXPECT_EQ(notation(cs[0], doc), R"(Relation(IS_INCLUDED, "direct", "1960"))");
  const auto ts = evoke_interpretations(cs[0]);
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].structure, Structure::kIS1);
  EXPECT_EQ(ts[0].predicate, ComparisonPredicate::kIsIncluded);
}

TEST(Evoke, WhenQueryComesFirst) {
  const auto doc = annotate("When did Henry the VIII marry his first wife?");
  const auto cs = evoke_constraints(doc);
  ASSERT_EQ(types(cs), (std::vector{ConstraintType::kWhenQuery, ConstraintType::kHasValueOrdinal}));
  EXPECT_EQ(notation(cs[1], doc), R"(HasValue("marry", "first"))");
  const auto when = evoke_interpretations(cs[0], 0);
  ASSERT_EQ(when.size(), 1u);
  EXPECT_TRUE(when[0].projection);
  const auto ord = evoke_interpretations(cs[1], 1);
  ASSERT_EQ(ord.size(), 2u);
  EXPECT_EQ(ord[0].structure, Structure::kIS2);
  EXPECT_EQ(ord[1].structure, Structure::kIS3);
  EXPECT_EQ(ord[1].constraint, 1u);
}

TEST(Evoke, SimultaneousEventsRouteToSameEntityAndComparison) {
  const auto doc = annotate("Where was John Lennon standing when he was shot?");
  const auto cs = evoke_constraints(doc);
  ASSERT_EQ(types(cs), std::vector{ConstraintType::kRelationEE});
  EXPECT_EQ(notation(cs[0], doc), R"(Relation(SIMULTANEOUS, "standing", "shot"))");
  const auto ts = evoke_interpretations(cs[0]);
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts[0].structure, Structure::kIS4);
  EXPECT_EQ(ts[1].structure, Structure::kIS1);
  EXPECT_EQ(ts[1].predicate, ComparisonPredicate::kOverlaps);
}

TEST(Evoke, IncludedEventsRouteToPartOf) {
  const auto doc = annotate("What award did Laurence Fishburne received at the 46th Tony Awards?");
  const auto ts = evoke_interpretations(evoke_constraints(doc).at(0));
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts[0].structure, Structure::kIS5);
  EXPECT_EQ(ts[1].predicate, ComparisonPredicate::kIsIncluded);
}

TEST(Evoke, AfterRoutesToSequent) {
  const auto doc = annotate("Who became the president after J.F. Kennedy was shot?");
  const auto ts = evoke_interpretations(evoke_constraints(doc).at(0));
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts[0].structure, Structure::kIS6);
  EXPECT_EQ(ts[0].predicate, ComparisonPredicate::kAfter);
  EXPECT_EQ(ts[1].structure, Structure::kIS1);
}

TEST(Evoke, NoSignalsNoConstraints) {
  EXPECT_TRUE(evoke_constraints(annotate("Who directed Psycho?")).empty());
}

TEST(Structures, NamesRoundTrip) {
  for (auto s : {Structure::kIS1, Structure::kIS2, Structure::kIS3, Structure::kIS4,
                 Structure::kIS5, Structure::kIS6}) {
    EXPECT_EQ(structure_from_string(to_string(s)), s);
  }
  EXPECT_EQ(structure_from_string("4"), Structure::kIS4);
  EXPECT_FALSE(structure_from_string("IS-7"));
  EXPECT_EQ(structure_name(Structure::kIS5), "IS5_PART_OF");
}

}  // namespace
}  // namespace tempq
