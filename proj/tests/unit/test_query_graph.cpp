#include <gtest/gtest.h>

#include "fixture.hpp"
#include "oracles.hpp"
#include "tempq/error.hpp"
#include "tempq/query_graph.hpp"

namespace tempq {
namespace {

using testing::fixture_graph;

PredicateIndex pred(const char* id) { return *fixture_graph().find_predicate(id); }
EntityIndex ent(const char* id) { return fixture_graph().entity_index(id); }

// ?ans director Hitchcock; ?ans in_time ?t; filter 1960 includes ?t.
QueryGraph hitchcock_1960() {
  QueryGraph q;
  const NodeId ans = q.add_variable();
  const NodeId hitchcock = q.add_entity(ent("Alfred_Hitchcock"));
  const NodeId t = q.add_variable();
  q.add_triple(ans, pred("director"), hitchcock);
  q.add_triple(ans, pred("in_time"), t);
  q.add_filter({ComparisonPredicate::kIncludes, TimeValue::parse("1960"), t});
  q.set_answer(ans);
  return q;
}

// Henry's spouses ordered by the start of the marriage.
QueryGraph henry_spouse(int rank, OrdinalDirection dir, bool answer_time) {
  QueryGraph q;
  const NodeId henry = q.add_entity(ent("Henry_VIII_of_England"));
  const NodeId s = q.add_statement();
  const NodeId wife = q.add_variable();
  const NodeId t = q.add_variable();
  q.add_edge({EdgeKind::kStatementSubject, henry, pred("spouse"), s});
  q.add_edge({EdgeKind::kStatementObject, s, pred("spouse"), wife});
  q.add_edge({EdgeKind::kTime, s, {}, t});
  q.set_ordinal({t, rank, dir});
  q.set_answer(answer_time ? t : wife);
  return q;
}

TEST(Execute, ComparisonAgainstYear) {
  EXPECT_EQ(execute(hitchcock_1960(), fixture_graph()), (AnswerSet{"Psycho"}));
}

TEST(Execute, OrdinalFirstAndLast) {
  const auto& g = fixture_graph();
  EXPECT_EQ(execute(henry_spouse(1, OrdinalDirection::kFromFirst, false), g),
            (AnswerSet{"Catherine_of_Aragon"}));
  EXPECT_EQ(execute(henry_spouse(1, OrdinalDirection::kFromFirst, true), g), (AnswerSet{"1506"}));
  EXPECT_EQ(execute(henry_spouse(1, OrdinalDirection::kFromLast, false), g),
            (AnswerSet{"Catherine_Parr"}));
  EXPECT_EQ(execute(henry_spouse(2, OrdinalDirection::kFromFirst, false), g),
            (AnswerSet{"Anne_Boleyn"}));
  EXPECT_TRUE(execute(henry_spouse(7, OrdinalDirection::kFromFirst, false), g).empty());
}

TEST(Execute, QualifierEdge) {
  // Awards Fishburne received whose statement names the Tony Awards.
  QueryGraph q;
  const NodeId who = q.add_entity(ent("Laurence_Fishburne"));
  const NodeId s = q.add_statement();
  const NodeId award = q.add_variable();
  const NodeId tony = q.add_entity(ent("46th_Tony_Awards"));
  q.add_edge({EdgeKind::kStatementSubject, who, pred("award_received"), s});
  q.add_edge({EdgeKind::kStatementObject, s, pred("award_received"), award});
  q.add_edge({EdgeKind::kQualifier, s, pred("subject_of"), tony});
  q.set_answer(award);
  EXPECT_EQ(execute(q, fixture_graph()), (AnswerSet{"Best_Featured_Actor"}));
}

TEST(Execute, InvalidGraphsThrow) {
  QueryGraph empty;
  EXPECT_THROW(execute(empty, fixture_graph()), ExecutionError);

  QueryGraph disconnected;
  const NodeId a = disconnected.add_variable();
  const NodeId b = disconnected.add_variable();
  disconnected.add_triple(a, pred("director"), disconnected.add_entity(ent("Alfred_Hitchcock")));
  disconnected.add_triple(b, pred("author"), disconnected.add_entity(ent("J._K._Rowling")));
  disconnected.set_answer(a);
  EXPECT_TRUE(disconnected.validation_error());
  EXPECT_THROW(execute(disconnected, fixture_graph()), ExecutionError);

  QueryGraph unbound = hitchcock_1960();
  unbound.add_filter({ComparisonPredicate::kBefore, TimeValue::parse("1960"), unbound.add_variable()});
  EXPECT_THROW(execute(unbound, fixture_graph()), ExecutionError);
}

TEST(Execute, FilterCanJoinTwoPatterns) {
  // Same shape as the president-when-Lennon-was-shot query.
  const auto& g = fixture_graph();
  QueryGraph q;
  const NodeId ans = q.add_variable();
  const NodeId s = q.add_statement();
  const NodeId t1 = q.add_variable();
  const NodeId murder = q.add_entity(ent("Murder_of_John_Lennon"));
  const NodeId t2 = q.add_variable();
  q.add_edge({EdgeKind::kStatementSubject, ans, pred("position_held"), s});
  q.add_edge({EdgeKind::kStatementObject, s, pred("position_held"),
              q.add_entity(ent("President_of_the_United_States"))});
  q.add_edge({EdgeKind::kTime, s, {}, t1});
  q.add_triple(murder, pred("time"), t2);
  q.add_filter({ComparisonPredicate::kOverlaps, t2, t1});
  q.set_answer(ans);
  EXPECT_FALSE(q.validation_error());
  EXPECT_EQ(execute(q, g), (AnswerSet{"Jimmy_Carter"}));
}

TEST(Serialize, RankingHidesVariableNamesDebugShowsThem) {
  const auto& g = fixture_graph();
  const auto q = hitchcock_1960();
  const std::string ranking = serialize(q, g, SerializationMode::kRanking);
  const std::string debug = serialize(q, g, SerializationMode::kDebug);
  EXPECT_EQ(ranking.find("?t"), std::string::npos);
  EXPECT_NE(ranking.find("Alfred Hitchcock"), std::string::npos);
  EXPECT_NE(debug.find("?ans"), std::string::npos);
  EXPECT_NE(debug.find("1960"), std::string::npos);
}

TEST(Serialize, IndependentOfInsertionOrder) {
  const auto& g = fixture_graph();
  QueryGraph a = hitchcock_1960();
  QueryGraph b;
  const NodeId t = b.add_variable();
  const NodeId hitchcock = b.add_entity(ent("Alfred_Hitchcock"));
  const NodeId ans = b.add_variable();
  b.add_triple(ans, pred("in_time"), t);
  b.add_triple(ans, pred("director"), hitchcock);
  b.add_filter({ComparisonPredicate::kIncludes, TimeValue::parse("1960"), t});
  b.set_answer(ans);
  for (auto mode : {SerializationMode::kRanking, SerializationMode::kDebug}) {
    EXPECT_EQ(serialize(a, g, mode), serialize(b, g, mode));
  }
}

TEST(Conjoin, SharesAnswerAndConstants) {
  QueryGraph a = hitchcock_1960();
  QueryGraph b;
  const NodeId ans = b.add_variable();
  b.add_triple(ans, pred("instance_of"), b.add_entity(ent("film")));
  b.set_answer(ans);
  const std::size_t before = a.nodes().size();
  const auto map = a.conjoin(b);
  EXPECT_EQ(map[ans], *a.answer());
  EXPECT_EQ(a.nodes().size(), before + 1);
  EXPECT_EQ(execute(a, fixture_graph()), (AnswerSet{"Psycho"}));
}

TEST(OrdinalWords, Forms) {
  EXPECT_EQ(ordinal_words(1, OrdinalDirection::kFromFirst), "first");
  EXPECT_EQ(ordinal_words(7, OrdinalDirection::kFromFirst), "7th");
  EXPECT_EQ(ordinal_words(1, OrdinalDirection::kFromLast), "last");
  EXPECT_EQ(ordinal_words(2, OrdinalDirection::kFromLast), "2nd last");
  EXPECT_EQ(ordinal_words(11, OrdinalDirection::kFromFirst), "11th");
  EXPECT_EQ(ordinal_words(23, OrdinalDirection::kFromFirst), "23rd");
}

TEST(F1Score, Conventions) {
  EXPECT_EQ(f1_score({}, {"a"}), (Scores{1.0, 0.0, 0.0}));
  EXPECT_EQ(f1_score({"a"}, {"a"}), (Scores{1.0, 1.0, 1.0}));
  const Scores half = f1_score({"a", "b"}, {"a"});
  EXPECT_DOUBLE_EQ(half.precision, 0.5);
  EXPECT_DOUBLE_EQ(half.recall, 1.0);
  EXPECT_DOUBLE_EQ(half.f1, 2.0 / 3.0);
  EXPECT_EQ(f1_score({"b"}, {"a"}), (Scores{0.0, 0.0, 0.0}));
  EXPECT_THROW(f1_score({"a"}, {}), UsageError);
}

TEST(PatternOracle, AgreesOnRandomCases) {
  testing::CaseGenerator gen(20261016);
  for (int i = 0; i < 150; ++i) {
    const auto c = gen.next();
    const testing::PatternOracle oracle(c.graph);
    ASSERT_EQ(execute(c.query, c.graph), oracle.run(c.query))
        << "case " << i << "\n" << serialize(c.query, c.graph, SerializationMode::kDebug);
  }
}

TEST(PatternOracle, AgreesOnFixtureQueries) {
  const auto& g = fixture_graph();
  const testing::PatternOracle oracle(g);
  EXPECT_EQ(oracle.run(hitchcock_1960()), execute(hitchcock_1960(), g));
}

}  // namespace
}  // namespace tempq
