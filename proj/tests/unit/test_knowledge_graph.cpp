#include <gtest/gtest.h>

#include "fixture.hpp"
#include "tempq/error.hpp"
#include "tempq/knowledge_graph.hpp"

namespace tempq {
namespace {

constexpr const char* kSmall = R"({
  "entities": [
    {"id": "A", "label": "Alpha", "aliases": ["the first"]},
    {"id": "B", "label": "Beta"},
    {"id": "C", "label": "Gamma Ray"}
  ],
  "predicates": [
    {"id": "knows"},
    {"id": "start", "flags": ["TEMPORAL_START"]},
    {"id": "end", "flags": ["TEMPORAL_END"]},
    {"id": "at", "flags": ["TEMPORAL_POINT"]},
    {"id": "rank", "flags": ["ORDINAL_ATTRIBUTE"]}
  ],
  "statements": [
    {"subject": "A", "predicate": "knows", "object": {"entity": "B"},
     "qualifiers": [{"predicate": "start", "value": {"time": "1990"}},
                    {"predicate": "end", "value": {"time": "1995-06"}}]},
    {"subject": "B", "predicate": "knows", "object": {"entity": "C"},
     "qualifiers": [{"predicate": "rank", "value": {"int": 2}}]},
    {"subject": "C", "predicate": "at", "object": {"time": "2001-02-03"}},
    {"subject": "A", "predicate": "knows", "object": {"string": "nobody"}}
  ]
})";

TEST(KnowledgeGraph, LoadsAndIndexes) {
  const auto g = KnowledgeGraph::from_json(kSmall);
  EXPECT_EQ(g.entity_count(), 3u);
  EXPECT_EQ(g.predicate_count(), 5u);
  EXPECT_EQ(g.statement_count(), 4u);
  const EntityIndex a = g.entity_index("A"), b = g.entity_index("B");
  EXPECT_EQ(g.by_subject(a).size(), 2u);
  EXPECT_EQ(g.by_object(b).size(), 1u);
  EXPECT_EQ(g.by_predicate(*g.find_predicate("knows")).size(), 3u);
  EXPECT_EQ(g.by_qualifier_predicate(*g.find_predicate("rank")).size(), 1u);
  EXPECT_EQ(g.neighbors(b).size(), 2u);
  EXPECT_THROW(g.entity_index("Z"), UsageError);
  EXPECT_TRUE(g.predicate(*g.find_predicate("start")).flags.has(SchemaFlag::kTemporalStart));
}

TEST(KnowledgeGraph, JsonRoundTrip) {
  const auto g = KnowledgeGraph::from_json(kSmall);
  const auto again = KnowledgeGraph::from_json(g.to_json());
  EXPECT_EQ(g, again);
  EXPECT_EQ(again.to_json(), g.to_json());
}

TEST(KnowledgeGraph, FixtureRoundTrip) {
  const auto& g = testing::fixture_graph();
  EXPECT_EQ(KnowledgeGraph::from_json(g.to_json()), g);
}

TEST(KnowledgeGraph, TemporalExtentHullsStartAndEnd) {
  const auto g = KnowledgeGraph::from_json(kSmall);
  const auto ext = g.temporal_extent(g.statement(StatementIndex{0}));
  ASSERT_TRUE(ext);
  EXPECT_EQ(ext->span.start, make_day(1990, 1, 1));
  EXPECT_EQ(ext->span.end, make_day(1995, 7, 1));
  EXPECT_EQ(ext->anchor.text(), "1990");
  EXPECT_FALSE(g.temporal_extent(g.statement(StatementIndex{1})));
}

TEST(KnowledgeGraph, EventTimeFromAttribute) {
  const auto g = KnowledgeGraph::from_json(kSmall);
  const auto t = g.event_time(g.entity_index("C"));
  ASSERT_TRUE(t);
  EXPECT_EQ(t->anchor.text(), "2001-02-03");
  EXPECT_FALSE(g.event_time(g.entity_index("A")));
}

TEST(KnowledgeGraph, StartAfterEndIsDataError) {
  const auto g = KnowledgeGraph::from_json(R"({
    "entities": [{"id": "A"}],
    "predicates": [{"id": "p"}, {"id": "s", "flags": ["TEMPORAL_START"]},
                   {"id": "e", "flags": ["TEMPORAL_END"]}],
    "statements": [{"subject": "A", "predicate": "p", "object": {"entity": "A"},
                    "qualifiers": [{"predicate": "s", "value": {"time": "2000"}},
                                   {"predicate": "e", "value": {"time": "1999"}}]}]})");
  EXPECT_THROW(g.temporal_extent(g.statement(StatementIndex{0})), DataError);
}

TEST(KnowledgeGraph, MalformedDocumentsAreLoadErrors) {
  const char* bad[] = {
      "not json",
      "[]",
      R"({"entities": [{"id": "A"}, {"id": "A"}]})",
      R"({"entities": [{"id": "A"}], "predicates": [{"id": "p"}],
          "statements": [{"subject": "A", "predicate": "p", "object": {"entity": "Q"}}]})",
      R"({"entities": [{"id": "A"}], "predicates": [{"id": "p"}],
          "statements": [{"subject": "A", "predicate": "q", "object": {"entity": "A"}}]})",
      R"({"entities": [{"id": "A"}], "predicates": [{"id": "p"}],
          "statements": [{"subject": "A", "predicate": "p", "object": {"time": "19x"}}]})",
      R"({"predicates": [{"id": "p", "flags": ["SOMETIMES"]}]})",
  };
  for (const char* doc : bad) EXPECT_THROW(KnowledgeGraph::from_json(doc), LoadError) << doc;
  EXPECT_THROW(KnowledgeGraph::load("/nonexistent/graph.json"), LoadError);
}

TEST(KnowledgeGraph, LinksLongestAliasCaseInsensitively) {
  const auto g = KnowledgeGraph::from_json(kSmall);
  const auto m = g.link_entities("Did the first meet gamma ray or Beta?");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(g.entity(m[0].entity).id, "A");
  EXPECT_EQ(m[0].text, "the first");
  EXPECT_EQ(g.entity(m[1].entity).id, "C");
  EXPECT_EQ(g.entity(m[2].entity).id, "B");
}

TEST(KnowledgeGraph, LinksFixtureQuestionEntities) {
  const auto& g = testing::fixture_graph();
  std::vector<std::string> ids;
  for (const auto& m : g.link_entities("Who became the president after J.F. Kennedy was shot?")) {
    ids.push_back(g.entity(m.entity).id);
  }
  EXPECT_NE(std::find(ids.begin(), ids.end(), "John_F._Kennedy"), ids.end());
}

TEST(KnowledgeGraph, ShortestPathsStopAtFirstHit) {
  const auto g = KnowledgeGraph::from_json(kSmall);
  const Value target = g.entity_index("C");
  const auto paths = g.shortest_paths(g.entity_index("A"), std::span(&target, 1), 2);
  ASSERT_EQ(paths.size(), 1u);
  ASSERT_EQ(paths[0].size(), 2u);
  EXPECT_TRUE(paths[0][0].forward);
  EXPECT_TRUE(paths[0][1].forward);
  EXPECT_TRUE(g.shortest_paths(g.entity_index("A"), std::span(&target, 1), 1).empty());
}

}  // namespace
}  // namespace tempq
