#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tempq/knowledge_graph.hpp"
#include "tempq/lexicon.hpp"
#include "tempq/time.hpp"

namespace tempq {

using NodeId = std::size_t;

enum class NodeKind { kEntity, kLiteral, kVariable, kStatement };

struct QueryNode {
  NodeKind kind = NodeKind::kVariable;
  std::optional<EntityIndex> entity;
  std::optional<Literal> literal;

  friend bool operator==(const QueryNode&, const QueryNode&) = default;
};

enum class EdgeKind {
  kTriple,            // from -p-> to, a plain statement
  kStatementSubject,  // from is the subject of statement node `to` with predicate p
  kStatementObject,   // `to` is the object of statement node `from`, predicate p
  kQualifier,         // statement node `from` has qualifier (p, to)
  kTime,              // `to` is the time of statement node `from`
};

struct QueryEdge {
  EdgeKind kind = EdgeKind::kTriple;
  NodeId from = 0;
  PredicateIndex predicate;  // unused for kTime
  NodeId to = 0;

  friend bool operator==(const QueryEdge&, const QueryEdge&) = default;
};

// pred(reference, subject) in the sense of `satisfies`.
struct TemporalFilter {
  ComparisonPredicate predicate = ComparisonPredicate::kEqual;
  std::variant<TimeValue, NodeId> reference;
  NodeId subject = 0;

  friend bool operator==(const TemporalFilter&, const TemporalFilter&) = default;
};

struct OrdinalSelector {
  NodeId key = 0;
  int rank = 1;
  OrdinalDirection direction = OrdinalDirection::kFromFirst;

  friend bool operator==(const OrdinalSelector&, const OrdinalSelector&) = default;
};

// Answers are keyed by entity id or canonical literal text.
using AnswerSet = std::set<std::string>;

enum class SerializationMode { kRanking, kDebug };

class QueryGraph {
 public:
  NodeId add_entity(EntityIndex e);
  NodeId add_literal(Literal l);
  NodeId add_variable();
  NodeId add_statement();

  void add_edge(QueryEdge e) { edges_.push_back(e); }
  void add_triple(NodeId from, PredicateIndex p, NodeId to) {
    add_edge({EdgeKind::kTriple, from, p, to});
  }
  void add_filter(TemporalFilter f) { filters_.push_back(std::move(f)); }
  void set_ordinal(OrdinalSelector o) { ordinal_ = o; }
  void set_answer(NodeId n) { answer_ = n; }

  const std::vector<QueryNode>& nodes() const { return nodes_; }
  const std::vector<QueryEdge>& edges() const { return edges_; }
  const std::vector<TemporalFilter>& filters() const { return filters_; }
  const std::optional<OrdinalSelector>& ordinal() const { return ordinal_; }
  std::optional<NodeId> answer() const { return answer_; }

  // Copies `other` into this graph, identifying its answer with ours and
  // sharing constant nodes. Returns the node mapping.
  std::vector<NodeId> conjoin(const QueryGraph& other);

  // Reason the graph is invalid, if it is.
  std::optional<std::string> validation_error() const;

  friend bool operator==(const QueryGraph&, const QueryGraph&) = default;

 private:
  std::vector<QueryNode> nodes_;
  std::vector<QueryEdge> edges_;
  std::vector<TemporalFilter> filters_;
  std::optional<OrdinalSelector> ordinal_;
  std::optional<NodeId> answer_;
};

// Value a query node takes in one solution.
using Binding = std::variant<std::monostate, EntityIndex, Literal, StatementIndex, TimeExtent>;

// Conjunctive pattern matching, then filters, then ordinal selection.
// Throws ExecutionError for invalid graphs, including unbound filter variables.
AnswerSet execute(const QueryGraph& q, const KnowledgeGraph& g);

// Raw solutions of the edge pattern, before filters and ordinal selection.
std::vector<std::vector<Binding>> match_pattern(const QueryGraph& q, const KnowledgeGraph& g);

std::string binding_key(const Binding& b, const KnowledgeGraph& g);
std::optional<Interval> binding_interval(const Binding& b);

std::string serialize(const QueryGraph& q, const KnowledgeGraph& g, SerializationMode mode);

// "first", "last", "7th", "2nd last".
std::string ordinal_words(int rank, OrdinalDirection direction);

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  friend bool operator==(const Scores&, const Scores&) = default;
};

// Empty predictions score precision 1 and recall 0. Throws UsageError on an
// empty gold set.
Scores f1_score(const AnswerSet& predicted, const AnswerSet& gold);

}  // namespace tempq
