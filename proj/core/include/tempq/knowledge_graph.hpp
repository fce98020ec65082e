#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tempq/time.hpp"

namespace tempq {

// Dense index into one of the graph's tables.
template <typename Tag>
struct Index {
  std::uint32_t value = 0;
  constexpr auto operator<=>(const Index&) const = default;
};

using EntityIndex = Index<struct EntityTag>;
using PredicateIndex = Index<struct PredicateTag>;
using StatementIndex = Index<struct StatementTag>;

enum class SchemaFlag : unsigned {
  kTemporalPoint = 1u << 0,
  kTemporalStart = 1u << 1,
  kTemporalEnd = 1u << 2,
  kPartOf = 1u << 3,
  kPrecedes = 1u << 4,
  kSucceeds = 1u << 5,
  kOrdinalAttribute = 1u << 6,
};

class SchemaFlags {
 public:
  constexpr SchemaFlags() = default;
  constexpr SchemaFlags(SchemaFlag f) : bits_(static_cast<unsigned>(f)) {}

  constexpr bool has(SchemaFlag f) const { return (bits_ & static_cast<unsigned>(f)) != 0; }
  constexpr void set(SchemaFlag f) { bits_ |= static_cast<unsigned>(f); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool temporal() const {
    return has(SchemaFlag::kTemporalPoint) || has(SchemaFlag::kTemporalStart) ||
           has(SchemaFlag::kTemporalEnd);
  }
  constexpr bool sequence() const {
    return has(SchemaFlag::kPrecedes) || has(SchemaFlag::kSucceeds);
  }
  constexpr unsigned bits() const { return bits_; }

  friend constexpr bool operator==(SchemaFlags, SchemaFlags) = default;

 private:
  unsigned bits_ = 0;
};

std::string_view to_string(SchemaFlag f);
std::optional<SchemaFlag> schema_flag_from_string(std::string_view name);
std::vector<SchemaFlag> flag_list(SchemaFlags flags);

struct Entity {
  std::string id;
  std::string label;
  std::vector<std::string> aliases;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct Predicate {
  std::string id;
  std::string label;
  SchemaFlags flags;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

enum class LiteralKind { kTime, kInteger, kString };

class Literal {
 public:
  static Literal time(TimeValue t) { return Literal(std::move(t)); }
  static Literal integer(std::int64_t v) { return Literal(v); }
  static Literal string(std::string s) { return Literal(std::move(s)); }

  LiteralKind kind() const { return static_cast<LiteralKind>(value_.index()); }
  bool is_time() const { return kind() == LiteralKind::kTime; }
  const TimeValue& as_time() const { return std::get<TimeValue>(value_); }
  std::int64_t as_integer() const { return std::get<std::int64_t>(value_); }
  const std::string& as_string() const { return std::get<std::string>(value_); }

  // Canonical text: ISO prefix for times, decimal for integers.
  std::string key() const;

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.kind() == b.kind() && a.key() == b.key();
  }
  friend bool operator<(const Literal& a, const Literal& b) {
    if (a.kind() != b.kind()) return a.kind() < b.kind();
    return a.key() < b.key();
  }

 private:
  explicit Literal(TimeValue t) : value_(std::move(t)) {}
  explicit Literal(std::int64_t v) : value_(v) {}
  explicit Literal(std::string s) : value_(std::move(s)) {}

  std::variant<TimeValue, std::int64_t, std::string> value_;
};

using Value = std::variant<EntityIndex, Literal>;

inline const EntityIndex* as_entity(const Value& v) { return std::get_if<EntityIndex>(&v); }
inline const Literal* as_literal(const Value& v) { return std::get_if<Literal>(&v); }

struct Qualifier {
  PredicateIndex predicate;
  Value value;

  friend bool operator==(const Qualifier&, const Qualifier&) = default;
};

struct Statement {
  StatementIndex index;
  EntityIndex subject;
  PredicateIndex predicate;
  Value object;
  std::vector<Qualifier> qualifiers;

  friend bool operator==(const Statement&, const Statement&) = default;
};

// A time attached to a fact: the span used for comparisons and the lexical
// value reported when the time itself is the answer.
struct TimeExtent {
  Interval span;
  TimeValue anchor;

  friend bool operator==(const TimeExtent&, const TimeExtent&) = default;
};

struct EntityMention {
  std::size_t begin = 0;  // byte offsets into the question
  std::size_t end = 0;
  std::string text;
  EntityIndex entity;

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

struct PathStep {
  PredicateIndex predicate;
  bool forward = true;

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

using PredicatePath = std::vector<PathStep>;

// Immutable, qualifier-aware knowledge graph. All indexes list statements in
// insertion order, so every query over the graph is deterministic.
class KnowledgeGraph {
 public:
  // Parses the JSON graph format. Throws LoadError on dangling references,
  // duplicate ids or malformed values.
  static KnowledgeGraph from_json(std::string_view json_text);
  static KnowledgeGraph load(const std::filesystem::path& path);

  // Inverse of from_json; times are written in canonical form.
  std::string to_json() const;

  std::size_t entity_count() const { return entities_.size(); }
  std::size_t predicate_count() const { return predicates_.size(); }
  std::size_t statement_count() const { return statements_.size(); }

  const Entity& entity(EntityIndex e) const { return entities_.at(e.value); }
  const Predicate& predicate(PredicateIndex p) const { return predicates_.at(p.value); }
  const Statement& statement(StatementIndex s) const { return statements_.at(s.value); }
  std::span<const Statement> statements() const { return statements_; }

  std::optional<EntityIndex> find_entity(std::string_view id) const;
  std::optional<PredicateIndex> find_predicate(std::string_view id) const;
  // Throws UsageError for unknown ids.
  EntityIndex entity_index(std::string_view id) const;

  std::span<const StatementIndex> by_subject(EntityIndex e) const;
  std::span<const StatementIndex> by_object(EntityIndex e) const;
  std::span<const StatementIndex> by_predicate(PredicateIndex p) const;
  std::span<const StatementIndex> by_qualifier_value(EntityIndex e) const;
  std::span<const StatementIndex> by_qualifier_predicate(PredicateIndex p) const;

  // Every statement where `e` is the subject, the object or a qualifier value,
  // in insertion order.
  std::vector<StatementIndex> neighbors(EntityIndex e) const;

  // Interval from the statement's temporal qualifiers: a point value, or the
  // hull of start and end. Throws DataError when start lies after end.
  std::optional<Interval> temporal_of(const Statement& s) const;
  std::optional<TimeExtent> temporal_extent(const Statement& s) const;

  // Time of an event-like entity given by its own temporal attribute
  // statements (e.g. "time" on a murder).
  std::optional<TimeExtent> event_time(EntityIndex e) const;

  // Greedy, case-insensitive longest match over labels and aliases.
  std::vector<EntityMention> link_entities(std::string_view question) const;

  // All minimal predicate paths of at most `max_hops` main edges from `from`
  // to any target. `from` itself is never a target.
  std::vector<PredicatePath> shortest_paths(EntityIndex from, std::span<const Value> targets,
                                            int max_hops = 2) const;

  // Entity id or literal key.
  std::string value_key(const Value& v) const;
  // Entity label or literal key.
  std::string value_label(const Value& v) const;
  std::string path_to_string(const PredicatePath& path) const;

  friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    return a.entities_ == b.entities_ && a.predicates_ == b.predicates_ &&
           a.statements_ == b.statements_;
  }

 private:
  KnowledgeGraph() = default;
  void build_indexes();

  std::vector<Entity> entities_;
  std::vector<Predicate> predicates_;
  std::vector<Statement> statements_;

  std::unordered_map<std::string, EntityIndex> entity_ids_;
  std::unordered_map<std::string, PredicateIndex> predicate_ids_;
  std::vector<std::vector<StatementIndex>> subject_index_;
  std::vector<std::vector<StatementIndex>> object_index_;
  std::vector<std::vector<StatementIndex>> predicate_index_;
  std::vector<std::vector<StatementIndex>> qualifier_value_index_;
  std::vector<std::vector<StatementIndex>> qualifier_predicate_index_;
  // Lowercased alias tokens joined by '\x1f' -> entity; first declaration wins.
  std::map<std::string, EntityIndex> aliases_;
  std::size_t max_alias_tokens_ = 0;
};

inline KnowledgeGraph load_graph(const std::filesystem::path& path) {
  return KnowledgeGraph::load(path);
}

}  // namespace tempq
