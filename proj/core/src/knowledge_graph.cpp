#include "tempq/knowledge_graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tempq/error.hpp"
#include "tempq/text.hpp"

namespace tempq {

using nlohmann::json;

namespace {

constexpr std::pair<SchemaFlag, std::string_view> kFlagNames[] = {
    {SchemaFlag::kTemporalPoint, "TEMPORAL_POINT"},
    {SchemaFlag::kTemporalStart, "TEMPORAL_START"},
    {SchemaFlag::kTemporalEnd, "TEMPORAL_END"},
    {SchemaFlag::kPartOf, "PART_OF"},
    {SchemaFlag::kPrecedes, "PRECEDES"},
    {SchemaFlag::kSucceeds, "SUCCEEDS"},
    {SchemaFlag::kOrdinalAttribute, "ORDINAL_ATTRIBUTE"},
};

std::string alias_key(const std::vector<text::Token>& tokens, std::size_t begin,
                      std::size_t end) {
  std::string key;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) key += '\x1f';
    key += tokens[i].lower;
  }
  return key;
}

std::string require_string(const json& obj, const char* field, const std::string& where) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string()) {
    throw LoadError(where + ": missing string field '" + field + "'");
  }
  return it->get<std::string>();
}

struct TemporalQualifiers {
  const TimeValue* point = nullptr;
  const TimeValue* start = nullptr;
  const TimeValue* end = nullptr;
};

std::optional<TimeExtent> extent_from(const TemporalQualifiers& q, const std::string& what) {
  if (q.point) return TimeExtent{q.point->interval(), *q.point};
  if (q.start && q.end) {
    if (q.start->start() >= q.end->end()) {
      throw DataError(what + ": start " + q.start->text() + " lies after end " + q.end->text());
    }
    return TimeExtent{Interval(q.start->start(), q.end->end()), *q.start};
  }
  if (q.start) return TimeExtent{q.start->interval(), *q.start};
  if (q.end) return TimeExtent{q.end->interval(), *q.end};
  return std::nullopt;
}

}  // namespace

std::string_view to_string(SchemaFlag f) {
  for (const auto& [flag, name] : kFlagNames) {
    if (flag == f) return name;
  }
  return "?";
}

std::optional<SchemaFlag> schema_flag_from_string(std::string_view name) {
  for (const auto& [flag, n] : kFlagNames) {
    if (n == name) return flag;
  }
  return std::nullopt;
}

std::vector<SchemaFlag> flag_list(SchemaFlags flags) {
  std::vector<SchemaFlag> out;
  for (const auto& [flag, name] : kFlagNames) {
    if (flags.has(flag)) out.push_back(flag);
  }
  return out;
}

std::string Literal::key() const {
  switch (kind()) {
    case LiteralKind::kTime:
      return as_time().text();
    case LiteralKind::kInteger:
      return std::to_string(as_integer());
    case LiteralKind::kString:
      return as_string();
  }
  return {};
}

KnowledgeGraph KnowledgeGraph::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("graph is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw LoadError("graph document must be a JSON object");

  KnowledgeGraph g;
  const json empty = json::array();
  auto section = [&](const char* name) -> const json& {
    auto it = doc.find(name);
    if (it == doc.end()) return empty;
    if (!it->is_array()) throw LoadError(std::string("'") + name + "' must be an array");
    return *it;
  };

  for (const auto& e : section("entities")) {
    if (!e.is_object()) throw LoadError("entity entries must be objects");
    Entity ent;
    ent.id = require_string(e, "id", "entity");
    ent.label = e.contains("label") ? require_string(e, "label", "entity " + ent.id) : ent.id;
    if (auto it = e.find("aliases"); it != e.end()) {
      if (!it->is_array()) throw LoadError("entity " + ent.id + ": aliases must be an array");
      for (const auto& a : *it) {
        if (!a.is_string()) throw LoadError("entity " + ent.id + ": aliases must be strings");
        ent.aliases.push_back(a.get<std::string>());
      }
    }
    EntityIndex idx{static_cast<std::uint32_t>(g.entities_.size())};
    if (!g.entity_ids_.emplace(ent.id, idx).second) {
      throw LoadError("duplicate entity id '" + ent.id + "'");
    }
    g.entities_.push_back(std::move(ent));
  }

  for (const auto& p : section("predicates")) {
    if (!p.is_object()) throw LoadError("predicate entries must be objects");
    Predicate pred;
    pred.id = require_string(p, "id", "predicate");
    pred.label = p.contains("label") ? require_string(p, "label", "predicate " + pred.id) : pred.id;
    if (auto it = p.find("flags"); it != p.end()) {
      if (!it->is_array()) throw LoadError("predicate " + pred.id + ": flags must be an array");
      for (const auto& f : *it) {
        auto flag = f.is_string() ? schema_flag_from_string(f.get<std::string>()) : std::nullopt;
        if (!flag) throw LoadError("predicate " + pred.id + ": unknown flag " + f.dump());
        pred.flags.set(*flag);
      }
    }
    PredicateIndex idx{static_cast<std::uint32_t>(g.predicates_.size())};
    if (!g.predicate_ids_.emplace(pred.id, idx).second) {
      throw LoadError("duplicate predicate id '" + pred.id + "'");
    }
    g.predicates_.push_back(std::move(pred));
  }

  auto predicate_ref = [&](const json& obj, const std::string& where) {
    std::string id = require_string(obj, "predicate", where);
    auto p = g.find_predicate(id);
    if (!p) throw LoadError(where + ": unknown predicate '" + id + "'");
    return *p;
  };
  auto value_ref = [&](const json& v, const std::string& where) -> Value {
    if (!v.is_object() || v.size() != 1) {
      throw LoadError(where + ": value must be an object with exactly one of "
                              "entity/time/int/string");
    }
    const auto& [kind, payload] = *v.items().begin();
    if (kind == "entity" && payload.is_string()) {
      auto e = g.find_entity(payload.get<std::string>());
      if (!e) throw LoadError(where + ": dangling entity reference '" +
                              payload.get<std::string>() + "'");
      return *e;
    }
    if (kind == "time" && payload.is_string()) {
      try {
        return Literal::time(TimeValue::parse(payload.get<std::string>()));
      } catch (const ParseError& e) {
        throw LoadError(where + ": " + e.what());
      }
    }
    if (kind == "int" && payload.is_number_integer()) {
      return Literal::integer(payload.get<std::int64_t>());
    }
    if (kind == "string" && payload.is_string()) {
      return Literal::string(payload.get<std::string>());
    }
    throw LoadError(where + ": malformed value " + v.dump());
  };

  for (const auto& s : section("statements")) {
    std::string where = "statement #" + std::to_string(g.statements_.size());
    if (!s.is_object()) throw LoadError(where + " must be an object");
    std::string subject = require_string(s, "subject", where);
    auto subj = g.find_entity(subject);
    if (!subj) throw LoadError(where + ": dangling subject reference '" + subject + "'");
    PredicateIndex pred = predicate_ref(s, where);
    auto obj_it = s.find("object");
    if (obj_it == s.end()) throw LoadError(where + ": missing object");
    where += " (" + subject + " " + g.predicates_[pred.value].id + ")";
    Statement st{StatementIndex{static_cast<std::uint32_t>(g.statements_.size())}, *subj, pred,
                 value_ref(*obj_it, where), {}};
    if (auto it = s.find("qualifiers"); it != s.end()) {
      if (!it->is_array()) throw LoadError(where + ": qualifiers must be an array");
      TemporalQualifiers seen;
      int points = 0, starts = 0, ends = 0;
      for (const auto& q : *it) {
        if (!q.is_object()) throw LoadError(where + ": qualifier entries must be objects");
        PredicateIndex qp = predicate_ref(q, where);
        auto v = q.find("value");
        if (v == q.end()) throw LoadError(where + ": qualifier without value");
        st.qualifiers.push_back(Qualifier{qp, value_ref(*v, where)});
        SchemaFlags flags = g.predicates_[qp.value].flags;
        points += flags.has(SchemaFlag::kTemporalPoint);
        starts += flags.has(SchemaFlag::kTemporalStart);
        ends += flags.has(SchemaFlag::kTemporalEnd);
      }
      if (points > 1 || starts > 1 || ends > 1) {
        throw LoadError(where + ": more than one qualifier for the same temporal role");
      }
    }
    g.statements_.push_back(std::move(st));
  }

  g.build_indexes();
  return g;
}

KnowledgeGraph KnowledgeGraph::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open graph file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string KnowledgeGraph::to_json() const {
  auto value_json = [&](const Value& v) {
    json out = json::object();
    if (auto e = as_entity(v)) {
      out["entity"] = entities_[e->value].id;
      return out;
    }
    const Literal& lit = std::get<Literal>(v);
    switch (lit.kind()) {
      case LiteralKind::kTime:
        out["time"] = lit.as_time().text();
        break;
      case LiteralKind::kInteger:
        out["int"] = lit.as_integer();
        break;
      case LiteralKind::kString:
        out["string"] = lit.as_string();
        break;
    }
    return out;
  };

  json doc = json::object();
  json ents = json::array();
  for (const auto& e : entities_) {
    ents.push_back({{"id", e.id}, {"label", e.label}, {"aliases", e.aliases}});
  }
  json preds = json::array();
  for (const auto& p : predicates_) {
    json flags = json::array();
    for (SchemaFlag f : flag_list(p.flags)) flags.push_back(std::string(to_string(f)));
    preds.push_back({{"id", p.id}, {"label", p.label}, {"flags", flags}});
  }
  json stmts = json::array();
  for (const auto& s : statements_) {
    json quals = json::array();
    for (const auto& q : s.qualifiers) {
      quals.push_back({{"predicate", predicates_[q.predicate.value].id},
                       {"value", value_json(q.value)}});
    }
    stmts.push_back({{"subject", entities_[s.subject.value].id},
                     {"predicate", predicates_[s.predicate.value].id},
                     {"object", value_json(s.object)},
                     {"qualifiers", quals}});
  }
  doc["entities"] = ents;
  doc["predicates"] = preds;
  doc["statements"] = stmts;
  return doc.dump(2);
}

void KnowledgeGraph::build_indexes() {
  subject_index_.assign(entities_.size(), {});
  object_index_.assign(entities_.size(), {});
  qualifier_value_index_.assign(entities_.size(), {});
  predicate_index_.assign(predicates_.size(), {});
  qualifier_predicate_index_.assign(predicates_.size(), {});
  for (const auto& s : statements_) {
    subject_index_[s.subject.value].push_back(s.index);
    predicate_index_[s.predicate.value].push_back(s.index);
    if (auto o = as_entity(s.object)) object_index_[o->value].push_back(s.index);
    for (const auto& q : s.qualifiers) {
      auto& qp = qualifier_predicate_index_[q.predicate.value];
      if (qp.empty() || qp.back() != s.index) qp.push_back(s.index);
      if (auto v = as_entity(q.value)) {
        auto& qv = qualifier_value_index_[v->value];
        if (qv.empty() || qv.back() != s.index) qv.push_back(s.index);
      }
    }
  }

  aliases_.clear();
  max_alias_tokens_ = 0;
  for (std::uint32_t i = 0; i < entities_.size(); ++i) {
    std::vector<std::string> names{entities_[i].label};
    names.insert(names.end(), entities_[i].aliases.begin(), entities_[i].aliases.end());
    for (const auto& name : names) {
      auto tokens = text::tokenize(name);
      if (tokens.empty()) continue;
      aliases_.emplace(alias_key(tokens, 0, tokens.size()), EntityIndex{i});
      max_alias_tokens_ = std::max(max_alias_tokens_, tokens.size());
    }
  }
}

std::optional<EntityIndex> KnowledgeGraph::find_entity(std::string_view id) const {
  auto it = entity_ids_.find(std::string(id));
  if (it == entity_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<PredicateIndex> KnowledgeGraph::find_predicate(std::string_view id) const {
  auto it = predicate_ids_.find(std::string(id));
  if (it == predicate_ids_.end()) return std::nullopt;
  return it->second;
}

EntityIndex KnowledgeGraph::entity_index(std::string_view id) const {
  auto e = find_entity(id);
  if (!e) throw UsageError("unknown entity '" + std::string(id) + "'");
  return *e;
}

std::span<const StatementIndex> KnowledgeGraph::by_subject(EntityIndex e) const {
  return subject_index_.at(e.value);
}
std::span<const StatementIndex> KnowledgeGraph::by_object(EntityIndex e) const {
  return object_index_.at(e.value);
}
std::span<const StatementIndex> KnowledgeGraph::by_predicate(PredicateIndex p) const {
  return predicate_index_.at(p.value);
}
std::span<const StatementIndex> KnowledgeGraph::by_qualifier_value(EntityIndex e) const {
  return qualifier_value_index_.at(e.value);
}
std::span<const StatementIndex> KnowledgeGraph::by_qualifier_predicate(PredicateIndex p) const {
  return qualifier_predicate_index_.at(p.value);
}

std::vector<StatementIndex> KnowledgeGraph::neighbors(EntityIndex e) const {
  std::vector<StatementIndex> out;
  for (auto s : by_subject(e)) out.push_back(s);
  for (auto s : by_object(e)) out.push_back(s);
  for (auto s : by_qualifier_value(e)) out.push_back(s);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<TimeExtent> KnowledgeGraph::temporal_extent(const Statement& s) const {
  TemporalQualifiers q;
  for (const auto& qual : s.qualifiers) {
    const Literal* lit = as_literal(qual.value);
    if (!lit || !lit->is_time()) continue;
    SchemaFlags flags = predicates_[qual.predicate.value].flags;
    if (flags.has(SchemaFlag::kTemporalPoint)) q.point = &lit->as_time();
    if (flags.has(SchemaFlag::kTemporalStart)) q.start = &lit->as_time();
    if (flags.has(SchemaFlag::kTemporalEnd)) q.end = &lit->as_time();
  }
  return extent_from(q, "statement " + entities_[s.subject.value].id + " " +
                            predicates_[s.predicate.value].id);
}

std::optional<Interval> KnowledgeGraph::temporal_of(const Statement& s) const {
  auto ext = temporal_extent(s);
  if (!ext) return std::nullopt;
  return ext->span;
}

std::optional<TimeExtent> KnowledgeGraph::event_time(EntityIndex e) const {
  TemporalQualifiers q;
  for (auto si : by_subject(e)) {
    const Statement& s = statements_[si.value];
    const Literal* lit = as_literal(s.object);
    if (!lit || !lit->is_time()) continue;
    SchemaFlags flags = predicates_[s.predicate.value].flags;
    if (flags.has(SchemaFlag::kTemporalPoint) && !q.point) q.point = &lit->as_time();
    if (flags.has(SchemaFlag::kTemporalStart) && !q.start) q.start = &lit->as_time();
    if (flags.has(SchemaFlag::kTemporalEnd) && !q.end) q.end = &lit->as_time();
  }
  return extent_from(q, "entity " + entities_[e.value].id);
}

std::vector<EntityMention> KnowledgeGraph::link_entities(std::string_view question) const {
  std::vector<EntityMention> out;
  auto tokens = text::tokenize(question);
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    if (tokens[i].word) {
      std::size_t longest = std::min(max_alias_tokens_, tokens.size() - i);
      for (std::size_t len = longest; len >= 1; --len) {
        auto it = aliases_.find(alias_key(tokens, i, i + len));
        if (it == aliases_.end()) continue;
        std::size_t begin = tokens[i].begin;
        std::size_t end = tokens[i + len - 1].end;
        out.push_back({begin, end, std::string(question.substr(begin, end - begin)), it->second});
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return out;
}

std::vector<PredicatePath> KnowledgeGraph::shortest_paths(EntityIndex from,
                                                          std::span<const Value> targets,
                                                          int max_hops) const {
  auto is_target = [&](const Value& v) {
    if (auto e = as_entity(v); e && *e == from) return false;
    return std::find(targets.begin(), targets.end(), v) != targets.end();
  };

  struct Frontier {
    EntityIndex node;
    PredicatePath path;
  };
  std::vector<Frontier> frontier{{from, {}}};
  std::set<EntityIndex> visited{from};
  std::vector<PredicatePath> found;

  for (int hop = 1; hop <= max_hops && !frontier.empty(); ++hop) {
    std::vector<Frontier> next;
    std::set<EntityIndex> reached;
    auto step = [&](const Frontier& f, const Value& far, PathStep s) {
      PredicatePath path = f.path;
      path.push_back(s);
      if (is_target(far)) {
        if (std::find(found.begin(), found.end(), path) == found.end()) found.push_back(path);
      }
      if (auto e = as_entity(far); e && !visited.count(*e)) {
        reached.insert(*e);
        next.push_back({*e, std::move(path)});
      }
    };
    for (const auto& f : frontier) {
      for (auto si : by_subject(f.node)) {
        const Statement& s = statements_[si.value];
        step(f, s.object, {s.predicate, true});
      }
      for (auto si : by_object(f.node)) {
        const Statement& s = statements_[si.value];
        step(f, s.subject, {s.predicate, false});
      }
    }
    if (!found.empty()) break;
    visited.insert(reached.begin(), reached.end());
    frontier = std::move(next);
  }
  return found;
}

std::string KnowledgeGraph::value_key(const Value& v) const {
  if (auto e = as_entity(v)) return entities_[e->value].id;
  return std::get<Literal>(v).key();
}

std::string KnowledgeGraph::value_label(const Value& v) const {
  if (auto e = as_entity(v)) return entities_[e->value].label;
  return std::get<Literal>(v).key();
}

std::string KnowledgeGraph::path_to_string(const PredicatePath& path) const {
  std::string out;
  for (const auto& s : path) {
    if (!out.empty()) out += '/';
    if (!s.forward) out += '^';
    out += predicates_[s.predicate.value].id;
  }
  return out;
}

}  // namespace tempq
