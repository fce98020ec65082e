#include "tempq/grounding.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "tempq/error.hpp"
#include "tempq/text.hpp"

namespace tempq {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

GroundingConfig GroundingConfig::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("grounding config is not valid JSON: ") + e.what());
  }
  GroundingConfig cfg;
  try {
    if (doc.contains("enabled")) {
      cfg.enabled.clear();
      for (const auto& v : doc.at("enabled")) {
        auto s = structure_from_string(v.get<std::string>());
        if (!s || *s == Structure::kBasic) {
          throw LoadError("grounding config: unknown structure " + v.dump());
        }
        cfg.enabled.insert(*s);
      }
    }
    if (doc.contains("beam_width")) cfg.beam_width = doc.at("beam_width").get<int>();
    if (doc.contains("max_hops")) cfg.max_hops = doc.at("max_hops").get<int>();
    if (doc.contains("require_nonempty")) {
      cfg.require_nonempty = doc.at("require_nonempty").get<bool>();
    }
  } catch (const json::exception& e) {
    throw LoadError(std::string("grounding config: ") + e.what());
  }
  if (cfg.beam_width < 1) throw LoadError("grounding config: beam_width must be positive");
  if (cfg.max_hops < 1 || cfg.max_hops > 2) {
    throw LoadError("grounding config: max_hops must be 1 or 2");
  }
  return cfg;
}

GroundingConfig GroundingConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string GroundingConfig::to_json() const {
  json enabled_list = json::array();
  for (Structure s : enabled) enabled_list.push_back(std::string(to_string(s)));
  return json{{"enabled", enabled_list},
              {"beam_width", beam_width},
              {"max_hops", max_hops},
              {"require_nonempty", require_nonempty}}
      .dump();
}

std::set<Structure> parse_structure_list(std::string_view list) {
  std::set<Structure> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string_view::npos) comma = list.size();
    std::string item(list.substr(pos, comma - pos));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) {
      auto s = structure_from_string(item);
      if (!s || *s == Structure::kBasic) {
        throw ParseError("unknown interpretation structure '" + item + "'");
      }
      out.insert(*s);
    }
    pos = comma + 1;
  }
  return out;
}

std::string to_string(const TemplateRef& t) {
  std::string out(to_string(t.structure));
  if (t.projection) out += "(projection)";
  else if (t.predicate) out += "(" + std::string(to_string(*t.predicate)) + ")";
  if (t.constraint) out += " of constraint " + std::to_string(*t.constraint + 1);
  return out;
}

bool Candidate::uses(Structure s) const {
  return std::any_of(provenance.begin(), provenance.end(),
                     [&](const TemplateRef& t) { return t.structure == s; });
}

// ---------------------------------------------------------------------------
// Logged construction

namespace {

NodeId apply_op(QueryGraph& q, const BuildOp& op) {
  return std::visit(
      [&](const auto& o) -> NodeId {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, op::AddEntity>) {
          return q.add_entity(o.entity);
        } else if constexpr (std::is_same_v<T, op::AddLiteral>) {
          return q.add_literal(o.literal);
        } else if constexpr (std::is_same_v<T, op::AddVariable>) {
          return q.add_variable();
        } else if constexpr (std::is_same_v<T, op::AddStatement>) {
          return q.add_statement();
        } else if constexpr (std::is_same_v<T, op::AddEdge>) {
          q.add_edge(o.edge);
        } else if constexpr (std::is_same_v<T, op::AddFilter>) {
          q.add_filter(o.filter);
        } else if constexpr (std::is_same_v<T, op::SetOrdinal>) {
          q.set_ordinal(o.selector);
        } else {
          q.set_answer(o.node);
        }
        return 0;
      },
      op);
}

bool creates_node(const BuildOp& op) {
  return std::holds_alternative<op::AddEntity>(op) || std::holds_alternative<op::AddLiteral>(op) ||
         std::holds_alternative<op::AddVariable>(op) || std::holds_alternative<op::AddStatement>(op);
}

class Builder {
 public:
  const QueryGraph& graph() const { return q_; }
  const std::vector<SlotFill>& log() const { return log_; }

  NodeId entity(EntityIndex e, const std::string& slot) {
    for (NodeId n = 0; n < q_.nodes().size(); ++n) {
      const auto& node = q_.nodes()[n];
      if (node.kind == NodeKind::kEntity && *node.entity == e) return n;
    }
    return record(slot, op::AddEntity{e}, {});
  }

  NodeId literal(const Literal& l, const std::string& slot) {
    for (NodeId n = 0; n < q_.nodes().size(); ++n) {
      const auto& node = q_.nodes()[n];
      if (node.kind == NodeKind::kLiteral && *node.literal == l) return n;
    }
    return record(slot, op::AddLiteral{l}, {});
  }

  NodeId variable(const std::string& slot) { return record(slot, op::AddVariable{}, {}); }
  NodeId statement(const std::string& slot) { return record(slot, op::AddStatement{}, {}); }

  void edge(EdgeKind kind, NodeId from, PredicateIndex p, NodeId to, const std::string& slot,
            std::vector<StatementIndex> evidence) {
    record(slot, op::AddEdge{QueryEdge{kind, from, p, to}}, std::move(evidence));
  }
  void time(NodeId stmt, NodeId var, const std::string& slot,
            std::vector<StatementIndex> evidence) {
    record(slot, op::AddEdge{QueryEdge{EdgeKind::kTime, stmt, PredicateIndex{}, var}},
           std::move(evidence));
  }
  void filter(TemporalFilter f, const std::string& slot) {
    record(slot, op::AddFilter{std::move(f)}, {});
  }
  void ordinal(OrdinalSelector o, const std::string& slot) {
    record(slot, op::SetOrdinal{o}, {});
  }
  void answer(NodeId n, const std::string& slot) { record(slot, op::SetAnswer{n}, {}); }

  void push(const SlotFill& fill) { record(fill.slot, fill.op, fill.evidence); }

  // Replays another builder's log into this one. Nodes listed in `identify`
  // are mapped onto existing nodes; constants are shared.
  std::vector<NodeId> absorb(const Builder& other, const std::map<NodeId, NodeId>& identify) {
    std::vector<NodeId> map;
    auto remap = [&](NodeId n) { return map.at(n); };
    for (const auto& fill : other.log_) {
      if (creates_node(fill.op)) {
        const NodeId theirs = map.size();
        if (auto it = identify.find(theirs); it != identify.end()) {
          map.push_back(it->second);
        } else if (auto e = std::get_if<op::AddEntity>(&fill.op)) {
          map.push_back(entity(e->entity, fill.slot));
        } else if (auto l = std::get_if<op::AddLiteral>(&fill.op)) {
          map.push_back(literal(l->literal, fill.slot));
        } else {
          map.push_back(record(fill.slot, fill.op, fill.evidence));
        }
        continue;
      }
      if (auto e = std::get_if<op::AddEdge>(&fill.op)) {
        QueryEdge edge = e->edge;
        edge.from = remap(edge.from);
        edge.to = remap(edge.to);
        record(fill.slot, op::AddEdge{edge}, fill.evidence);
      } else if (auto f = std::get_if<op::AddFilter>(&fill.op)) {
        TemporalFilter filter = f->filter;
        filter.subject = remap(filter.subject);
        if (auto r = std::get_if<NodeId>(&filter.reference)) filter.reference = remap(*r);
        record(fill.slot, op::AddFilter{filter}, fill.evidence);
      } else if (auto o = std::get_if<op::SetOrdinal>(&fill.op)) {
        OrdinalSelector sel = o->selector;
        sel.key = remap(sel.key);
        record(fill.slot, op::SetOrdinal{sel}, fill.evidence);
      }
      // The absorbed answer is either identified with ours or dropped.
    }
    return map;
  }

 private:
  NodeId record(const std::string& slot, BuildOp op, std::vector<StatementIndex> evidence) {
    const NodeId n = apply_op(q_, op);
    log_.push_back({slot, std::move(op), std::move(evidence)});
    return n;
  }

  QueryGraph q_;
  std::vector<SlotFill> log_;
};

bool has_time(const KnowledgeGraph& g, StatementIndex s) {
  try {
    return g.temporal_extent(g.statement(s)).has_value();
  } catch (const DataError&) {
    return false;
  }
}

bool has_event_time(const KnowledgeGraph& g, EntityIndex e) {
  try {
    return g.event_time(e).has_value();
  } catch (const DataError&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Hops

enum class HopKind { kForward, kBackward, kQualifierOut, kQualifierInSubject, kQualifierInObject };

struct Hop {
  HopKind kind = HopKind::kForward;
  PredicateIndex predicate;
  std::optional<PredicateIndex> qualifier;
  std::vector<StatementIndex> evidence;
  std::vector<Value> far;
};

using HopKey = std::tuple<int, std::uint32_t, std::uint32_t>;

void add_far(Hop& h, StatementIndex s, const Value& v) {
  if (h.evidence.empty() || h.evidence.back() != s) h.evidence.push_back(s);
  if (std::find(h.far.begin(), h.far.end(), v) == h.far.end()) h.far.push_back(v);
}

std::vector<Hop> hops_from(const KnowledgeGraph& g, EntityIndex e, bool qualifiers,
                           const std::set<StatementIndex>& exclude = {}) {
  std::map<HopKey, Hop> hops;
  auto slot = [&](HopKind k, PredicateIndex p, std::optional<PredicateIndex> q) -> Hop& {
    HopKey key{static_cast<int>(k), p.value, q ? q->value + 1 : 0};
    auto it = hops.find(key);
    if (it == hops.end()) it = hops.emplace(key, Hop{k, p, q, {}, {}}).first;
    return it->second;
  };
  for (auto si : g.by_subject(e)) {
    if (exclude.count(si)) continue;
    const Statement& s = g.statement(si);
    add_far(slot(HopKind::kForward, s.predicate, std::nullopt), si, s.object);
    if (!qualifiers) continue;
    for (const auto& q : s.qualifiers) {
      add_far(slot(HopKind::kQualifierOut, s.predicate, q.predicate), si, q.value);
    }
  }
  for (auto si : g.by_object(e)) {
    if (exclude.count(si)) continue;
    const Statement& s = g.statement(si);
    add_far(slot(HopKind::kBackward, s.predicate, std::nullopt), si, s.subject);
  }
  if (qualifiers) {
    for (auto si : g.by_qualifier_value(e)) {
      const Statement& s = g.statement(si);
      for (const auto& q : s.qualifiers) {
        if (as_entity(q.value) == nullptr || *as_entity(q.value) != e) continue;
        add_far(slot(HopKind::kQualifierInSubject, s.predicate, q.predicate), si, s.subject);
        add_far(slot(HopKind::kQualifierInObject, s.predicate, q.predicate), si, s.object);
      }
    }
  }
  std::vector<Hop> out;
  for (auto& [key, h] : hops) out.push_back(std::move(h));
  return out;
}

std::size_t overlap(const std::set<std::string>& terms, const std::vector<std::string>& words) {
  std::set<std::string> seen;
  for (const auto& w : words) {
    if (terms.count(w)) seen.insert(w);
  }
  return seen.size();
}

class Grounder {
 public:
  explicit Grounder(const GroundingContext& ctx)
      : ctx_(ctx), g_(ctx.kg()), terms_(ctx.terms->question_terms(ctx.question)) {}

  // A path from an anchor to a fresh answer variable.
  struct Path {
    Builder b;
    EntityIndex anchor;
    NodeId answer = 0;
    NodeId final_statement = 0;
    PredicateIndex final_predicate;
    int hops = 1;
    std::vector<StatementIndex> final_evidence;
    std::vector<Value> answers;
  };

  // A builder fragment ending in a time-valued node.
  struct TimeSource {
    Builder b;
    NodeId out = 0;
    EntityIndex anchor;
    std::optional<PredicateIndex> own_statement;  // set for qualifiers on the anchor's facts
  };

  std::size_t score_labels(std::initializer_list<std::string_view> labels) const {
    std::vector<std::string> words;
    for (auto l : labels) {
      for (auto& w : ctx_.terms->content_words(l)) words.push_back(std::move(w));
    }
    return overlap(terms_, words);
  }

  std::string plabel(PredicateIndex p) const { return g_.predicate(p).label; }

  template <typename T, typename ScoreFn, typename KeyFn>
  std::vector<T> beam(std::vector<T> items, ScoreFn score, KeyFn key) const {
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t i = 0; i < items.size(); ++i) order.emplace_back(score(items[i]), i);
    std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return key(items[a.second]) < key(items[b.second]);
    });
    std::vector<T> out;
    const auto width = static_cast<std::size_t>(ctx_.config.beam_width);
    for (std::size_t i = 0; i < order.size() && i < width; ++i) {
      out.push_back(std::move(items[order[i].second]));
    }
    return out;
  }

  std::vector<Hop> beam_hops(std::vector<Hop> hops) const {
    return beam(
        std::move(hops),
        [&](const Hop& h) {
          return score_labels({plabel(h.predicate), h.qualifier ? plabel(*h.qualifier) : ""});
        },
        [&](const Hop& h) {
          return std::make_tuple(g_.predicate(h.predicate).id,
                                 h.qualifier ? g_.predicate(*h.qualifier).id : std::string(),
                                 static_cast<int>(h.kind));
        });
  }

  // Adds the hop's edges from `from`; returns (statement node, far node).
  std::pair<NodeId, NodeId> apply_hop(Builder& b, NodeId from, const Hop& h,
                                      const std::string& slot) const {
    const NodeId s = b.statement(slot + ".statement");
    NodeId far = 0;
    const auto& ev = h.evidence;
    switch (h.kind) {
      case HopKind::kForward:
        b.edge(EdgeKind::kStatementSubject, from, h.predicate, s, slot + ".predicate", ev);
        far = b.variable(slot + ".value");
        b.edge(EdgeKind::kStatementObject, s, h.predicate, far, slot + ".predicate", ev);
        break;
      case HopKind::kBackward:
        far = b.variable(slot + ".value");
        b.edge(EdgeKind::kStatementSubject, far, h.predicate, s, slot + ".predicate", ev);
        b.edge(EdgeKind::kStatementObject, s, h.predicate, from, slot + ".predicate", ev);
        break;
      case HopKind::kQualifierOut:
        b.edge(EdgeKind::kStatementSubject, from, h.predicate, s, slot + ".predicate", ev);
        far = b.variable(slot + ".value");
        b.edge(EdgeKind::kQualifier, s, *h.qualifier, far, slot + ".qualifier", ev);
        break;
      case HopKind::kQualifierInSubject:
        b.edge(EdgeKind::kQualifier, s, *h.qualifier, from, slot + ".qualifier", ev);
        far = b.variable(slot + ".value");
        b.edge(EdgeKind::kStatementSubject, far, h.predicate, s, slot + ".predicate", ev);
        break;
      case HopKind::kQualifierInObject:
        b.edge(EdgeKind::kQualifier, s, *h.qualifier, from, slot + ".qualifier", ev);
        far = b.variable(slot + ".value");
        b.edge(EdgeKind::kStatementObject, s, h.predicate, far, slot + ".predicate", ev);
        break;
    }
    return {s, far};
  }

  // Connects two known entities through the statements in `evidence`.
  void bridge(Builder& b, NodeId subject, PredicateIndex p, NodeId object,
              std::vector<StatementIndex> evidence, const std::string& slot) const {
    const NodeId s = b.statement(slot + ".statement");
    b.edge(EdgeKind::kStatementSubject, subject, p, s, slot + ".predicate", evidence);
    b.edge(EdgeKind::kStatementObject, s, p, object, slot + ".predicate", std::move(evidence));
  }

  std::vector<Path> basic_paths(EntityIndex anchor) const {
    std::vector<Path> out;
    for (const Hop& h1 : beam_hops(hops_from(g_, anchor, true))) {
      {
        Path p;
        p.anchor = anchor;
        const NodeId a = p.b.entity(anchor, "anchor");
        auto [s, far] = apply_hop(p.b, a, h1, "hop1");
        p.b.answer(far, "answer");
        p.answer = far;
        p.final_statement = s;
        p.final_predicate = h1.predicate;
        p.final_evidence = h1.evidence;
        p.answers = h1.far;
        out.push_back(std::move(p));
      }
      if (ctx_.config.max_hops < 2) continue;
      if (h1.kind != HopKind::kForward && h1.kind != HopKind::kBackward) continue;

      const std::set<StatementIndex> used(h1.evidence.begin(), h1.evidence.end());
      std::map<HopKey, Hop> merged;
      for (const Value& mid : h1.far) {
        auto e = as_entity(mid);
        if (!e || *e == anchor) continue;
        for (Hop& h : hops_from(g_, *e, false, used)) {
          HopKey key{static_cast<int>(h.kind), h.predicate.value, 0};
          auto it = merged.find(key);
          if (it == merged.end()) {
            merged.emplace(key, std::move(h));
            continue;
          }
          for (auto s : h.evidence) it->second.evidence.push_back(s);
          for (auto& v : h.far) {
            if (std::find(it->second.far.begin(), it->second.far.end(), v) ==
                it->second.far.end()) {
              it->second.far.push_back(v);
            }
          }
        }
      }
      std::vector<Hop> second;
      for (auto& [k, h] : merged) {
        std::sort(h.evidence.begin(), h.evidence.end());
        second.push_back(std::move(h));
      }
      for (const Hop& h2 : beam_hops(std::move(second))) {
        Path p;
        p.anchor = anchor;
        const NodeId a = p.b.entity(anchor, "anchor");
        auto mid = apply_hop(p.b, a, h1, "hop1");
        auto [s, far] = apply_hop(p.b, mid.second, h2, "hop2");
        p.b.answer(far, "answer");
        p.answer = far;
        p.final_statement = s;
        p.final_predicate = h2.predicate;
        p.hops = 2;
        p.final_evidence = h2.evidence;
        p.answers = h2.far;
        out.push_back(std::move(p));
      }
    }
    return out;
  }

  std::vector<StatementIndex> timed(const std::vector<StatementIndex>& ev) const {
    std::vector<StatementIndex> out;
    for (auto s : ev) {
      if (has_time(g_, s)) out.push_back(s);
    }
    return out;
  }

  // Point-time attribute predicates of the given entities, with evidence.
  std::vector<std::pair<PredicateIndex, std::vector<StatementIndex>>> point_attributes(
      const std::vector<Value>& entities) const {
    std::map<std::uint32_t, std::vector<StatementIndex>> found;
    for (const Value& v : entities) {
      auto e = as_entity(v);
      if (!e) continue;
      for (auto si : g_.by_subject(*e)) {
        const Statement& s = g_.statement(si);
        auto lit = as_literal(s.object);
        if (!lit || !lit->is_time()) continue;
        if (!g_.predicate(s.predicate).flags.has(SchemaFlag::kTemporalPoint)) continue;
        found[s.predicate.value].push_back(si);
      }
    }
    std::vector<std::pair<PredicateIndex, std::vector<StatementIndex>>> out;
    for (auto& [p, ev] : found) out.emplace_back(PredicateIndex{p}, std::move(ev));
    return out;
  }

  // Time variables describing a path's answer: the final statement's time,
  // or a point-time attribute of the answer entity.
  struct TimeOption {
    Builder b;
    NodeId time = 0;
    bool statement_time = false;
  };

  std::vector<TimeOption> time_options(const Path& p, const std::string& slot) const {
    std::vector<TimeOption> out;
    if (auto ev = timed(p.final_evidence); !ev.empty()) {
      TimeOption o{p.b, 0, true};
      o.time = o.b.variable(slot + ".time");
      o.b.time(p.final_statement, o.time, slot + ".time", std::move(ev));
      out.push_back(std::move(o));
    }
    for (auto& [attr, ev] : point_attributes(p.answers)) {
      TimeOption o{p.b, 0, false};
      const NodeId s = o.b.statement(slot + ".attribute");
      o.b.edge(EdgeKind::kStatementSubject, p.answer, attr, s, slot + ".attribute", ev);
      o.time = o.b.variable(slot + ".time");
      o.b.edge(EdgeKind::kStatementObject, s, attr, o.time, slot + ".attribute", ev);
      out.push_back(std::move(o));
    }
    return out;
  }

  // Entities joined to `anchor` by a main edge that carry their own time.
  struct EventNeighbor {
    EntityIndex entity;
    PredicateIndex predicate;
    bool anchor_is_object = true;
    std::vector<StatementIndex> evidence;
  };

  std::vector<EventNeighbor> event_neighbors(EntityIndex anchor) const {
    std::map<std::tuple<std::uint32_t, std::uint32_t, bool>, EventNeighbor> found;
    auto add = [&](EntityIndex ev, const Statement& s, bool anchor_is_object) {
      if (ev == anchor || !has_event_time(g_, ev)) return;
      auto key = std::make_tuple(ev.value, s.predicate.value, anchor_is_object);
      auto it = found.find(key);
      if (it == found.end()) {
        it = found.emplace(key, EventNeighbor{ev, s.predicate, anchor_is_object, {}}).first;
      }
      it->second.evidence.push_back(s.index);
    };
    for (auto si : g_.by_object(anchor)) add(g_.statement(si).subject, g_.statement(si), true);
    for (auto si : g_.by_subject(anchor)) {
      const Statement& s = g_.statement(si);
      if (auto e = as_entity(s.object)) add(*e, s, false);
    }
    std::vector<EventNeighbor> out;
    for (auto& [k, v] : found) out.push_back(std::move(v));
    return out;
  }

  // Builder holding `anchor` bridged to the event neighbor; returns the
  // neighbor's node.
  NodeId add_bridge(Builder& b, NodeId anchor_node, const EventNeighbor& n,
                    const std::string& slot) const {
    const NodeId ev = b.entity(n.entity, slot + ".event");
    if (n.anchor_is_object) bridge(b, ev, n.predicate, anchor_node, n.evidence, slot);
    else bridge(b, anchor_node, n.predicate, ev, n.evidence, slot);
    return ev;
  }

  // Attribute time of an entity node, e.g. the "time" of a murder.
  void add_point_attribute(Builder& b, NodeId node, EntityIndex e, std::vector<TimeSource>& out,
                           EntityIndex anchor, const std::string& slot) const {
    for (auto& [attr, ev] : point_attributes({Value{e}})) {
      TimeSource src{b, 0, anchor, std::nullopt};
      const NodeId s = src.b.statement(slot + ".attribute");
      src.b.edge(EdgeKind::kStatementSubject, node, attr, s, slot + ".attribute", ev);
      src.out = src.b.variable(slot + ".time");
      src.b.edge(EdgeKind::kStatementObject, s, attr, src.out, slot + ".attribute", ev);
      out.push_back(std::move(src));
    }
  }

  std::vector<TimeSource> time_sources(EntityIndex anchor) const {
    std::vector<TimeSource> out;
    {
      Builder b;
      const NodeId a = b.entity(anchor, "e2.anchor");
      add_point_attribute(b, a, anchor, out, anchor, "e2");
    }
    for (const auto& n : event_neighbors(anchor)) {
      Builder b;
      const NodeId a = b.entity(anchor, "e2.anchor");
      const NodeId ev = add_bridge(b, a, n, "e2.bridge");
      add_point_attribute(b, ev, n.entity, out, anchor, "e2");
    }
    for (const Hop& h : hops_from(g_, anchor, false)) {
      auto ev = timed(h.evidence);
      if (ev.empty()) continue;
      TimeSource src{Builder{}, 0, anchor, h.predicate};
      const NodeId a = src.b.entity(anchor, "e2.anchor");
      const NodeId s = src.b.statement("e2.statement");
      if (h.kind == HopKind::kForward) {
        src.b.edge(EdgeKind::kStatementSubject, a, h.predicate, s, "e2.predicate", ev);
      } else {
        src.b.edge(EdgeKind::kStatementObject, s, h.predicate, a, "e2.predicate", ev);
      }
      src.out = src.b.variable("e2.time");
      src.b.time(s, src.out, "e2.time", ev);
      out.push_back(std::move(src));
    }
    return out;
  }

  Candidate finish(const Builder& b, std::vector<TemplateRef> prov,
                   std::optional<NodeId> answer_statement = std::nullopt,
                   std::optional<NodeId> answer_time = std::nullopt) const {
    Candidate c;
    c.graph = b.graph();
    c.provenance = std::move(prov);
    c.log = b.log();
    c.answer_statement = answer_statement;
    c.answer_time = answer_time;
    c.answers = execute(c.graph, g_);
    return c;
  }

  void keep(std::vector<Candidate>& out, Candidate c) const {
    if (ctx_.config.require_nonempty && c.answers.empty()) return;
    for (const auto& existing : out) {
      if (existing.graph == c.graph) return;
    }
    out.push_back(std::move(c));
  }

  static TemplateRef ref(const InterpretationTemplate& t) {
    return TemplateRef{t.structure, t.constraint, t.predicate, t.projection};
  }

  // ------------------------------------------------------------------------

  std::vector<Candidate> basic() const {
    std::vector<Candidate> out;
    for (EntityIndex a : ctx_.linked()) {
      for (Path& p : basic_paths(a)) {
        keep(out, finish(p.b, {TemplateRef{}}, p.final_statement));
      }
    }
    return out;
  }

  std::vector<Candidate> is1(const InterpretationTemplate& t) const {
    std::vector<Candidate> out;
    const TemporalConstraint& c = ctx_.constraints.at(t.constraint);

    if (t.projection) {
      for (EntityIndex a : ctx_.linked()) {
        for (Path& p : basic_paths(a)) {
          for (TimeOption& o : time_options(p, "e1")) {
            o.b.answer(o.time, "projection");
            keep(out, finish(o.b, {ref(t)}));
          }
        }
      }
      return out;
    }

    const ComparisonPredicate stored = converse(*t.predicate);
    const bool related_event = c.type == ConstraintType::kRelationEE;
    std::vector<TimeSource> sources;
    if (related_event) {
      for (EntityIndex a : ctx_.e2_anchors(c)) {
        for (auto& s : time_sources(a)) sources.push_back(std::move(s));
      }
    }
    const std::vector<EntityIndex> anchors =
        related_event ? ctx_.e1_anchors(c) : ctx_.linked();
    for (EntityIndex a : anchors) {
      for (Path& p : basic_paths(a)) {
        for (TimeOption& o : time_options(p, "e1")) {
          const auto answer_time =
              o.statement_time ? std::optional<NodeId>(o.time) : std::nullopt;
          if (!related_event) {
            Builder b = o.b;
            b.filter({stored, ctx_.doc.timexes.at(*c.timex).value, o.time}, "comparison");
            keep(out, finish(b, {ref(t)}, p.final_statement, answer_time));
            continue;
          }
          for (const TimeSource& src : sources) {
            // Comparing a fact with its own time is vacuous.
            if (src.own_statement && src.anchor == p.anchor && p.hops == 1 &&
                *src.own_statement == p.final_predicate) {
              continue;
            }
            Builder b = o.b;
            auto map = b.absorb(src.b, {});
            b.filter({stored, map.at(src.out), o.time}, "comparison");
            keep(out, finish(b, {ref(t)}, p.final_statement, answer_time));
          }
        }
      }
    }
    return out;
  }

  std::vector<Candidate> is2(const InterpretationTemplate& t) const {
    std::vector<Candidate> out;
    const TemporalConstraint& c = ctx_.constraints.at(t.constraint);
    const OrdinalMention& o = ctx_.doc.ordinals.at(*c.ordinal);
    for (EntityIndex a : ctx_.linked()) {
      for (Path& p : basic_paths(a)) {
        for (TimeOption& opt : time_options(p, "order")) {
          opt.b.ordinal({opt.time, o.rank, o.direction}, "ordinal");
          const auto answer_time =
              opt.statement_time ? std::optional<NodeId>(opt.time) : std::nullopt;
          keep(out, finish(opt.b, {ref(t)}, p.final_statement, answer_time));
        }
      }
    }
    return out;
  }

  bool matches_value(const TemporalConstraint& c, const Literal& lit) const {
    if (c.type == ConstraintType::kHasValueOrdinal) {
      const OrdinalMention& o = ctx_.doc.ordinals.at(*c.ordinal);
      if (o.direction != OrdinalDirection::kFromFirst) return false;
      switch (lit.kind()) {
        case LiteralKind::kInteger:
          return lit.as_integer() == o.rank;
        case LiteralKind::kString:
          return lit.as_string() == std::to_string(o.rank) ||
                 text::to_lower(lit.as_string()) == text::to_lower(o.text);
        case LiteralKind::kTime:
          return false;
      }
      return false;
    }
    return lit.is_time() && lit.as_time() == ctx_.doc.timexes.at(*c.timex).value;
  }

  SchemaFlag value_flag(const TemporalConstraint& c) const {
    return c.type == ConstraintType::kHasValueOrdinal ? SchemaFlag::kOrdinalAttribute
                                                      : SchemaFlag::kTemporalPoint;
  }

  std::vector<Candidate> is3(const InterpretationTemplate& t) const {
    std::vector<Candidate> out;
    const TemporalConstraint& c = ctx_.constraints.at(t.constraint);
    const SchemaFlag flag = value_flag(c);
    for (EntityIndex a : ctx_.linked()) {
      // Value on the qualifier of the fact joining the anchor and the answer.
      for (const Hop& h : hops_from(g_, a, false)) {
        std::map<std::pair<std::uint32_t, std::string>, std::pair<Literal, std::vector<StatementIndex>>>
            matches;
        for (auto si : h.evidence) {
          for (const auto& q : g_.statement(si).qualifiers) {
            auto lit = as_literal(q.value);
            if (!lit || !g_.predicate(q.predicate).flags.has(flag) || !matches_value(c, *lit)) {
              continue;
            }
            auto key = std::make_pair(q.predicate.value, lit->key());
            auto it = matches.find(key);
            if (it == matches.end()) it = matches.emplace(key, std::make_pair(*lit, std::vector<StatementIndex>{})).first;
            it->second.second.push_back(si);
          }
        }
        for (auto& [key, m] : matches) {
          Builder b;
          const NodeId an = b.entity(a, "anchor");
          auto [s, far] = apply_hop(b, an, h, "hop1");
          b.answer(far, "answer");
          const NodeId v = b.literal(m.first, "value");
          b.edge(EdgeKind::kQualifier, s, PredicateIndex{key.first}, v, "value.qualifier",
                 m.second);
          keep(out, finish(b, {ref(t)}, s));
        }
      }
      // Value as an attribute of the neighbor itself.
      for (const Hop& h : hops_from(g_, a, false)) {
        std::map<std::pair<std::uint32_t, std::string>, std::pair<Literal, std::vector<StatementIndex>>>
            matches;
        for (const Value& far : h.far) {
          auto e = as_entity(far);
          if (!e) continue;
          for (auto si : g_.by_subject(*e)) {
            const Statement& s = g_.statement(si);
            auto lit = as_literal(s.object);
            if (!lit || !g_.predicate(s.predicate).flags.has(flag) || !matches_value(c, *lit)) {
              continue;
            }
            auto key = std::make_pair(s.predicate.value, lit->key());
            auto it = matches.find(key);
            if (it == matches.end()) it = matches.emplace(key, std::make_pair(*lit, std::vector<StatementIndex>{})).first;
            it->second.second.push_back(si);
          }
        }
        for (auto& [key, m] : matches) {
          Builder b;
          const NodeId an = b.entity(a, "anchor");
          auto [s, far] = apply_hop(b, an, h, "hop1");
          b.answer(far, "answer");
          const NodeId sa = b.statement("value.statement");
          const PredicateIndex attr{key.first};
          b.edge(EdgeKind::kStatementSubject, far, attr, sa, "value.attribute", m.second);
          const NodeId v = b.literal(m.first, "value");
          b.edge(EdgeKind::kStatementObject, sa, attr, v, "value.attribute", m.second);
          keep(out, finish(b, {ref(t)}, s));
        }
      }
    }
    return out;
  }

  std::vector<Candidate> is4(const InterpretationTemplate& t) const {
    std::vector<Candidate> out;
    const TemporalConstraint& c = ctx_.constraints.at(t.constraint);
    for (EntityIndex a : ctx_.e2_anchors(c)) {
      struct Shared {
        EntityIndex e;
        PredicateIndex predicate;
        bool anchor_is_object;
        std::vector<StatementIndex> evidence;
      };
      std::map<std::tuple<std::uint32_t, std::uint32_t, bool>, Shared> found;
      auto add = [&](EntityIndex e, const Statement& s, bool anchor_is_object) {
        if (e == a) return;
        auto key = std::make_tuple(e.value, s.predicate.value, anchor_is_object);
        auto it = found.find(key);
        if (it == found.end()) it = found.emplace(key, Shared{e, s.predicate, anchor_is_object, {}}).first;
        it->second.evidence.push_back(s.index);
      };
      for (auto si : g_.by_object(a)) add(g_.statement(si).subject, g_.statement(si), true);
      for (auto si : g_.by_subject(a)) {
        if (auto e = as_entity(g_.statement(si).object)) add(*e, g_.statement(si), false);
      }
      std::vector<Shared> entities;
      for (auto& [k, v] : found) entities.push_back(std::move(v));
      entities = beam(
          std::move(entities),
          [&](const Shared& s) {
            return score_labels({plabel(s.predicate), g_.entity(s.e).label});
          },
          [&](const Shared& s) { return std::make_pair(g_.entity(s.e).id, g_.predicate(s.predicate).id); });

      for (const Shared& sh : entities) {
        std::vector<Hop> attrs;
        for (Hop& h : hops_from(g_, sh.e, false)) {
          if (h.kind != HopKind::kForward || h.predicate == sh.predicate) continue;
          attrs.push_back(std::move(h));
        }
        for (const Hop& h : beam_hops(std::move(attrs))) {
          Builder b;
          const NodeId an = b.entity(a, "e2.anchor");
          const NodeId en = b.entity(sh.e, "shared_entity");
          if (sh.anchor_is_object) bridge(b, en, sh.predicate, an, sh.evidence, "e2.fact");
          else bridge(b, an, sh.predicate, en, sh.evidence, "e2.fact");
          auto [s, far] = apply_hop(b, en, h, "e1.attribute");
          b.answer(far, "answer");
          keep(out, finish(b, {ref(t)}, s));
        }
      }
    }
    return out;
  }

  std::vector<Candidate> is5(const InterpretationTemplate& t) const {
    std::vector<Candidate> out;
    const TemporalConstraint& c = ctx_.constraints.at(t.constraint);
    const auto wholes = ctx_.e2_anchors(c);
    auto is_part_of = [&](PredicateIndex p) {
      return g_.predicate(p).flags.has(SchemaFlag::kPartOf);
    };
    for (EntityIndex a : ctx_.e1_anchors(c)) {
      for (const Hop& h : hops_from(g_, a, false)) {
        // (qualifier predicate, whole) -> evidence
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<StatementIndex>> matches;
        for (auto si : h.evidence) {
          for (const auto& q : g_.statement(si).qualifiers) {
            auto w = as_entity(q.value);
            if (!w || !is_part_of(q.predicate) || *w == a) continue;
            if (std::find(wholes.begin(), wholes.end(), *w) == wholes.end()) continue;
            matches[{q.predicate.value, w->value}].push_back(si);
          }
        }
        for (auto& [key, ev] : matches) {
          Builder b;
          const NodeId an = b.entity(a, "e1.anchor");
          auto [s, far] = apply_hop(b, an, h, "e1.fact");
          b.answer(far, "answer");
          const NodeId whole = b.entity(EntityIndex{key.second}, "e2.entity");
          b.edge(EdgeKind::kQualifier, s, PredicateIndex{key.first}, whole, "part_of", ev);
          keep(out, finish(b, {ref(t)}, s));
        }
      }
    }
    for (EntityIndex w : wholes) {
      for (const Hop& h : hops_from(g_, w, false)) {
        if (h.kind != HopKind::kBackward || !is_part_of(h.predicate)) continue;
        Builder b;
        const NodeId wn = b.entity(w, "e2.entity");
        auto [s, far] = apply_hop(b, wn, h, "part_of");
        b.answer(far, "answer");
        keep(out, finish(b, {ref(t)}, s));
      }
    }
    return out;
  }

  std::vector<Candidate> is6(const InterpretationTemplate& t) const {
    std::vector<Candidate> out;
    const TemporalConstraint& c = ctx_.constraints.at(t.constraint);
    const bool after = t.predicate.value_or(ComparisonPredicate::kAfter) == ComparisonPredicate::kAfter;
    // Predicates whose subject comes after the object when the answer
    // follows, and those whose subject comes first.
    const SchemaFlag answer_subject = after ? SchemaFlag::kSucceeds : SchemaFlag::kPrecedes;
    const SchemaFlag answer_object = after ? SchemaFlag::kPrecedes : SchemaFlag::kSucceeds;
    auto flagged = [&](PredicateIndex p, SchemaFlag f) { return g_.predicate(p).flags.has(f); };

    for (EntityIndex a : ctx_.e2_anchors(c)) {
      struct Target {
        Builder b;
        NodeId node = 0;
        EntityIndex entity;
      };
      std::vector<Target> targets;
      {
        Target tg;
        tg.entity = a;
        tg.node = tg.b.entity(a, "e2.entity");
        targets.push_back(std::move(tg));
      }
      for (const auto& n : event_neighbors(a)) {
        Target tg;
        tg.entity = n.entity;
        const NodeId an = tg.b.entity(a, "e2.anchor");
        tg.node = add_bridge(tg.b, an, n, "e2.bridge");
        targets.push_back(std::move(tg));
      }

      for (const Target& tg : targets) {
        const EntityIndex x = tg.entity;
        for (const Hop& h : hops_from(g_, x, true)) {
          bool ok = false;
          switch (h.kind) {
            case HopKind::kBackward:  // ?ans -r-> x
              ok = flagged(h.predicate, answer_subject);
              break;
            case HopKind::kForward:  // x -r-> ?ans
              ok = flagged(h.predicate, answer_object);
              break;
            case HopKind::kQualifierInSubject:  // ?ans -p-> _ {r: x}
              ok = flagged(*h.qualifier, answer_subject);
              break;
            case HopKind::kQualifierOut:  // x -p-> _ {r: ?ans}
              ok = flagged(*h.qualifier, answer_object);
              break;
            case HopKind::kQualifierInObject:
              break;
          }
          if (!ok) continue;
          Builder b = tg.b;
          auto [s, far] = apply_hop(b, tg.node, h, "sequence");
          b.answer(far, "answer");
          keep(out, finish(b, {ref(t)}, s));
        }
      }
    }
    return out;
  }

  std::vector<Candidate> dispatch(const InterpretationTemplate& t) const {
    switch (t.structure) {
      case Structure::kIS1: return is1(t);
      case Structure::kIS2: return is2(t);
      case Structure::kIS3: return is3(t);
      case Structure::kIS4: return is4(t);
      case Structure::kIS5: return is5(t);
      case Structure::kIS6: return is6(t);
      case Structure::kBasic: return basic();
    }
    return {};
  }

  std::vector<Candidate> conjoin(const Candidate& x, const Candidate& y) const {
    Builder b = rebuild(x);
    const NodeId ans = *x.graph.answer();
    b.absorb(rebuild(y), {{*y.graph.answer(), ans}});
    std::vector<TemplateRef> prov = x.provenance;
    prov.insert(prov.end(), y.provenance.begin(), y.provenance.end());
    std::vector<Candidate> out;
    keep(out, finish(b, std::move(prov), x.answer_statement, x.answer_time));
    return out;
  }

  std::optional<Candidate> project(const Candidate& x, const TemplateRef& when) const {
    if (!x.answer_statement) return std::nullopt;
    Builder b = rebuild(x);
    NodeId time = 0;
    if (x.answer_time) {
      time = *x.answer_time;
    } else {
      std::vector<StatementIndex> ev;
      for (const auto& fill : x.log) {
        auto e = std::get_if<op::AddEdge>(&fill.op);
        if (!e) continue;
        const bool touches = e->edge.from == *x.answer_statement || e->edge.to == *x.answer_statement;
        if (!touches || e->edge.kind == EdgeKind::kTime) continue;
        for (auto s : fill.evidence) {
          if (has_time(g_, s) && std::find(ev.begin(), ev.end(), s) == ev.end()) ev.push_back(s);
        }
      }
      if (ev.empty()) return std::nullopt;
      std::sort(ev.begin(), ev.end());
      time = b.variable("projection.time");
      b.time(*x.answer_statement, time, "projection.time", std::move(ev));
    }
    b.answer(time, "projection");
    std::vector<TemplateRef> prov{when};
    prov.insert(prov.end(), x.provenance.begin(), x.provenance.end());
    std::vector<Candidate> out;
    keep(out, finish(b, std::move(prov)));
    if (out.empty()) return std::nullopt;
    return std::move(out.front());
  }

  static Builder rebuild(const Candidate& c) {
    // Replaying into an empty builder reproduces the node numbering exactly.
    Builder b;
    for (const auto& fill : c.log) b.push(fill);
    return b;
  }

  std::vector<Candidate> generate() const {
    const auto& cs = ctx_.constraints;
    std::optional<std::size_t> when;
    std::vector<std::vector<Candidate>> per_constraint;
    std::vector<Candidate> when_only;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      std::vector<Candidate> found;
      for (const auto& t : evoke_interpretations(cs[i], i)) {
        if (!ctx_.config.is_enabled(t.structure)) continue;
        for (auto& cand : dispatch(t)) keep(found, std::move(cand));
      }
      if (cs[i].type == ConstraintType::kWhenQuery) {
        when = i;
        when_only = std::move(found);
      } else if (!found.empty()) {
        per_constraint.push_back(std::move(found));
      }
    }

    std::vector<Candidate> out;
    if (!per_constraint.empty()) {
      std::vector<Candidate> combined = per_constraint.front();
      for (std::size_t k = 1; k < per_constraint.size(); ++k) {
        std::vector<Candidate> next;
        for (const auto& x : combined) {
          for (const auto& y : per_constraint[k]) {
            for (auto& z : conjoin(x, y)) keep(next, std::move(z));
          }
        }
        if (next.empty()) {
          // No joint reading survives; keep each constraint's own readings.
          for (auto& y : per_constraint[k]) keep(combined, std::move(y));
        } else {
          combined = std::move(next);
        }
      }
      if (when) {
        const TemplateRef when_ref{Structure::kIS1, *when, std::nullopt, true};
        for (const auto& x : combined) {
          if (auto p = project(x, when_ref)) keep(out, std::move(*p));
        }
        for (auto& x : when_only) keep(out, std::move(x));
      } else {
        out = std::move(combined);
      }
    } else {
      out = std::move(when_only);
    }
    if (out.empty()) out = basic();
    return out;
  }

 private:
  const GroundingContext& ctx_;
  const KnowledgeGraph& g_;
  std::set<std::string> terms_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points

QueryGraph replay(const std::vector<SlotFill>& log, const KnowledgeGraph& g) {
  QueryGraph q;
  for (const auto& fill : log) {
    if (auto e = std::get_if<op::AddEdge>(&fill.op)) {
      const QueryEdge& edge = e->edge;
      if (edge.from >= q.nodes().size() || edge.to >= q.nodes().size()) {
        throw DataError("slot '" + fill.slot + "' refers to a node that does not exist yet");
      }
      auto constant_entity = [&](NodeId n) -> std::optional<EntityIndex> {
        const QueryNode& node = q.nodes()[n];
        if (node.kind == NodeKind::kEntity) return node.entity;
        return std::nullopt;
      };
      for (auto si : fill.evidence) {
        if (si.value >= g.statements().size()) {
          throw DataError("slot '" + fill.slot + "' cites a statement outside the graph");
        }
        const Statement& s = g.statement(si);
        bool ok = true;
        switch (edge.kind) {
          case EdgeKind::kTriple:
            ok = s.predicate == edge.predicate;
            break;
          case EdgeKind::kStatementSubject:
            ok = s.predicate == edge.predicate;
            if (auto c = constant_entity(edge.from)) ok = ok && s.subject == *c;
            break;
          case EdgeKind::kStatementObject:
            ok = s.predicate == edge.predicate;
            if (auto c = constant_entity(edge.to)) {
              auto o = as_entity(s.object);
              ok = ok && o && *o == *c;
            }
            break;
          case EdgeKind::kQualifier:
            ok = std::any_of(s.qualifiers.begin(), s.qualifiers.end(), [&](const Qualifier& qu) {
              if (qu.predicate != edge.predicate) return false;
              auto c = constant_entity(edge.to);
              if (!c) return true;
              auto v = as_entity(qu.value);
              return v && *v == *c;
            });
            break;
          case EdgeKind::kTime:
            ok = has_time(g, si);
            break;
        }
        if (!ok) {
          throw DataError("slot '" + fill.slot + "' evidence statement " +
                          std::to_string(si.value) + " does not support its edge");
        }
      }
    }
    apply_op(q, fill.op);
  }
  return q;
}

std::vector<EntityIndex> GroundingContext::linked() const {
  std::vector<EntityIndex> out;
  for (const auto& m : mentions) {
    if (std::find(out.begin(), out.end(), m.entity) == out.end()) out.push_back(m.entity);
  }
  return out;
}

namespace {

std::vector<EntityIndex> side(const GroundingContext& ctx, const TemporalConstraint& c,
                              bool before_signal) {
  if (!c.signal) return ctx.linked();
  const TokenSpan span = ctx.doc.signals.at(*c.signal).span;
  const std::size_t begin = ctx.doc.char_begin(span);
  const std::size_t end = ctx.doc.char_end(span);
  std::vector<EntityIndex> out;
  for (const auto& m : ctx.mentions) {
    const bool on_side = before_signal ? m.end <= begin : m.begin >= end;
    if (on_side && std::find(out.begin(), out.end(), m.entity) == out.end()) {
      out.push_back(m.entity);
    }
  }
  return out.empty() ? ctx.linked() : out;
}

}  // namespace

std::vector<EntityIndex> GroundingContext::e1_anchors(const TemporalConstraint& c) const {
  return side(*this, c, true);
}

std::vector<EntityIndex> GroundingContext::e2_anchors(const TemporalConstraint& c) const {
  return side(*this, c, false);
}

GroundingContext make_context(const KnowledgeGraph& g, std::string_view question,
                              GroundingConfig config, const Lexicon& lexicon,
                              const RankerLexicon& terms) {
  GroundingContext ctx;
  ctx.graph = &g;
  ctx.question = std::string(question);
  ctx.doc = annotate(question, lexicon);
  ctx.mentions = g.link_entities(question);
  ctx.constraints = evoke_constraints(ctx.doc);
  ctx.config = std::move(config);
  ctx.terms = &terms;
  return ctx;
}

std::vector<Candidate> ground_basic(const GroundingContext& ctx) { return Grounder(ctx).basic(); }

std::vector<Candidate> ground_is1(const GroundingContext& ctx, const InterpretationTemplate& t) {
  return Grounder(ctx).is1(t);
}
std::vector<Candidate> ground_is2(const GroundingContext& ctx, const InterpretationTemplate& t) {
  return Grounder(ctx).is2(t);
}
std::vector<Candidate> ground_is3(const GroundingContext& ctx, const InterpretationTemplate& t) {
  return Grounder(ctx).is3(t);
}
std::vector<Candidate> ground_is4(const GroundingContext& ctx, const InterpretationTemplate& t) {
  return Grounder(ctx).is4(t);
}
std::vector<Candidate> ground_is5(const GroundingContext& ctx, const InterpretationTemplate& t) {
  return Grounder(ctx).is5(t);
}
std::vector<Candidate> ground_is6(const GroundingContext& ctx, const InterpretationTemplate& t) {
  return Grounder(ctx).is6(t);
}

std::vector<Candidate> ground(const GroundingContext& ctx, const InterpretationTemplate& t) {
  if (!ctx.config.is_enabled(t.structure)) return {};
  return Grounder(ctx).dispatch(t);
}

std::vector<Candidate> generate_candidates(const GroundingContext& ctx) {
  return Grounder(ctx).generate();
}

}  // namespace tempq
