#include "tempq/query_graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include <nlohmann/json.hpp>

#include "tempq/error.hpp"

namespace tempq {

namespace {

Binding to_binding(const Value& v) {
  if (auto e = as_entity(v)) return *e;
  return std::get<Literal>(v);
}

bool is_constant(const QueryNode& n) {
  return n.kind == NodeKind::kEntity || n.kind == NodeKind::kLiteral;
}

class Matcher {
 public:
  Matcher(const QueryGraph& q, const KnowledgeGraph& g)
      : q_(q), g_(g), bind_(q.nodes().size()), done_(q.edges().size(), false) {}

  std::vector<std::vector<Binding>> run() {
    search(q_.edges().size());
    return std::move(out_);
  }

 private:
  bool bound(NodeId n) const {
    return is_constant(q_.nodes()[n]) || !std::holds_alternative<std::monostate>(bind_[n]);
  }

  std::optional<EntityIndex> entity_of(NodeId n) const {
    const auto& node = q_.nodes()[n];
    if (node.kind == NodeKind::kEntity) return node.entity;
    if (auto e = std::get_if<EntityIndex>(&bind_[n])) return *e;
    return std::nullopt;
  }

  std::optional<StatementIndex> statement_of(NodeId n) const {
    if (auto s = std::get_if<StatementIndex>(&bind_[n])) return *s;
    return std::nullopt;
  }

  bool unify(NodeId n, const Binding& v, std::vector<NodeId>& trail) {
    const auto& node = q_.nodes()[n];
    switch (node.kind) {
      case NodeKind::kEntity: {
        auto e = std::get_if<EntityIndex>(&v);
        return e && *e == *node.entity;
      }
      case NodeKind::kLiteral: {
        auto l = std::get_if<Literal>(&v);
        return l && *l == *node.literal;
      }
      case NodeKind::kStatement:
        if (!std::holds_alternative<StatementIndex>(v)) return false;
        break;
      case NodeKind::kVariable:
        if (std::holds_alternative<StatementIndex>(v)) return false;
        break;
    }
    if (std::holds_alternative<std::monostate>(bind_[n])) {
      bind_[n] = v;
      trail.push_back(n);
      return true;
    }
    return bind_[n] == v;
  }

  int readiness(const QueryEdge& e) const {
    if (e.kind == EdgeKind::kTime) return bound(e.from) ? 3 : 0;
    return (bound(e.from) ? 1 : 0) + (bound(e.to) ? 1 : 0);
  }

  template <typename Fn>
  void for_candidates(std::span<const StatementIndex> list, Fn&& fn) {
    for (auto s : list) fn(g_.statement(s));
  }

  void search(std::size_t remaining) {
    if (remaining == 0) {
      std::vector<Binding> row = bind_;
      for (NodeId n = 0; n < row.size(); ++n) {
        const auto& node = q_.nodes()[n];
        if (node.kind == NodeKind::kEntity) row[n] = *node.entity;
        if (node.kind == NodeKind::kLiteral) row[n] = *node.literal;
      }
      out_.push_back(std::move(row));
      return;
    }
    std::size_t pick = 0;
    int best = -1;
    for (std::size_t i = 0; i < q_.edges().size(); ++i) {
      if (done_[i]) continue;
      const int r = readiness(q_.edges()[i]);
      if (r > best) {
        best = r;
        pick = i;
      }
    }
    done_[pick] = true;
    const QueryEdge& e = q_.edges()[pick];

    auto attempt = [&](std::initializer_list<std::pair<NodeId, Binding>> pairs) {
      std::vector<NodeId> trail;
      bool ok = true;
      for (const auto& [n, v] : pairs) {
        if (!unify(n, v, trail)) {
          ok = false;
          break;
        }
      }
      if (ok) search(remaining - 1);
      for (NodeId n : trail) bind_[n] = std::monostate{};
    };

    std::vector<StatementIndex> single;
    auto source = [&](NodeId stmt_node, std::optional<EntityIndex> via,
                      std::span<const StatementIndex> (KnowledgeGraph::*index)(EntityIndex) const,
                      std::span<const StatementIndex> fallback) -> std::span<const StatementIndex> {
      if (auto s = statement_of(stmt_node)) {
        single = {*s};
        return single;
      }
      if (via) return (g_.*index)(*via);
      return fallback;
    };

    switch (e.kind) {
      case EdgeKind::kTriple: {
        std::span<const StatementIndex> list = g_.by_predicate(e.predicate);
        if (auto s = entity_of(e.from)) list = g_.by_subject(*s);
        else if (auto o = entity_of(e.to)) list = g_.by_object(*o);
        for (auto si : list) {
          const Statement& s = g_.statement(si);
          if (s.predicate != e.predicate) continue;
          attempt({{e.from, s.subject}, {e.to, to_binding(s.object)}});
        }
        break;
      }
      case EdgeKind::kStatementSubject: {
        auto list = source(e.to, entity_of(e.from), &KnowledgeGraph::by_subject,
                           g_.by_predicate(e.predicate));
        for (auto si : list) {
          const Statement& s = g_.statement(si);
          if (s.predicate != e.predicate) continue;
          attempt({{e.from, s.subject}, {e.to, s.index}});
        }
        break;
      }
      case EdgeKind::kStatementObject: {
        auto list = source(e.from, entity_of(e.to), &KnowledgeGraph::by_object,
                           g_.by_predicate(e.predicate));
        for (auto si : list) {
          const Statement& s = g_.statement(si);
          if (s.predicate != e.predicate) continue;
          attempt({{e.from, s.index}, {e.to, to_binding(s.object)}});
        }
        break;
      }
      case EdgeKind::kQualifier: {
        auto list = source(e.from, entity_of(e.to), &KnowledgeGraph::by_qualifier_value,
                           g_.by_qualifier_predicate(e.predicate));
        for (auto si : list) {
          const Statement& s = g_.statement(si);
          for (const auto& qual : s.qualifiers) {
            if (qual.predicate != e.predicate) continue;
            attempt({{e.from, s.index}, {e.to, to_binding(qual.value)}});
          }
        }
        break;
      }
      case EdgeKind::kTime: {
        if (auto si = statement_of(e.from)) {
          if (auto ext = g_.temporal_extent(g_.statement(*si))) attempt({{e.to, *ext}});
        } else {
          for (const auto& s : g_.statements()) {
            if (auto ext = g_.temporal_extent(s)) attempt({{e.from, s.index}, {e.to, *ext}});
          }
        }
        break;
      }
    }
    done_[pick] = false;
  }

  const QueryGraph& q_;
  const KnowledgeGraph& g_;
  std::vector<Binding> bind_;
  std::vector<bool> done_;
  std::vector<std::vector<Binding>> out_;
};

std::string suffixed(int n) {
  const int mod100 = n % 100;
  const char* suffix = "th";
  if (mod100 < 11 || mod100 > 13) {
    switch (n % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  return std::to_string(n) + suffix;
}

std::string predicate_words(ComparisonPredicate p) {
  std::string out;
  for (char c : to_string(p)) {
    out += c == '_' ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

NodeId QueryGraph::add_entity(EntityIndex e) {
  nodes_.push_back({NodeKind::kEntity, e, std::nullopt});
  return nodes_.size() - 1;
}

NodeId QueryGraph::add_literal(Literal l) {
  nodes_.push_back({NodeKind::kLiteral, std::nullopt, std::move(l)});
  return nodes_.size() - 1;
}

NodeId QueryGraph::add_variable() {
  nodes_.push_back({NodeKind::kVariable, std::nullopt, std::nullopt});
  return nodes_.size() - 1;
}

NodeId QueryGraph::add_statement() {
  nodes_.push_back({NodeKind::kStatement, std::nullopt, std::nullopt});
  return nodes_.size() - 1;
}

std::vector<NodeId> QueryGraph::conjoin(const QueryGraph& other) {
  std::vector<NodeId> map(other.nodes_.size());
  for (NodeId n = 0; n < other.nodes_.size(); ++n) {
    const QueryNode& node = other.nodes_[n];
    if (other.answer_ && *other.answer_ == n && answer_) {
      map[n] = *answer_;
      continue;
    }
    if (is_constant(node)) {
      auto it = std::find(nodes_.begin(), nodes_.end(), node);
      if (it != nodes_.end()) {
        map[n] = static_cast<NodeId>(it - nodes_.begin());
        continue;
      }
    }
    nodes_.push_back(node);
    map[n] = nodes_.size() - 1;
  }
  for (QueryEdge e : other.edges_) {
    e.from = map[e.from];
    e.to = map[e.to];
    edges_.push_back(e);
  }
  for (TemporalFilter f : other.filters_) {
    f.subject = map[f.subject];
    if (auto r = std::get_if<NodeId>(&f.reference)) f.reference = map[*r];
    filters_.push_back(std::move(f));
  }
  if (other.ordinal_ && !ordinal_) {
    OrdinalSelector o = *other.ordinal_;
    o.key = map[o.key];
    ordinal_ = o;
  }
  if (!answer_ && other.answer_) answer_ = map[*other.answer_];
  return map;
}

std::optional<std::string> QueryGraph::validation_error() const {
  const std::size_t n = nodes_.size();
  if (!answer_) return "query graph has no answer node";
  if (*answer_ >= n) return "answer node out of range";
  if (nodes_[*answer_].kind != NodeKind::kVariable) return "answer node is not a variable";
  if (edges_.empty()) return "query graph has no edges";

  std::vector<bool> in_edge(n, false);
  std::vector<NodeId> parent(n);
  std::iota(parent.begin(), parent.end(), NodeId{0});
  auto find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges_) {
    if (e.from >= n || e.to >= n) return "edge endpoint out of range";
    const NodeKind fk = nodes_[e.from].kind, tk = nodes_[e.to].kind;
    switch (e.kind) {
      case EdgeKind::kTriple:
        if (fk == NodeKind::kStatement || tk == NodeKind::kStatement) {
          return "triple edge touches a statement node";
        }
        if (fk == NodeKind::kLiteral) return "triple edge starts at a literal";
        break;
      case EdgeKind::kStatementSubject:
        if (tk != NodeKind::kStatement || fk == NodeKind::kStatement || fk == NodeKind::kLiteral) {
          return "malformed statement-subject edge";
        }
        break;
      case EdgeKind::kStatementObject:
      case EdgeKind::kQualifier:
        if (fk != NodeKind::kStatement || tk == NodeKind::kStatement) {
          return "malformed statement edge";
        }
        break;
      case EdgeKind::kTime:
        if (fk != NodeKind::kStatement || tk != NodeKind::kVariable) {
          return "malformed time edge";
        }
        break;
    }
    in_edge[e.from] = in_edge[e.to] = true;
    parent[find(e.from)] = find(e.to);
  }
  auto bound_variable = [&](NodeId v) {
    return v < n && nodes_[v].kind == NodeKind::kVariable && in_edge[v];
  };
  // A comparison may be the only link between two fact patterns.
  for (const auto& f : filters_) {
    if (!bound_variable(f.subject)) return "filter variable is unbound";
    if (auto r = std::get_if<NodeId>(&f.reference)) {
      if (!bound_variable(*r)) return "filter reference variable is unbound";
      parent[find(f.subject)] = find(*r);
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    if (!in_edge[i]) return "node " + std::to_string(i) + " is not bound by any edge";
    if (find(i) != find(*answer_)) return "query graph is not connected";
  }
  if (ordinal_) {
    if (ordinal_->rank < 1) return "ordinal rank must be positive";
    if (!bound_variable(ordinal_->key)) return "ordinal key variable is unbound";
  }
  return std::nullopt;
}

std::vector<std::vector<Binding>> match_pattern(const QueryGraph& q, const KnowledgeGraph& g) {
  if (auto err = q.validation_error()) throw ExecutionError(*err);
  return Matcher(q, g).run();
}

std::string binding_key(const Binding& b, const KnowledgeGraph& g) {
  if (auto e = std::get_if<EntityIndex>(&b)) return g.entity(*e).id;
  if (auto l = std::get_if<Literal>(&b)) return l->key();
  if (auto t = std::get_if<TimeExtent>(&b)) return t->anchor.text();
  if (auto s = std::get_if<StatementIndex>(&b)) return "statement#" + std::to_string(s->value);
  return {};
}

std::optional<Interval> binding_interval(const Binding& b) {
  if (auto l = std::get_if<Literal>(&b); l && l->is_time()) return l->as_time().interval();
  if (auto t = std::get_if<TimeExtent>(&b)) return t->span;
  return std::nullopt;
}

AnswerSet execute(const QueryGraph& q, const KnowledgeGraph& g) {
  auto rows = match_pattern(q, g);
  const NodeId answer = *q.answer();

  auto interval_of = [&](const std::vector<Binding>& row, NodeId n) {
    if (std::holds_alternative<std::monostate>(row[n])) {
      throw ExecutionError("filter variable bound to nothing at evaluation time");
    }
    return binding_interval(row[n]);
  };

  std::vector<const std::vector<Binding>*> kept;
  for (const auto& row : rows) {
    bool ok = true;
    for (const auto& f : q.filters()) {
      std::optional<Interval> ref;
      if (auto tv = std::get_if<TimeValue>(&f.reference)) ref = tv->interval();
      else ref = interval_of(row, std::get<NodeId>(f.reference));
      auto subj = interval_of(row, f.subject);
      // Facts without the required time do not pass.
      if (!ref || !subj || !satisfies(f.predicate, *ref, *subj)) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(&row);
  }

  AnswerSet out;
  if (!q.ordinal()) {
    for (const auto* row : kept) out.insert(binding_key((*row)[answer], g));
    return out;
  }

  const OrdinalSelector& sel = *q.ordinal();
  auto earlier = [](const Interval& a, const Interval& b) {
    return std::tie(a.start, a.end) < std::tie(b.start, b.end);
  };
  std::map<std::string, Interval> groups;
  for (const auto* row : kept) {
    auto key = binding_interval((*row)[sel.key]);
    if (!key) continue;
    std::string ans = binding_key((*row)[answer], g);
    auto it = groups.find(ans);
    if (it == groups.end()) groups.emplace(ans, *key);
    else if (earlier(*key, it->second)) it->second = *key;
  }
  std::vector<std::pair<std::string, Interval>> order(groups.begin(), groups.end());
  std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (earlier(a.second, b.second)) return true;
    if (earlier(b.second, a.second)) return false;
    return a.first < b.first;
  });
  const auto rank = static_cast<std::size_t>(sel.rank);
  if (rank > order.size()) return out;
  const std::size_t pos =
      sel.direction == OrdinalDirection::kFromFirst ? rank - 1 : order.size() - rank;
  out.insert(order[pos].first);
  return out;
}

std::string ordinal_words(int rank, OrdinalDirection direction) {
  if (direction == OrdinalDirection::kFromFirst) return rank == 1 ? "first" : suffixed(rank);
  return rank == 1 ? "last" : suffixed(rank) + " last";
}

std::string serialize(const QueryGraph& q, const KnowledgeGraph& g, SerializationMode mode) {
  const auto& nodes = q.nodes();
  const auto& edges = q.edges();
  const NodeId answer = q.answer().value_or(0);

  constexpr std::size_t kFar = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(nodes.size(), kFar);
  std::vector<std::vector<NodeId>> adj(nodes.size());
  for (const auto& e : edges) {
    adj[e.from].push_back(e.to);
    adj[e.to].push_back(e.from);
  }
  for (const auto& f : q.filters()) {
    auto r = std::get_if<NodeId>(&f.reference);
    if (!r || *r >= nodes.size() || f.subject >= nodes.size()) continue;
    adj[f.subject].push_back(*r);
    adj[*r].push_back(f.subject);
  }
  if (answer < nodes.size()) {
    std::deque<NodeId> queue{answer};
    dist[answer] = 0;
    while (!queue.empty()) {
      NodeId n = queue.front();
      queue.pop_front();
      for (NodeId m : adj[n]) {
        if (dist[m] == kFar) {
          dist[m] = dist[n] + 1;
          queue.push_back(m);
        }
      }
    }
  }

  auto constant_label = [&](NodeId n) -> std::string {
    const auto& node = nodes[n];
    if (node.kind == NodeKind::kEntity) return g.entity(*node.entity).label;
    if (node.kind == NodeKind::kLiteral) return node.literal->key();
    return {};
  };
  auto edge_label = [&](const QueryEdge& e) -> std::string {
    return e.kind == EdgeKind::kTime ? "time" : g.predicate(e.predicate).label;
  };

  struct Oriented {
    std::size_t index;
    NodeId near;
    NodeId far;
    bool inverse;
  };
  std::vector<Oriented> order;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    const bool inverse = dist[e.to] < dist[e.from];
    order.push_back({i, inverse ? e.to : e.from, inverse ? e.from : e.to, inverse});
  }
  std::stable_sort(order.begin(), order.end(), [&](const Oriented& a, const Oriented& b) {
    return std::forward_as_tuple(dist[a.near], edge_label(edges[a.index]), constant_label(a.far)) <
           std::forward_as_tuple(dist[b.near], edge_label(edges[b.index]), constant_label(b.far));
  });

  std::vector<bool> time_var(nodes.size(), false);
  for (const auto& e : edges) {
    if (e.kind == EdgeKind::kTime) time_var[e.to] = true;
  }
  for (const auto& f : q.filters()) {
    time_var[f.subject] = true;
    if (auto r = std::get_if<NodeId>(&f.reference)) time_var[*r] = true;
  }
  if (q.ordinal()) time_var[q.ordinal()->key] = true;

  std::vector<std::string> names(nodes.size());
  int next_s = 0, next_t = 0, next_x = 0;
  auto name = [&](NodeId n) -> const std::string& {
    if (names[n].empty()) {
      const auto& node = nodes[n];
      if (n == answer) names[n] = "?ans";
      else if (node.kind == NodeKind::kStatement) names[n] = "?s" + std::to_string(++next_s);
      else if (node.kind == NodeKind::kVariable && time_var[n]) names[n] = "?t" + std::to_string(++next_t);
      else if (node.kind == NodeKind::kVariable) names[n] = "?x" + std::to_string(++next_x);
      else if (node.kind == NodeKind::kEntity) names[n] = ":" + g.entity(*node.entity).id;
      else if (node.literal->kind() == LiteralKind::kInteger) names[n] = node.literal->key();
      else names[n] = nlohmann::json(node.literal->key()).dump();
    }
    return names[n];
  };

  if (mode == SerializationMode::kDebug) {
    std::string out = "SELECT ?ans WHERE {\n";
    for (const auto& o : order) {
      const auto& e = edges[o.index];
      std::string pred;
      switch (e.kind) {
        case EdgeKind::kTriple: pred = ":"; break;
        case EdgeKind::kStatementSubject: pred = "p:"; break;
        case EdgeKind::kStatementObject: pred = "ps:"; break;
        case EdgeKind::kQualifier: pred = "pq:"; break;
        case EdgeKind::kTime: pred = "time"; break;
      }
      if (e.kind != EdgeKind::kTime) pred += g.predicate(e.predicate).id;
      if (o.inverse) pred = "^" + pred;
      const std::string near = name(o.near);
      out += "  " + near + " " + pred + " " + name(o.far) + " .\n";
    }
    for (const auto& f : q.filters()) {
      std::string ref;
      if (auto tv = std::get_if<TimeValue>(&f.reference)) ref = "\"" + tv->text() + "\"";
      else ref = name(std::get<NodeId>(f.reference));
      out += "  FILTER(" + std::string(to_string(converse(f.predicate))) + "(" + name(f.subject) +
             ", " + ref + "))\n";
    }
    out += "}";
    if (const auto& sel = q.ordinal()) {
      out += "\nORDER BY ";
      out += sel->direction == OrdinalDirection::kFromFirst ? "ASC(" : "DESC(";
      out += name(sel->key) + ") OFFSET " + std::to_string(sel->rank - 1) + " LIMIT 1";
    }
    return out;
  }

  std::vector<std::string> tokens{"ANS"};
  std::vector<bool> printed(nodes.size(), false);
  std::vector<bool> statement_named(nodes.size(), false);
  auto print_constant = [&](NodeId n) {
    if (printed[n] || !is_constant(nodes[n])) return;
    printed[n] = true;
    tokens.push_back(constant_label(n));
  };
  for (const auto& o : order) {
    const auto& e = edges[o.index];
    print_constant(o.near);
    bool emit_label = true;
    if (e.kind == EdgeKind::kStatementSubject || e.kind == EdgeKind::kStatementObject) {
      const NodeId stmt = e.kind == EdgeKind::kStatementSubject ? e.to : e.from;
      emit_label = !statement_named[stmt];
      statement_named[stmt] = true;
    }
    if (emit_label) tokens.push_back(edge_label(e));
    print_constant(o.far);
  }
  for (const auto& f : q.filters()) {
    tokens.push_back(predicate_words(converse(f.predicate)));
    if (auto tv = std::get_if<TimeValue>(&f.reference)) tokens.push_back(tv->text());
  }
  if (const auto& sel = q.ordinal()) tokens.push_back(ordinal_words(sel->rank, sel->direction));

  std::string out;
  for (const auto& t : tokens) {
    if (t.empty()) continue;
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

Scores f1_score(const AnswerSet& predicted, const AnswerSet& gold) {
  if (gold.empty()) throw UsageError("f1_score needs a nonempty gold answer set");
  if (predicted.empty()) return {1.0, 0.0, 0.0};
  std::size_t shared = 0;
  for (const auto& a : predicted) shared += gold.count(a);
  Scores s;
  s.precision = static_cast<double>(shared) / static_cast<double>(predicted.size());
  s.recall = static_cast<double>(shared) / static_cast<double>(gold.size());
  s.f1 = (s.precision + s.recall) == 0.0 ? 0.0
                                          : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

}  // namespace tempq
