#include "tempq/pipeline.hpp"

#include <random>
#include <sstream>

namespace tempq {

AnswerResult answer_question(const KnowledgeGraph& g, std::string_view question,
                             const ScorerModel& model, const PipelineOptions& options,
                             const Lexicon& lexicon, const RankerLexicon& terms) {
  AnswerResult r;
  r.context = make_context(g, question, options.grounding, lexicon, terms);
  r.ranked = rank(model, question, generate_candidates(r.context), g, terms);
  if (r.ranked.empty()) return r;
  const auto& head = r.ranked.front();
  r.answers = head.answers;
  r.selected_answer = select_answer(r.answers, options.selection, options.seed);
  r.selected_query = serialize(head.candidate.graph, g, SerializationMode::kDebug);
  return r;
}

std::optional<std::string> select_answer(const AnswerSet& answers, AnswerSelection selection,
                                         std::uint64_t seed) {
  if (answers.empty()) return std::nullopt;
  if (selection == AnswerSelection::kSmallest) return *answers.begin();
  std::mt19937_64 rng(seed);
  auto it = answers.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(rng() % answers.size()));
  return *it;
}

namespace {

std::string describe_node(const QueryGraph& q, NodeId n, const KnowledgeGraph& g) {
  const QueryNode& node = q.nodes().at(n);
  switch (node.kind) {
    case NodeKind::kEntity: return ":" + g.entity(*node.entity).id;
    case NodeKind::kLiteral: return "\"" + node.literal->key() + "\"";
    case NodeKind::kVariable: return "var" + std::to_string(n);
    case NodeKind::kStatement: return "stmt" + std::to_string(n);
  }
  return "?";
}

std::string describe_predicate(PredicateIndex p, const KnowledgeGraph& g) {
  const Predicate& pred = g.predicate(p);
  std::string out = pred.id;
  const auto flags = flag_list(pred.flags);
  if (!flags.empty()) {
    out += " [";
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (i) out += ",";
      out += std::string(to_string(flags[i]));
    }
    out += "]";
  }
  return out;
}

std::string describe_fill(const SlotFill& fill, const QueryGraph& q, const KnowledgeGraph& g) {
  std::ostringstream out;
  out << fill.slot << ": ";
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, op::AddEntity>) {
          out << "entity :" << g.entity(o.entity).id;
        } else if constexpr (std::is_same_v<T, op::AddLiteral>) {
          out << "literal \"" << o.literal.key() << "\"";
        } else if constexpr (std::is_same_v<T, op::AddVariable>) {
          out << "variable";
        } else if constexpr (std::is_same_v<T, op::AddStatement>) {
          out << "statement";
        } else if constexpr (std::is_same_v<T, op::AddEdge>) {
          const QueryEdge& e = o.edge;
          switch (e.kind) {
            case EdgeKind::kTriple: out << "triple "; break;
            case EdgeKind::kStatementSubject: out << "subject "; break;
            case EdgeKind::kStatementObject: out << "object "; break;
            case EdgeKind::kQualifier: out << "qualifier "; break;
            case EdgeKind::kTime: out << "time "; break;
          }
          if (e.kind != EdgeKind::kTime) out << describe_predicate(e.predicate, g) << " ";
          out << describe_node(q, e.from, g) << " -> " << describe_node(q, e.to, g);
        } else if constexpr (std::is_same_v<T, op::AddFilter>) {
          out << "filter " << to_string(o.filter.predicate);
        } else if constexpr (std::is_same_v<T, op::SetOrdinal>) {
          out << "ordinal " << ordinal_words(o.selector.rank, o.selector.direction);
        } else {
          out << "answer " << describe_node(q, o.node, g);
        }
      },
      fill.op);
  if (!fill.evidence.empty()) {
    out << " (evidence:";
    for (auto s : fill.evidence) out << " #" << s.value;
    out << ")";
  }
  return out.str();
}

}  // namespace

std::string format_trace(const AnswerResult& result, const KnowledgeGraph& g) {
  const auto& ctx = result.context;
  std::ostringstream out;
  out << "question: " << ctx.question << "\n\n";
  out << "annotation:\n" << ctx.doc.to_timeml() << "\n";
  out << "\nentities:\n";
  for (const auto& m : ctx.mentions) {
    out << "  \"" << m.text << "\" -> :" << g.entity(m.entity).id << "\n";
  }
  out << "\nconstraints:\n";
  for (std::size_t i = 0; i < ctx.constraints.size(); ++i) {
    const auto& c = ctx.constraints[i];
    out << "  [" << i + 1 << "] " << to_string(c.type) << " " << notation(c, ctx.doc) << "\n";
    for (const auto& t : evoke_interpretations(c, i)) {
      out << "      " << structure_name(t.structure) << " " << notation(t)
          << (ctx.config.is_enabled(t.structure) ? "" : " (disabled)") << "\n";
    }
  }
  out << "\ncandidates: " << result.ranked.size() << "\n";
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    const auto& sc = result.ranked[i];
    const auto& c = sc.candidate;
    std::ostringstream score;
    score.precision(6);
    score << std::fixed << sc.score;
    out << "\n#" << i + 1 << " score " << score.str() << " provenance";
    for (const auto& t : c.provenance) out << " " << to_string(t);
    out << "\n  ranking: " << sc.serialization << "\n";
    std::istringstream debug(serialize(c.graph, g, SerializationMode::kDebug));
    for (std::string line; std::getline(debug, line);) out << "  " << line << "\n";
    out << "  answers:";
    for (const auto& a : sc.answers) out << " " << a;
    out << "\n  slots:\n";
    for (const auto& fill : c.log) out << "    " << describe_fill(fill, c.graph, g) << "\n";
  }
  return out.str();
}

}  // namespace tempq
