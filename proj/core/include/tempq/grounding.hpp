#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tempq/annotator.hpp"
#include "tempq/constraints.hpp"
#include "tempq/knowledge_graph.hpp"
#include "tempq/lexicon.hpp"
#include "tempq/query_graph.hpp"

namespace tempq {

struct GroundingConfig {
  std::set<Structure> enabled{Structure::kIS1, Structure::kIS2, Structure::kIS3,
                              Structure::kIS4, Structure::kIS5, Structure::kIS6};
  int beam_width = 8;
  int max_hops = 2;
  // Drop candidates that execute to the empty set.
  bool require_nonempty = true;

  bool is_enabled(Structure s) const { return s == Structure::kBasic || enabled.count(s) > 0; }
  void disable(Structure s) { enabled.erase(s); }

  // {"enabled": ["IS-1", ...], "beam_width": 8, "max_hops": 2, "require_nonempty": true}
  static GroundingConfig from_json(std::string_view json_text);
  static GroundingConfig from_file(const std::filesystem::path& path);
  std::string to_json() const;
};

// Parses "4,5,6" or "IS-4,IS-5" into structures. Throws ParseError.
std::set<Structure> parse_structure_list(std::string_view list);

// One builder step. Node ids refer to the graph under construction.
namespace op {
struct AddEntity {
  EntityIndex entity;
};
struct AddLiteral {
  Literal literal;
};
struct AddVariable {};
struct AddStatement {};
struct AddEdge {
  QueryEdge edge;
};
struct AddFilter {
  TemporalFilter filter;
};
struct SetOrdinal {
  OrdinalSelector selector;
};
struct SetAnswer {
  NodeId node;
};
}  // namespace op

using BuildOp = std::variant<op::AddEntity, op::AddLiteral, op::AddVariable, op::AddStatement,
                             op::AddEdge, op::AddFilter, op::SetOrdinal, op::SetAnswer>;

// A logged step together with the slot it fills and the statements that
// justified it.
struct SlotFill {
  std::string slot;
  BuildOp op;
  std::vector<StatementIndex> evidence;
};

struct TemplateRef {
  Structure structure = Structure::kBasic;
  std::optional<std::size_t> constraint;
  std::optional<ComparisonPredicate> predicate;
  bool projection = false;

  friend bool operator==(const TemplateRef&, const TemplateRef&) = default;
};

std::string to_string(const TemplateRef& t);

struct Candidate {
  QueryGraph graph;
  std::vector<TemplateRef> provenance;
  std::vector<SlotFill> log;
  // Statement node whose object or subject is the answer, and its time
  // variable if one was attached; used to project WHEN questions.
  std::optional<NodeId> answer_statement;
  std::optional<NodeId> answer_time;
  AnswerSet answers;

  // Whether any provenance entry names `s`.
  bool uses(Structure s) const;
};

// Rebuilds a graph from a slot-fill log, checking every evidence statement
// against the edge it supports. Throws DataError on inconsistent evidence.
QueryGraph replay(const std::vector<SlotFill>& log, const KnowledgeGraph& g);

struct GroundingContext {
  const KnowledgeGraph* graph = nullptr;
  std::string question;
  AnnotationDoc doc;
  std::vector<EntityMention> mentions;
  std::vector<TemporalConstraint> constraints;
  GroundingConfig config;
  const RankerLexicon* terms = &RankerLexicon::defaults();

  const KnowledgeGraph& kg() const { return *graph; }
  std::vector<EntityIndex> linked() const;
  // Linked entities on the target (E1) and related (E2) side of a constraint's
  // signal. A side with no mention falls back to every linked entity.
  std::vector<EntityIndex> e1_anchors(const TemporalConstraint& c) const;
  std::vector<EntityIndex> e2_anchors(const TemporalConstraint& c) const;
};

// Links, annotates and evokes constraints for `question`.
GroundingContext make_context(const KnowledgeGraph& g, std::string_view question,
                              GroundingConfig config = {},
                              const Lexicon& lexicon = Lexicon::defaults(),
                              const RankerLexicon& terms = RankerLexicon::defaults());

std::vector<Candidate> ground_basic(const GroundingContext& ctx);
std::vector<Candidate> ground_is1(const GroundingContext& ctx, const InterpretationTemplate& t);
std::vector<Candidate> ground_is2(const GroundingContext& ctx, const InterpretationTemplate& t);
std::vector<Candidate> ground_is3(const GroundingContext& ctx, const InterpretationTemplate& t);
std::vector<Candidate> ground_is4(const GroundingContext& ctx, const InterpretationTemplate& t);
std::vector<Candidate> ground_is5(const GroundingContext& ctx, const InterpretationTemplate& t);
std::vector<Candidate> ground_is6(const GroundingContext& ctx, const InterpretationTemplate& t);
std::vector<Candidate> ground(const GroundingContext& ctx, const InterpretationTemplate& t);

// Union over constraints and their templates, conjoined on the answer.
// Questions without constraints, or whose constraints ground to nothing, get
// the basic candidates.
std::vector<Candidate> generate_candidates(const GroundingContext& ctx);

}  // namespace tempq
