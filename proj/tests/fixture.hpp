#pragma once

#include "paths.hpp"
#include "tempq/knowledge_graph.hpp"

namespace tempq::testing {

inline const KnowledgeGraph& fixture_graph() {
  static const KnowledgeGraph g = KnowledgeGraph::load(data_path("fixture_kg.json"));
  return g;
}

}  // namespace tempq::testing
