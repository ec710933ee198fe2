#pragma once

#include "essentia/graph.hpp"

#include <random>
#include <string>

namespace fixtures {

using namespace essentia;

TypeGraphPtr running_types();
/// Two node types X, Y; edges e: X -> Y and s: X -> X.
TypeGraphPtr toy_types();

/// Compact graph notation: nodes "1:Class 2:Getter", edges "1-getter->2 1-setter->3".
/// Edge ids are e<index> unless given as "id=1-getter->2".
GraphPtr graph(const TypeGraphPtr& types, const std::string& name, const std::string& nodes,
               const std::string& edges = {});

GraphPtr random_graph(const TypeGraphPtr& types, std::mt19937& rng, int max_nodes, int max_edges,
                      const std::string& prefix = "n");

unsigned seed();

}  // namespace fixtures
