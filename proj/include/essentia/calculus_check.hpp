#pragma once

#include "essentia/conditions.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace essentia {

/// Two node types X, Y; edge types e: X -> Y and s: X -> X.
TypeGraphPtr two_type_system();

/// All graphs with at most `max_nodes` nodes and `max_edges` edges, one per iso class,
/// in a deterministic order (by size, then by construction order).
std::vector<GraphPtr> enumerate_graphs(const TypeGraphPtr& types, int max_nodes, int max_edges);

/// Inclusions of g into g plus one node, one edge, or one node with an edge attaching it to g.
std::vector<Morphism> single_step_extensions(const GraphPtr& g);

/// Every condition over `root` of nesting depth <= depth built from single-step extensions:
/// quantifiers exists/forall at each level with bodies true or a deeper condition,
/// plus binary and/or combinations of the depth-1 members.
std::vector<CondPtr> small_conditions(const GraphPtr& root, int depth);

struct CalculusLimits {
    int host_nodes = 4;
    int host_edges = 3;
    int depth = 2;
};

struct CalculusReport {
    std::string name;
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::vector<std::string> violations;  // the first few, for diagnostics
    bool passed() const { return failures == 0; }
    void record(std::string w) {
        if (failures++ < 20)
            violations.push_back(std::move(w));
    }
};

/// q' o b |= c  <=>  q' |= shift(b, c) over every root pair b, condition c and host match q'.
CalculusReport check_shift_soundness(const CalculusLimits& limits);

/// comatch |= c  <=>  match |= left(rule span, c) over every toy rule, condition c over R, and transformation.
CalculusReport check_left_soundness(const CalculusLimits& limits);

}  // namespace essentia
