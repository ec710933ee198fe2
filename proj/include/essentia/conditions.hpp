#pragma once

#include "essentia/category.hpp"

#include <memory>
#include <string>
#include <vector>

namespace essentia {

class Condition;
using CondPtr = std::shared_ptr<const Condition>;

/// Nested graph condition over a root graph. Forall(a, d) abbreviates not exists(a, not d).
class Condition {
public:
    enum class Kind { True, False, Exists, Forall, And, Or, Not };

    static CondPtr make_true(GraphPtr root);
    static CondPtr make_false(GraphPtr root);
    static CondPtr exists(Morphism arrow, CondPtr body);
    static CondPtr exists(Morphism arrow);
    static CondPtr forall(Morphism arrow, CondPtr body);
    static CondPtr conj(GraphPtr root, std::vector<CondPtr> children);
    static CondPtr disj(GraphPtr root, std::vector<CondPtr> children);
    static CondPtr negate(CondPtr body);

    Kind kind() const { return kind_; }
    const GraphPtr& root() const { return root_; }
    const Morphism& arrow() const { return arrow_; }
    const CondPtr& body() const { return body_; }
    const std::vector<CondPtr>& children() const { return children_; }

    bool is_quantifier() const { return kind_ == Kind::Exists || kind_ == Kind::Forall; }

private:
    friend struct ConditionAccess;
    Kind kind_ = Kind::True;
    GraphPtr root_;
    Morphism arrow_;
    CondPtr body_;
    std::vector<CondPtr> children_;
};

/// Pushes negations inward, flattens and sorts And/Or, folds constants and removes inner arrows
/// that are isomorphisms (transported into the body) or non-injective (decided outright).
/// Arrows leaving the outermost root are kept as they are, since matches there may be non-injective.
CondPtr normalize(const CondPtr& c);
bool is_normalized(const CondPtr& c);

/// q |= c. Quantified arrows are witnessed by injective extensions; q itself may be any morphism.
bool satisfies(const Morphism& q, const CondPtr& c);

/// Shift along b: P0 -> P0'. For all q': P0' -> G, q' o b |= c iff q' |= shift(b, c).
/// With `injective_match` only injective q' are supported, which prunes non-injective branches.
CondPtr shift(const Morphism& b, const CondPtr& c, bool injective_match = false);

/// Translation of c over R along the span L <-l- K -r-> R to a condition over L.
/// For a transformation with match m and comatch n along this span, n |= c iff m |= left(l, r, c).
CondPtr left(const Morphism& l, const Morphism& r, const CondPtr& c);

/// Structural rendering with graph descriptions and arrow maps; equal strings mean equal conditions.
std::string canonical_string(const CondPtr& c);
/// Short human-readable form naming quantified graphs, e.g. forall(P1, or(exists(P2), exists(P3))).
std::string pretty(const CondPtr& c);

std::size_t quantifier_count(const CondPtr& c);

/// Tree structure of a normalized condition: one node for the root, one per quantified graph.
struct ConditionTree {
    enum class Binding { Root, Existential, Universal };
    struct Node {
        GraphPtr graph;
        int parent = -1;
        Morphism arrow;  // parent graph -> graph; invalid for the root
        Binding binding = Binding::Root;
        std::vector<int> children;
    };
    std::vector<Node> nodes;

    std::vector<int> leaves() const;
    /// Node indices from the root (index 0) down to `node`.
    std::vector<int> path_to(int node) const;
    /// Composite arrow from node `from` down to its descendant `to`.
    Morphism arrow_between(int from, int to) const;
};

ConditionTree tree(const CondPtr& c);

/// Condition rooted at two graphs through a cospan P0 -> P1 <- P0'.
class CospanCondition {
public:
    enum class Kind { True, False, Exists };

    static std::shared_ptr<const CospanCondition> make_true(GraphPtr root, GraphPtr root2);
    static std::shared_ptr<const CospanCondition> exists(Morphism p1, Morphism p1b, CondPtr body);

    Kind kind() const { return kind_; }
    const GraphPtr& root() const { return root_; }
    const GraphPtr& root2() const { return root2_; }
    const Morphism& left() const { return p1_; }
    const Morphism& right() const { return p1b_; }
    const CondPtr& body() const { return body_; }

private:
    Kind kind_ = Kind::True;
    GraphPtr root_;
    GraphPtr root2_;
    Morphism p1_;
    Morphism p1b_;
    CondPtr body_;
};

using CospanCondPtr = std::shared_ptr<const CospanCondition>;

/// (q, q2) |= cc: some q1 with q1 o p1 = q and q1 o p1' = q2 satisfies the body.
bool satisfies_cospan(const Morphism& q, const Morphism& q2, const CospanCondPtr& cc);

std::string pretty(const CospanCondPtr& cc);

}  // namespace essentia
