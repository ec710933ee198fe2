#pragma once

#include "essentia/graph.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace essentia {

struct Span {
    Morphism left;
    Morphism right;
    const GraphPtr& apex() const { return left.domain(); }
};

struct Cospan {
    Morphism left;
    Morphism right;
    const GraphPtr& target() const { return left.codomain(); }
};

struct Pullback {
    GraphPtr object;
    Morphism to_a;
    Morphism to_b;
};

struct Pushout {
    GraphPtr object;
    Morphism from_b;
    Morphism from_c;
};

struct PushoutComplement {
    GraphPtr object;
    Morphism k;  // K -> D
    Morphism d;  // D >-> G
};

struct InitialPushout {
    GraphPtr boundary;  // B
    Morphism b;         // B >-> A'
    GraphPtr context;   // C
    Morphism c;         // C >-> A
    Morphism bc;        // B >-> C
};

struct Coproduct {
    GraphPtr object;
    Morphism in_a;
    Morphism in_b;
};

struct Factorization {
    Morphism e_a;  // A -> I
    Morphism e_b;  // B -> I
    Morphism m;    // I >-> C
};

/// Fiber product of f: A -> C and g: B -> C. Ids of the apex join the ids of both components.
Pullback pullback(const Morphism& f, const Morphism& g);

/// True iff (pa, pb) is a pullback of (f, g): the comparison map into the canonical pullback is an iso.
bool is_pullback(const Morphism& f, const Morphism& g, const Morphism& pa, const Morphism& pb);

/// Gluing of B and C along f: A -> B and g: A -> C. Throws unless one leg is injective.
Pushout pushout(const Morphism& f, const Morphism& g);

/// True iff (qb, qc) is a pushout of (f, g).
bool is_pushout(const Morphism& f, const Morphism& g, const Morphism& qb, const Morphism& qc);

/// Empty when the gluing condition holds for l: K >-> L and m: L -> G, otherwise a description of the
/// violated clause ("dangling ..." or "identification ...").
std::optional<std::string> gluing_violation(const Morphism& l, const Morphism& m);

/// D = G minus m(L \ l(K)), when the gluing condition holds.
std::optional<PushoutComplement> pushout_complement(const Morphism& l, const Morphism& m,
                                                    std::string* violation = nullptr);

/// Initial pushout over an injective f: A' >-> A.
InitialPushout initial_pushout(const Morphism& f);

Coproduct coproduct(const GraphPtr& a, const GraphPtr& b);
/// The unique [f, g]: A+B -> X.
Morphism mediate(const Coproduct& sum, const Morphism& f, const Morphism& g);

/// Joint image factorization of f: A -> C, g: B -> C.
Factorization em_factorize(const Morphism& f, const Morphism& g);

/// Subgraph of g on the flagged elements (edges require flagged endpoints) with its inclusion.
Morphism subgraph(const GraphPtr& g, const std::vector<char>& keep_nodes, const std::vector<char>& keep_edges,
                  const std::string& name = {});

/// Image of f as a subgraph of its codomain, with the inclusion.
Morphism image_inclusion(const Morphism& f);

/// Quotients of a disjoint union of graphs. Every element of every part is kept; a partition of the
/// union's nodes and edges determines the quotient, so each result is one jointly surjective family.
struct QuotientProblem {
    std::vector<GraphPtr> parts;
    /// Elements of a mono part are never identified with each other.
    std::vector<bool> mono;
    /// Forced identifications as ((part, node), (part, node)).
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> node_pairs;
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> edge_pairs;
    /// Elements of parts a and b may share a class only as one of the listed (a-element, b-element) pairs.
    struct Restriction {
        int a = 0, b = 0;
        std::set<std::pair<int, int>> nodes, edges;
    };
    std::vector<Restriction> restrictions;
    std::string name;
};

/// Calls visit(legs) for every admissible quotient in canonical order; legs[i]: parts[i] -> Q.
/// Stops when visit returns false.
void for_each_quotient(const QuotientProblem& problem,
                       const std::function<bool(const std::vector<Morphism>&)>& visit);

/// Jointly epi cospans A -> X <- B, one per iso class.
std::vector<Cospan> enumerate_jointly_epi_cospans(const GraphPtr& a, const GraphPtr& b, bool right_mono,
                                                  bool left_mono = false);

/// Isomorphism h: codomain(x) -> codomain(y) with h o x_i == y_i for every i, if one exists.
std::optional<Morphism> iso_under(const std::vector<Morphism>& x, const std::vector<Morphism>& y);

}  // namespace essentia
