#pragma once

#include "essentia/conditions.hpp"

#include <optional>
#include <string>
#include <vector>

namespace essentia {

/// DPO rule L <-l- K -r-> R with an application condition over L.
struct Rule {
    std::string name;
    GraphPtr L, K, R;
    Morphism l;  // K >-> L
    Morphism r;  // K >-> R
    CondPtr ac;

    /// Checks the span and normalizes ac (True when absent).
    static Rule make(std::string name, Morphism l, Morphism r, CondPtr ac = nullptr);

    /// Elements of L outside l(K), of R outside r(K).
    std::size_t deleted_elements() const;
    std::size_t created_elements() const;
};

enum class MatchMode { RespectAc, AcDisregarding };

/// Morphisms L -> G that pass the gluing condition (and satisfy ac under RespectAc).
std::vector<Morphism> find_matches(const Rule& rule, const GraphPtr& G, MatchMode mode);

bool applicable(const Rule& rule, const Morphism& m, MatchMode mode);

/// G <-g- D -h-> H with match m: L -> G and comatch n: R -> H.
struct Transformation {
    Rule rule;
    Morphism match;
    Morphism k;  // K -> D
    Morphism g;  // D >-> G
    Morphism h;  // D >-> H
    Morphism comatch;

    const GraphPtr& G() const { return match.codomain(); }
    const GraphPtr& D() const { return g.domain(); }
    const GraphPtr& H() const { return h.codomain(); }
};

/// Throws on a gluing violation, naming the clause.
Transformation apply(const Rule& rule, const Morphism& m);

/// R <- K -> L with ac dropped; for structural use only.
Rule inverse(const Rule& rule);

struct IndependenceVerdict {
    enum class Kind { Independent, FirstDisablesSecond, SecondDisablesFirst, Mutual };

    std::optional<Morphism> d1;  // L2 -> D1 with g1 o d1 = m2
    std::optional<Morphism> d2;  // L1 -> D2 with g2 o d2 = m1
    bool ac_ok_1 = false;        // h1 o d1 |= ac2
    bool ac_ok_2 = false;        // h2 o d2 |= ac1

    bool first_disables_second() const { return !d1 || !ac_ok_1; }
    bool second_disables_first() const { return !d2 || !ac_ok_2; }
    Kind classification() const;
    bool independent() const { return classification() == Kind::Independent; }
    bool ac_disregarding_independent() const { return d1 && d2; }
};

const char* to_string(IndependenceVerdict::Kind k);

IndependenceVerdict parallel_independence(const Transformation& t1, const Transformation& t2);

}  // namespace essentia
