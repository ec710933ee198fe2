#include "essentia/rewriting.hpp"

namespace essentia {

Rule Rule::make(std::string name, Morphism l, Morphism r, CondPtr ac) {
    if (!l.valid() || !r.valid())
        throw Error("rule " + name + ": missing span leg");
    if (!same_graph(l.domain(), r.domain()))
        throw Error("rule " + name + ": l and r have different domains");
    if (!l.is_injective() || !r.is_injective())
        throw Error("rule " + name + ": span legs must be injective");
    Rule rule;
    rule.name = std::move(name);
    rule.K = l.domain();
    rule.L = l.codomain();
    rule.R = r.codomain();
    if (!ac)
        ac = Condition::make_true(rule.L);
    if (!same_graph(ac->root(), rule.L))
        throw Error("rule " + rule.name + ": condition is not rooted at L");
    rule.ac = normalize(ac);
    rule.l = std::move(l);
    rule.r = std::move(r);
    return rule;
}

std::size_t Rule::deleted_elements() const {
    return L->node_count() + L->edge_count() - K->node_count() - K->edge_count();
}

std::size_t Rule::created_elements() const {
    return R->node_count() + R->edge_count() - K->node_count() - K->edge_count();
}

bool applicable(const Rule& rule, const Morphism& m, MatchMode mode) {
    if (gluing_violation(rule.l, m))
        return false;
    return mode == MatchMode::AcDisregarding || satisfies(m, rule.ac);
}

std::vector<Morphism> find_matches(const Rule& rule, const GraphPtr& G, MatchMode mode) {
    std::vector<Morphism> out;
    for_each_morphism(rule.L, G, {}, [&](const Morphism& m) {
        if (applicable(rule, m, mode))
            out.push_back(m);
        return true;
    });
    return out;
}

Transformation apply(const Rule& rule, const Morphism& m) {
    if (!same_graph(m.domain(), rule.L))
        throw Error("apply " + rule.name + ": match is not rooted at L");
    std::string why;
    auto pc = pushout_complement(rule.l, m, &why);
    if (!pc)
        throw Error("apply " + rule.name + ": gluing condition fails: " + why);
    auto po = pushout(pc->k, rule.r);
    Transformation t;
    t.rule = rule;
    t.match = m;
    t.k = pc->k;
    t.g = pc->d;
    t.h = po.from_b;
    t.comatch = po.from_c;
    return t;
}

Rule inverse(const Rule& rule) {
    return Rule::make(rule.name + "^-1", rule.r, rule.l);
}

IndependenceVerdict::Kind IndependenceVerdict::classification() const {
    bool a = first_disables_second(), b = second_disables_first();
    if (a && b)
        return Kind::Mutual;
    if (a)
        return Kind::FirstDisablesSecond;
    if (b)
        return Kind::SecondDisablesFirst;
    return Kind::Independent;
}

const char* to_string(IndependenceVerdict::Kind k) {
    switch (k) {
    case IndependenceVerdict::Kind::Independent: return "independent";
    case IndependenceVerdict::Kind::FirstDisablesSecond: return "t1_disables_t2";
    case IndependenceVerdict::Kind::SecondDisablesFirst: return "t2_disables_t1";
    case IndependenceVerdict::Kind::Mutual: return "mutual";
    }
    return "?";
}

IndependenceVerdict parallel_independence(const Transformation& t1, const Transformation& t2) {
    if (!same_graph(t1.G(), t2.G()))
        throw Error("parallel independence: transformations start from different graphs");
    IndependenceVerdict v;
    v.d1 = factor_through_mono(t2.match, t1.g);
    v.d2 = factor_through_mono(t1.match, t2.g);
    if (v.d1)
        v.ac_ok_1 = satisfies(compose(*v.d1, t1.h), t2.rule.ac);
    if (v.d2)
        v.ac_ok_2 = satisfies(compose(*v.d2, t2.h), t1.rule.ac);
    return v;
}

}  // namespace essentia
