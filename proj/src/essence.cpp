#include "essentia/essence.hpp"

#include <map>

namespace essentia {

namespace {

std::string overlap_key(const RuleOverlap& ro) {
    return graph_invariant(*ro.apex()) + "|" + graph_invariant(*ro.Pj()) + "|" + graph_invariant(*ro.Pi());
}

// Apex map determined by the jointly injective legs of y; empty when it is not a bijection.
std::optional<Morphism> apex_iso(const RuleOverlap& x, const RuleOverlap& y, const Morphism& beta,
                                 const Morphism& gamma) {
    const auto& A = *x.apex();
    const auto& B = *y.apex();
    std::map<std::pair<int, int>, int> nodes, edges;
    for (std::size_t i = 0; i < B.node_count(); ++i)
        if (!nodes.emplace(std::make_pair(y.bj.node(static_cast<int>(i)), y.bi.node(static_cast<int>(i))),
                           static_cast<int>(i)).second)
            return std::nullopt;
    for (std::size_t i = 0; i < B.edge_count(); ++i)
        if (!edges.emplace(std::make_pair(y.bj.edge(static_cast<int>(i)), y.bi.edge(static_cast<int>(i))),
                           static_cast<int>(i)).second)
            return std::nullopt;
    std::vector<int> nm, em;
    std::vector<char> hit_n(B.node_count(), 0), hit_e(B.edge_count(), 0);
    for (std::size_t i = 0; i < A.node_count(); ++i) {
        int a = static_cast<int>(i);
        auto it = nodes.find({beta.node(x.bj.node(a)), gamma.node(x.bi.node(a))});
        if (it == nodes.end() || hit_n[static_cast<std::size_t>(it->second)])
            return std::nullopt;
        hit_n[static_cast<std::size_t>(it->second)] = 1;
        nm.push_back(it->second);
    }
    for (std::size_t i = 0; i < A.edge_count(); ++i) {
        int a = static_cast<int>(i);
        auto it = edges.find({beta.edge(x.bj.edge(a)), gamma.edge(x.bi.edge(a))});
        if (it == edges.end() || hit_e[static_cast<std::size_t>(it->second)])
            return std::nullopt;
        hit_e[static_cast<std::size_t>(it->second)] = 1;
        em.push_back(it->second);
    }
    try {
        return Morphism(x.apex(), y.apex(), std::move(nm), std::move(em));
    } catch (const Error&) {
        return std::nullopt;
    }
}

bool same_size(const GraphPtr& a, const GraphPtr& b) {
    return a->node_count() == b->node_count() && a->edge_count() == b->edge_count();
}

// Keeps overlaps pairwise non-isomorphic.
class OverlapSet {
public:
    /// Index of an isomorphic overlap already present, or -1 after adding it.
    int insert(const RuleOverlap& ro) {
        auto key = overlap_key(ro);
        auto& bucket = buckets_[key];
        for (int i : bucket)
            if (overlaps_isomorphic(items_[static_cast<std::size_t>(i)], ro))
                return i;
        bucket.push_back(static_cast<int>(items_.size()));
        items_.push_back(ro);
        return -1;
    }
    const std::vector<RuleOverlap>& items() const { return items_; }

private:
    std::map<std::string, std::vector<int>> buckets_;
    std::vector<RuleOverlap> items_;
};

std::vector<std::string> path_names(const ConditionTree& t, const std::vector<int>& path, int upto) {
    std::vector<std::string> out;
    for (int k = 0; k <= upto; ++k)
        out.push_back(t.nodes[static_cast<std::size_t>(path[static_cast<std::size_t>(k)])].graph->name());
    return out;
}

std::vector<int> deletion_targets(const ConditionTree& t) {
    auto leaves = t.leaves();
    if (leaves.empty() || leaves.front() != 0)
        leaves.insert(leaves.begin(), 0);
    return leaves;
}

}  // namespace

bool overlaps_isomorphic(const RuleOverlap& x, const RuleOverlap& y) {
    if (!same_size(x.apex(), y.apex()) || !same_size(x.Pj(), y.Pj()) || !same_size(x.Pi(), y.Pi()))
        return false;
    bool found = false;
    for_each_extension(x.pL1, y.pL1, true, [&](const Morphism& beta) {
        if (!beta.is_surjective())
            return true;
        for_each_extension(x.pL2, y.pL2, true, [&](const Morphism& gamma) {
            if (gamma.is_surjective() && apex_iso(x, y, beta, gamma))
                found = true;
            return !found;
        });
        return !found;
    });
    return found;
}

PlainEssence plain_essence(const Morphism& l, const Morphism& m1, const Morphism& m2) {
    PlainEssence out;
    auto pb = pullback(m1, m2);
    out.a1 = pb.to_a;
    out.a2 = pb.to_b;
    auto kept = pullback(l, out.a1);
    out.to_k = kept.to_a;
    out.kept = kept.to_b;
    out.ipo = initial_pushout(out.kept);
    return out;
}

const char* to_string(EssenceKind k) { return k == EssenceKind::Deletion ? "deletion" : "insertion"; }

const char* to_string(ConditionTree::Binding b) {
    switch (b) {
    case ConditionTree::Binding::Root: return "root";
    case ConditionTree::Binding::Existential: return "existential";
    case ConditionTree::Binding::Universal: return "universal";
    }
    return "?";
}

const char* to_string(ConflictEssence::Origin o) {
    switch (o) {
    case ConflictEssence::Origin::Forward: return "forward";
    case ConflictEssence::Origin::Backward: return "backward";
    case ConflictEssence::Origin::Composed: return "composed";
    }
    return "?";
}

ProtoEssence level_recursion(const Morphism& l, const ConditionTree& t, const std::vector<int>& path,
                             const Cospan& base, int first, bool escalate) {
    ProtoEssence pe;
    pe.base = base;
    pe.path = path;
    int leaf = path.back();
    int last = static_cast<int>(path.size()) - 1;
    for (int lv = first; lv <= last; ++lv) {
        int node = path[static_cast<std::size_t>(lv)];
        auto e_p = compose(t.arrow_between(node, leaf), base.right);
        auto ess = plain_essence(l, base.left, e_p);
        pe.trace.push_back(ess);
        pe.level = lv;
        pe.ess = ess;
        pe.anchor = t.arrow_between(0, node);
        if (!ess.trivial() || !escalate)
            break;
    }
    return pe;
}

std::vector<ProtoEssence> proto_essences_by_deletion(const Rule& r1, const Rule& r2, const EngineOptions& opts) {
    std::vector<ProtoEssence> out;
    auto t = tree(r2.ac);
    for (int n : deletion_targets(t)) {
        auto path = t.path_to(n);
        const auto& P = t.nodes[static_cast<std::size_t>(n)].graph;
        for (const auto& cs : enumerate_jointly_epi_cospans(r1.L, P, n != 0)) {
            auto pe = level_recursion(r1.l, t, path, cs, 0, !opts.mutations.no_level_escalation);
            pe.kind = EssenceKind::Deletion;
            out.push_back(std::move(pe));
        }
    }
    return out;
}

std::vector<ProtoEssence> proto_essences_by_insertion(const Rule& r1, const Rule& r2, const EngineOptions& opts) {
    std::vector<ProtoEssence> out;
    auto t = tree(r2.ac);
    for (int n : t.leaves()) {
        if (n == 0)
            continue;
        auto path = t.path_to(n);
        const auto& P = t.nodes[static_cast<std::size_t>(n)].graph;
        for (const auto& cs : enumerate_jointly_epi_cospans(r1.R, P, true)) {
            auto pe = level_recursion(r1.r, t, path, cs, 1, !opts.mutations.no_level_escalation);
            pe.kind = EssenceKind::Insertion;
            out.push_back(std::move(pe));
        }
    }
    return out;
}

std::optional<DisablingEssence> shift_insertion_essence(const ProtoEssence& pe, const Rule& r1, const Rule& r2,
                                                        std::string* why) {
    const auto& b = pe.ess.a2;
    std::string violation;
    auto pc = pushout_complement(pe.ess.kept, b, &violation);
    if (!pc) {
        if (why)
            *why = "no pushout complement: " + violation;
        return std::nullopt;
    }
    auto anchor = factor_through_mono(pe.anchor, pc->d);
    if (!anchor) {
        if (why)
            *why = "L2 meets elements created by " + r1.name;
        return std::nullopt;
    }
    auto t = tree(r2.ac);
    DisablingEssence de;
    de.kind = EssenceKind::Insertion;
    de.overlap = {compose(pe.ess.to_k, r1.l), pc->k, Morphism::identity(r1.L), *anchor};
    de.c = pe.ess.ipo.b;
    de.level = pe.level;
    de.binding = t.nodes[static_cast<std::size_t>(pe.path[static_cast<std::size_t>(pe.level)])].binding;
    de.path = path_names(t, pe.path, pe.level);
    de.path.back() += "'";
    de.proto = pe;
    return de;
}

bool embeddable_at_overlap(const RuleOverlap& ro, const Rule& r1, const Rule& r2) {
    bool right_mono = !ro.pL2.is_iso();
    bool left_mono = !ro.pL1.is_iso();
    for (const auto& cs : enumerate_jointly_epi_cospans(ro.Pj(), ro.Pi(), right_mono, left_mono)) {
        if (!is_pullback(cs.left, cs.right, ro.bj, ro.bi))
            continue;
        if (applicable(r1, compose(ro.pL1, cs.left), MatchMode::AcDisregarding) &&
            applicable(r2, compose(ro.pL2, cs.right), MatchMode::AcDisregarding))
            return true;
    }
    return false;
}

std::vector<DisablingEssence> disabling_essences(const Rule& r1, const Rule& r2, const EngineOptions& opts) {
    using B = ConditionTree::Binding;
    auto t = tree(r2.ac);
    bool any_polarity = opts.mutations.ignore_binding;
    std::vector<DisablingEssence> out;
    OverlapSet seen[2];
    auto keep = [&](DisablingEssence de) {
        if (seen[de.kind == EssenceKind::Insertion].insert(de.overlap) >= 0)
            return;
        if (embeddable_at_overlap(de.overlap, r1, r2))
            out.push_back(std::move(de));
    };
    for (auto& pe : proto_essences_by_deletion(r1, r2, opts)) {
        if (pe.ess.trivial())
            continue;
        auto binding = t.nodes[static_cast<std::size_t>(pe.path[static_cast<std::size_t>(pe.level)])].binding;
        if (binding == B::Universal && !any_polarity)
            continue;
        DisablingEssence de;
        de.kind = EssenceKind::Deletion;
        de.overlap = {pe.ess.a1, pe.ess.a2, Morphism::identity(r1.L), pe.anchor};
        de.c = pe.ess.c();
        de.level = pe.level;
        de.binding = binding;
        de.path = path_names(t, pe.path, pe.level);
        de.proto = std::move(pe);
        keep(std::move(de));
    }
    for (auto& pe : proto_essences_by_insertion(r1, r2, opts)) {
        if (pe.ess.trivial())
            continue;
        auto binding = t.nodes[static_cast<std::size_t>(pe.path[static_cast<std::size_t>(pe.level)])].binding;
        if (binding != B::Universal && !any_polarity)
            continue;
        if (auto de = shift_insertion_essence(pe, r1, r2))
            keep(std::move(*de));
    }
    return out;
}

namespace {

std::vector<Morphism> extensions(const Morphism& p, const Morphism& q) {
    std::vector<Morphism> out;
    for_each_extension(p, q, false, [&](const Morphism& x) {
        out.push_back(x);
        return true;
    });
    return out;
}

// bj o x == bi o y and (bj, bi) a pullback of (x, y), without building either composite.
bool embeds_as(const RuleOverlap& ro, const Morphism& x, const Morphism& y) {
    const auto& A = *ro.apex();
    for (int a = 0; a < static_cast<int>(A.node_count()); ++a)
        if (x.node(ro.bj.node(a)) != y.node(ro.bi.node(a)))
            return false;
    for (int a = 0; a < static_cast<int>(A.edge_count()); ++a)
        if (x.edge(ro.bj.edge(a)) != y.edge(ro.bi.edge(a)))
            return false;
    return is_pullback(x, y, ro.bj, ro.bi);
}

// Each x fixes y on the image of the apex, which leaves little to search.
template <class Visit>
void embeddings_from_left(const RuleOverlap& ro, const Morphism& m1, const Morphism& m2, Visit&& visit) {
    auto xs = extensions(ro.pL1, m1);
    if (xs.empty())
        return;
    auto base = extension_constraints(ro.pL2, m2, false);
    if (!base)
        return;
    const auto& A = *ro.apex();
    for (const auto& x : xs) {
        auto c = *base;
        bool ok = true;
        for (int a = 0; ok && a < static_cast<int>(A.node_count()); ++a) {
            int& slot = c.fixed_nodes[static_cast<std::size_t>(ro.bi.node(a))];
            int want = x.node(ro.bj.node(a));
            ok = slot < 0 || slot == want;
            slot = want;
        }
        for (int a = 0; ok && a < static_cast<int>(A.edge_count()); ++a) {
            int& slot = c.fixed_edges[static_cast<std::size_t>(ro.bi.edge(a))];
            int want = x.edge(ro.bj.edge(a));
            ok = slot < 0 || slot == want;
            slot = want;
        }
        if (!ok)
            continue;
        bool stop = false;
        for_each_morphism(ro.Pi(), m2.codomain(), c, [&](const Morphism& y) {
            if (embeds_as(ro, x, y) && !visit(x, y))
                stop = true;
            return !stop;
        });
        if (stop)
            return;
    }
}

// Starts from the side whose leg is an iso, where the extension is unique.
template <class Visit>
void for_each_embedding(const RuleOverlap& ro, const Morphism& m1, const Morphism& m2, Visit&& visit) {
    if (!ro.pL1.is_iso() && ro.pL2.is_iso())
        embeddings_from_left(ro.flipped(), m2, m1, [&](const Morphism& y, const Morphism& x) { return visit(x, y); });
    else
        embeddings_from_left(ro, m1, m2, visit);
}

}  // namespace

std::vector<std::pair<Morphism, Morphism>> embed(const RuleOverlap& ro, const Morphism& m1, const Morphism& m2) {
    std::vector<std::pair<Morphism, Morphism>> out;
    for_each_embedding(ro, m1, m2, [&](const Morphism& x, const Morphism& y) {
        out.emplace_back(x, y);
        return true;
    });
    return out;
}

bool embeds(const RuleOverlap& ro, const Morphism& m1, const Morphism& m2) {
    bool found = false;
    for_each_embedding(ro, m1, m2, [&](const Morphism&, const Morphism&) {
        found = true;
        return false;
    });
    return found;
}

MatchOverlap match_overlap(const RuleOverlap& ro) {
    auto over_l1 = pullback(ro.pL1, ro.bj);
    auto l12 = pullback(compose(over_l1.to_b, ro.bi), ro.pL2);
    return {compose(l12.to_a, over_l1.to_a), l12.to_b};
}

bool is_ac_conflicting(const RuleOverlap& ro, const Rule& r1, const Rule& r2) {
    auto mo = match_overlap(ro);
    return factor_through_mono(mo.to_l1, r1.l).has_value() && factor_through_mono(mo.to_l2, r2.l).has_value();
}

SecondRuleTrace second_rule_trace(const RuleOverlap& ro, const Rule& r2) {
    SecondRuleTrace t;
    t.l2p = pullback(ro.bi, ro.pL2);
    t.k2p = pullback(r2.l, t.l2p.to_b);
    return t;
}

std::vector<RuleOverlap> compose_overlaps(const RuleOverlap& ro, const RuleOverlap& ro2, const EngineOptions& opts) {
    QuotientProblem q;
    q.parts = {ro.Pj(), ro2.Pj(), ro.Pi(), ro2.Pi()};
    q.mono = {false, false, false, false};
    q.name = "K*";
    auto tie = [&](const Morphism& f, int pf, const Morphism& g, int pg) {
        for (std::size_t i = 0; i < f.domain()->node_count(); ++i)
            q.node_pairs.push_back({{pf, f.node(static_cast<int>(i))}, {pg, g.node(static_cast<int>(i))}});
        for (std::size_t i = 0; i < f.domain()->edge_count(); ++i)
            q.edge_pairs.push_back({{pf, f.edge(static_cast<int>(i))}, {pg, g.edge(static_cast<int>(i))}});
    };
    tie(ro.pL1, 0, ro2.pL1, 1);
    tie(ro.pL2, 2, ro2.pL2, 3);
    tie(ro.bj, 0, ro.bi, 2);
    tie(ro2.bj, 1, ro2.bi, 3);
    auto restrict = [&](const Morphism& f, int pf, const Morphism& g, int pg) {
        QuotientProblem::Restriction r;
        r.a = pf;
        r.b = pg;
        for (std::size_t i = 0; i < f.domain()->node_count(); ++i)
            r.nodes.insert({f.node(static_cast<int>(i)), g.node(static_cast<int>(i))});
        for (std::size_t i = 0; i < f.domain()->edge_count(); ++i)
            r.edges.insert({f.edge(static_cast<int>(i)), g.edge(static_cast<int>(i))});
        q.restrictions.push_back(std::move(r));
    };
    restrict(ro.bj, 0, ro.bi, 2);
    restrict(ro2.bj, 1, ro2.bi, 3);

    OverlapSet out;
    for_each_quotient(q, [&](const std::vector<Morphism>& legs) {
        if (!is_pullback(legs[0], legs[2], ro.bj, ro.bi) || !is_pullback(legs[1], legs[3], ro2.bj, ro2.bi))
            return true;
        auto fj = em_factorize(legs[0], legs[1]);
        auto fi = em_factorize(legs[2], legs[3]);
        RuleOverlap co;
        co.pL1 = compose(ro.pL1, fj.e_a);
        co.pL2 = compose(ro.pL2, fi.e_a);
        if (opts.mutations.composition_wrong_leg) {
            co.bj = compose(ro.bj, fj.e_a);
            co.bi = compose(ro.bi, fi.e_a);
        } else {
            auto pb = pullback(fj.m, fi.m);
            co.bj = pb.to_a;
            co.bi = pb.to_b;
        }
        out.insert(co);
        return true;
    });
    return out.items();
}

SymbolicInitialConflict symbolic_initial_conflict(const Rule& r1, const Rule& r2) {
    SymbolicInitialConflict s;
    s.sum = coproduct(r1.L, r2.L);
    const auto& G = s.sum.object;
    s.t1 = apply(r1, s.sum.in_a);
    s.t2 = apply(r2, s.sum.in_b);
    s.ac = normalize(Condition::conj(G, {shift(s.sum.in_a, r1.ac), shift(s.sum.in_b, r2.ac)}));
    auto d1 = factor_through_mono(s.sum.in_b, s.t1.g);
    auto d2 = factor_through_mono(s.sum.in_a, s.t2.g);
    if (!d1 || !d2)
        throw Error("symbolic initial conflict: the disjoint matches are not independent");
    s.ac_star_d1 = normalize(left(s.t1.g, s.t1.h, shift(compose(*d1, s.t1.h), r2.ac)));
    s.ac_star_d2 = normalize(left(s.t2.g, s.t2.h, shift(compose(*d2, s.t2.h), r1.ac)));
    s.ac_star = normalize(Condition::negate(Condition::conj(G, {s.ac_star_d1, s.ac_star_d2})));
    return s;
}

bool SymbolicConflictEssence::satisfied_by(const Morphism& q1, const Morphism& q2) const {
    if (trivial)
        return true;
    // D is a pushout, so the mediating q: D -> G is unique when it exists.
    const auto& D = glued.object;
    std::vector<int> nodes(D->node_count(), -1), edges(D->edge_count(), -1);
    auto place = [](std::vector<int>& slot, const std::vector<int>& leg_map, const std::vector<int>& q_map) {
        for (std::size_t i = 0; i < leg_map.size(); ++i) {
            int& t = slot[static_cast<std::size_t>(leg_map[i])];
            if (t >= 0 && t != q_map[i])
                return false;
            t = q_map[i];
        }
        return true;
    };
    if (!place(nodes, glued.from_b.node_map(), q1.node_map()) ||
        !place(nodes, glued.from_c.node_map(), q2.node_map()) ||
        !place(edges, glued.from_b.edge_map(), q1.edge_map()) ||
        !place(edges, glued.from_c.edge_map(), q2.edge_map()))
        return false;
    auto q = Morphism::trusted(D, q1.codomain(), std::move(nodes), std::move(edges));
    return satisfies(compose(m_star, q), condition);
}

CospanCondPtr SymbolicConflictEssence::materialize() const {
    if (trivial)
        return CospanCondition::make_true(left_root, right_root);
    return CospanCondition::exists(glued.from_b, glued.from_c, normalize(shift(m_star, condition)));
}

bool embeds_symbolic(const ConflictEssence& ce, const SymbolicConflictEssence& se, const Morphism& m1,
                     const Morphism& m2) {
    bool found = false;
    for_each_embedding(ce.overlap, m1, m2, [&](const Morphism& x, const Morphism& y) {
        found = se.satisfied_by(x, y);
        return !found;
    });
    return found;
}

ConflictAnalysis conflict_essences(const Rule& r1, const Rule& r2, const EngineOptions& opts) {
    ConflictAnalysis a;
    a.r1 = &r1;
    a.r2 = &r2;
    a.forward = disabling_essences(r1, r2, opts);
    a.backward = disabling_essences(r2, r1, opts);
    OverlapSet seen;
    auto add = [&](ConflictEssence ce) {
        int at = seen.insert(ce.overlap);
        if (at >= 0)
            return at;
        a.essences.push_back(std::move(ce));
        return static_cast<int>(a.essences.size()) - 1;
    };
    auto base = [&](const std::vector<DisablingEssence>& des, ConflictEssence::Origin origin) {
        for (std::size_t i = 0; i < des.size(); ++i) {
            const auto& de = des[i];
            ConflictEssence ce;
            ce.origin = origin;
            ce.source = static_cast<int>(i);
            ce.c = de.c;
            ce.overlap = origin == ConflictEssence::Origin::Forward ? de.overlap : de.overlap.flipped();
            ce.ac_conflicting = is_ac_conflicting(ce.overlap, r1, r2);
            bool both_lhs = de.kind == EssenceKind::Deletion && de.level == 0;
            if (ce.ac_conflicting || both_lhs)
                add(std::move(ce));
        }
    };
    base(a.forward, ConflictEssence::Origin::Forward);
    base(a.backward, ConflictEssence::Origin::Backward);

    for (int depth = 1; depth <= opts.compose_depth; ++depth) {
        std::size_t n = a.essences.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto& x = a.essences[i];
                const auto& y = a.essences[j];
                if (x.ac_conflicting != y.ac_conflicting || std::max(x.depth, y.depth) != depth - 1)
                    continue;
                bool acc = x.ac_conflicting;
                ConflictAnalysis::Composition record{static_cast<int>(i), static_cast<int>(j), {}};
                for (auto& co : compose_overlaps(x.overlap, y.overlap, opts)) {
                    ConflictEssence ce;
                    ce.overlap = std::move(co);
                    ce.ac_conflicting = acc;
                    ce.origin = ConflictEssence::Origin::Composed;
                    ce.left = static_cast<int>(i);
                    ce.right = static_cast<int>(j);
                    ce.depth = depth;
                    record.results.push_back(add(std::move(ce)));
                }
                a.compositions.push_back(std::move(record));
            }
    }
    return a;
}

ConflictAnalysis symbolic_conflict_essences(const Rule& r1, const Rule& r2, const EngineOptions& opts) {
    auto a = conflict_essences(r1, r2, opts);
    a.initial = symbolic_initial_conflict(r1, r2);
    const auto& init = *a.initial;
    auto target = normalize(Condition::conj(init.sum.object, {init.ac, init.ac_star}));
    for (std::size_t i = 0; i < a.essences.size(); ++i) {
        const auto& ro = a.essences[i].overlap;
        SymbolicConflictEssence se;
        se.essence = static_cast<int>(i);
        se.left_root = ro.Pj();
        se.right_root = ro.Pi();
        if (a.essences[i].ac_conflicting && !opts.mutations.trivial_ac_ce) {
            se.trivial = false;
            se.glued = pushout(ro.bj, ro.bi);
            se.m_star = mediate(init.sum, compose(ro.pL1, se.glued.from_b), compose(ro.pL2, se.glued.from_c));
            se.condition = target;
        }
        a.symbolic.push_back(std::move(se));
    }
    return a;
}

}  // namespace essentia
