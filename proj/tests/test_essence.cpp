#include "fixtures.hpp"
#include "essentia/calculus_check.hpp"
#include "essentia/essence.hpp"
#include "essentia/io.hpp"

#include <doctest.h>

using namespace essentia;
using fixtures::graph;

namespace {

RuleSet load(const char* file) { return load_ruleset(std::string(ESSENTIA_DATA_DIR) + "/" + file); }

int tree_index(const ConditionTree& t, const std::string& name) {
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        if (t.nodes[i].graph->name() == name)
            return static_cast<int>(i);
    FAIL("no tree node " << name);
    return -1;
}

// Morphism between two graphs given by "dom:cod" id pairs; edges follow from endpoints.
Morphism by_ids(const GraphPtr& dom, const GraphPtr& cod, const std::vector<std::pair<std::string, std::string>>& ns) {
    MorphismConstraints c;
    c.fixed_nodes.assign(dom->node_count(), -1);
    for (const auto& [a, b] : ns)
        c.fixed_nodes[static_cast<std::size_t>(dom->node_index(a))] = cod->node_index(b);
    auto m = find_morphism(dom, cod, c);
    REQUIRE(m);
    return *m;
}

// The essence span (C -> L1, C -> P) as an overlap with C at the apex.
RuleOverlap essence_span(const DisablingEssence& de) {
    return {compose(de.c, de.overlap.bj), compose(de.c, de.overlap.bi), de.overlap.pL1, de.overlap.pL2};
}

bool contains_essence(const std::vector<DisablingEssence>& set, const RuleOverlap& expected) {
    for (const auto& de : set)
        if (overlaps_isomorphic(essence_span(de), expected))
            return true;
    return false;
}

struct Running {
    RuleSet rs = load("running_example.json");
    const Rule& dec = rs.rule("decapsulateAttribute");
    const Rule& pull = rs.rule("pullUpEncapsulatedAttribute");
    ConditionTree t = tree(pull.ac);
    GraphPtr P3 = t.nodes[static_cast<std::size_t>(tree_index(t, "P3"))].graph;

    // decapsulateAttribute matched onto the private attribute of the other subclass 10 in P3
    RuleOverlap l1p3() const {
        auto A = graph(rs.types, "A", "1,10:Class 2,13:Getter 3,12:Setter 4,11:Attribute",
                       "1,10-getter->2,13 1,10-setter->3,12 1,10-variables->4,11");
        return {by_ids(A, dec.L, {{"1,10", "1"}, {"2,13", "2"}, {"3,12", "3"}, {"4,11", "4"}}),
                by_ids(A, P3, {{"1,10", "10"}, {"2,13", "13"}, {"3,12", "12"}, {"4,11", "11"}}),
                Morphism::identity(dec.L), t.arrow_between(0, tree_index(t, "P3"))};
    }
};

}  // namespace

TEST_CASE("plain essence of a deleting rule against itself") {
    auto rs = load("toy_plain.json");
    const auto& del = rs.rule("deleteTarget");
    auto id = Morphism::identity(del.L);
    auto pe = plain_essence(del.l, id, id);
    CHECK(are_isomorphic(pe.apex(), del.L));
    CHECK(pe.kept.domain()->node_count() == 1);
    // the deleted node and edge plus the boundary node they hang off
    CHECK(pe.essence()->node_count() == 2);
    CHECK(pe.essence()->edge_count() == 1);
    CHECK(!pe.trivial());
}

TEST_CASE("distinct disabling essences are pairwise non-isomorphic") {
    Running r;
    auto des = disabling_essences(r.dec, r.pull);
    REQUIRE(!des.empty());
    for (std::size_t i = 0; i < des.size(); ++i) {
        const auto& ro = des[i].overlap;
        CHECK(overlaps_isomorphic(ro, ro));
        for (std::size_t j = i + 1; j < des.size(); ++j)
            CHECK(!overlaps_isomorphic(ro, des[j].overlap));
    }
}

TEST_CASE("construction trace along L2 p1 P1 p3 P3") {
    Running r;
    auto e_l1 = by_ids(r.dec.L, r.P3, {{"1", "10"}, {"2", "13"}, {"3", "12"}, {"4", "11"}});
    auto path = r.t.path_to(tree_index(r.t, "P3"));
    REQUIRE(path.size() == 3);
    auto pe = level_recursion(r.dec.l, r.t, path, {e_l1, Morphism::identity(r.P3)}, 0);
    REQUIRE(pe.trace.size() == 3);
    CHECK(pe.level == 2);
    CHECK(pe.trace[0].apex()->empty());
    CHECK(pe.trace[0].trivial());
    auto class_node = graph(r.rs.types, "A1", "x:Class");
    CHECK(are_isomorphic(pe.trace[1].apex(), class_node));
    CHECK(pe.trace[1].trivial());
    const auto& A2 = pe.trace[2].apex();
    const auto& A2k = pe.trace[2].kept.domain();
    CHECK(!are_isomorphic(A2, A2k));
    CHECK(are_isomorphic(A2k, graph(r.rs.types, "A2'", "c:Class a:Attribute", "c-variables->a")));
    // C: the class, both methods and both method edges
    CHECK(are_isomorphic(pe.ess.essence(),
                         graph(r.rs.types, "C", "c:Class g:Getter s:Setter", "c-getter->g c-setter->s")));
    CHECK(pe.ess.ipo.boundary->node_count() == 1);
    CHECK(pe.ess.ipo.boundary->edge_count() == 0);
}

TEST_CASE("disabling essences of decapsulateAttribute and pullUpEncapsulatedAttribute") {
    Running r;
    auto fwd = disabling_essences(r.dec, r.pull);
    auto bwd = disabling_essences(r.pull, r.dec);
    auto types = r.rs.types;

    // shared setter method and its edge
    auto c_setter = graph(types, "C", "1,6:Class 3,7:Setter", "1,6-setter->3,7");
    CHECK(contains_essence(fwd, {by_ids(c_setter, r.dec.L, {{"1,6", "1"}, {"3,7", "3"}}),
                                 by_ids(c_setter, r.pull.L, {{"1,6", "6"}, {"3,7", "7"}}),
                                 Morphism::identity(r.dec.L), Morphism::identity(r.pull.L)}));
    // pullUp deletes the getter edge, then the variables edge, of decap's match
    auto c_getter = graph(types, "C", "1,6:Class 2,9:Getter", "1,6-getter->2,9");
    CHECK(contains_essence(bwd, {by_ids(c_getter, r.pull.L, {{"1,6", "6"}, {"2,9", "9"}}),
                                 by_ids(c_getter, r.dec.L, {{"1,6", "1"}, {"2,9", "2"}}),
                                 Morphism::identity(r.pull.L), Morphism::identity(r.dec.L)}));
    auto c_attr = graph(types, "C", "1,6:Class 4,8:Attribute", "1,6-variables->4,8");
    CHECK(contains_essence(bwd, {by_ids(c_attr, r.pull.L, {{"1,6", "6"}, {"4,8", "8"}}),
                                 by_ids(c_attr, r.dec.L, {{"1,6", "1"}, {"4,8", "4"}}),
                                 Morphism::identity(r.pull.L), Morphism::identity(r.dec.L)}));

    // the L1P3 family
    int p3 = tree_index(r.t, "P3");
    auto anchor = r.t.arrow_between(0, p3);
    std::size_t family = 0;
    for (const auto& de : fwd)
        if (de.target() == "P3") {
            ++family;
            CHECK(de.level == 2);
            CHECK(de.binding == ConditionTree::Binding::Existential);
            CHECK(de.path == std::vector<std::string>{"L2", "P1", "P3"});
        }
    CHECK(family >= 4);
    auto c_full = graph(types, "C", "1,10:Class 2,13:Getter 3,12:Setter", "1,10-getter->2,13 1,10-setter->3,12");
    CHECK(contains_essence(fwd, {by_ids(c_full, r.dec.L, {{"1,10", "1"}, {"2,13", "2"}, {"3,12", "3"}}),
                                 by_ids(c_full, r.P3, {{"1,10", "10"}, {"2,13", "13"}, {"3,12", "12"}}),
                                 Morphism::identity(r.dec.L), anchor}));
    auto c_set = graph(types, "C", "1,10:Class 3,12:Setter", "1,10-setter->3,12");
    CHECK(contains_essence(fwd, {by_ids(c_set, r.dec.L, {{"1,10", "1"}, {"3,12", "3"}}),
                                 by_ids(c_set, r.P3, {{"1,10", "10"}, {"3,12", "12"}}),
                                 Morphism::identity(r.dec.L), anchor}));

    // every kept essence is non-trivial and points at an existential object or L2
    for (const auto& de : fwd) {
        CHECK(!de.essence()->empty());
        CHECK(de.binding != ConditionTree::Binding::Universal);
        CHECK(embeddable_at_overlap(de.overlap, r.dec, r.pull));
    }
}

TEST_CASE("ac-conflicting verdicts") {
    Running r;
    auto fwd = disabling_essences(r.dec, r.pull);
    std::size_t conflicting = 0;
    for (const auto& de : fwd) {
        auto trace = second_rule_trace(de.overlap, r.pull);
        bool exact = is_ac_conflicting(de.overlap, r.dec, r.pull);
        if (de.level > 0) {
            CHECK(exact == trace.l2p_iso());
        } else {
            CHECK(!exact);
        }
        if (overlaps_isomorphic(de.overlap, r.l1p3())) {
            CHECK(trace.l2p.object->empty());
            CHECK(trace.k2p.object->empty());
            CHECK(exact);
            ++conflicting;
        }
    }
    CHECK(conflicting == 1);

    auto c_setter = graph(r.rs.types, "A", "1,6:Class 3,7:Setter", "1,6-setter->3,7");
    RuleOverlap a_l1l2{by_ids(c_setter, r.dec.L, {{"1,6", "1"}, {"3,7", "3"}}),
                       by_ids(c_setter, r.pull.L, {{"1,6", "6"}, {"3,7", "7"}}), Morphism::identity(r.dec.L),
                       Morphism::identity(r.pull.L)};
    CHECK(!is_ac_conflicting(a_l1l2, r.dec, r.pull));
    CHECK(!second_rule_trace(a_l1l2, r.pull).l2p_iso());
}

TEST_CASE("composing A_L1L2 with A2_L2L1") {
    Running r;
    auto fwd = disabling_essences(r.dec, r.pull);
    auto bwd = disabling_essences(r.pull, r.dec);
    auto apex = graph(r.rs.types, "A", "1,6:Class 3,7:Setter 4,8:Attribute", "1,6-setter->3,7 1,6-variables->4,8");
    RuleOverlap shape{by_ids(apex, r.dec.L, {{"1,6", "1"}, {"3,7", "3"}, {"4,8", "4"}}),
                      by_ids(apex, r.pull.L, {{"1,6", "6"}, {"3,7", "7"}, {"4,8", "8"}}),
                      Morphism::identity(r.dec.L), Morphism::identity(r.pull.L)};
    auto c_setter = graph(r.rs.types, "C", "x:Class s:Setter", "x-setter->s");
    auto c_attr = graph(r.rs.types, "C", "x:Class a:Attribute", "x-variables->a");
    const DisablingEssence* a_l1l2 = nullptr;
    const DisablingEssence* a2 = nullptr;
    for (const auto& de : fwd)
        if (overlaps_isomorphic(de.overlap, shape) && are_isomorphic(de.essence(), c_setter))
            a_l1l2 = &de;
    // at this overlap pullUp deletes both edges; the essence covers the attribute's
    for (const auto& de : bwd)
        if (overlaps_isomorphic(de.overlap.flipped(), shape) &&
            find_morphism(c_attr, de.essence(), {true, {}, {}}))
            a2 = &de;
    REQUIRE(a_l1l2);
    REQUIRE(a2);
    auto comp = compose_overlaps(a_l1l2->overlap, a2->overlap.flipped());
    bool found = false;
    for (const auto& co : comp)
        found = found || (are_isomorphic(co.apex(), apex) && overlaps_isomorphic(co, shape));
    CHECK(found);
}

TEST_CASE("composition of two overlaps with different apexes over the same LHS pair is empty") {
    Running r;
    auto fwd = disabling_essences(r.dec, r.pull);
    std::vector<RuleOverlap> lhs;
    for (const auto& de : fwd)
        if (de.level == 0)
            lhs.push_back(de.overlap);
    REQUIRE(lhs.size() >= 2);
    CHECK(compose_overlaps(lhs[0], lhs[1]).empty());
    // with injective legs the overlap composes with itself to itself
    for (const auto& ro : lhs) {
        if (!ro.bj.is_injective() || !ro.bi.is_injective())
            continue;
        bool diagonal = false;
        for (const auto& co : compose_overlaps(ro, ro))
            diagonal = diagonal || overlaps_isomorphic(co, ro);
        CHECK(diagonal);
    }
}

TEST_CASE("insertion essences are shifted before the rule") {
    auto rs = load("toy_universal.json");
    const auto& add = rs.rule("addPredecessor");
    const auto& stamp = rs.rule("stampY");
    auto des = disabling_essences(add, stamp);
    REQUIRE(des.size() == 1);
    const auto& de = des.front();
    CHECK(de.kind == EssenceKind::Insertion);
    CHECK(de.binding == ConditionTree::Binding::Universal);
    // the shifted apex only holds what exists before addPredecessor
    CHECK(factor_through_mono(de.overlap.bj, add.l));
    CHECK(de.overlap.Pi()->node_count() < de.proto.ess.a2.codomain()->node_count());
    CHECK(is_ac_conflicting(de.overlap, add, stamp));

    // a rule creating nothing of a universally bound object has no insertion essences
    for (const auto& d : disabling_essences(rs.rule("dropE"), stamp))
        CHECK(d.kind == EssenceKind::Deletion);
}

TEST_CASE("mutated engines differ from the faithful one") {
    Running r;
    EngineOptions no_escalation;
    no_escalation.mutations.no_level_escalation = true;
    for (const auto& de : disabling_essences(r.dec, r.pull, no_escalation))
        CHECK(de.level == 0);

    auto rs = load("toy_universal.json");
    EngineOptions any_polarity;
    any_polarity.mutations.ignore_binding = true;
    auto faithful = disabling_essences(rs.rule("dropE"), rs.rule("stampY"));
    auto loose = disabling_essences(rs.rule("dropE"), rs.rule("stampY"), any_polarity);
    CHECK(loose.size() >= faithful.size());
}

TEST_CASE("conflict essences and their symbolic conditions") {
    Running r;
    auto a = symbolic_conflict_essences(r.dec, r.pull);
    REQUIRE(a.initial);
    REQUIRE(a.symbolic.size() == a.essences.size());
    std::size_t composed = 0;
    for (std::size_t i = 0; i < a.essences.size(); ++i) {
        const auto& ce = a.essences[i];
        CHECK(a.symbolic[i].trivial == !ce.ac_conflicting);
        if (ce.origin == ConflictEssence::Origin::Composed) {
            ++composed;
            CHECK(ce.ac_conflicting == a.essences[static_cast<std::size_t>(ce.left)].ac_conflicting);
            CHECK(ce.ac_conflicting == a.essences[static_cast<std::size_t>(ce.right)].ac_conflicting);
        }
    }
    CHECK(composed > 0);
    // D of the App. Fig. 13 essence is P3 itself
    std::size_t seen = 0;
    for (std::size_t i = 0; i < a.essences.size(); ++i)
        if (overlaps_isomorphic(a.essences[i].overlap, r.l1p3())) {
            CHECK(are_isomorphic(a.symbolic[i].glued.object, r.P3));
            CHECK(a.symbolic[i].glued.from_c.is_iso());
            ++seen;
        }
    CHECK(seen == 1);
}

TEST_CASE("lazy and materialized symbolic conditions agree") {
    auto rs = load("toy_universal.json");
    auto hosts = enumerate_graphs(rs.types, 3, 3);
    std::size_t evaluated = 0;
    for (const char* pair : {"addPredecessor/stampY", "dropE/stampY"}) {
        std::string p(pair);
        auto slash = p.find('/');
        const auto& r1 = rs.rule(p.substr(0, slash));
        const auto& r2 = rs.rule(p.substr(slash + 1));
        auto a = symbolic_conflict_essences(r1, r2);
        for (std::size_t i = 0; i < a.essences.size(); ++i) {
            const auto& se = a.symbolic[i];
            auto cc = se.materialize();
            const auto& ro = a.essences[i].overlap;
            for (const auto& G : hosts)
                for (const auto& x : enumerate_morphisms(ro.Pj(), G, false))
                    for (const auto& y : enumerate_morphisms(ro.Pi(), G, false)) {
                        CHECK(se.satisfied_by(x, y) == satisfies_cospan(x, y, cc));
                        ++evaluated;
                    }
        }
    }
    CHECK(evaluated > 100);
}
