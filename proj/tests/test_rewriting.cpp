#include "fixtures.hpp"
#include "essentia/calculus_check.hpp"
#include "essentia/io.hpp"

#include <doctest.h>

using namespace essentia;
using fixtures::graph;

namespace {

RuleSet running() { return load_ruleset(std::string(ESSENTIA_DATA_DIR) + "/running_example.json"); }
RuleSet toy(const char* file) { return load_ruleset(std::string(ESSENTIA_DATA_DIR) + "/" + file); }

// Elements of G that t deletes.
std::pair<std::vector<char>, std::vector<char>> deleted(const Rule& rule, const Morphism& m) {
    std::vector<char> n(m.codomain()->node_count(), 0), e(m.codomain()->edge_count(), 0);
    std::vector<char> kn(rule.L->node_count(), 0), ke(rule.L->edge_count(), 0);
    for (int x : rule.l.node_map())
        kn[static_cast<std::size_t>(x)] = 1;
    for (int x : rule.l.edge_map())
        ke[static_cast<std::size_t>(x)] = 1;
    for (std::size_t i = 0; i < kn.size(); ++i)
        if (!kn[i])
            n[static_cast<std::size_t>(m.node(static_cast<int>(i)))] = 1;
    for (std::size_t i = 0; i < ke.size(); ++i)
        if (!ke[i])
            e[static_cast<std::size_t>(m.edge(static_cast<int>(i)))] = 1;
    return {n, e};
}

// m2 survives t1 iff it touches nothing t1 deletes.
bool survives(const Rule& r1, const Morphism& m1, const Morphism& m2) {
    auto [n, e] = deleted(r1, m1);
    for (int x : m2.node_map())
        if (n[static_cast<std::size_t>(x)])
            return false;
    for (int x : m2.edge_map())
        if (e[static_cast<std::size_t>(x)])
            return false;
    return true;
}

// Dangling check by hand: a deleted node may not keep an edge that the rule does not delete.
bool naive_gluing(const Rule& rule, const Morphism& m) {
    auto [n, e] = deleted(rule, m);
    const auto& G = *m.codomain();
    for (std::size_t i = 0; i < G.edge_count(); ++i) {
        const auto& ed = G.edge(static_cast<int>(i));
        if (!e[i] && (n[static_cast<std::size_t>(ed.source)] || n[static_cast<std::size_t>(ed.target)]))
            return false;
    }
    std::vector<char> kn(rule.L->node_count(), 0), ke(rule.L->edge_count(), 0);
    for (int x : rule.l.node_map())
        kn[static_cast<std::size_t>(x)] = 1;
    for (int x : rule.l.edge_map())
        ke[static_cast<std::size_t>(x)] = 1;
    for (std::size_t a = 0; a < kn.size(); ++a)
        for (std::size_t b = 0; b < kn.size(); ++b)
            if (a != b && !kn[a] && m.node(static_cast<int>(a)) == m.node(static_cast<int>(b)))
                return false;
    for (std::size_t a = 0; a < ke.size(); ++a)
        for (std::size_t b = 0; b < ke.size(); ++b)
            if (a != b && !ke[a] && m.edge(static_cast<int>(a)) == m.edge(static_cast<int>(b)))
                return false;
    return true;
}

std::vector<GraphPtr> toy_hosts() { return enumerate_graphs(two_type_system(), 3, 3); }

}  // namespace

TEST_CASE("identity rule leaves the host unchanged") {
    auto L = graph(fixtures::toy_types(), "L", "1:X 2:Y", "1-e->2");
    auto id = Morphism::identity(L);
    auto rule = Rule::make("id", id, id);
    auto G = graph(fixtures::toy_types(), "G", "a:X b:Y c:X", "a-e->b c-s->a");
    auto ms = find_matches(rule, G, MatchMode::RespectAc);
    REQUIRE(ms.size() == 1);
    auto t = apply(rule, ms[0]);
    CHECK(are_isomorphic(t.H(), G));
    CHECK(inverse(rule).L->same_as(*rule.L));
}

TEST_CASE("the empty-LHS rule matches every host once") {
    auto E = empty_graph(fixtures::toy_types());
    auto R = graph(fixtures::toy_types(), "R", "n:X");
    auto rule = Rule::make("create", Morphism::identity(E), Morphism::from_empty(R));
    for (const auto& G : toy_hosts())
        CHECK(find_matches(rule, G, MatchMode::RespectAc).size() == 1);
}

TEST_CASE("match finding agrees with enumerate-then-filter") {
    std::size_t checked = 0;
    for (const char* file : {"toy_plain.json", "toy_universal.json", "toy_negative.json"}) {
        auto rs = toy(file);
        for (const auto& rule : rs.rules)
            for (const auto& G0 : enumerate_graphs(rs.types, 3, 3)) {
                auto G = G0;
                std::vector<Morphism> expect_ad, expect_ac;
                for (const auto& m : enumerate_morphisms(rule.L, G, false))
                    if (naive_gluing(rule, m)) {
                        expect_ad.push_back(m);
                        if (satisfies(m, rule.ac))
                            expect_ac.push_back(m);
                    }
                CHECK(find_matches(rule, G, MatchMode::AcDisregarding) == expect_ad);
                CHECK(find_matches(rule, G, MatchMode::RespectAc) == expect_ac);
                ++checked;
            }
    }
    CHECK(checked > 100);
}

TEST_CASE("pullUp needs a condition-satisfying match") {
    auto rs = running();
    const auto& pull = rs.rule("pullUpEncapsulatedAttribute");
    // 6 is a subclass of 5 with getter, setter and attribute; 10 is another subclass without either.
    auto G = graph(rs.types, "G", "5:Class 6:Class 7:Setter 8:Attribute 9:Getter 10:Class",
                   "6-superclass->5 6-setter->7 6-getter->9 6-variables->8 10-superclass->5");
    CHECK(find_matches(pull, G, MatchMode::RespectAc).empty());
    CHECK(find_matches(pull, G, MatchMode::AcDisregarding).size() >= 1);
    auto G2 = graph(rs.types, "G", "5:Class 6:Class 7:Setter 8:Attribute 9:Getter 10:Class 14:Attribute",
                    "6-superclass->5 6-setter->7 6-getter->9 6-variables->8 10-superclass->5 10-variables->14 "
                    "14-public->14");
    CHECK(find_matches(pull, G2, MatchMode::RespectAc).size() == 1);
}

TEST_CASE("decapsulateAttribute on the L1P3 overlap") {
    auto rs = running();
    const auto& dec = rs.rule("decapsulateAttribute");
    const auto& pull = rs.rule("pullUpEncapsulatedAttribute");
    GraphPtr P3;
    for (const auto& n : tree(pull.ac).nodes)
        if (n.graph->name() == "P3")
            P3 = n.graph;
    REQUIRE(P3);
    auto m = find_morphism(dec.L, P3, {true, {P3->node_index("10"), P3->node_index("13"), P3->node_index("12"),
                                               P3->node_index("11")}, {}});
    REQUIRE(m);
    auto t = apply(dec, *m);
    CHECK(!t.D()->find_node("12"));
    CHECK(!t.D()->find_node("13"));
    CHECK(t.D()->node_count() == P3->node_count() - 2);
    CHECK(t.D()->edge_count() == P3->edge_count() - 2);
    CHECK(t.H()->edge_count() == P3->edge_count() - 1);
}

TEST_CASE("gluing violations are reported") {
    auto rs = toy("toy_plain.json");
    const auto& del = rs.rule("deleteTarget");
    auto G = graph(rs.types, "G", "a:X b:Y c:X", "a-e->b c-e->b");
    auto ms = enumerate_morphisms(del.L, G, false);
    REQUIRE(!ms.empty());
    CHECK_THROWS_WITH_AS(apply(del, ms[0]), doctest::Contains("dangling"), Error);
}

TEST_CASE("applying the inverse rule at the comatch restores the host") {
    std::size_t n = 0;
    for (const char* file : {"toy_plain.json", "toy_universal.json", "toy_negative.json", "running_example.json"}) {
        auto rs = toy(file);
        auto hosts = enumerate_graphs(rs.types, 3, 3);
        for (const auto& rule : rs.rules) {
            auto inv = inverse(rule);
            CHECK(inverse(inv).l == rule.l);
            CHECK(inverse(inv).r == rule.r);
            for (const auto& G : hosts)
                for (const auto& m : find_matches(rule, G, MatchMode::AcDisregarding)) {
                    auto t = apply(rule, m);
                    auto back = apply(inv, t.comatch);
                    CHECK(are_isomorphic(back.H(), G));
                    // both squares are pushouts
                    CHECK(is_pushout(rule.l, t.k, m, t.g));
                    CHECK(is_pushout(rule.r, t.k, t.comatch, t.h));
                    if (m.is_injective()) {
                        CHECK(t.H()->node_count() + t.H()->edge_count() + rule.deleted_elements() ==
                              G->node_count() + G->edge_count() + rule.created_elements());
                    }
                    ++n;
                }
        }
    }
    CHECK(n > 100);
}

TEST_CASE("independence verdicts agree with a direct check") {
    std::size_t n = 0, dependent = 0;
    for (const char* file : {"toy_plain.json", "toy_universal.json", "toy_negative.json"}) {
        auto rs = toy(file);
        auto hosts = enumerate_graphs(rs.types, 3, 3);
        for (const auto& r1 : rs.rules)
            for (const auto& r2 : rs.rules)
                for (const auto& G : hosts)
                    for (const auto& m1 : find_matches(r1, G, MatchMode::AcDisregarding))
                        for (const auto& m2 : find_matches(r2, G, MatchMode::AcDisregarding)) {
                            auto t1 = apply(r1, m1), t2 = apply(r2, m2);
                            auto v = parallel_independence(t1, t2);
                            CHECK(v.d1.has_value() == survives(r1, m1, m2));
                            CHECK(v.d2.has_value() == survives(r2, m2, m1));
                            if (v.d1) {
                                CHECK(compose(*v.d1, t1.g) == m2);
                                CHECK(v.ac_ok_1 == satisfies(compose(*v.d1, t1.h), r2.ac));
                            }
                            if (v.d2)
                                CHECK(compose(*v.d2, t2.g) == m1);
                            auto swapped = parallel_independence(t2, t1);
                            CHECK(swapped.first_disables_second() == v.second_disables_first());
                            dependent += !v.independent();
                            ++n;
                        }
    }
    CHECK(n > 1000);
    CHECK(dependent > 0);
}

TEST_CASE("independent pairs commute") {
    std::size_t independent = 0;
    for (const char* file : {"toy_plain.json", "toy_universal.json", "toy_negative.json"}) {
        auto rs = toy(file);
        for (const auto& r1 : rs.rules)
            for (const auto& r2 : rs.rules)
                for (const auto& G : enumerate_graphs(rs.types, 3, 2))
                    for (const auto& m1 : find_matches(r1, G, MatchMode::RespectAc))
                        for (const auto& m2 : find_matches(r2, G, MatchMode::RespectAc)) {
                            auto t1 = apply(r1, m1), t2 = apply(r2, m2);
                            auto v = parallel_independence(t1, t2);
                            if (!v.independent())
                                continue;
                            auto s12 = apply(r2, compose(*v.d1, t1.h));
                            auto s21 = apply(r1, compose(*v.d2, t2.h));
                            CHECK(are_isomorphic(s12.H(), s21.H()));
                            ++independent;
                        }
    }
    CHECK(independent > 100);
}
