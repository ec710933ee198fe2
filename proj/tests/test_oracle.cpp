#include "fixtures.hpp"
#include "essentia/category.hpp"
#include "essentia/io.hpp"
#include "essentia/oracle.hpp"

#include <doctest.h>

#include <map>

using namespace essentia;

namespace {

RuleSet load(const char* file) { return load_ruleset(std::string(ESSENTIA_DATA_DIR) + "/" + file); }

bool has_iso(const std::vector<GraphPtr>& hosts, const GraphPtr& g) {
    for (const auto& h : hosts)
        if (are_isomorphic(h, g))
            return true;
    return false;
}

}  // namespace

TEST_CASE("toy rule sets pass every check on quotient hosts") {
    for (const char* file : {"toy_plain.json", "toy_universal.json", "toy_negative.json"}) {
        auto rs = load(file);
        VerifyOptions o;
        o.hosts.max_extra_nodes = 1;
        for (const auto& a : rs.rules)
            for (const auto& b : rs.rules) {
                auto res = verify_pair(a, b, o);
                INFO(file << ": " << a.name << " x " << b.name);
                for (const auto& r : res.reports) {
                    INFO(to_string(r.check) << (r.examples.empty() ? "" : ": " + r.examples.front().detail));
                    CHECK(r.passed());
                }
                CHECK(res.hosts > 0);
            }
    }
}

TEST_CASE("plain rules in bounded mode") {
    auto rs = load("toy_plain.json");
    VerifyOptions o;
    o.hosts.mode = HostMode::Bounded;
    o.hosts.max_nodes = 3;
    o.hosts.max_edges = 2;
    auto res = verify_pair(rs.rules[0], rs.rules[1], o);
    CHECK(res.passed());
    CHECK(res.report(Check::Correctness).instances > 0);
}

TEST_CASE("host enumeration is deterministic and free of isomorphic duplicates") {
    auto rs = load("running_example.json");
    const auto& dec = rs.rule("decapsulateAttribute");
    const auto& pull = rs.rule("pullUpEncapsulatedAttribute");
    HostLimits l;
    l.max_extra_nodes = 0;
    auto a = enumerate_hosts(dec, pull, l);
    auto b = enumerate_hosts(dec, pull, l);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i]->same_as(*b[i]));
    std::map<std::string, std::vector<GraphPtr>> buckets;
    for (const auto& g : a)
        buckets[graph_invariant(*g)].push_back(g);
    for (const auto& [key, gs] : buckets)
        for (std::size_t i = 0; i < gs.size(); ++i)
            for (std::size_t j = i + 1; j < gs.size(); ++j)
                CHECK_FALSE(are_isomorphic(gs[i], gs[j]));
}

TEST_CASE("no host admits both matches: nothing to check") {
    auto rs = load("toy_plain.json");
    VerifyOptions o;
    o.gluings_included = false;
    auto res = verify_pair(symbolic_conflict_essences(rs.rules[0], rs.rules[1]), {}, o);
    CHECK(res.pairs == 0);
    CHECK(res.passed());
}

TEST_CASE("pair counts match a double loop over matches") {
    auto rs = load("toy_universal.json");
    const auto& r1 = rs.rules[0];
    const auto& r2 = rs.rules.back();
    HostLimits l;
    l.max_extra_nodes = 1;
    auto hosts = enumerate_hosts(r1, r2, l);
    std::size_t pairs = 0, ac_pairs = 0;
    for (const auto& h : hosts) {
        pairs += find_matches(r1, h, MatchMode::AcDisregarding).size() *
                 find_matches(r2, h, MatchMode::AcDisregarding).size();
        ac_pairs += find_matches(r1, h, MatchMode::RespectAc).size() * find_matches(r2, h, MatchMode::RespectAc).size();
    }
    VerifyOptions o;
    o.checks = {Check::Correctness};
    auto res = verify_pair(symbolic_conflict_essences(r1, r2), hosts, o);
    CHECK(res.pairs == pairs);
    CHECK(res.ac_pairs == ac_pairs);
    CHECK(res.report(Check::Correctness).instances == ac_pairs);
}

TEST_CASE("quotient hosts include the gluing of decapsulateAttribute's LHS with P3") {
    auto rs = load("running_example.json");
    const auto& dec = rs.rule("decapsulateAttribute");
    const auto& pull = rs.rule("pullUpEncapsulatedAttribute");
    auto t = tree(pull.ac);
    GraphPtr P3;
    for (const auto& n : t.nodes)
        if (n.graph->name() == "P3")
            P3 = n.graph;
    REQUIRE(P3);
    // decapsulateAttribute on the second subclass's private attribute: 1->10, 2->13, 3->12, 4->11
    auto A = fixtures::graph(rs.types, "A", "1:Class 2:Getter 3:Setter 4:Attribute", "1-getter->2 1-setter->3 1-variables->4");
    MorphismConstraints c;
    c.fixed_nodes = {P3->node_index("10"), P3->node_index("13"), P3->node_index("12"), P3->node_index("11")};
    auto into_p3 = find_morphism(A, P3, c);
    REQUIRE(into_p3);
    MorphismConstraints c1;
    for (const char* id : {"1", "2", "3", "4"})
        c1.fixed_nodes.push_back(dec.L->node_index(id));
    auto into_l1 = find_morphism(A, dec.L, c1);
    REQUIRE(into_l1);
    auto glued = pushout(*into_l1, *into_p3);
    CHECK(are_isomorphic(glued.object, P3));

    HostLimits l;
    l.max_extra_nodes = 0;
    CHECK(has_iso(enumerate_hosts(dec, pull, l), glued.object));
}

TEST_CASE("every mutation is caught by some check") {
    auto rs = load("running_example.json");
    const auto& dec = rs.rule("decapsulateAttribute");
    const auto& pull = rs.rule("pullUpEncapsulatedAttribute");
    HostLimits l;
    l.max_extra_nodes = 0;
    auto hosts = enumerate_hosts(dec, pull, l);

    VerifyOptions o;
    o.hosts = l;
    REQUIRE(verify_pair(symbolic_conflict_essences(dec, pull), hosts, o).passed());

    struct Case {
        const char* name;
        void (*set)(Mutations&);
    };
    const Case cases[] = {
        {"ignore_binding", [](Mutations& m) { m.ignore_binding = true; }},
        {"no_level_escalation", [](Mutations& m) { m.no_level_escalation = true; }},
        {"composition_wrong_leg", [](Mutations& m) { m.composition_wrong_leg = true; }},
        {"trivial_ac_ce", [](Mutations& m) { m.trivial_ac_ce = true; }},
    };
    for (const auto& cs : cases) {
        VerifyOptions mo = o;
        cs.set(mo.engine.mutations);
        auto res = verify_pair(symbolic_conflict_essences(dec, pull, mo.engine), hosts, mo);
        INFO(cs.name);
        CHECK_FALSE(res.passed());
    }
}

TEST_CASE("reference derivation agrees with the engine") {
    auto rs = load("running_example.json");
    const auto& dec = rs.rule("decapsulateAttribute");
    const auto& pull = rs.rule("pullUpEncapsulatedAttribute");
    for (auto [a, b] : {std::pair{&dec, &dec}, {&dec, &pull}, {&pull, &dec}}) {
        VerifyOptions o;
        o.checks = {Check::Reference};
        auto res = verify_pair(conflict_essences(*a, *b), {}, o);
        INFO(a->name << " x " << b->name);
        CHECK(res.report(Check::Reference).instances > 0);
        CHECK(res.passed());
    }
}

TEST_CASE("random hosts follow the seed") {
    auto rs = load("running_example.json");
    const auto& dec = rs.rule("decapsulateAttribute");
    const auto& pull = rs.rule("pullUpEncapsulatedAttribute");
    auto seed = fixtures::seed();
    auto a = random_hosts(dec, pull, 20, 3, seed);
    auto b = random_hosts(dec, pull, 20, 3, seed);
    REQUIRE(a.size() == 20);
    REQUIRE(b.size() == 20);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i]->same_as(*b[i]));

    VerifyOptions o;
    o.gluings_included = false;
    auto res = verify_pair(symbolic_conflict_essences(dec, pull), a, o);
    CHECK(res.passed());
}
