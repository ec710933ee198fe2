#include "fixtures.hpp"
#include "essentia/category.hpp"
#include "essentia/report.hpp"

#include <doctest.h>

#include <filesystem>

using namespace essentia;

namespace {

RuleSet load(const char* file) { return load_ruleset(std::string(ESSENTIA_DATA_DIR) + "/" + file); }

struct Running {
    RuleSet rs = load("running_example.json");
    const Rule& dec = rs.rule("decapsulateAttribute");
    const Rule& pull = rs.rule("pullUpEncapsulatedAttribute");
};

}  // namespace

TEST_CASE("pair selection") {
    Running r;
    auto all = select_pairs(r.rs, "");
    REQUIRE(all.size() == 3);
    CHECK(all[1] == RulePair{"decapsulateAttribute", "pullUpEncapsulatedAttribute"});
    CHECK(select_pairs(r.rs, "pullUpEncapsulatedAttribute,decapsulateAttribute").size() == 1);
    CHECK_THROWS_AS(select_pairs(r.rs, "decapsulateAttribute"), ParseError);
    CHECK_THROWS_AS(select_pairs(r.rs, "decapsulateAttribute,nope"), Error);
}

TEST_CASE("plain disjoint rules give empty essence lists") {
    auto rs = load("toy_plain.json");
    auto types = rs.types;
    // two rules that touch nothing the other one sees
    auto a = Rule::make("a", Morphism::identity(fixtures::graph(types, "L", "1:X")),
                        Morphism::identity(fixtures::graph(types, "L", "1:X")));
    auto ka = fixtures::graph(types, "K", "");
    auto la = fixtures::graph(types, "L", "1:Y");
    auto del = Rule::make("del", Morphism::from_empty(la), Morphism::from_empty(ka));
    RuleSet one{"disjoint", "", types, {a, del}};
    auto j = analyze(one, {{"a", "del"}}, {});
    const auto& p = j["pairs"][0];
    CHECK(p["forward"].empty());
    CHECK(p["backward"].empty());
    CHECK(p["conflict_essences"].empty());
}

TEST_CASE("reports are deterministic and their witnesses re-verify") {
    Running r;
    auto pairs = select_pairs(r.rs, "decapsulateAttribute,pullUpEncapsulatedAttribute");
    auto a = analyze(r.rs, pairs, {}).dump();
    auto b = analyze(r.rs, pairs, {}).dump();
    CHECK(a == b);

    auto reloaded = Json::parse(a);
    CHECK(reloaded["schema"] == kReportSchema);
    CHECK(reloaded["config"]["compose_depth"] == 1);
    const auto& p = reloaded["pairs"][0];
    CHECK(p["summary"]["forward"] == p["forward"].size());
    CHECK(p["symbolic"].size() == p["conflict_essences"].size());
    auto problems = recheck_report(reloaded, r.rs);
    for (const auto& msg : problems)
        INFO(msg);
    CHECK(problems.empty());

    SUBCASE("a flipped flag is noticed") {
        auto bad = reloaded;
        auto& ce = bad["pairs"][0]["conflict_essences"][0];
        ce["ac_conflicting"] = !ce["ac_conflicting"].get<bool>();
        CHECK(recheck_report(bad, r.rs).size() == 1);
    }
    SUBCASE("a broken morphism is noticed") {
        auto bad = reloaded;
        auto& ov = bad["pairs"][0]["forward"][0]["overlap"];
        ov["pL2"]["nodes"][ov["pL2"]["nodes"].begin().key()] = "nowhere";
        CHECK_FALSE(recheck_report(bad, r.rs).empty());
    }
}

TEST_CASE("disabling essences carry kind, level, leaf and path") {
    Running r;
    auto j = analyze(r.rs, {{"decapsulateAttribute", "pullUpEncapsulatedAttribute"}}, {});
    bool saw_p3 = false;
    for (const auto& e : j["pairs"][0]["forward"]) {
        CHECK((e["kind"] == "deletion" || e["kind"] == "insertion"));
        CHECK(e["path"].size() == e["level"].get<std::size_t>() + 1);
        saw_p3 = saw_p3 || e["leaf"] == "P3";
    }
    CHECK(saw_p3);
}

TEST_CASE("check-pair on the gluing of decapsulateAttribute's LHS with P3") {
    Running r;
    auto t = tree(r.pull.ac);
    std::size_t p3 = 0;
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        if (t.nodes[i].graph->name() == "P3")
            p3 = i;
    REQUIRE(p3 > 0);
    const auto& P3 = t.nodes[p3].graph;
    // the canonical matches: pullUp at the root of P3, decapsulateAttribute on 10, 13, 12, 11
    MorphismConstraints c;
    for (const char* id : {"10", "13", "12", "11"})
        c.fixed_nodes.push_back(P3->node_index(id));
    auto m1 = find_morphism(r.dec.L, P3, c);
    REQUIRE(m1);
    auto m2 = t.arrow_between(0, static_cast<int>(p3));

    auto a = symbolic_conflict_essences(r.dec, r.pull);
    auto v = check_pair(a, *m1, m2);
    // decapsulateAttribute leaves 11 public, so P2 still holds for subclass 10: the ac-conflicting
    // essences embed but their conditions fail, and the pair stays independent.
    CHECK(v["verdict"]["independent"] == true);
    CHECK(v["embedded"].empty());
    bool embeds_ac_conflicting = false;
    for (const auto& ce : a.essences)
        embeds_ac_conflicting = embeds_ac_conflicting || (ce.ac_conflicting && embeds(ce.overlap, *m1, m2));
    CHECK(embeds_ac_conflicting);

    // Without decapsulateAttribute's target in subclass 10 the pair on L2 itself is dependent.
    auto mutual = check_pair(a, *find_morphism(r.dec.L, r.pull.L, {}), Morphism::identity(r.pull.L));
    CHECK(mutual["verdict"]["classification"] == "mutual");
    CHECK_FALSE(mutual["embedded"].empty());
}

TEST_CASE("check-pair: embedded essences exactly when dependent") {
    Running r;
    auto a = symbolic_conflict_essences(r.dec, r.pull);
    auto sum = coproduct(r.dec.L, r.pull.L);
    for (const auto& host : {r.pull.L, sum.object}) {
        for (const auto& m1 : find_matches(r.dec, host, MatchMode::RespectAc))
            for (const auto& m2 : find_matches(r.pull, host, MatchMode::RespectAc)) {
                auto v = check_pair(a, m1, m2);
                CHECK(v["embedded"].empty() == v["verdict"]["independent"].get<bool>());
            }
    }
}

TEST_CASE("dot export") {
    Running r;
    auto a = conflict_essences(r.dec, r.pull);
    auto dot = overlap_dot(a.forward.front().overlap, &a.forward.front().c, "first");
    CHECK(dot.find("cluster_A") != std::string::npos);
    CHECK(dot.find("lightgrey") != std::string::npos);
    CHECK(graph_dot(*r.dec.L).find("\"1:Class\"") != std::string::npos);

    auto dir = std::filesystem::temp_directory_path() / "essentia_dot_test";
    std::filesystem::remove_all(dir);
    auto files = export_ruleset_dot(r.rs, dir.string());
    CHECK(files.size() >= 6);
    for (const auto& f : files)
        CHECK(std::filesystem::exists(f));
    std::filesystem::remove_all(dir);
}
