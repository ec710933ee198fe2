#include "fixtures.hpp"
#include "essentia/io.hpp"

#include <doctest.h>

#include <algorithm>

using namespace essentia;

namespace {

std::string data(const char* file) { return read_file(std::string(ESSENTIA_DATA_DIR) + "/" + file); }

}  // namespace

TEST_CASE("empty rule set") {
    auto rs = parse_ruleset(R"({"schema": "essentia-ruleset/1", "types": {"nodes": []}})");
    CHECK(rs.rules.empty());
}

TEST_CASE("running example parses with the expected condition tree") {
    auto rs = parse_ruleset(data("running_example.json"));
    REQUIRE(rs.rules.size() == 2);
    const auto& pull = rs.rule("pullUpEncapsulatedAttribute");
    auto shown = pretty(pull.ac);
    CHECK((shown == "forall(P1, or(exists(P2), exists(P3)))" || shown == "forall(P1, or(exists(P3), exists(P2)))"));
    auto t = tree(pull.ac);
    REQUIRE(t.nodes.size() == 4);
    std::vector<std::string> leaves;
    for (int i : t.leaves())
        leaves.push_back(t.nodes[static_cast<std::size_t>(i)].graph->name());
    std::sort(leaves.begin(), leaves.end());
    CHECK(leaves == std::vector<std::string>{"P2", "P3"});
    CHECK(rs.rule("decapsulateAttribute").L->node_count() == 4);
}

TEST_CASE("serialization round trip") {
    for (const char* file : {"running_example.json", "toy_plain.json", "toy_universal.json", "toy_negative.json"}) {
        auto once = serialize_ruleset(parse_ruleset(data(file)));
        auto twice = serialize_ruleset(parse_ruleset(once));
        CHECK(once == twice);
    }
}

TEST_CASE("malformed documents are rejected with a location") {
    auto bad_interface = R"({"schema": "essentia-ruleset/1",
        "types": {"nodes": ["X"]},
        "rules": [{"name": "r", "lhs": {"nodes": [{"id": "1", "type": "X"}]},
                   "interface": {"nodes": [{"id": "2", "type": "X"}]},
                   "rhs": {"nodes": [{"id": "2", "type": "X"}]}}]})";
    CHECK_THROWS_WITH_AS(parse_ruleset(bad_interface), doctest::Contains("rules[0].l"), ParseError);
    CHECK_THROWS_AS(parse_ruleset("{\"schema\": \"essentia-ruleset/1\",\n \"types\": }"), ParseError);
    CHECK_THROWS_WITH_AS(parse_ruleset(R"({"schema": "other/2", "types": {"nodes": []}})"),
                         doctest::Contains("unsupported schema"), ParseError);
    auto bad_type = R"({"schema": "essentia-ruleset/1", "types": {"nodes": ["X"]},
        "rules": [{"name": "r", "lhs": {"nodes": [{"id": "1", "type": "Z"}]},
                   "interface": {}, "rhs": {}}]})";
    CHECK_THROWS_WITH_AS(parse_ruleset(bad_type), doctest::Contains("rules[0].lhs.nodes[0]"), ParseError);
}
