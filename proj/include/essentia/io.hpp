#pragma once

#include "essentia/rewriting.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace essentia {

using Json = nlohmann::ordered_json;

inline constexpr const char* kRuleSetSchema = "essentia-ruleset/1";

/// Malformed document; `where` is the JSON path of the offending field.
class ParseError : public Error {
public:
    ParseError(const std::string& where, const std::string& what)
        : Error(where.empty() ? what : where + ": " + what), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct RuleSet {
    std::string name;
    std::string description;
    TypeGraphPtr types;
    std::vector<Rule> rules;

    const Rule& rule(const std::string& name) const;
};

RuleSet parse_ruleset(const std::string& text);
RuleSet load_ruleset(const std::string& path);
Json ruleset_to_json(const RuleSet& rs);
std::string serialize_ruleset(const RuleSet& rs);

Json types_to_json(const TypeGraph& t);
TypeGraphPtr types_from_json(const Json& j, const std::string& where = "types");

Json graph_to_json(const TypedGraph& g);
GraphPtr graph_from_json(const Json& j, const TypeGraphPtr& types, const std::string& where,
                         const std::string& default_name = {});

/// {"nodes": {"dom id": "cod id"}, "edges": {...}}.
Json morphism_to_json(const Morphism& m);
/// Entries left out map to the codomain element with the same id.
Morphism morphism_from_json(const Json& j, const GraphPtr& dom, const GraphPtr& cod, const std::string& where);

Json condition_to_json(const CondPtr& c);
CondPtr condition_from_json(const Json& j, const GraphPtr& root, const std::string& where);

std::string read_file(const std::string& path);
/// Writes via a temporary file and rename.
void write_file(const std::string& path, const std::string& text);

}  // namespace essentia
