#include "essentia/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace essentia {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object())
        throw ParseError(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError(where, std::string("missing field '") + key + "'");
    return *it;
}

std::string text(const Json& j, const std::string& where) {
    if (!j.is_string())
        throw ParseError(where, "expected a string");
    return j.get<std::string>();
}

const Json& array(const Json& j, const std::string& where) {
    if (!j.is_array())
        throw ParseError(where, "expected an array");
    return j;
}

std::string optional_text(const Json& j, const char* key, const std::string& where) {
    if (!j.contains(key))
        return {};
    return text(j.at(key), where + "." + key);
}

}  // namespace

const Rule& RuleSet::rule(const std::string& n) const {
    for (const auto& r : rules)
        if (r.name == n)
            return r;
    throw Error("no rule named '" + n + "'");
}

Json types_to_json(const TypeGraph& t) {
    Json j;
    j["nodes"] = t.node_types();
    j["edges"] = Json::array();
    for (const auto& e : t.edge_types())
        j["edges"].push_back({{"name", e.name},
                              {"source", t.node_types()[static_cast<std::size_t>(e.source)]},
                              {"target", t.node_types()[static_cast<std::size_t>(e.target)]}});
    return j;
}

TypeGraphPtr types_from_json(const Json& j, const std::string& where) {
    auto t = std::make_shared<TypeGraph>();
    const auto& nodes = array(field(j, "nodes", where), where + ".nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto w = where + ".nodes[" + std::to_string(i) + "]";
        try {
            t->add_node_type(text(nodes[i], w));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(w, e.what());
        }
    }
    if (j.contains("edges")) {
        const auto& edges = array(j.at("edges"), where + ".edges");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto w = where + ".edges[" + std::to_string(i) + "]";
            auto name = text(field(edges[i], "name", w), w + ".name");
            auto s = text(field(edges[i], "source", w), w + ".source");
            auto d = text(field(edges[i], "target", w), w + ".target");
            try {
                t->add_edge_type(name, s, d);
            } catch (const Error& e) {
                throw ParseError(w, e.what());
            }
        }
    }
    return t;
}

Json graph_to_json(const TypedGraph& g) {
    const auto& t = *g.types();
    Json j;
    if (!g.name().empty())
        j["name"] = g.name();
    j["nodes"] = Json::array();
    for (const auto& n : g.nodes())
        j["nodes"].push_back({{"id", n.id}, {"type", t.node_types()[static_cast<std::size_t>(n.type)]}});
    j["edges"] = Json::array();
    for (const auto& e : g.edges())
        j["edges"].push_back({{"id", e.id},
                              {"type", t.edge_types()[static_cast<std::size_t>(e.type)].name},
                              {"source", g.node(e.source).id},
                              {"target", g.node(e.target).id}});
    return j;
}

GraphPtr graph_from_json(const Json& j, const TypeGraphPtr& types, const std::string& where,
                         const std::string& default_name) {
    if (!j.is_object())
        throw ParseError(where, "expected a graph object");
    std::string name = j.contains("name") ? text(j.at("name"), where + ".name") : default_name;
    GraphBuilder gb(types, name);
    if (j.contains("nodes")) {
        const auto& nodes = array(j.at("nodes"), where + ".nodes");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            auto w = where + ".nodes[" + std::to_string(i) + "]";
            auto id = text(field(nodes[i], "id", w), w + ".id");
            auto type = text(field(nodes[i], "type", w), w + ".type");
            try {
                gb.add_node(id, type);
            } catch (const Error& e) {
                throw ParseError(w, e.what());
            }
        }
    }
    if (j.contains("edges")) {
        const auto& edges = array(j.at("edges"), where + ".edges");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            auto w = where + ".edges[" + std::to_string(i) + "]";
            const auto& e = edges[i];
            auto type = text(field(e, "type", w), w + ".type");
            auto s = text(field(e, "source", w), w + ".source");
            auto d = text(field(e, "target", w), w + ".target");
            std::string id = e.contains("id") ? text(e.at("id"), w + ".id") : s + "-" + type + "->" + d;
            try {
                gb.add_edge(id, type, s, d);
            } catch (const Error& ex) {
                throw ParseError(w, ex.what());
            }
        }
    }
    return gb.build();
}

Json morphism_to_json(const Morphism& m) {
    Json j;
    j["nodes"] = Json::object();
    for (std::size_t i = 0; i < m.node_map().size(); ++i)
        j["nodes"][m.domain()->node(static_cast<int>(i)).id] = m.codomain()->node(m.node(static_cast<int>(i))).id;
    j["edges"] = Json::object();
    for (std::size_t i = 0; i < m.edge_map().size(); ++i)
        j["edges"][m.domain()->edge(static_cast<int>(i)).id] = m.codomain()->edge(m.edge(static_cast<int>(i))).id;
    return j;
}

Morphism morphism_from_json(const Json& j, const GraphPtr& dom, const GraphPtr& cod, const std::string& where) {
    if (!j.is_null() && !j.is_object())
        throw ParseError(where, "expected a map object");
    auto lookup = [&](const char* kind, const std::string& id) -> std::string {
        if (j.is_object() && j.contains(kind) && j.at(kind).contains(id))
            return text(j.at(kind).at(id), where + "." + kind + "." + id);
        return id;
    };
    for (const char* kind : {"nodes", "edges"})
        if (j.is_object() && j.contains(kind)) {
            if (!j.at(kind).is_object())
                throw ParseError(where + "." + kind, "expected an object");
            for (const auto& [k, v] : j.at(kind).items()) {
                bool known = std::string(kind) == "nodes" ? dom->find_node(k).has_value() : dom->find_edge(k).has_value();
                if (!known)
                    throw ParseError(where + "." + kind, "'" + k + "' is not in " + (dom->name().empty() ? "the domain" : dom->name()));
            }
        }
    std::vector<int> nodes, edges;
    for (const auto& n : dom->nodes()) {
        auto target = lookup("nodes", n.id);
        auto idx = cod->find_node(target);
        if (!idx)
            throw ParseError(where, "node '" + n.id + "' maps to '" + target + "', which is not in " + cod->name());
        nodes.push_back(*idx);
    }
    for (const auto& e : dom->edges()) {
        auto target = lookup("edges", e.id);
        auto idx = cod->find_edge(target);
        if (!idx)
            throw ParseError(where, "edge '" + e.id + "' maps to '" + target + "', which is not in " + cod->name());
        edges.push_back(*idx);
    }
    try {
        return Morphism(dom, cod, nodes, edges);
    } catch (const Error& e) {
        throw ParseError(where, e.what());
    }
}

Json condition_to_json(const CondPtr& c) {
    using K = Condition::Kind;
    switch (c->kind()) {
    case K::True: return {{"kind", "true"}};
    case K::False: return {{"kind", "false"}};
    case K::Exists:
    case K::Forall: {
        Json j;
        j["kind"] = c->kind() == K::Exists ? "exists" : "forall";
        j["graph"] = graph_to_json(*c->arrow().codomain());
        j["map"] = morphism_to_json(c->arrow());
        j["body"] = condition_to_json(c->body());
        return j;
    }
    case K::And:
    case K::Or: {
        Json j;
        j["kind"] = c->kind() == K::And ? "and" : "or";
        j["args"] = Json::array();
        for (const auto& ch : c->children())
            j["args"].push_back(condition_to_json(ch));
        return j;
    }
    case K::Not: return {{"kind", "not"}, {"arg", condition_to_json(c->body())}};
    }
    return {};
}

CondPtr condition_from_json(const Json& j, const GraphPtr& root, const std::string& where) {
    auto kind = text(field(j, "kind", where), where + ".kind");
    if (kind == "true")
        return Condition::make_true(root);
    if (kind == "false")
        return Condition::make_false(root);
    if (kind == "exists" || kind == "forall") {
        auto g = graph_from_json(field(j, "graph", where), root->types(), where + ".graph");
        auto arrow = morphism_from_json(j.contains("map") ? j.at("map") : Json(), root, g, where + ".map");
        auto body = j.contains("body") ? condition_from_json(j.at("body"), g, where + ".body")
                                       : Condition::make_true(g);
        return kind == "exists" ? Condition::exists(arrow, body) : Condition::forall(arrow, body);
    }
    if (kind == "and" || kind == "or") {
        const auto& args = array(field(j, "args", where), where + ".args");
        std::vector<CondPtr> ch;
        for (std::size_t i = 0; i < args.size(); ++i)
            ch.push_back(condition_from_json(args[i], root, where + ".args[" + std::to_string(i) + "]"));
        return kind == "and" ? Condition::conj(root, ch) : Condition::disj(root, ch);
    }
    if (kind == "not")
        return Condition::negate(condition_from_json(field(j, "arg", where), root, where + ".arg"));
    throw ParseError(where + ".kind", "unknown condition kind '" + kind + "'");
}

RuleSet parse_ruleset(const std::string& src) {
    Json doc;
    try {
        doc = Json::parse(src);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < e.byte && i < src.size(); ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col), e.what());
    }
    if (!doc.is_object())
        throw ParseError("", "a rule set must be a JSON object");
    auto schema = text(field(doc, "schema", ""), "schema");
    if (schema != kRuleSetSchema)
        throw ParseError("schema", "unsupported schema '" + schema + "', expected " + kRuleSetSchema);
    RuleSet rs;
    rs.name = optional_text(doc, "name", "");
    rs.description = optional_text(doc, "description", "");
    rs.types = types_from_json(field(doc, "types", ""), "types");
    if (!doc.contains("rules"))
        return rs;
    const auto& rules = array(doc.at("rules"), "rules");
    std::set<std::string> names;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        auto w = "rules[" + std::to_string(i) + "]";
        const auto& r = rules[i];
        auto name = text(field(r, "name", w), w + ".name");
        if (!names.insert(name).second)
            throw ParseError(w + ".name", "duplicate rule name '" + name + "'");
        auto L = graph_from_json(field(r, "lhs", w), rs.types, w + ".lhs", "L");
        auto K = graph_from_json(field(r, "interface", w), rs.types, w + ".interface", "K");
        auto R = graph_from_json(field(r, "rhs", w), rs.types, w + ".rhs", "R");
        auto l = morphism_from_json(r.contains("l") ? r.at("l") : Json(), K, L, w + ".l");
        auto rr = morphism_from_json(r.contains("r") ? r.at("r") : Json(), K, R, w + ".r");
        CondPtr ac = r.contains("ac") ? condition_from_json(r.at("ac"), L, w + ".ac") : nullptr;
        try {
            rs.rules.push_back(Rule::make(name, l, rr, ac));
        } catch (const Error& e) {
            throw ParseError(w, e.what());
        }
    }
    return rs;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw Error("cannot write " + path);
        out << contents;
        if (!out)
            throw Error("cannot write " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("cannot write " + path);
}

RuleSet load_ruleset(const std::string& path) { return parse_ruleset(read_file(path)); }

Json ruleset_to_json(const RuleSet& rs) {
    Json j;
    j["schema"] = kRuleSetSchema;
    if (!rs.name.empty())
        j["name"] = rs.name;
    if (!rs.description.empty())
        j["description"] = rs.description;
    j["types"] = types_to_json(*rs.types);
    j["rules"] = Json::array();
    for (const auto& r : rs.rules) {
        Json jr;
        jr["name"] = r.name;
        jr["lhs"] = graph_to_json(*r.L);
        jr["interface"] = graph_to_json(*r.K);
        jr["rhs"] = graph_to_json(*r.R);
        jr["l"] = morphism_to_json(r.l);
        jr["r"] = morphism_to_json(r.r);
        jr["ac"] = condition_to_json(r.ac);
        j["rules"].push_back(jr);
    }
    return j;
}

std::string serialize_ruleset(const RuleSet& rs) { return ruleset_to_json(rs).dump(2) + "\n"; }

}  // namespace essentia
