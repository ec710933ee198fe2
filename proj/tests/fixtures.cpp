#include "fixtures.hpp"

#include <cstdlib>
#include <sstream>

namespace fixtures {

TypeGraphPtr running_types() {
    static TypeGraphPtr t = [] {
        auto g = std::make_shared<TypeGraph>();
        for (const char* n : {"Class", "Attribute", "Getter", "Setter"})
            g->add_node_type(n);
        g->add_edge_type("getter", "Class", "Getter");
        g->add_edge_type("setter", "Class", "Setter");
        g->add_edge_type("variables", "Class", "Attribute");
        g->add_edge_type("superclass", "Class", "Class");
        g->add_edge_type("public", "Attribute", "Attribute");
        return TypeGraphPtr(g);
    }();
    return t;
}

TypeGraphPtr toy_types() {
    static TypeGraphPtr t = [] {
        auto g = std::make_shared<TypeGraph>();
        g->add_node_type("X");
        g->add_node_type("Y");
        g->add_edge_type("e", "X", "Y");
        g->add_edge_type("s", "X", "X");
        return TypeGraphPtr(g);
    }();
    return t;
}

GraphPtr graph(const TypeGraphPtr& types, const std::string& name, const std::string& nodes,
               const std::string& edges) {
    GraphBuilder gb(types, name);
    std::istringstream ns(nodes);
    std::string tok;
    while (ns >> tok) {
        auto c = tok.rfind(':');
        gb.add_node(tok.substr(0, c), tok.substr(c + 1));
    }
    std::istringstream es(edges);
    int k = 0;
    while (es >> tok) {
        std::string id = "e" + std::to_string(k++);
        auto eq = tok.find('=');
        if (eq != std::string::npos) {
            id = tok.substr(0, eq);
            tok = tok.substr(eq + 1);
        }
        auto d1 = tok.find('-');
        auto d2 = tok.find("->");
        gb.add_edge(id, tok.substr(d1 + 1, d2 - d1 - 1), tok.substr(0, d1), tok.substr(d2 + 2));
    }
    return gb.build();
}

GraphPtr random_graph(const TypeGraphPtr& types, std::mt19937& rng, int max_nodes, int max_edges,
                      const std::string& prefix) {
    GraphBuilder gb(types, prefix);
    int n = std::uniform_int_distribution<int>(0, max_nodes)(rng);
    std::vector<int> type_of;
    for (int i = 0; i < n; ++i) {
        int t = std::uniform_int_distribution<int>(0, static_cast<int>(types->node_types().size()) - 1)(rng);
        gb.add_node(prefix + std::to_string(i), t);
        type_of.push_back(t);
    }
    int m = n ? std::uniform_int_distribution<int>(0, max_edges)(rng) : 0;
    int placed = 0;
    for (int attempt = 0; attempt < 20 * m && placed < m; ++attempt) {
        int et = std::uniform_int_distribution<int>(0, static_cast<int>(types->edge_types().size()) - 1)(rng);
        const auto& t = types->edge_types()[static_cast<std::size_t>(et)];
        int s = std::uniform_int_distribution<int>(0, n - 1)(rng);
        int d = std::uniform_int_distribution<int>(0, n - 1)(rng);
        if (type_of[static_cast<std::size_t>(s)] != t.source || type_of[static_cast<std::size_t>(d)] != t.target)
            continue;
        gb.add_edge(prefix + "e" + std::to_string(placed++), et, s, d);
    }
    return gb.build();
}

unsigned seed() {
    if (const char* s = std::getenv("ESSENTIA_SEED"))
        return static_cast<unsigned>(std::strtoul(s, nullptr, 10));
    return 20240611u;
}

}  // namespace fixtures
