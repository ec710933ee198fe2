#include "essentia/graph.hpp"

#include <algorithm>
#include <sstream>

namespace essentia {

int TypeGraph::add_node_type(const std::string& name) {
    if (node_index_.count(name))
        throw Error("duplicate node type '" + name + "'");
    node_index_[name] = static_cast<int>(node_types_.size());
    node_types_.push_back(name);
    return node_index_[name];
}

int TypeGraph::add_edge_type(const std::string& name, const std::string& source, const std::string& target) {
    if (edge_index_.count(name))
        throw Error("duplicate edge type '" + name + "'");
    EdgeType t{name, node_type(source), node_type(target)};
    edge_index_[name] = static_cast<int>(edge_types_.size());
    edge_types_.push_back(t);
    return edge_index_[name];
}

std::optional<int> TypeGraph::find_node_type(const std::string& name) const {
    auto it = node_index_.find(name);
    if (it == node_index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<int> TypeGraph::find_edge_type(const std::string& name) const {
    auto it = edge_index_.find(name);
    if (it == edge_index_.end())
        return std::nullopt;
    return it->second;
}

int TypeGraph::node_type(const std::string& name) const {
    auto t = find_node_type(name);
    if (!t)
        throw Error("unknown node type '" + name + "'");
    return *t;
}

int TypeGraph::edge_type(const std::string& name) const {
    auto t = find_edge_type(name);
    if (!t)
        throw Error("unknown edge type '" + name + "'");
    return *t;
}

bool TypeGraph::operator==(const TypeGraph& other) const {
    if (node_types_ != other.node_types_ || edge_types_.size() != other.edge_types_.size())
        return false;
    for (std::size_t i = 0; i < edge_types_.size(); ++i) {
        const auto& x = edge_types_[i];
        const auto& y = other.edge_types_[i];
        if (x.name != y.name || x.source != y.source || x.target != y.target)
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

std::optional<int> TypedGraph::find_node(const std::string& id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<int> TypedGraph::find_edge(const std::string& id) const {
    auto it = edge_index_.find(id);
    if (it == edge_index_.end())
        return std::nullopt;
    return it->second;
}

int TypedGraph::node_index(const std::string& id) const {
    auto n = find_node(id);
    if (!n)
        throw Error("graph " + name_ + " has no node '" + id + "'");
    return *n;
}

int TypedGraph::edge_index(const std::string& id) const {
    auto e = find_edge(id);
    if (!e)
        throw Error("graph " + name_ + " has no edge '" + id + "'");
    return *e;
}

bool TypedGraph::same_as(const TypedGraph& other) const {
    if (this == &other)
        return true;
    if (types_ != other.types_ && !(*types_ == *other.types_))
        return false;
    if (nodes_.size() != other.nodes_.size() || edges_.size() != other.edges_.size())
        return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].id != other.nodes_[i].id || nodes_[i].type != other.nodes_[i].type)
            return false;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& x = edges_[i];
        const auto& y = other.edges_[i];
        if (x.id != y.id || x.type != y.type || x.source != y.source || x.target != y.target)
            return false;
    }
    return true;
}

std::string TypedGraph::node_label(int i) const {
    const auto& n = node(i);
    return n.id + ":" + types_->node_types()[static_cast<std::size_t>(n.type)];
}

std::string TypedGraph::describe() const {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        os << (i ? ", " : "") << node_label(static_cast<int>(i));
    os << " |";
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& e = edges_[i];
        os << (i ? ", " : " ") << node(e.source).id << "-" << types_->edge_types()[static_cast<std::size_t>(e.type)].name
           << "->" << node(e.target).id;
    }
    os << "}";
    return os.str();
}

GraphPtr TypedGraph::renamed(const std::string& name) const {
    auto g = std::make_shared<TypedGraph>(*this);
    g->name_ = name;
    return g;
}

bool same_graph(const GraphPtr& a, const GraphPtr& b) {
    if (a == b)
        return true;
    if (!a || !b)
        return false;
    return a->same_as(*b);
}

GraphBuilder::GraphBuilder(TypeGraphPtr types, std::string name) {
    if (!types)
        throw Error("graph without type graph");
    graph_.types_ = std::move(types);
    graph_.name_ = std::move(name);
}

int GraphBuilder::add_node(const std::string& id, int type) {
    if (type < 0 || type >= static_cast<int>(graph_.types_->node_types().size()))
        throw Error("node '" + id + "' has an invalid type");
    if (graph_.node_index_.count(id))
        throw Error("duplicate node id '" + id + "' in graph " + graph_.name_);
    int idx = static_cast<int>(graph_.nodes_.size());
    graph_.nodes_.push_back({id, type});
    graph_.node_index_[id] = idx;
    graph_.out_.emplace_back();
    graph_.in_.emplace_back();
    return idx;
}

int GraphBuilder::add_node(const std::string& id, const std::string& type) {
    return add_node(id, graph_.types_->node_type(type));
}

int GraphBuilder::add_edge(const std::string& id, int type, int source, int target) {
    const auto& ets = graph_.types_->edge_types();
    if (type < 0 || type >= static_cast<int>(ets.size()))
        throw Error("edge '" + id + "' has an invalid type");
    int n = static_cast<int>(graph_.nodes_.size());
    if (source < 0 || source >= n || target < 0 || target >= n)
        throw Error("edge '" + id + "' has a dangling endpoint");
    const auto& et = ets[static_cast<std::size_t>(type)];
    if (graph_.nodes_[static_cast<std::size_t>(source)].type != et.source ||
        graph_.nodes_[static_cast<std::size_t>(target)].type != et.target)
        throw Error("edge '" + id + "' of type " + et.name + " connects nodes of the wrong types");
    if (graph_.edge_index_.count(id))
        throw Error("duplicate edge id '" + id + "' in graph " + graph_.name_);
    int idx = static_cast<int>(graph_.edges_.size());
    graph_.edges_.push_back({id, type, source, target});
    graph_.edge_index_[id] = idx;
    graph_.out_[static_cast<std::size_t>(source)].push_back(idx);
    graph_.in_[static_cast<std::size_t>(target)].push_back(idx);
    return idx;
}

int GraphBuilder::add_edge(const std::string& id, const std::string& type, const std::string& source,
                           const std::string& target) {
    auto s = graph_.find_node(source);
    auto t = graph_.find_node(target);
    if (!s || !t)
        throw Error("edge '" + id + "' references an unknown node");
    return add_edge(id, graph_.types_->edge_type(type), *s, *t);
}

std::string GraphBuilder::fresh_node_id(const std::string& preferred) const {
    std::string id = preferred;
    while (graph_.node_index_.count(id))
        id += "'";
    return id;
}

std::string GraphBuilder::fresh_edge_id(const std::string& preferred) const {
    std::string id = preferred;
    while (graph_.edge_index_.count(id))
        id += "'";
    return id;
}

GraphPtr GraphBuilder::build() const { return std::make_shared<TypedGraph>(graph_); }

GraphPtr empty_graph(const TypeGraphPtr& types) { return GraphBuilder(types, "empty").build(); }

std::string join_ids(const std::string& a, const std::string& b) {
    std::vector<std::string> tokens;
    auto add = [&](const std::string& s) {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty() && std::find(tokens.begin(), tokens.end(), tok) == tokens.end())
                tokens.push_back(tok);
    };
    add(a);
    add(b);
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i)
        out += (i ? "," : "") + tokens[i];
    return out;
}

// ---------------------------------------------------------------------------

Morphism::Morphism(GraphPtr domain, GraphPtr codomain, std::vector<int> node_map, std::vector<int> edge_map)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), nodes_(std::move(node_map)),
      edges_(std::move(edge_map)) {
    if (!domain_ || !codomain_)
        throw Error("morphism without domain or codomain");
    const auto& A = *domain_;
    const auto& B = *codomain_;
    if (nodes_.size() != A.node_count() || edges_.size() != A.edge_count())
        throw Error("morphism " + A.name() + " -> " + B.name() + " is not total");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        int x = nodes_[i];
        if (x < 0 || x >= static_cast<int>(B.node_count()) || B.node(x).type != A.node(static_cast<int>(i)).type)
            throw Error("morphism " + A.name() + " -> " + B.name() + " breaks node typing at " +
                        A.node(static_cast<int>(i)).id);
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        int y = edges_[i];
        const auto& e = A.edge(static_cast<int>(i));
        if (y < 0 || y >= static_cast<int>(B.edge_count()))
            throw Error("morphism " + A.name() + " -> " + B.name() + " maps edge " + e.id + " outside");
        const auto& f = B.edge(y);
        if (f.type != e.type || f.source != nodes_[static_cast<std::size_t>(e.source)] ||
            f.target != nodes_[static_cast<std::size_t>(e.target)])
            throw Error("morphism " + A.name() + " -> " + B.name() + " breaks incidence at edge " + e.id);
    }
}

Morphism Morphism::trusted(GraphPtr domain, GraphPtr codomain, std::vector<int> node_map,
                           std::vector<int> edge_map) {
    Morphism m;
    m.domain_ = std::move(domain);
    m.codomain_ = std::move(codomain);
    m.nodes_ = std::move(node_map);
    m.edges_ = std::move(edge_map);
    return m;
}

Morphism Morphism::identity(const GraphPtr& g) {
    std::vector<int> n(g->node_count()), e(g->edge_count());
    for (std::size_t i = 0; i < n.size(); ++i)
        n[i] = static_cast<int>(i);
    for (std::size_t i = 0; i < e.size(); ++i)
        e[i] = static_cast<int>(i);
    return trusted(g, g, std::move(n), std::move(e));
}

Morphism Morphism::from_empty(const GraphPtr& g) { return trusted(empty_graph(g->types()), g, {}, {}); }

bool Morphism::is_injective() const {
    std::vector<char> seen(codomain_->node_count(), 0);
    for (int x : nodes_) {
        if (seen[static_cast<std::size_t>(x)])
            return false;
        seen[static_cast<std::size_t>(x)] = 1;
    }
    std::vector<char> seen_e(codomain_->edge_count(), 0);
    for (int y : edges_) {
        if (seen_e[static_cast<std::size_t>(y)])
            return false;
        seen_e[static_cast<std::size_t>(y)] = 1;
    }
    return true;
}

bool Morphism::is_surjective() const {
    std::vector<char> hit(codomain_->node_count(), 0);
    for (int x : nodes_)
        hit[static_cast<std::size_t>(x)] = 1;
    std::vector<char> hit_e(codomain_->edge_count(), 0);
    for (int y : edges_)
        hit_e[static_cast<std::size_t>(y)] = 1;
    return std::all_of(hit.begin(), hit.end(), [](char c) { return c; }) &&
           std::all_of(hit_e.begin(), hit_e.end(), [](char c) { return c; });
}

bool Morphism::operator==(const Morphism& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_ && same_graph(domain_, other.domain_) &&
           same_graph(codomain_, other.codomain_);
}

std::string Morphism::describe() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        os << (i ? ", " : "") << domain_->node(static_cast<int>(i)).id << "->"
           << codomain_->node(nodes_[i]).id;
    os << "]";
    return os.str();
}

Morphism compose(const Morphism& f, const Morphism& g) {
    if (!same_graph(f.codomain(), g.domain()))
        throw Error("cannot compose: codomain " + f.codomain()->name() + " differs from domain " +
                    g.domain()->name());
    std::vector<int> n(f.node_map().size()), e(f.edge_map().size());
    for (std::size_t i = 0; i < n.size(); ++i)
        n[i] = g.node(f.node_map()[i]);
    for (std::size_t i = 0; i < e.size(); ++i)
        e[i] = g.edge(f.edge_map()[i]);
    return Morphism::trusted(f.domain(), g.codomain(), std::move(n), std::move(e));
}

bool is_mono(const Morphism& f) { return f.is_injective(); }

// ---------------------------------------------------------------------------

namespace {

struct Search {
    const TypedGraph& A;
    const TypedGraph& B;
    const GraphPtr& a;
    const GraphPtr& b;
    const MorphismConstraints& c;
    const std::function<bool(const Morphism&)>& visit;
    std::vector<int> nodes;
    std::vector<int> edges;
    std::vector<int> node_use;
    std::vector<int> edge_use;
    // Domain edges grouped by the larger endpoint index: checked once both endpoints are placed.
    std::vector<std::vector<int>> edges_closing_at;
    bool stopped = false;

    Search(const GraphPtr& a_, const GraphPtr& b_, const MorphismConstraints& c_,
           const std::function<bool(const Morphism&)>& v)
        : A(*a_), B(*b_), a(a_), b(b_), c(c_), visit(v), nodes(A.node_count(), -1), edges(A.edge_count(), -1),
          node_use(B.node_count(), 0), edge_use(B.edge_count(), 0), edges_closing_at(A.node_count()) {
        for (std::size_t i = 0; i < A.edge_count(); ++i) {
            const auto& e = A.edge(static_cast<int>(i));
            edges_closing_at[static_cast<std::size_t>(std::max(e.source, e.target))].push_back(static_cast<int>(i));
        }
    }

    int fixed_node(int i) const {
        return static_cast<std::size_t>(i) < c.fixed_nodes.size() ? c.fixed_nodes[static_cast<std::size_t>(i)] : -1;
    }
    int fixed_edge(int i) const {
        return static_cast<std::size_t>(i) < c.fixed_edges.size() ? c.fixed_edges[static_cast<std::size_t>(i)] : -1;
    }

    bool has_candidate(int e) const {
        const auto& de = A.edge(e);
        int s = nodes[static_cast<std::size_t>(de.source)];
        int t = nodes[static_cast<std::size_t>(de.target)];
        int fe = fixed_edge(e);
        if (fe >= 0) {
            const auto& ce = B.edge(fe);
            return ce.type == de.type && ce.source == s && ce.target == t;
        }
        for (int ce : B.out_edges(s)) {
            const auto& x = B.edge(ce);
            if (x.type == de.type && x.target == t)
                return true;
        }
        return false;
    }

    void node_step(std::size_t i) {
        if (stopped)
            return;
        if (i == A.node_count()) {
            edge_step(0);
            return;
        }
        const auto& dn = A.node(static_cast<int>(i));
        std::vector<int> pool;
        bool all = false;
        int fn = fixed_node(static_cast<int>(i));
        int guide = -1;
        for (int e : edges_closing_at[i])
            if (A.edge(e).source != A.edge(e).target) {
                guide = e;
                break;
            }
        if (fn >= 0) {
            pool.push_back(fn);
        } else if (guide >= 0) {
            // Only neighbours of the endpoint placed earlier can close the guide edge.
            const auto& de = A.edge(guide);
            bool forward = de.target == static_cast<int>(i);
            int other = nodes[static_cast<std::size_t>(forward ? de.source : de.target)];
            for (int ce : forward ? B.out_edges(other) : B.in_edges(other))
                if (B.edge(ce).type == de.type)
                    pool.push_back(forward ? B.edge(ce).target : B.edge(ce).source);
            std::sort(pool.begin(), pool.end());
            pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
        } else {
            all = true;
        }
        std::size_t count = all ? B.node_count() : pool.size();
        for (std::size_t k = 0; k < count && !stopped; ++k) {
            int x = all ? static_cast<int>(k) : pool[k];
            if (B.node(x).type != dn.type)
                continue;
            if (c.injective && node_use[static_cast<std::size_t>(x)])
                continue;
            if (B.out_edges(x).size() < (c.injective ? A.out_edges(static_cast<int>(i)).size() : 0) ||
                B.in_edges(x).size() < (c.injective ? A.in_edges(static_cast<int>(i)).size() : 0))
                continue;
            nodes[i] = x;
            bool ok = true;
            for (int e : edges_closing_at[i])
                if (!has_candidate(e)) {
                    ok = false;
                    break;
                }
            if (ok) {
                ++node_use[static_cast<std::size_t>(x)];
                node_step(i + 1);
                --node_use[static_cast<std::size_t>(x)];
            }
            nodes[i] = -1;
        }
    }

    void edge_step(std::size_t i) {
        if (stopped)
            return;
        if (i == A.edge_count()) {
            if (!visit(Morphism::trusted(a, b, nodes, edges)))
                stopped = true;
            return;
        }
        const auto& de = A.edge(static_cast<int>(i));
        int s = nodes[static_cast<std::size_t>(de.source)];
        int t = nodes[static_cast<std::size_t>(de.target)];
        int fe = fixed_edge(static_cast<int>(i));
        std::vector<int> candidates;
        if (fe >= 0) {
            candidates.push_back(fe);
        } else {
            candidates = B.out_edges(s);
            std::sort(candidates.begin(), candidates.end());
        }
        for (int ce : candidates) {
            if (stopped)
                return;
            const auto& x = B.edge(ce);
            if (x.type != de.type || x.source != s || x.target != t)
                continue;
            if (c.injective && edge_use[static_cast<std::size_t>(ce)])
                continue;
            edges[i] = ce;
            ++edge_use[static_cast<std::size_t>(ce)];
            edge_step(i + 1);
            --edge_use[static_cast<std::size_t>(ce)];
            edges[i] = -1;
        }
    }
};

}  // namespace

void for_each_morphism(const GraphPtr& a, const GraphPtr& b, const MorphismConstraints& constraints,
                       const std::function<bool(const Morphism&)>& visit) {
    if (constraints.injective && (a->node_count() > b->node_count() || a->edge_count() > b->edge_count()))
        return;
    const auto& fn = constraints.fixed_nodes;
    const auto& fe = constraints.fixed_edges;
    auto free = [](int v) { return v < 0; };
    if (fn.size() == a->node_count() && fe.size() == a->edge_count() && std::none_of(fn.begin(), fn.end(), free) &&
        std::none_of(fe.begin(), fe.end(), free)) {
        // Fully determined: validate in place.
        for (std::size_t i = 0; i < fn.size(); ++i)
            if (b->node(fn[i]).type != a->node(static_cast<int>(i)).type)
                return;
        for (std::size_t i = 0; i < fe.size(); ++i) {
            const auto& x = a->edge(static_cast<int>(i));
            const auto& y = b->edge(fe[i]);
            if (y.type != x.type || y.source != fn[static_cast<std::size_t>(x.source)] ||
                y.target != fn[static_cast<std::size_t>(x.target)])
                return;
        }
        auto m = Morphism::trusted(a, b, fn, fe);
        if (!constraints.injective || m.is_injective())
            visit(m);
        return;
    }
    Search s(a, b, constraints, visit);
    s.node_step(0);
}

std::vector<Morphism> enumerate_morphisms(const GraphPtr& a, const GraphPtr& b, bool mono_only) {
    std::vector<Morphism> out;
    MorphismConstraints c;
    c.injective = mono_only;
    for_each_morphism(a, b, c, [&](const Morphism& m) {
        out.push_back(m);
        return true;
    });
    return out;
}

std::optional<Morphism> find_morphism(const GraphPtr& a, const GraphPtr& b, const MorphismConstraints& constraints) {
    std::optional<Morphism> found;
    for_each_morphism(a, b, constraints, [&](const Morphism& m) {
        found = m;
        return false;
    });
    return found;
}

std::size_t count_morphisms(const GraphPtr& a, const GraphPtr& b, const MorphismConstraints& constraints) {
    std::size_t n = 0;
    for_each_morphism(a, b, constraints, [&](const Morphism&) {
        ++n;
        return true;
    });
    return n;
}

std::optional<MorphismConstraints> extension_constraints(const Morphism& p, const Morphism& q, bool injective) {
    if (!same_graph(p.domain(), q.domain()))
        throw Error("extension: p and q have different domains");
    MorphismConstraints c;
    c.injective = injective;
    c.fixed_nodes.assign(p.codomain()->node_count(), -1);
    c.fixed_edges.assign(p.codomain()->edge_count(), -1);
    for (std::size_t i = 0; i < p.node_map().size(); ++i) {
        int& slot = c.fixed_nodes[static_cast<std::size_t>(p.node_map()[i])];
        if (slot >= 0 && slot != q.node_map()[i])
            return std::nullopt;
        slot = q.node_map()[i];
    }
    for (std::size_t i = 0; i < p.edge_map().size(); ++i) {
        int& slot = c.fixed_edges[static_cast<std::size_t>(p.edge_map()[i])];
        if (slot >= 0 && slot != q.edge_map()[i])
            return std::nullopt;
        slot = q.edge_map()[i];
    }
    return c;
}

void for_each_extension(const Morphism& p, const Morphism& q, bool injective,
                        const std::function<bool(const Morphism&)>& visit) {
    auto c = extension_constraints(p, q, injective);
    if (!c)
        return;
    for_each_morphism(p.codomain(), q.codomain(), *c, visit);
}

std::string graph_invariant(const TypedGraph& g) {
    std::size_t ne = g.types()->edge_types().size();
    std::vector<std::vector<int>> rows;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        std::vector<int> row(1 + 2 * ne, 0);
        row[0] = g.node(static_cast<int>(i)).type;
        for (int e : g.out_edges(static_cast<int>(i)))
            ++row[1 + static_cast<std::size_t>(g.edge(e).type)];
        for (int e : g.in_edges(static_cast<int>(i)))
            ++row[1 + ne + static_cast<std::size_t>(g.edge(e).type)];
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end());
    std::ostringstream os;
    os << g.node_count() << "/" << g.edge_count() << ":";
    for (const auto& r : rows) {
        for (int v : r)
            os << v << ".";
        os << ";";
    }
    return os.str();
}

std::optional<Morphism> are_isomorphic(const GraphPtr& a, const GraphPtr& b) {
    if (a->node_count() != b->node_count() || a->edge_count() != b->edge_count())
        return std::nullopt;
    if (graph_invariant(*a) != graph_invariant(*b))
        return std::nullopt;
    MorphismConstraints c;
    c.injective = true;
    return find_morphism(a, b, c);
}

std::optional<Morphism> factor_through_mono(const Morphism& g, const Morphism& f) {
    if (!same_graph(g.codomain(), f.codomain()))
        throw Error("factor_through_mono: codomains differ");
    std::vector<int> inv_n(f.codomain()->node_count(), -1), inv_e(f.codomain()->edge_count(), -1);
    for (std::size_t i = 0; i < f.node_map().size(); ++i)
        inv_n[static_cast<std::size_t>(f.node_map()[i])] = static_cast<int>(i);
    for (std::size_t i = 0; i < f.edge_map().size(); ++i)
        inv_e[static_cast<std::size_t>(f.edge_map()[i])] = static_cast<int>(i);
    std::vector<int> n(g.node_map().size()), e(g.edge_map().size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        n[i] = inv_n[static_cast<std::size_t>(g.node_map()[i])];
        if (n[i] < 0)
            return std::nullopt;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = inv_e[static_cast<std::size_t>(g.edge_map()[i])];
        if (e[i] < 0)
            return std::nullopt;
    }
    return Morphism::trusted(g.domain(), f.domain(), std::move(n), std::move(e));
}

}  // namespace essentia
