#include "essentia/category.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace essentia {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (a < b)
            parent[static_cast<std::size_t>(b)] = a;
        else
            parent[static_cast<std::size_t>(a)] = b;
    }
};

// Disjoint union of parts with global numbering of nodes and edges.
struct Layout {
    std::vector<GraphPtr> parts;
    std::vector<int> node_offset;
    std::vector<int> edge_offset;
    int nodes = 0;
    int edges = 0;

    explicit Layout(std::vector<GraphPtr> ps) : parts(std::move(ps)) {
        for (const auto& p : parts) {
            node_offset.push_back(nodes);
            edge_offset.push_back(edges);
            nodes += static_cast<int>(p->node_count());
            edges += static_cast<int>(p->edge_count());
        }
    }
    const Node& node(int g) const {
        for (std::size_t p = parts.size(); p-- > 0;)
            if (g >= node_offset[p] && g < node_offset[p] + static_cast<int>(parts[p]->node_count()))
                return parts[p]->node(g - node_offset[p]);
        throw Error("layout: node out of range");
    }
    const Edge& edge(int g, int* part = nullptr) const {
        for (std::size_t p = parts.size(); p-- > 0;)
            if (g >= edge_offset[p] && g < edge_offset[p] + static_cast<int>(parts[p]->edge_count())) {
                if (part)
                    *part = static_cast<int>(p);
                return parts[p]->edge(g - edge_offset[p]);
            }
        throw Error("layout: edge out of range");
    }
    int global_source(int g) const {
        int p = 0;
        const auto& e = edge(g, &p);
        return node_offset[static_cast<std::size_t>(p)] + e.source;
    }
    int global_target(int g) const {
        int p = 0;
        const auto& e = edge(g, &p);
        return node_offset[static_cast<std::size_t>(p)] + e.target;
    }
};

// Builds the quotient graph of a layout given a class representative per global node/edge.
// Classes are numbered by first occurrence, which fixes a canonical element order.
std::vector<Morphism> build_quotient(const Layout& lay, const std::vector<int>& node_class,
                                     const std::vector<int>& edge_class, const std::string& name) {
    const auto& types = lay.parts.front()->types();
    GraphBuilder gb(types, name);
    std::map<int, int> node_index, edge_index;
    std::vector<std::vector<int>> node_members, edge_members;
    for (int g = 0; g < lay.nodes; ++g) {
        auto [it, fresh] = node_index.emplace(node_class[static_cast<std::size_t>(g)], static_cast<int>(node_members.size()));
        if (fresh)
            node_members.emplace_back();
        node_members[static_cast<std::size_t>(it->second)].push_back(g);
    }
    for (int g = 0; g < lay.edges; ++g) {
        auto [it, fresh] = edge_index.emplace(edge_class[static_cast<std::size_t>(g)], static_cast<int>(edge_members.size()));
        if (fresh)
            edge_members.emplace_back();
        edge_members[static_cast<std::size_t>(it->second)].push_back(g);
    }
    for (const auto& members : node_members) {
        std::string id;
        for (int g : members)
            id = join_ids(id, lay.node(g).id);
        gb.add_node(gb.fresh_node_id(id), lay.node(members.front()).type);
    }
    for (const auto& members : edge_members) {
        std::string id;
        for (int g : members)
            id = join_ids(id, lay.edge(g).id);
        int g = members.front();
        int s = node_index.at(node_class[static_cast<std::size_t>(lay.global_source(g))]);
        int t = node_index.at(node_class[static_cast<std::size_t>(lay.global_target(g))]);
        gb.add_edge(gb.fresh_edge_id(id), lay.edge(g).type, s, t);
    }
    auto q = gb.build();
    std::vector<Morphism> legs;
    for (std::size_t p = 0; p < lay.parts.size(); ++p) {
        const auto& part = lay.parts[p];
        std::vector<int> n(part->node_count()), e(part->edge_count());
        for (std::size_t i = 0; i < n.size(); ++i)
            n[i] = node_index.at(node_class[static_cast<std::size_t>(lay.node_offset[p] + static_cast<int>(i))]);
        for (std::size_t i = 0; i < e.size(); ++i)
            e[i] = edge_index.at(edge_class[static_cast<std::size_t>(lay.edge_offset[p] + static_cast<int>(i))]);
        legs.push_back(Morphism::trusted(part, q, std::move(n), std::move(e)));
    }
    return legs;
}

std::vector<Morphism> glue(const Layout& lay, UnionFind& nodes, UnionFind& edges, const std::string& name) {
    std::vector<int> nc(static_cast<std::size_t>(lay.nodes)), ec(static_cast<std::size_t>(lay.edges));
    for (int g = 0; g < lay.nodes; ++g)
        nc[static_cast<std::size_t>(g)] = nodes.find(g);
    for (int g = 0; g < lay.edges; ++g)
        ec[static_cast<std::size_t>(g)] = edges.find(g);
    return build_quotient(lay, nc, ec, name);
}

}  // namespace

Pullback pullback(const Morphism& f, const Morphism& g) {
    if (!same_graph(f.codomain(), g.codomain()))
        throw Error("pullback: codomains differ");
    const auto& A = *f.domain();
    const auto& B = *g.domain();
    GraphBuilder gb(A.types(), "pb");
    std::vector<int> na, nb, ea, eb;
    std::map<std::pair<int, int>, int> index;
    for (std::size_t x = 0; x < A.node_count(); ++x)
        for (std::size_t y = 0; y < B.node_count(); ++y)
            if (f.node(static_cast<int>(x)) == g.node(static_cast<int>(y))) {
                std::string id = join_ids(A.node(static_cast<int>(x)).id, B.node(static_cast<int>(y)).id);
                index[{static_cast<int>(x), static_cast<int>(y)}] =
                    gb.add_node(gb.fresh_node_id(id), A.node(static_cast<int>(x)).type);
                na.push_back(static_cast<int>(x));
                nb.push_back(static_cast<int>(y));
            }
    for (std::size_t x = 0; x < A.edge_count(); ++x)
        for (std::size_t y = 0; y < B.edge_count(); ++y)
            if (f.edge(static_cast<int>(x)) == g.edge(static_cast<int>(y))) {
                const auto& ex = A.edge(static_cast<int>(x));
                const auto& ey = B.edge(static_cast<int>(y));
                std::string id = join_ids(ex.id, ey.id);
                gb.add_edge(gb.fresh_edge_id(id), ex.type, index.at({ex.source, ey.source}),
                            index.at({ex.target, ey.target}));
                ea.push_back(static_cast<int>(x));
                eb.push_back(static_cast<int>(y));
            }
    auto p = gb.build();
    return {p, Morphism::trusted(p, f.domain(), na, ea), Morphism::trusted(p, g.domain(), nb, eb)};
}

bool is_pullback(const Morphism& f, const Morphism& g, const Morphism& pa, const Morphism& pb) {
    if (compose(pa, f) != compose(pb, g))
        return false;
    const auto& P = *pa.domain();
    const auto& A = *f.domain();
    const auto& B = *g.domain();
    std::map<std::pair<int, int>, int> seen;
    for (std::size_t i = 0; i < P.node_count(); ++i)
        if (!seen.emplace(std::make_pair(pa.node(static_cast<int>(i)), pb.node(static_cast<int>(i))), 0).second)
            return false;
    std::size_t expected = 0;
    for (std::size_t x = 0; x < A.node_count(); ++x)
        for (std::size_t y = 0; y < B.node_count(); ++y)
            if (f.node(static_cast<int>(x)) == g.node(static_cast<int>(y)))
                ++expected;
    if (expected != P.node_count())
        return false;
    std::map<std::pair<int, int>, int> seen_e;
    for (std::size_t i = 0; i < P.edge_count(); ++i)
        if (!seen_e.emplace(std::make_pair(pa.edge(static_cast<int>(i)), pb.edge(static_cast<int>(i))), 0).second)
            return false;
    expected = 0;
    for (std::size_t x = 0; x < A.edge_count(); ++x)
        for (std::size_t y = 0; y < B.edge_count(); ++y)
            if (f.edge(static_cast<int>(x)) == g.edge(static_cast<int>(y)))
                ++expected;
    return expected == P.edge_count();
}

Pushout pushout(const Morphism& f, const Morphism& g) {
    if (!same_graph(f.domain(), g.domain()))
        throw Error("pushout: domains differ");
    if (!f.is_injective() && !g.is_injective())
        throw Error("pushout: neither leg is injective");
    Layout lay({f.codomain(), g.codomain()});
    UnionFind nodes(static_cast<std::size_t>(lay.nodes)), edges(static_cast<std::size_t>(lay.edges));
    for (std::size_t x = 0; x < f.node_map().size(); ++x)
        nodes.unite(f.node(static_cast<int>(x)), lay.node_offset[1] + g.node(static_cast<int>(x)));
    for (std::size_t x = 0; x < f.edge_map().size(); ++x)
        edges.unite(f.edge(static_cast<int>(x)), lay.edge_offset[1] + g.edge(static_cast<int>(x)));
    auto legs = glue(lay, nodes, edges, "po");
    return {legs[0].codomain(), legs[0], legs[1]};
}

bool is_pushout(const Morphism& f, const Morphism& g, const Morphism& qb, const Morphism& qc) {
    if (compose(f, qb) != compose(g, qc))
        return false;
    auto po = pushout(f, g);
    // The comparison map from the canonical pushout must be an iso.
    std::vector<int> n(po.object->node_count(), -1), e(po.object->edge_count(), -1);
    auto fill = [](std::vector<int>& out, const Morphism& from, const Morphism& to, bool nodes) {
        const auto& src = nodes ? from.node_map() : from.edge_map();
        const auto& dst = nodes ? to.node_map() : to.edge_map();
        for (std::size_t i = 0; i < src.size(); ++i)
            out[static_cast<std::size_t>(src[i])] = dst[i];
    };
    fill(n, po.from_b, qb, true);
    fill(n, po.from_c, qc, true);
    fill(e, po.from_b, qb, false);
    fill(e, po.from_c, qc, false);
    auto h = Morphism::trusted(po.object, qb.codomain(), n, e);
    return h.is_iso();
}

std::optional<std::string> gluing_violation(const Morphism& l, const Morphism& m) {
    if (!same_graph(l.codomain(), m.domain()))
        throw Error("gluing: l and m are not composable");
    const auto& L = *m.domain();
    const auto& G = *m.codomain();
    std::vector<char> kept_n(L.node_count(), 0), kept_e(L.edge_count(), 0);
    for (int x : l.node_map())
        kept_n[static_cast<std::size_t>(x)] = 1;
    for (int y : l.edge_map())
        kept_e[static_cast<std::size_t>(y)] = 1;
    for (std::size_t x = 0; x < L.node_count(); ++x)
        for (std::size_t y = x + 1; y < L.node_count(); ++y)
            if (m.node(static_cast<int>(x)) == m.node(static_cast<int>(y)) && (!kept_n[x] || !kept_n[y]))
                return "identification: nodes " + L.node(static_cast<int>(x)).id + " and " +
                       L.node(static_cast<int>(y)).id + " are merged but one is deleted";
    for (std::size_t x = 0; x < L.edge_count(); ++x)
        for (std::size_t y = x + 1; y < L.edge_count(); ++y)
            if (m.edge(static_cast<int>(x)) == m.edge(static_cast<int>(y)) && (!kept_e[x] || !kept_e[y]))
                return "identification: edges " + L.edge(static_cast<int>(x)).id + " and " +
                       L.edge(static_cast<int>(y)).id + " are merged but one is deleted";
    std::vector<char> deleted_node(G.node_count(), 0), matched_edge(G.edge_count(), 0);
    for (std::size_t x = 0; x < L.node_count(); ++x)
        if (!kept_n[x])
            deleted_node[static_cast<std::size_t>(m.node(static_cast<int>(x)))] = 1;
    for (int y : m.edge_map())
        matched_edge[static_cast<std::size_t>(y)] = 1;
    for (std::size_t e = 0; e < G.edge_count(); ++e) {
        const auto& ge = G.edge(static_cast<int>(e));
        if (!matched_edge[e] && (deleted_node[static_cast<std::size_t>(ge.source)] ||
                                 deleted_node[static_cast<std::size_t>(ge.target)]))
            return "dangling: edge " + ge.id + " of " + G.name() + " is attached to a deleted node";
    }
    return std::nullopt;
}

std::optional<PushoutComplement> pushout_complement(const Morphism& l, const Morphism& m, std::string* violation) {
    if (!l.is_injective())
        throw Error("pushout complement: l is not injective");
    if (auto v = gluing_violation(l, m)) {
        if (violation)
            *violation = *v;
        return std::nullopt;
    }
    const auto& L = *m.domain();
    const auto& G = *m.codomain();
    std::vector<char> keep_n(G.node_count(), 1), keep_e(G.edge_count(), 1);
    std::vector<char> kept_n(L.node_count(), 0), kept_e(L.edge_count(), 0);
    for (int x : l.node_map())
        kept_n[static_cast<std::size_t>(x)] = 1;
    for (int y : l.edge_map())
        kept_e[static_cast<std::size_t>(y)] = 1;
    for (std::size_t x = 0; x < L.node_count(); ++x)
        if (!kept_n[x])
            keep_n[static_cast<std::size_t>(m.node(static_cast<int>(x)))] = 0;
    for (std::size_t y = 0; y < L.edge_count(); ++y)
        if (!kept_e[y])
            keep_e[static_cast<std::size_t>(m.edge(static_cast<int>(y)))] = 0;
    auto d = subgraph(m.codomain(), keep_n, keep_e, G.name() + "-ctx");
    auto k = factor_through_mono(compose(l, m), d);
    return PushoutComplement{d.domain(), *k, d};
}

InitialPushout initial_pushout(const Morphism& f) {
    if (!f.is_injective())
        throw Error("initial pushout: morphism is not injective");
    const auto& Ap = *f.domain();
    const auto& A = *f.codomain();
    std::vector<char> in_img_n(A.node_count(), 0), in_img_e(A.edge_count(), 0);
    for (int x : f.node_map())
        in_img_n[static_cast<std::size_t>(x)] = 1;
    for (int y : f.edge_map())
        in_img_e[static_cast<std::size_t>(y)] = 1;
    std::vector<char> boundary_a(A.node_count(), 0);
    for (std::size_t e = 0; e < A.edge_count(); ++e) {
        if (in_img_e[e])
            continue;
        const auto& ae = A.edge(static_cast<int>(e));
        if (in_img_n[static_cast<std::size_t>(ae.source)])
            boundary_a[static_cast<std::size_t>(ae.source)] = 1;
        if (in_img_n[static_cast<std::size_t>(ae.target)])
            boundary_a[static_cast<std::size_t>(ae.target)] = 1;
    }
    std::vector<char> keep_c_n(A.node_count(), 0), keep_c_e(A.edge_count(), 0);
    for (std::size_t x = 0; x < A.node_count(); ++x)
        keep_c_n[x] = !in_img_n[x] || boundary_a[x];
    for (std::size_t e = 0; e < A.edge_count(); ++e)
        keep_c_e[e] = !in_img_e[e];
    auto c = subgraph(f.codomain(), keep_c_n, keep_c_e, "C");
    std::vector<char> keep_b(Ap.node_count(), 0), no_edges(Ap.edge_count(), 0);
    for (std::size_t x = 0; x < Ap.node_count(); ++x)
        keep_b[x] = boundary_a[static_cast<std::size_t>(f.node(static_cast<int>(x)))];
    auto b = subgraph(f.domain(), keep_b, no_edges, "B");
    auto bc = factor_through_mono(compose(b, f), c);
    return {b.domain(), b, c.domain(), c, *bc};
}

Coproduct coproduct(const GraphPtr& a, const GraphPtr& b) {
    GraphBuilder gb(a->types(), a->name() + "+" + b->name());
    std::vector<int> an, ae, bn, be;
    for (const auto& n : a->nodes())
        an.push_back(gb.add_node(gb.fresh_node_id(n.id), n.type));
    for (const auto& n : b->nodes())
        bn.push_back(gb.add_node(gb.fresh_node_id(n.id), n.type));
    for (const auto& e : a->edges())
        ae.push_back(gb.add_edge(gb.fresh_edge_id(e.id), e.type, an[static_cast<std::size_t>(e.source)],
                                 an[static_cast<std::size_t>(e.target)]));
    for (const auto& e : b->edges())
        be.push_back(gb.add_edge(gb.fresh_edge_id(e.id), e.type, bn[static_cast<std::size_t>(e.source)],
                                 bn[static_cast<std::size_t>(e.target)]));
    auto s = gb.build();
    return {s, Morphism::trusted(a, s, an, ae), Morphism::trusted(b, s, bn, be)};
}

Morphism mediate(const Coproduct& sum, const Morphism& f, const Morphism& g) {
    if (!same_graph(f.codomain(), g.codomain()))
        throw Error("mediate: codomains differ");
    std::vector<int> n(sum.object->node_count()), e(sum.object->edge_count());
    for (std::size_t i = 0; i < f.node_map().size(); ++i)
        n[static_cast<std::size_t>(sum.in_a.node(static_cast<int>(i)))] = f.node(static_cast<int>(i));
    for (std::size_t i = 0; i < g.node_map().size(); ++i)
        n[static_cast<std::size_t>(sum.in_b.node(static_cast<int>(i)))] = g.node(static_cast<int>(i));
    for (std::size_t i = 0; i < f.edge_map().size(); ++i)
        e[static_cast<std::size_t>(sum.in_a.edge(static_cast<int>(i)))] = f.edge(static_cast<int>(i));
    for (std::size_t i = 0; i < g.edge_map().size(); ++i)
        e[static_cast<std::size_t>(sum.in_b.edge(static_cast<int>(i)))] = g.edge(static_cast<int>(i));
    return Morphism::trusted(sum.object, f.codomain(), n, e);
}

Morphism subgraph(const GraphPtr& g, const std::vector<char>& keep_nodes, const std::vector<char>& keep_edges,
                  const std::string& name) {
    GraphBuilder gb(g->types(), name.empty() ? g->name() : name);
    std::vector<int> index(g->node_count(), -1), n, e;
    for (std::size_t i = 0; i < g->node_count(); ++i)
        if (keep_nodes[i]) {
            index[i] = gb.add_node(g->node(static_cast<int>(i)).id, g->node(static_cast<int>(i)).type);
            n.push_back(static_cast<int>(i));
        }
    for (std::size_t i = 0; i < g->edge_count(); ++i) {
        if (!keep_edges[i])
            continue;
        const auto& ge = g->edge(static_cast<int>(i));
        int s = index[static_cast<std::size_t>(ge.source)];
        int t = index[static_cast<std::size_t>(ge.target)];
        if (s < 0 || t < 0)
            throw Error("subgraph: kept edge " + ge.id + " has a removed endpoint");
        gb.add_edge(ge.id, ge.type, s, t);
        e.push_back(static_cast<int>(i));
    }
    auto sub = gb.build();
    return Morphism::trusted(sub, g, n, e);
}

Morphism image_inclusion(const Morphism& f) {
    std::vector<char> n(f.codomain()->node_count(), 0), e(f.codomain()->edge_count(), 0);
    for (int x : f.node_map())
        n[static_cast<std::size_t>(x)] = 1;
    for (int y : f.edge_map())
        e[static_cast<std::size_t>(y)] = 1;
    return subgraph(f.codomain(), n, e, "img");
}

Factorization em_factorize(const Morphism& f, const Morphism& g) {
    if (!same_graph(f.codomain(), g.codomain()))
        throw Error("factorization: codomains differ");
    std::vector<char> n(f.codomain()->node_count(), 0), e(f.codomain()->edge_count(), 0);
    for (const auto* h : {&f, &g}) {
        for (int x : h->node_map())
            n[static_cast<std::size_t>(x)] = 1;
        for (int y : h->edge_map())
            e[static_cast<std::size_t>(y)] = 1;
    }
    auto m = subgraph(f.codomain(), n, e, "I");
    return {*factor_through_mono(f, m), *factor_through_mono(g, m), m};
}

// ---------------------------------------------------------------------------

namespace {

struct QuotientSearch {
    const QuotientProblem& pb;
    Layout lay;
    const std::function<bool(const std::vector<Morphism>&)>& visit;
    bool stopped = false;

    // Super-nodes: forced classes of global nodes.
    std::vector<int> super_of_node;
    std::vector<std::vector<int>> super_members;
    std::vector<int> super_type;
    std::vector<int> node_block_of_super;
    std::vector<std::vector<int>> block_supers;
    std::vector<std::vector<int>> block_mono_count;  // per block, per part

    std::vector<int> super_of_edge;
    std::vector<std::vector<int>> super_edge_members;

    QuotientSearch(const QuotientProblem& p, const std::function<bool(const std::vector<Morphism>&)>& v)
        : pb(p), lay(p.parts), visit(v) {}

    int part_of_node(int g) const {
        for (std::size_t q = pb.parts.size(); q-- > 0;)
            if (g >= lay.node_offset[q] && g < lay.node_offset[q] + static_cast<int>(pb.parts[q]->node_count()))
                return static_cast<int>(q);
        return -1;
    }
    int part_of_edge(int g) const {
        for (std::size_t q = pb.parts.size(); q-- > 0;)
            if (g >= lay.edge_offset[q] && g < lay.edge_offset[q] + static_cast<int>(pb.parts[q]->edge_count()))
                return static_cast<int>(q);
        return -1;
    }
    bool is_mono(int part) const {
        return static_cast<std::size_t>(part) < pb.mono.size() && pb.mono[static_cast<std::size_t>(part)];
    }

    // May global elements g and h share a class under the restrictions?
    bool allowed(int g, int h, bool edges) const {
        if (pb.restrictions.empty())
            return true;
        int pg = edges ? part_of_edge(g) : part_of_node(g);
        int ph = edges ? part_of_edge(h) : part_of_node(h);
        const auto& off = edges ? lay.edge_offset : lay.node_offset;
        for (const auto& r : pb.restrictions) {
            if (pg == r.a && ph == r.b) {
                const auto& set = edges ? r.edges : r.nodes;
                if (!set.count({g - off[static_cast<std::size_t>(pg)], h - off[static_cast<std::size_t>(ph)]}))
                    return false;
            } else if (pg == r.b && ph == r.a) {
                const auto& set = edges ? r.edges : r.nodes;
                if (!set.count({h - off[static_cast<std::size_t>(ph)], g - off[static_cast<std::size_t>(pg)]}))
                    return false;
            }
        }
        return true;
    }

    bool allowed_together(const std::vector<int>& xs, const std::vector<int>& ys, bool edges) const {
        if (pb.restrictions.empty())
            return true;
        for (int g : xs)
            for (int h : ys)
                if (!allowed(g, h, edges))
                    return false;
        return true;
    }

    bool prepare() {
        UnionFind uf(static_cast<std::size_t>(lay.nodes));
        UnionFind ue(static_cast<std::size_t>(lay.edges));
        for (const auto& [x, y] : pb.node_pairs)
            uf.unite(lay.node_offset[static_cast<std::size_t>(x.first)] + x.second,
                     lay.node_offset[static_cast<std::size_t>(y.first)] + y.second);
        for (const auto& [x, y] : pb.edge_pairs) {
            int gx = lay.edge_offset[static_cast<std::size_t>(x.first)] + x.second;
            int gy = lay.edge_offset[static_cast<std::size_t>(y.first)] + y.second;
            ue.unite(gx, gy);
            uf.unite(lay.global_source(gx), lay.global_source(gy));
            uf.unite(lay.global_target(gx), lay.global_target(gy));
        }
        std::map<int, int> idx;
        super_of_node.assign(static_cast<std::size_t>(lay.nodes), -1);
        for (int g = 0; g < lay.nodes; ++g) {
            auto [it, fresh] = idx.emplace(uf.find(g), static_cast<int>(super_members.size()));
            if (fresh) {
                super_members.emplace_back();
                super_type.push_back(lay.node(g).type);
            }
            if (super_type[static_cast<std::size_t>(it->second)] != lay.node(g).type)
                return false;
            super_members[static_cast<std::size_t>(it->second)].push_back(g);
            super_of_node[static_cast<std::size_t>(g)] = it->second;
        }
        for (const auto& members : super_members) {
            if (!allowed_together(members, members, false))
                return false;
            std::vector<int> cnt(pb.parts.size(), 0);
            for (int g : members) {
                int q = part_of_node(g);
                if (is_mono(q) && ++cnt[static_cast<std::size_t>(q)] > 1)
                    return false;
            }
        }
        std::map<int, int> eidx;
        super_of_edge.assign(static_cast<std::size_t>(lay.edges), -1);
        for (int g = 0; g < lay.edges; ++g) {
            auto [it, fresh] = eidx.emplace(ue.find(g), static_cast<int>(super_edge_members.size()));
            if (fresh)
                super_edge_members.emplace_back();
            super_edge_members[static_cast<std::size_t>(it->second)].push_back(g);
            super_of_edge[static_cast<std::size_t>(g)] = it->second;
        }
        for (const auto& members : super_edge_members) {
            if (!allowed_together(members, members, true))
                return false;
            std::vector<int> cnt(pb.parts.size(), 0);
            for (int g : members) {
                if (lay.edge(g).type != lay.edge(members.front()).type)
                    return false;
                int q = part_of_edge(g);
                if (is_mono(q) && ++cnt[static_cast<std::size_t>(q)] > 1)
                    return false;
            }
        }
        return true;
    }

    std::vector<int> mono_counts(int super) const {
        std::vector<int> cnt(pb.parts.size(), 0);
        for (int g : super_members[static_cast<std::size_t>(super)]) {
            int q = part_of_node(g);
            if (is_mono(q))
                ++cnt[static_cast<std::size_t>(q)];
        }
        return cnt;
    }

    void run() {
        if (!prepare())
            return;
        node_block_of_super.assign(super_members.size(), -1);
        node_step(0);
    }

    void node_step(std::size_t s) {
        if (stopped)
            return;
        if (s == super_members.size()) {
            edges_for_node_partition();
            return;
        }
        auto cnt = mono_counts(static_cast<int>(s));
        for (std::size_t b = 0; b < block_supers.size() && !stopped; ++b) {
            if (super_type[static_cast<std::size_t>(block_supers[b].front())] != super_type[s])
                continue;
            bool ok = true;
            for (std::size_t q = 0; q < cnt.size(); ++q)
                if (cnt[q] && block_mono_count[b][q]) {
                    ok = false;
                    break;
                }
            for (std::size_t k = 0; ok && k < block_supers[b].size(); ++k)
                ok = allowed_together(super_members[s],
                                      super_members[static_cast<std::size_t>(block_supers[b][k])], false);
            if (!ok)
                continue;
            block_supers[b].push_back(static_cast<int>(s));
            for (std::size_t q = 0; q < cnt.size(); ++q)
                block_mono_count[b][q] += cnt[q];
            node_block_of_super[s] = static_cast<int>(b);
            node_step(s + 1);
            for (std::size_t q = 0; q < cnt.size(); ++q)
                block_mono_count[b][q] -= cnt[q];
            block_supers[b].pop_back();
        }
        if (stopped)
            return;
        block_supers.push_back({static_cast<int>(s)});
        block_mono_count.push_back(cnt);
        node_block_of_super[s] = static_cast<int>(block_supers.size() - 1);
        node_step(s + 1);
        block_supers.pop_back();
        block_mono_count.pop_back();
    }

    // Edge super-classes must agree on endpoint blocks; then partition within (type, src, tgt) groups.
    std::vector<int> edge_super_src, edge_super_tgt;
    std::vector<int> edge_block_of_super;
    std::vector<std::vector<int>> eblock_supers;
    std::vector<std::vector<int>> eblock_mono_count;

    int node_block(int g) const {
        return node_block_of_super[static_cast<std::size_t>(super_of_node[static_cast<std::size_t>(g)])];
    }

    void edges_for_node_partition() {
        std::size_t n = super_edge_members.size();
        edge_super_src.assign(n, -1);
        edge_super_tgt.assign(n, -1);
        for (std::size_t s = 0; s < n; ++s) {
            for (int g : super_edge_members[s]) {
                int src = node_block(lay.global_source(g));
                int tgt = node_block(lay.global_target(g));
                if (edge_super_src[s] < 0) {
                    edge_super_src[s] = src;
                    edge_super_tgt[s] = tgt;
                } else if (edge_super_src[s] != src || edge_super_tgt[s] != tgt) {
                    return;
                }
            }
        }
        edge_block_of_super.assign(n, -1);
        eblock_supers.clear();
        eblock_mono_count.clear();
        edge_step(0);
    }

    std::vector<int> edge_mono_counts(int super) const {
        std::vector<int> cnt(pb.parts.size(), 0);
        for (int g : super_edge_members[static_cast<std::size_t>(super)]) {
            int q = part_of_edge(g);
            if (is_mono(q))
                ++cnt[static_cast<std::size_t>(q)];
        }
        return cnt;
    }

    void edge_step(std::size_t s) {
        if (stopped)
            return;
        if (s == super_edge_members.size()) {
            emit();
            return;
        }
        auto cnt = edge_mono_counts(static_cast<int>(s));
        int type = lay.edge(super_edge_members[s].front()).type;
        for (std::size_t b = 0; b < eblock_supers.size() && !stopped; ++b) {
            int rep = eblock_supers[b].front();
            if (lay.edge(super_edge_members[static_cast<std::size_t>(rep)].front()).type != type ||
                edge_super_src[static_cast<std::size_t>(rep)] != edge_super_src[s] ||
                edge_super_tgt[static_cast<std::size_t>(rep)] != edge_super_tgt[s])
                continue;
            bool ok = true;
            for (std::size_t q = 0; q < cnt.size(); ++q)
                if (cnt[q] && eblock_mono_count[b][q]) {
                    ok = false;
                    break;
                }
            for (std::size_t k = 0; ok && k < eblock_supers[b].size(); ++k)
                ok = allowed_together(super_edge_members[s],
                                      super_edge_members[static_cast<std::size_t>(eblock_supers[b][k])], true);
            if (!ok)
                continue;
            eblock_supers[b].push_back(static_cast<int>(s));
            for (std::size_t q = 0; q < cnt.size(); ++q)
                eblock_mono_count[b][q] += cnt[q];
            edge_block_of_super[s] = static_cast<int>(b);
            edge_step(s + 1);
            for (std::size_t q = 0; q < cnt.size(); ++q)
                eblock_mono_count[b][q] -= cnt[q];
            eblock_supers[b].pop_back();
        }
        if (stopped)
            return;
        eblock_supers.push_back({static_cast<int>(s)});
        eblock_mono_count.push_back(cnt);
        edge_block_of_super[s] = static_cast<int>(eblock_supers.size() - 1);
        edge_step(s + 1);
        eblock_supers.pop_back();
        eblock_mono_count.pop_back();
    }

    void emit() {
        std::vector<int> nc(static_cast<std::size_t>(lay.nodes)), ec(static_cast<std::size_t>(lay.edges));
        for (int g = 0; g < lay.nodes; ++g)
            nc[static_cast<std::size_t>(g)] = node_block(g);
        for (int g = 0; g < lay.edges; ++g)
            ec[static_cast<std::size_t>(g)] =
                edge_block_of_super[static_cast<std::size_t>(super_of_edge[static_cast<std::size_t>(g)])];
        auto legs = build_quotient(lay, nc, ec, pb.name.empty() ? "Q" : pb.name);
        if (!visit(legs))
            stopped = true;
    }
};

}  // namespace

void for_each_quotient(const QuotientProblem& problem,
                       const std::function<bool(const std::vector<Morphism>&)>& visit) {
    if (problem.parts.empty())
        throw Error("quotient of no parts");
    QuotientSearch s(problem, visit);
    s.run();
}

std::vector<Cospan> enumerate_jointly_epi_cospans(const GraphPtr& a, const GraphPtr& b, bool right_mono,
                                                  bool left_mono) {
    QuotientProblem p;
    p.parts = {a, b};
    p.mono = {left_mono, right_mono};
    p.name = a->name() + b->name();
    std::vector<Cospan> out;
    for_each_quotient(p, [&](const std::vector<Morphism>& legs) {
        out.push_back({legs[0], legs[1]});
        return true;
    });
    return out;
}

std::optional<Morphism> iso_under(const std::vector<Morphism>& x, const std::vector<Morphism>& y) {
    if (x.size() != y.size() || x.empty())
        throw Error("iso_under: mismatched families");
    const auto& X = x.front().codomain();
    const auto& Y = y.front().codomain();
    if (X->node_count() != Y->node_count() || X->edge_count() != Y->edge_count())
        return std::nullopt;
    MorphismConstraints c;
    c.injective = true;
    c.fixed_nodes.assign(X->node_count(), -1);
    c.fixed_edges.assign(X->edge_count(), -1);
    for (std::size_t k = 0; k < x.size(); ++k) {
        for (std::size_t i = 0; i < x[k].node_map().size(); ++i) {
            int& slot = c.fixed_nodes[static_cast<std::size_t>(x[k].node_map()[i])];
            if (slot >= 0 && slot != y[k].node_map()[i])
                return std::nullopt;
            slot = y[k].node_map()[i];
        }
        for (std::size_t i = 0; i < x[k].edge_map().size(); ++i) {
            int& slot = c.fixed_edges[static_cast<std::size_t>(x[k].edge_map()[i])];
            if (slot >= 0 && slot != y[k].edge_map()[i])
                return std::nullopt;
            slot = y[k].edge_map()[i];
        }
    }
    return find_morphism(X, Y, c);
}

}  // namespace essentia
