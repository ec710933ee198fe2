#include "essentia/oracle.hpp"

#include "essentia/calculus_check.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace essentia {

namespace {

using Pairs = std::vector<std::pair<int, int>>;
using Signature = std::pair<Pairs, Pairs>;

// Elements of L1 x L2 identified by the two matches.
Signature signature(const Morphism& m1, const Morphism& m2) {
    Signature s;
    const auto& a = *m1.domain();
    const auto& b = *m2.domain();
    for (int x = 0; x < static_cast<int>(a.node_count()); ++x)
        for (int y = 0; y < static_cast<int>(b.node_count()); ++y)
            if (m1.node(x) == m2.node(y))
                s.first.emplace_back(x, y);
    for (int x = 0; x < static_cast<int>(a.edge_count()); ++x)
        for (int y = 0; y < static_cast<int>(b.edge_count()); ++y)
            if (m1.edge(x) == m2.edge(y))
                s.second.emplace_back(x, y);
    return s;
}

// The same relation for an overlap, read off its match overlap. Embedding (m1, m2) forces the
// pullback of the matches to be this relation.
Signature signature(const RuleOverlap& ro) {
    auto mo = match_overlap(ro);
    Signature s;
    for (int i = 0; i < static_cast<int>(mo.to_l1.domain()->node_count()); ++i)
        s.first.emplace_back(mo.to_l1.node(i), mo.to_l2.node(i));
    for (int i = 0; i < static_cast<int>(mo.to_l1.domain()->edge_count()); ++i)
        s.second.emplace_back(mo.to_l1.edge(i), mo.to_l2.edge(i));
    std::sort(s.first.begin(), s.first.end());
    std::sort(s.second.begin(), s.second.end());
    return s;
}

Signature swapped(const Signature& s) {
    Signature out;
    for (auto [x, y] : s.first)
        out.first.emplace_back(y, x);
    for (auto [x, y] : s.second)
        out.second.emplace_back(y, x);
    std::sort(out.first.begin(), out.first.end());
    std::sort(out.second.begin(), out.second.end());
    return out;
}

// Structure of p: L -> P by indices only. Equal shapes have equal extension sets.
std::string shape(const Morphism& p) {
    std::string k;
    const auto& P = *p.codomain();
    for (const auto& n : P.nodes())
        k += std::to_string(n.type) + ",";
    k += "|";
    for (const auto& e : P.edges())
        k += std::to_string(e.type) + ":" + std::to_string(e.source) + ">" + std::to_string(e.target) + ",";
    k += "|";
    for (int v : p.node_map())
        k += std::to_string(v) + ",";
    k += "|";
    for (int v : p.edge_map())
        k += std::to_string(v) + ",";
    return k;
}

class Shapes {
public:
    int intern(const Morphism& p) {
        auto [it, fresh] = ids_.emplace(shape(p), static_cast<int>(ids_.size()));
        return it->second;
    }

private:
    std::map<std::string, int> ids_;
};

// Extensions along each interned shape, computed once per match.
class ExtensionCache {
public:
    explicit ExtensionCache(const Morphism& m) : m_(m) {}
    const Morphism& match() const { return m_; }
    const std::vector<Morphism>& get(int shape, const Morphism& p) {
        auto it = cache_.find(shape);
        if (it != cache_.end())
            return it->second;
        std::vector<Morphism> xs;
        for_each_extension(p, m_, false, [&](const Morphism& x) {
            xs.push_back(x);
            return true;
        });
        return cache_.emplace(shape, std::move(xs)).first->second;
    }

private:
    const Morphism& m_;
    std::map<int, std::vector<Morphism>> cache_;
};

struct Indexed {
    const RuleOverlap* overlap;
    int left_shape, right_shape;
    // Search from the right when only pL2 is an iso; `mirror` is then the flipped overlap.
    std::shared_ptr<RuleOverlap> mirror;
};

// (pa, pb) is injective into the pairs x(p) == y(q) and hits all of them; commutativity assumed.
template <class Pa, class Pb, class X, class Y>
bool jointly_pullback(int n, Pa pa, Pb pb, int np, int nq, X x, Y y) {
    std::set<std::pair<int, int>> seen;
    for (int a = 0; a < n; ++a)
        if (!seen.emplace(pa(a), pb(a)).second)
            return false;
    int expected = 0;
    for (int p = 0; p < np; ++p)
        for (int q = 0; q < nq; ++q)
            expected += x(p) == y(q);
    return expected == n;
}

bool is_pullback_by_index(const RuleOverlap& ro, const Morphism& x, const Morphism& y) {
    const auto& A = *ro.apex();
    const auto& Pj = *ro.Pj();
    const auto& Pi = *ro.Pi();
    return jointly_pullback(static_cast<int>(A.node_count()), [&](int a) { return ro.bj.node(a); },
                                 [&](int a) { return ro.bi.node(a); }, static_cast<int>(Pj.node_count()),
                                 static_cast<int>(Pi.node_count()), [&](int p) { return x.node(p); },
                                 [&](int q) { return y.node(q); }) &&
           jointly_pullback(static_cast<int>(A.edge_count()), [&](int a) { return ro.bj.edge(a); },
                                 [&](int a) { return ro.bi.edge(a); }, static_cast<int>(Pj.edge_count()),
                                 static_cast<int>(Pi.edge_count()), [&](int p) { return x.edge(p); },
                                 [&](int q) { return y.edge(q); });
}

// Every x, y along the legs with (bj, bi) a pullback of them. Each x pins y on the apex.
template <class Visit>
void embeddings_from_left(const RuleOverlap& ro, const std::vector<Morphism>& xs, const Morphism& m2, Visit&& visit) {
    if (xs.empty())
        return;
    auto base = extension_constraints(ro.pL2, m2, false);
    if (!base)
        return;
    const auto& A = *ro.apex();
    bool stop = false;
    for (const auto& x : xs) {
        auto c = *base;
        bool ok = true;
        for (int a = 0; ok && a < static_cast<int>(A.node_count()); ++a) {
            int& slot = c.fixed_nodes[static_cast<std::size_t>(ro.bi.node(a))];
            int want = x.node(ro.bj.node(a));
            ok = slot < 0 || slot == want;
            slot = want;
        }
        for (int a = 0; ok && a < static_cast<int>(A.edge_count()); ++a) {
            int& slot = c.fixed_edges[static_cast<std::size_t>(ro.bi.edge(a))];
            int want = x.edge(ro.bj.edge(a));
            ok = slot < 0 || slot == want;
            slot = want;
        }
        if (!ok)
            continue;
        for_each_morphism(ro.Pi(), m2.codomain(), c, [&](const Morphism& y) {
            if (is_pullback_by_index(ro, x, y) && !visit(x, y))
                stop = true;
            return !stop;
        });
        if (stop)
            return;
    }
}

// c1 and c2 hold the matches the legs pL1 and pL2 extend.
template <class Visit>
void for_each_embedding(const Indexed& e, ExtensionCache& c1, ExtensionCache& c2, Visit&& visit) {
    if (e.mirror)
        embeddings_from_left(*e.mirror, c2.get(e.right_shape, e.overlap->pL2), c1.match(),
                             [&](const Morphism& y, const Morphism& x) { return visit(x, y); });
    else
        embeddings_from_left(*e.overlap, c1.get(e.left_shape, e.overlap->pL1), c2.match(), visit);
}

bool embeds_cached(const Indexed& e, ExtensionCache& c1, ExtensionCache& c2) {
    bool found = false;
    for_each_embedding(e, c1, c2, [&](const Morphism&, const Morphism&) {
        found = true;
        return false;
    });
    return found;
}

// Node and edge images of one or two morphisms into the same graph.
struct Image {
    std::vector<int> nodes, edges;
    auto operator<=>(const Image&) const = default;
};

Image image_of(std::initializer_list<const Morphism*> fs) {
    Image im;
    for (const auto* f : fs) {
        im.nodes.insert(im.nodes.end(), f->node_map().begin(), f->node_map().end());
        im.edges.insert(im.edges.end(), f->edge_map().begin(), f->edge_map().end());
    }
    for (auto* v : {&im.nodes, &im.edges}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    return im;
}

class IsoSet {
public:
    bool insert(const GraphPtr& g) {
        auto& bucket = buckets_[graph_invariant(*g)];
        for (const auto& h : bucket)
            if (are_isomorphic(g, h))
                return false;
        bucket.push_back(g);
        return true;
    }

private:
    std::map<std::string, std::vector<GraphPtr>> buckets_;
};

struct Seed {
    GraphPtr graph;
    bool mono;
};

std::vector<Seed> seeds(const Rule& r) {
    std::vector<Seed> out{{r.L, false}};
    auto t = tree(r.ac);
    for (std::size_t i = 1; i < t.nodes.size(); ++i)
        out.push_back({t.nodes[i].graph, true});
    return out;
}

GraphBuilder copy_of(const GraphPtr& g) {
    GraphBuilder gb(g->types(), "G");
    for (const auto& n : g->nodes())
        gb.add_node(n.id, n.type);
    for (const auto& e : g->edges())
        gb.add_edge(e.id, e.type, e.source, e.target);
    return gb;
}

std::vector<GraphPtr> one_step(const GraphPtr& g, bool extra_edges) {
    std::vector<GraphPtr> out;
    const auto& types = *g->types();
    int nt = static_cast<int>(types.node_types().size());
    for (int t = 0; t < nt; ++t)
        for (int et = 0; et < static_cast<int>(types.edge_types().size()); ++et) {
            const auto& e = types.edge_types()[static_cast<std::size_t>(et)];
            for (int dir = 0; dir < 2; ++dir) {
                int mine = dir == 0 ? e.source : e.target;
                int other = dir == 0 ? e.target : e.source;
                if (mine != t)
                    continue;
                for (int v = 0; v < static_cast<int>(g->node_count()); ++v) {
                    if (g->node(v).type != other)
                        continue;
                    auto gb = copy_of(g);
                    int x = gb.add_node(gb.fresh_node_id("x"), t);
                    auto id = gb.fresh_edge_id("x");
                    if (dir == 0)
                        gb.add_edge(id, et, x, v);
                    else
                        gb.add_edge(id, et, v, x);
                    out.push_back(gb.build());
                }
            }
        }
    if (extra_edges)
        for (int et = 0; et < static_cast<int>(types.edge_types().size()); ++et) {
            const auto& e = types.edge_types()[static_cast<std::size_t>(et)];
            for (int s = 0; s < static_cast<int>(g->node_count()); ++s)
                for (int d = 0; d < static_cast<int>(g->node_count()); ++d)
                    if (g->node(s).type == e.source && g->node(d).type == e.target) {
                        auto gb = copy_of(g);
                        gb.add_edge(gb.fresh_edge_id("x"), et, s, d);
                        out.push_back(gb.build());
                    }
        }
    return out;
}

std::string describe_morphism(const Morphism& m) {
    std::string s;
    for (int i = 0; i < static_cast<int>(m.domain()->node_count()); ++i) {
        if (!s.empty())
            s += " ";
        s += m.domain()->node(i).id + "->" + m.codomain()->node(m.node(i)).id;
    }
    return s;
}

class Recorder {
public:
    Recorder(CheckReport& r, std::size_t cap) : r_(r), cap_(cap) {}
    void instance() { ++r_.instances; }
    void fail(const GraphPtr& host, const Morphism* m1, const Morphism* m2, std::string detail) {
        if (r_.failures++ >= cap_)
            return;
        Counterexample c;
        if (host)
            c.host = host->describe();
        if (m1)
            c.m1 = describe_morphism(*m1);
        if (m2)
            c.m2 = describe_morphism(*m2);
        c.detail = std::move(detail);
        r_.examples.push_back(std::move(c));
    }

private:
    CheckReport& r_;
    std::size_t cap_;
};

struct RefNode {
    GraphPtr graph;
    int parent = -1;
    Morphism arrow;
    ConditionTree::Binding binding = ConditionTree::Binding::Root;
    std::vector<int> children;
};

void walk(const CondPtr& c, int at, bool negated, std::vector<RefNode>& out) {
    using K = Condition::Kind;
    switch (c->kind()) {
    case K::True:
    case K::False:
        return;
    case K::Not:
        walk(c->body(), at, !negated, out);
        return;
    case K::And:
    case K::Or:
        for (const auto& ch : c->children())
            walk(ch, at, negated, out);
        return;
    case K::Exists:
    case K::Forall: {
        bool universal = (c->kind() == K::Forall) != negated;
        int me = static_cast<int>(out.size());
        out.push_back({c->arrow().codomain(), at, c->arrow(),
                       universal ? ConditionTree::Binding::Universal : ConditionTree::Binding::Existential, {}});
        out[static_cast<std::size_t>(at)].children.push_back(me);
        walk(c->body(), me, negated, out);
        return;
    }
    }
}

std::vector<int> ref_path(const std::vector<RefNode>& ns, int n) {
    std::vector<int> p;
    for (; n >= 0; n = ns[static_cast<std::size_t>(n)].parent)
        p.push_back(n);
    std::reverse(p.begin(), p.end());
    return p;
}

Morphism ref_arrow(const std::vector<RefNode>& ns, int from, int to) {
    Morphism m = Morphism::identity(ns[static_cast<std::size_t>(to)].graph);
    for (int n = to; n != from; n = ns[static_cast<std::size_t>(n)].parent)
        m = compose(ns[static_cast<std::size_t>(n)].arrow, m);
    return m;
}

bool realizable(const RuleOverlap& ro, const Rule& r1, const Rule& r2) {
    for (const auto& cs : enumerate_jointly_epi_cospans(ro.Pj(), ro.Pi(), !ro.pL2.is_iso(), !ro.pL1.is_iso()))
        if (is_pullback(cs.left, cs.right, ro.bj, ro.bi) &&
            applicable(r1, compose(ro.pL1, cs.left), MatchMode::AcDisregarding) &&
            applicable(r2, compose(ro.pL2, cs.right), MatchMode::AcDisregarding))
            return true;
    return false;
}

}  // namespace

const char* to_string(Check c) {
    switch (c) {
    case Check::Correctness: return "correctness";
    case Check::Completeness: return "completeness";
    case Check::Disjointness: return "disjointness";
    case Check::Composition: return "composition";
    case Check::Containment: return "containment";
    case Check::ConflictEmbedding: return "conflict-embedding";
    case Check::Reference: return "reference";
    case Check::ChurchRosser: return "church-rosser";
    }
    return "?";
}

std::vector<Check> all_checks() {
    return {Check::Correctness, Check::Completeness, Check::Disjointness, Check::Composition,
            Check::Containment, Check::ConflictEmbedding, Check::Reference, Check::ChurchRosser};
}

bool VerifyResult::passed() const {
    return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.passed(); });
}

const CheckReport& VerifyResult::report(Check c) const {
    for (const auto& r : reports)
        if (r.check == c)
            return r;
    throw Error(std::string("no report for ") + to_string(c));
}

std::vector<GraphPtr> enumerate_hosts(const Rule& r1, const Rule& r2, const HostLimits& limits) {
    if (limits.mode == HostMode::Bounded)
        return enumerate_graphs(r1.L->types(), limits.max_nodes, limits.max_edges);
    IsoSet seen;
    std::vector<GraphPtr> out, layer;
    for (const auto& s1 : seeds(r1))
        for (const auto& s2 : seeds(r2)) {
            QuotientProblem q;
            q.parts = {s1.graph, s2.graph};
            q.mono = {s1.mono, s2.mono};
            q.name = "G";
            for_each_quotient(q, [&](const std::vector<Morphism>& legs) {
                const auto& g = legs.front().codomain();
                if (seen.insert(g))
                    layer.push_back(g);
                return true;
            });
        }
    out = layer;
    for (int step = 0; step < limits.max_extra_nodes; ++step) {
        std::vector<GraphPtr> next;
        for (const auto& g : layer)
            for (auto& h : one_step(g, limits.extra_edges))
                if (seen.insert(h))
                    next.push_back(std::move(h));
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

std::vector<GraphPtr> random_hosts(const Rule& r1, const Rule& r2, std::size_t count, int steps, unsigned seed) {
    HostLimits base;
    base.max_extra_nodes = 0;
    auto gluings = enumerate_hosts(r1, r2, base);
    std::vector<GraphPtr> out;
    if (gluings.empty() || steps < 1)
        return out;
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    for (std::size_t k = 0; k < count; ++k) {
        auto g = gluings[pick(gluings.size())];
        int n = 1 + static_cast<int>(pick(static_cast<std::size_t>(steps)));
        for (int s = 0; s < n; ++s) {
            auto next = one_step(g, true);
            if (next.empty())
                break;
            g = next[pick(next.size())];
        }
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<RuleOverlap> reference_disabling_essences(const Rule& r1, const Rule& r2) {
    using B = ConditionTree::Binding;
    std::vector<RefNode> ns{{r2.L, -1, {}, B::Root, {}}};
    walk(r2.ac, 0, false, ns);
    std::vector<RuleOverlap> out;

    struct Level {
        Pullback overlap;
        Pullback kept;
        InitialPushout ipo;
    };
    // Every level of the path, lowest nontrivial one returned.
    auto levels = [&](const Morphism& leg, const Morphism& side, const Morphism& span, const std::vector<int>& path, int first)
        -> std::optional<std::pair<int, Level>> {
        std::vector<Level> all;
        for (int lv = first; lv < static_cast<int>(path.size()); ++lv) {
            auto e = compose(ref_arrow(ns, path[static_cast<std::size_t>(lv)], path.back()), span);
            Level L;
            L.overlap = pullback(side, e);
            L.kept = pullback(leg, L.overlap.to_a);
            L.ipo = initial_pushout(L.kept.to_b);
            all.push_back(std::move(L));
        }
        for (std::size_t k = 0; k < all.size(); ++k)
            if (!all[k].ipo.context->empty())
                return std::make_pair(first + static_cast<int>(k), all[k]);
        return std::nullopt;
    };

    std::vector<int> targets{0};
    for (int n = 1; n < static_cast<int>(ns.size()); ++n)
        if (ns[static_cast<std::size_t>(n)].children.empty())
            targets.push_back(n);
    for (int n : targets) {
        auto path = ref_path(ns, n);
        for (const auto& cs : enumerate_jointly_epi_cospans(r1.L, ns[static_cast<std::size_t>(n)].graph, n != 0)) {
            auto hit = levels(r1.l, cs.left, cs.right, path, 0);
            if (!hit)
                continue;
            int node = path[static_cast<std::size_t>(hit->first)];
            if (ns[static_cast<std::size_t>(node)].binding == B::Universal)
                continue;
            const auto& L = hit->second;
            RuleOverlap ro{L.overlap.to_a, L.overlap.to_b, Morphism::identity(r1.L), ref_arrow(ns, 0, node)};
            if (realizable(ro, r1, r2))
                out.push_back(std::move(ro));
        }
    }
    for (int n : targets) {
        if (n == 0)
            continue;
        auto path = ref_path(ns, n);
        for (const auto& cs : enumerate_jointly_epi_cospans(r1.R, ns[static_cast<std::size_t>(n)].graph, true)) {
            auto hit = levels(r1.r, cs.left, cs.right, path, 1);
            if (!hit)
                continue;
            int node = path[static_cast<std::size_t>(hit->first)];
            if (ns[static_cast<std::size_t>(node)].binding != B::Universal)
                continue;
            const auto& L = hit->second;
            auto pc = pushout_complement(L.kept.to_b, L.overlap.to_b);
            if (!pc)
                continue;
            auto anchor = factor_through_mono(ref_arrow(ns, 0, node), pc->d);
            if (!anchor)
                continue;
            RuleOverlap ro{compose(L.kept.to_a, r1.l), pc->k, Morphism::identity(r1.L), *anchor};
            if (realizable(ro, r1, r2))
                out.push_back(std::move(ro));
        }
    }
    return out;
}

VerifyResult verify_pair(const Rule& r1, const Rule& r2, const VerifyOptions& opts) {
    auto analysis = symbolic_conflict_essences(r1, r2, opts.engine);
    return verify_pair(analysis, enumerate_hosts(r1, r2, opts.hosts), opts);
}

VerifyResult verify_pair(const ConflictAnalysis& a, const std::vector<GraphPtr>& hosts, const VerifyOptions& opts) {
    const Rule& r1 = *a.r1;
    const Rule& r2 = *a.r2;
    VerifyResult res;
    res.r1 = r1.name;
    res.r2 = r2.name;
    res.hosts = hosts.size();
    std::map<Check, CheckReport> reports;
    std::map<Check, Recorder> rec;
    for (Check c : opts.checks) {
        reports[c].check = c;
        rec.emplace(c, Recorder(reports[c], opts.max_examples));
    }
    auto wants = [&](Check c) { return rec.count(c) > 0; };
    auto& R = rec;

    std::map<Signature, std::vector<int>> conf_index, fwd_index, bwd_index;
    Shapes shapes1, shapes2;
    auto indexed = [&](const RuleOverlap& ro, bool flip) {
        Indexed e = flip ? Indexed{&ro, shapes2.intern(ro.pL1), shapes1.intern(ro.pL2), nullptr}
                         : Indexed{&ro, shapes1.intern(ro.pL1), shapes2.intern(ro.pL2), nullptr};
        if (!ro.pL1.is_iso() && ro.pL2.is_iso())
            e.mirror = std::make_shared<RuleOverlap>(ro.flipped());
        return e;
    };
    std::vector<Indexed> conf_ix, fwd_ix, bwd_ix;
    for (const auto& ce : a.essences)
        conf_ix.push_back(indexed(ce.overlap, false));
    for (const auto& de : a.forward)
        fwd_ix.push_back(indexed(de.overlap, false));
    for (const auto& de : a.backward)
        bwd_ix.push_back(indexed(de.overlap, true));
    std::set<Signature> level0_fwd, level0_bwd, realized_fwd, realized_bwd;
    for (std::size_t i = 0; i < a.essences.size(); ++i)
        conf_index[signature(a.essences[i].overlap)].push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < a.forward.size(); ++i) {
        auto s = signature(a.forward[i].overlap);
        fwd_index[s].push_back(static_cast<int>(i));
        if (a.forward[i].kind == EssenceKind::Deletion && a.forward[i].level == 0)
            level0_fwd.insert(s);
    }
    for (std::size_t i = 0; i < a.backward.size(); ++i) {
        auto s = signature(a.backward[i].overlap);
        bwd_index[s].push_back(static_cast<int>(i));
        if (a.backward[i].kind == EssenceKind::Deletion && a.backward[i].level == 0)
            level0_bwd.insert(s);
    }
    std::map<std::pair<int, int>, int> record_of;
    std::map<int, std::vector<int>> records_by_result;
    for (std::size_t k = 0; k < a.compositions.size(); ++k) {
        const auto& c = a.compositions[k];
        record_of[{c.left, c.right}] = static_cast<int>(k);
        for (int r : c.results)
            records_by_result[r].push_back(static_cast<int>(k));
    }
    bool need_symbolic = wants(Check::Correctness);
    if (need_symbolic && a.symbolic.size() != a.essences.size())
        throw Error("verify: the analysis carries no symbolic essences");

    auto lookup = [](const std::map<Signature, std::vector<int>>& idx, const Signature& s) {
        static const std::vector<int> none;
        auto it = idx.find(s);
        return it == idx.end() ? none : it->second;
    };

    for (const auto& G : hosts) {
        auto ms1 = find_matches(r1, G, MatchMode::AcDisregarding);
        auto ms2 = find_matches(r2, G, MatchMode::AcDisregarding);
        if (ms1.empty() || ms2.empty())
            continue;
        std::vector<char> ac1, ac2;
        std::vector<Transformation> ts1, ts2;
        for (const auto& m : ms1) {
            ac1.push_back(satisfies(m, r1.ac));
            ts1.push_back(apply(r1, m));
        }
        for (const auto& m : ms2) {
            ac2.push_back(satisfies(m, r2.ac));
            ts2.push_back(apply(r2, m));
        }
        for (std::size_t p = 0; p < ms1.size(); ++p)
            for (std::size_t q = 0; q < ms2.size(); ++q) {
                const auto& m1 = ms1[p];
                const auto& m2 = ms2[q];
                const auto& t1 = ts1[p];
                const auto& t2 = ts2[q];
                bool with_ac = ac1[p] && ac2[q];
                ++res.pairs;
                res.ac_pairs += with_ac;
                auto v = parallel_independence(t1, t2);
                bool conflict = !v.independent();
                auto sig = signature(m1, m2);
                auto sig21 = swapped(sig);
                auto fail = [&](Check c, const std::string& why) { R.at(c).fail(G, &m1, &m2, why); };
                ExtensionCache c1(m1), c2(m2);

                std::vector<int> embedded;
                for (int i : lookup(conf_index, sig))
                    if (embeds_cached(conf_ix[static_cast<std::size_t>(i)], c1, c2))
                        embedded.push_back(i);
                std::set<int> emb(embedded.begin(), embedded.end());

                if (with_ac && wants(Check::Correctness)) {
                    R.at(Check::Correctness).instance();
                    bool claim = false;
                    for (int i : embedded)
                        if (embeds_symbolic(a.essences[static_cast<std::size_t>(i)],
                                            a.symbolic[static_cast<std::size_t>(i)], m1, m2)) {
                            claim = true;
                            break;
                        }
                    if (claim != conflict)
                        fail(Check::Correctness, std::string(to_string(v.classification())) +
                                                     (claim ? " but a conflict essence is satisfied"
                                                            : " but no conflict essence is satisfied"));
                }
                if (with_ac && wants(Check::ConflictEmbedding)) {
                    R.at(Check::ConflictEmbedding).instance();
                    if (conflict && embedded.empty())
                        fail(Check::ConflictEmbedding,
                             std::string(to_string(v.classification())) + " embeds no conflict essence");
                }
                if (with_ac && wants(Check::Completeness)) {
                    R.at(Check::Completeness).instance();
                    if (v.first_disables_second()) {
                        bool hit = false;
                        for (int i : lookup(fwd_index, sig))
                            if ((hit = embeds_cached(fwd_ix[static_cast<std::size_t>(i)], c1, c2)))
                                break;
                        if (!hit)
                            fail(Check::Completeness, r1.name + " disables " + r2.name + " without a disabling essence");
                    }
                    if (v.second_disables_first()) {
                        bool hit = false;
                        for (int i : lookup(bwd_index, sig21))
                            if ((hit = embeds_cached(bwd_ix[static_cast<std::size_t>(i)], c2, c1)))
                                break;
                        if (!hit)
                            fail(Check::Completeness, r2.name + " disables " + r1.name + " without a disabling essence");
                    }
                }
                if (wants(Check::Disjointness)) {
                    bool indep = v.ac_disregarding_independent();
                    for (int i : embedded) {
                        R.at(Check::Disjointness).instance();
                        bool acc = a.essences[static_cast<std::size_t>(i)].ac_conflicting;
                        if (acc != indep)
                            fail(Check::Disjointness, "essence " + std::to_string(i) +
                                                          (acc ? " is ac-conflicting but the pair is dependent"
                                                               : " is not ac-conflicting but the pair is independent"));
                    }
                }
                if (wants(Check::Composition)) {
                    for (int e : embedded) {
                        auto it = records_by_result.find(e);
                        if (it == records_by_result.end())
                            continue;
                        for (int k : it->second) {
                            const auto& c = a.compositions[static_cast<std::size_t>(k)];
                            R.at(Check::Composition).instance();
                            if (!emb.count(c.left) || !emb.count(c.right))
                                fail(Check::Composition, "composition of " + std::to_string(c.left) + " and " +
                                                             std::to_string(c.right) + " embeds without both of them");
                        }
                    }
                    for (std::size_t x = 0; x < embedded.size(); ++x)
                        for (std::size_t y = x + 1; y < embedded.size(); ++y) {
                            auto it = record_of.find({embedded[x], embedded[y]});
                            if (it == record_of.end())
                                continue;
                            const auto& c = a.compositions[static_cast<std::size_t>(it->second)];
                            // Each way of placing both constituents is the placement of one composition.
                            using Emb = std::pair<Image, Image>;
                            auto placements = [&](int i) {
                                std::vector<std::pair<Morphism, Morphism>> out;
                                for_each_embedding(conf_ix[static_cast<std::size_t>(i)], c1, c2,
                                                   [&](const Morphism& x, const Morphism& y) {
                                                       out.emplace_back(x, y);
                                                       return true;
                                                   });
                                return out;
                            };
                            std::set<Emb> composed;
                            for (int r : c.results)
                                if (emb.count(r))
                                    for (const auto& [x, y] : placements(r))
                                        composed.insert({image_of({&x}), image_of({&y})});
                            auto lefts = placements(c.left);
                            auto rights = placements(c.right);
                            for (const auto& [x1, y1] : lefts)
                                for (const auto& [x2, y2] : rights) {
                                    R.at(Check::Composition).instance();
                                    if (!composed.count({image_of({&x1, &x2}), image_of({&y1, &y2})})) {
                                        fail(Check::Composition, "essences " + std::to_string(c.left) + " and " +
                                                                     std::to_string(c.right) +
                                                                     " embed together but no composition covers them");
                                        break;
                                    }
                                }
                        }
                }
                if (wants(Check::Containment)) {
                    auto pb = pullback(m1, m2);
                    auto plain = [&](const Morphism& l, const Morphism& leg) {
                        return !initial_pushout(pullback(l, leg).to_b).context->empty();
                    };
                    R.at(Check::Containment).instance();
                    if (plain(r1.l, pb.to_a)) {
                        realized_fwd.insert(sig);
                        if (!level0_fwd.count(sig))
                            fail(Check::Containment, "plain essence of " + r1.name + " in " + r2.name + " is missing");
                    }
                    if (plain(r2.l, pb.to_b)) {
                        realized_bwd.insert(sig21);
                        if (!level0_bwd.count(sig21))
                            fail(Check::Containment, "plain essence of " + r2.name + " in " + r1.name + " is missing");
                    }
                }
                if (with_ac && wants(Check::ChurchRosser) && v.independent()) {
                    R.at(Check::ChurchRosser).instance();
                    try {
                        auto t12 = apply(r2, compose(*v.d1, t1.h));
                        auto t21 = apply(r1, compose(*v.d2, t2.h));
                        if (!are_isomorphic(t12.H(), t21.H()))
                            fail(Check::ChurchRosser, "the two sequences end in different graphs");
                    } catch (const Error& e) {
                        fail(Check::ChurchRosser, e.what());
                    }
                }
            }
    }

    if (wants(Check::Containment) && opts.hosts.mode == HostMode::Quotient && opts.gluings_included) {
        auto unrealized = [&](const std::set<Signature>& want, const std::set<Signature>& got, const std::string& dir) {
            for (const auto& s : want) {
                R.at(Check::Containment).instance();
                if (!got.count(s))
                    R.at(Check::Containment).fail(nullptr, nullptr, nullptr, "a level-0 essence of " + dir + " is never a plain essence");
            }
        };
        unrealized(level0_fwd, realized_fwd, r1.name + " in " + r2.name);
        unrealized(level0_bwd, realized_bwd, r2.name + " in " + r1.name);
    }

    if (wants(Check::Composition)) {
        // Every composition at its own gluing: both constituents have to be there as well.
        for (const auto& c : a.compositions)
            for (int r : c.results) {
                const auto& co = a.essences[static_cast<std::size_t>(r)].overlap;
                std::optional<Pushout> D;
                try {
                    D = pushout(co.bj, co.bi);
                } catch (const Error&) {
                    continue;
                }
                auto m1 = compose(co.pL1, D->from_b);
                auto m2 = compose(co.pL2, D->from_c);
                if (!applicable(r1, m1, MatchMode::AcDisregarding) || !applicable(r2, m2, MatchMode::AcDisregarding))
                    continue;
                R.at(Check::Composition).instance();
                ExtensionCache c1(m1), c2(m2);
                bool ok = embeds_cached(conf_ix[static_cast<std::size_t>(r)], c1, c2);
                for (int part : {c.left, c.right})
                    ok = ok && embeds_cached(conf_ix[static_cast<std::size_t>(part)], c1, c2);
                if (!ok)
                    R.at(Check::Composition).fail(D->object, &m1, &m2,
                        "composition of " + std::to_string(c.left) + " and " + std::to_string(c.right) +
                            " is not matched by its constituents at its own gluing");
            }
    }

    if (wants(Check::Reference)) {
        auto compare = [&](const std::vector<DisablingEssence>& engine, const Rule& x, const Rule& y) {
            auto ref = reference_disabling_essences(x, y);
            auto covered = [](const RuleOverlap& ro, const std::vector<RuleOverlap>& pool) {
                return std::any_of(pool.begin(), pool.end(),
                                   [&](const RuleOverlap& o) { return overlaps_isomorphic(ro, o); });
            };
            std::vector<RuleOverlap> mine;
            for (const auto& de : engine)
                mine.push_back(de.overlap);
            for (std::size_t i = 0; i < mine.size(); ++i) {
                R.at(Check::Reference).instance();
                if (!covered(mine[i], ref))
                    R.at(Check::Reference).fail(nullptr, nullptr, nullptr,
                        "essence " + std::to_string(i) + " of " + x.name + " in " + y.name + " (" +
                            engine[i].target() + ") is not derived by the reference");
            }
            for (const auto& ro : ref) {
                R.at(Check::Reference).instance();
                if (!covered(ro, mine))
                    R.at(Check::Reference).fail(nullptr, nullptr, nullptr,
                        "reference essence of " + x.name + " in " + y.name + " over " + ro.apex()->describe() +
                            " is missing");
            }
        };
        compare(a.forward, r1, r2);
        compare(a.backward, r2, r1);
    }

    for (Check c : opts.checks)
        res.reports.push_back(reports[c]);
    return res;
}

}  // namespace essentia
