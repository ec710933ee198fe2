#include "essentia/calculus_check.hpp"

#include <functional>
#include <map>

namespace essentia {

TypeGraphPtr two_type_system() {
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

std::vector<GraphPtr> enumerate_graphs(const TypeGraphPtr& types, int max_nodes, int max_edges) {
    std::vector<GraphPtr> out;
    std::map<std::string, std::vector<GraphPtr>> buckets;
    int nt = static_cast<int>(types->node_types().size());
    std::vector<int> typing;
    std::function<void(int, int)> typings = [&](int n, int min_type) {
        if (static_cast<int>(typing.size()) == n) {
            struct Slot {
                int type, s, t;
            };
            std::vector<Slot> slots;
            for (int et = 0; et < static_cast<int>(types->edge_types().size()); ++et)
                for (int s = 0; s < n; ++s)
                    for (int t = 0; t < n; ++t) {
                        const auto& e = types->edge_types()[static_cast<std::size_t>(et)];
                        if (typing[static_cast<std::size_t>(s)] == e.source && typing[static_cast<std::size_t>(t)] == e.target)
                            slots.push_back({et, s, t});
                    }
            std::vector<int> chosen;
            std::function<void(int)> edges = [&](int from) {
                GraphBuilder gb(types, "G");
                for (int i = 0; i < n; ++i)
                    gb.add_node("v" + std::to_string(i), typing[static_cast<std::size_t>(i)]);
                for (std::size_t k = 0; k < chosen.size(); ++k) {
                    const auto& s = slots[static_cast<std::size_t>(chosen[k])];
                    gb.add_edge("f" + std::to_string(k), s.type, s.s, s.t);
                }
                auto g = gb.build();
                auto& bucket = buckets[graph_invariant(*g)];
                bool fresh = true;
                for (const auto& h : bucket)
                    if (are_isomorphic(g, h)) {
                        fresh = false;
                        break;
                    }
                if (fresh) {
                    bucket.push_back(g);
                    out.push_back(g);
                }
                if (static_cast<int>(chosen.size()) == max_edges)
                    return;
                for (int i = from; i < static_cast<int>(slots.size()); ++i) {
                    chosen.push_back(i);
                    edges(i);
                    chosen.pop_back();
                }
            };
            edges(0);
            return;
        }
        for (int t = min_type; t < nt; ++t) {
            typing.push_back(t);
            typings(n, t);
            typing.pop_back();
        }
    };
    for (int n = 0; n <= max_nodes; ++n)
        typings(n, 0);
    return out;
}

std::vector<Morphism> single_step_extensions(const GraphPtr& g) {
    const auto& types = g->types();
    std::vector<Morphism> out;
    auto copy = [&](GraphBuilder& gb) {
        for (const auto& n : g->nodes())
            gb.add_node(n.id, n.type);
        for (const auto& e : g->edges())
            gb.add_edge(e.id, e.type, e.source, e.target);
    };
    auto inclusion = [&](const GraphPtr& h) {
        std::vector<int> n(g->node_count()), e(g->edge_count());
        for (std::size_t i = 0; i < n.size(); ++i)
            n[i] = static_cast<int>(i);
        for (std::size_t i = 0; i < e.size(); ++i)
            e[i] = static_cast<int>(i);
        out.push_back(Morphism(g, h, n, e));
    };
    int serial = static_cast<int>(g->node_count());
    std::string base = g->name().empty() ? "P" : g->name();
    for (int t = 0; t < static_cast<int>(types->node_types().size()); ++t) {
        GraphBuilder gb(types, base + "+" + types->node_types()[static_cast<std::size_t>(t)]);
        copy(gb);
        gb.add_node(gb.fresh_node_id("u" + std::to_string(serial)), t);
        inclusion(gb.build());
    }
    for (int et = 0; et < static_cast<int>(types->edge_types().size()); ++et) {
        const auto& ty = types->edge_types()[static_cast<std::size_t>(et)];
        for (std::size_t s = 0; s < g->node_count(); ++s)
            for (std::size_t t = 0; t < g->node_count(); ++t) {
                if (g->node(static_cast<int>(s)).type != ty.source || g->node(static_cast<int>(t)).type != ty.target)
                    continue;
                GraphBuilder gb(types, base + "+" + ty.name);
                copy(gb);
                gb.add_edge(gb.fresh_edge_id("f" + std::to_string(g->edge_count())), et, static_cast<int>(s),
                            static_cast<int>(t));
                inclusion(gb.build());
            }
        // New node attached by one edge, on either end, or carrying a loop.
        for (int side = 0; side < 3; ++side) {
            int new_type = side == 1 ? ty.target : ty.source;
            if (side == 2 && ty.source != ty.target)
                continue;
            for (std::size_t other = 0; other < (side == 2 ? 1 : g->node_count()); ++other) {
                if (side == 0 && g->node(static_cast<int>(other)).type != ty.target)
                    continue;
                if (side == 1 && g->node(static_cast<int>(other)).type != ty.source)
                    continue;
                GraphBuilder gb(types, base + "+" + ty.name + "*");
                copy(gb);
                int u = gb.add_node(gb.fresh_node_id("u" + std::to_string(serial)), new_type);
                std::string eid = gb.fresh_edge_id("f" + std::to_string(g->edge_count()));
                if (side == 0)
                    gb.add_edge(eid, et, u, static_cast<int>(other));
                else if (side == 1)
                    gb.add_edge(eid, et, static_cast<int>(other), u);
                else
                    gb.add_edge(eid, et, u, u);
                inclusion(gb.build());
            }
        }
    }
    return out;
}

std::vector<CondPtr> small_conditions(const GraphPtr& root, int depth) {
    std::function<std::vector<CondPtr>(const GraphPtr&, int)> quantified = [&](const GraphPtr& p, int d) {
        std::vector<CondPtr> out;
        if (d <= 0)
            return out;
        for (const auto& a : single_step_extensions(p)) {
            out.push_back(Condition::exists(a));
            out.push_back(Condition::forall(a, Condition::make_false(a.codomain())));
            for (const auto& body : quantified(a.codomain(), d - 1)) {
                out.push_back(Condition::exists(a, body));
                out.push_back(Condition::forall(a, body));
            }
        }
        return out;
    };
    std::vector<CondPtr> out{Condition::make_true(root)};
    auto q = quantified(root, depth);
    out.insert(out.end(), q.begin(), q.end());
    auto flat = quantified(root, 1);
    for (std::size_t i = 0; i + 1 < flat.size(); i += 3) {
        out.push_back(Condition::conj(root, {flat[i], flat[i + 1]}));
        out.push_back(Condition::disj(root, {flat[i], Condition::negate(flat[i + 1])}));
    }
    return out;
}

namespace {

GraphPtr small(const std::string& name, const std::vector<std::pair<std::string, std::string>>& nodes,
               const std::vector<std::tuple<std::string, std::string, std::string>>& edges) {
    GraphBuilder gb(two_type_system(), name);
    for (const auto& [id, type] : nodes)
        gb.add_node(id, type);
    int k = 0;
    for (const auto& [type, s, t] : edges)
        gb.add_edge("r" + std::to_string(k++), type, s, t);
    return gb.build();
}

Morphism by_ids(const GraphPtr& a, const GraphPtr& b, const std::vector<std::string>& node_targets) {
    std::vector<int> n;
    for (const auto& id : node_targets)
        n.push_back(b->node_index(id));
    MorphismConstraints c;
    c.fixed_nodes = n;
    auto m = find_morphism(a, b, c);
    if (!m)
        throw Error("calculus check: no morphism " + a->name() + " -> " + b->name());
    return *m;
}

std::string witness(const std::string& what, const CondPtr& c, const Morphism& m) {
    return what + " c=" + pretty(c) + " at " + m.describe() + " into " + m.codomain()->describe();
}

}  // namespace

CalculusReport check_shift_soundness(const CalculusLimits& limits) {
    CalculusReport rep;
    rep.name = "shift";
    auto x = small("x", {{"x", "X"}}, {});
    auto xy = small("xy", {{"x", "X"}, {"y", "Y"}}, {{"e", "x", "y"}});
    auto xy_plain = small("x.y", {{"x", "X"}, {"y", "Y"}}, {});
    auto xloop = small("xs", {{"x", "X"}}, {{"s", "x", "x"}});
    auto xx = small("xx", {{"x", "X"}, {"x2", "X"}}, {});
    auto xyy = small("xyy", {{"x", "X"}, {"y", "Y"}, {"y2", "Y"}}, {{"e", "x", "y"}, {"e", "x", "y2"}});
    std::vector<Morphism> bs{
        by_ids(x, xy, {"x"}),            by_ids(x, xloop, {"x"}),        by_ids(xx, x, {"x", "x"}),
        by_ids(xy, xyy, {"x", "y"}),     by_ids(xy_plain, xy, {"x", "y"}), by_ids(xx, xx, {"x2", "x"}),
        by_ids(xy, xyy, {"x", "y2"}),
    };
    auto hosts = enumerate_graphs(two_type_system(), limits.host_nodes, limits.host_edges);
    for (const auto& b : bs) {
        for (const auto& c : small_conditions(b.domain(), limits.depth)) {
            auto shifted = shift(b, c);
            for (const auto& g : hosts)
                for (const auto& q : enumerate_morphisms(b.codomain(), g, false)) {
                    ++rep.instances;
                    bool lhs = satisfies(compose(b, q), c);
                    bool rhs = satisfies(q, shifted);
                    if (lhs != rhs)
                        rep.record(witness("shift along " + b.describe(), c, q));
                }
        }
    }
    return rep;
}

CalculusReport check_left_soundness(const CalculusLimits& limits) {
    CalculusReport rep;
    rep.name = "left";
    struct ToyRule {
        GraphPtr L, K, R;
        std::vector<std::string> kl, kr;
    };
    std::vector<ToyRule> rules;
    {
        auto L = small("L", {{"x", "X"}, {"y", "Y"}}, {{"e", "x", "y"}});
        auto K = small("K", {{"x", "X"}, {"y", "Y"}}, {});
        rules.push_back({L, K, K, {"x", "y"}, {"x", "y"}});
    }
    {
        auto L = small("L", {{"x", "X"}, {"y", "Y"}}, {{"e", "x", "y"}});
        auto K = small("K", {{"x", "X"}}, {});
        rules.push_back({L, K, K, {"x"}, {"x"}});
    }
    {
        auto K = small("K", {{"x", "X"}}, {});
        auto R = small("R", {{"x", "X"}, {"y", "Y"}}, {{"e", "x", "y"}});
        rules.push_back({K, K, R, {"x"}, {"x"}});
    }
    {
        auto L = small("L", {{"x", "X"}}, {{"s", "x", "x"}});
        auto K = small("K", {{"x", "X"}}, {});
        auto R = small("R", {{"x", "X"}, {"y", "Y"}}, {{"e", "x", "y"}});
        rules.push_back({L, K, R, {"x"}, {"x"}});
    }
    {
        auto K = small("K", {{"x", "X"}, {"x2", "X"}}, {});
        auto R = small("R", {{"x", "X"}, {"x2", "X"}}, {{"s", "x", "x2"}});
        rules.push_back({K, K, R, {"x", "x2"}, {"x", "x2"}});
    }
    {
        auto L = small("L", {{"x", "X"}, {"x2", "X"}}, {});
        auto K = small("K", {{"x", "X"}}, {});
        rules.push_back({L, K, K, {"x"}, {"x"}});
    }
    auto hosts = enumerate_graphs(two_type_system(), limits.host_nodes, limits.host_edges);
    for (const auto& rule : rules) {
        auto l = by_ids(rule.K, rule.L, rule.kl);
        auto r = by_ids(rule.K, rule.R, rule.kr);
        auto conds = small_conditions(rule.R, limits.depth);
        std::vector<CondPtr> translated;
        for (const auto& c : conds)
            translated.push_back(left(l, r, c));
        for (const auto& g : hosts)
            for (const auto& m : enumerate_morphisms(rule.L, g, false)) {
                auto pc = pushout_complement(l, m);
                if (!pc)
                    continue;
                auto po = pushout(pc->k, r);  // D -> H, R -> H
                const auto& n = po.from_c;
                for (std::size_t i = 0; i < conds.size(); ++i) {
                    ++rep.instances;
                    bool post = satisfies(n, conds[i]);
                    bool pre = satisfies(m, translated[i]);
                    if (post != pre)
                        rep.record(witness("left", conds[i], m));
                }
            }
    }
    return rep;
}

}  // namespace essentia
