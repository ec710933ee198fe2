#include "essentia/report.hpp"

#include <cctype>
#include <chrono>
#include <filesystem>
#include <sstream>

namespace essentia {

namespace {

const char* binding_name(ConditionTree::Binding b) { return to_string(b); }

std::string mode_name(HostMode m) { return m == HostMode::Quotient ? "quotient" : "bounded"; }

Json derivation(const ConflictAnalysis& a, int i) {
    const auto& ce = a.essences[static_cast<std::size_t>(i)];
    Json j;
    j["essence"] = i;
    j["origin"] = to_string(ce.origin);
    if (ce.origin == ConflictEssence::Origin::Composed)
        j["from"] = Json::array({derivation(a, ce.left), derivation(a, ce.right)});
    else
        j["source"] = ce.source;
    return j;
}

Json disabling_to_json(const DisablingEssence& de, const ConditionTree& t, std::size_t index) {
    Json j;
    j["index"] = index;
    j["kind"] = to_string(de.kind);
    j["level"] = de.level;
    j["binding"] = binding_name(de.binding);
    j["leaf"] = t.nodes[static_cast<std::size_t>(de.proto.path.back())].graph->name();
    j["path"] = de.path;
    j["target"] = de.target();
    j["essence"] = graph_to_json(*de.essence());
    j["c"] = morphism_to_json(de.c);
    j["overlap"] = overlap_to_json(de.overlap);
    return j;
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\')
            out += '\\';
        out += ch;
    }
    return out + "\"";
}

// Emits the nodes and edges of g with ids prefixed by `prefix`; `hot` marks filled elements.
void emit_graph(std::ostringstream& os, const TypedGraph& g, const std::string& prefix, const std::string& indent,
                const std::vector<char>* hot_nodes = nullptr, const std::vector<char>* hot_edges = nullptr) {
    const auto& t = *g.types();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        os << indent << dot_quote(prefix + g.node(static_cast<int>(i)).id)
           << " [label=" << dot_quote(g.node_label(static_cast<int>(i)));
        if (hot_nodes && (*hot_nodes)[i])
            os << ", style=filled, fillcolor=lightgrey";
        os << "];\n";
    }
    for (std::size_t i = 0; i < g.edge_count(); ++i) {
        const auto& e = g.edge(static_cast<int>(i));
        os << indent << dot_quote(prefix + g.node(e.source).id) << " -> " << dot_quote(prefix + g.node(e.target).id)
           << " [label=" << dot_quote(t.edge_types()[static_cast<std::size_t>(e.type)].name);
        if (hot_edges && (*hot_edges)[i])
            os << ", penwidth=2";
        os << "];\n";
    }
}

std::string file_safe(std::string s) {
    for (auto& ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_')
            ch = '_';
    return s;
}

std::string write_dot(const std::filesystem::path& dir, const std::string& stem, const std::string& text) {
    std::filesystem::create_directories(dir);
    auto p = (dir / (file_safe(stem) + ".dot")).string();
    write_file(p, text);
    return p;
}

}  // namespace

std::vector<RulePair> select_pairs(const RuleSet& rs, const std::string& selector) {
    std::vector<RulePair> out;
    if (selector.empty()) {
        for (std::size_t i = 0; i < rs.rules.size(); ++i)
            for (std::size_t j = i; j < rs.rules.size(); ++j)
                out.emplace_back(rs.rules[i].name, rs.rules[j].name);
        return out;
    }
    auto comma = selector.find(',');
    if (comma == std::string::npos || selector.find(',', comma + 1) != std::string::npos)
        throw ParseError("--pair", "expected two rule names separated by a comma");
    RulePair p{selector.substr(0, comma), selector.substr(comma + 1)};
    for (const auto* n : {&p.first, &p.second})
        rs.rule(*n);  // throws on unknown names
    out.push_back(p);
    return out;
}

Json overlap_to_json(const RuleOverlap& ro) {
    Json j;
    j["apex"] = graph_to_json(*ro.apex());
    j["Pj"] = graph_to_json(*ro.Pj());
    j["Pi"] = graph_to_json(*ro.Pi());
    j["bj"] = morphism_to_json(ro.bj);
    j["bi"] = morphism_to_json(ro.bi);
    j["pL1"] = morphism_to_json(ro.pL1);
    j["pL2"] = morphism_to_json(ro.pL2);
    return j;
}

Json analysis_to_json(const ConflictAnalysis& a) {
    Json j;
    j["first"] = a.r1->name;
    j["second"] = a.r2->name;
    auto t2 = tree(a.r2->ac), t1 = tree(a.r1->ac);

    j["forward"] = Json::array();
    for (std::size_t i = 0; i < a.forward.size(); ++i)
        j["forward"].push_back(disabling_to_json(a.forward[i], t2, i));
    j["backward"] = Json::array();
    for (std::size_t i = 0; i < a.backward.size(); ++i)
        j["backward"].push_back(disabling_to_json(a.backward[i], t1, i));

    j["conflict_essences"] = Json::array();
    for (std::size_t i = 0; i < a.essences.size(); ++i) {
        const auto& ce = a.essences[i];
        Json e;
        e["index"] = i;
        e["origin"] = to_string(ce.origin);
        e["depth"] = ce.depth;
        e["ac_conflicting"] = ce.ac_conflicting;
        e["derivation"] = derivation(a, static_cast<int>(i));
        e["overlap"] = overlap_to_json(ce.overlap);
        if (ce.c.valid()) {
            e["essence"] = graph_to_json(*ce.c.domain());
            e["c"] = morphism_to_json(ce.c);
        }
        j["conflict_essences"].push_back(std::move(e));
    }

    j["compositions"] = Json::array();
    for (const auto& comp : a.compositions)
        j["compositions"].push_back({{"left", comp.left}, {"right", comp.right}, {"results", comp.results}});

    if (a.initial) {
        const auto& init = *a.initial;
        Json s;
        s["sum"] = graph_to_json(*init.sum.object);
        s["in_first"] = morphism_to_json(init.sum.in_a);
        s["in_second"] = morphism_to_json(init.sum.in_b);
        s["ac"] = pretty(init.ac);
        s["ac_star"] = pretty(init.ac_star);
        s["ac_star_quantifiers"] = quantifier_count(init.ac_star);
        CondPtr body;
        for (const auto& se : a.symbolic)
            if (!se.trivial) {
                body = se.condition;
                break;
            }
        // Shared by every nontrivial symbolic essence: ac and ac* over L1 + L2.
        if (body) {
            s["condition_pretty"] = pretty(body);
            s["condition"] = condition_to_json(body);
        }
        j["initial_conflict"] = std::move(s);
    }

    j["symbolic"] = Json::array();
    for (const auto& se : a.symbolic) {
        Json e;
        e["essence"] = se.essence;
        e["trivial"] = se.trivial;
        if (se.trivial) {
            e["ac_ce"] = "true";
        } else {
            auto pj = se.left_root->name().empty() ? std::string("Pj") : se.left_root->name();
            auto pi = se.right_root->name().empty() ? std::string("Pi") : se.right_root->name();
            e["ac_ce"] = "exists(" + pj + " -> D <- " + pi + ", shift(m*, ac & ac*))";
            e["D"] = graph_to_json(*se.glued.object);
            e["from_Pj"] = morphism_to_json(se.glued.from_b);
            e["from_Pi"] = morphism_to_json(se.glued.from_c);
            e["m_star"] = morphism_to_json(se.m_star);
            e["body"] = "initial_conflict.condition";
        }
        j["symbolic"].push_back(std::move(e));
    }

    std::size_t acc = 0;
    for (const auto& ce : a.essences)
        acc += ce.ac_conflicting;
    j["summary"] = {{"forward", a.forward.size()},
                    {"backward", a.backward.size()},
                    {"conflict_essences", a.essences.size()},
                    {"ac_conflicting", acc},
                    {"compositions", a.compositions.size()}};
    return j;
}

Json analyze(const RuleSet& rs, const std::vector<RulePair>& pairs, const EngineOptions& opts,
             std::vector<ConflictAnalysis>* keep, bool timing) {
    Json j;
    j["schema"] = kReportSchema;
    Json cfg;
    cfg["ruleset"] = rs.name;
    cfg["compose_depth"] = opts.compose_depth;
    cfg["pairs"] = Json::array();
    for (const auto& p : pairs)
        cfg["pairs"].push_back({p.first, p.second});
    const auto& m = opts.mutations;
    if (m.ignore_binding || m.no_level_escalation || m.composition_wrong_leg || m.trivial_ac_ce)
        cfg["mutations"] = {{"ignore_binding", m.ignore_binding},
                            {"no_level_escalation", m.no_level_escalation},
                            {"composition_wrong_leg", m.composition_wrong_leg},
                            {"trivial_ac_ce", m.trivial_ac_ce}};
    j["config"] = std::move(cfg);
    j["types"] = types_to_json(*rs.types);
    j["pairs"] = Json::array();
    for (const auto& p : pairs) {
        auto t0 = std::chrono::steady_clock::now();
        auto a = symbolic_conflict_essences(rs.rule(p.first), rs.rule(p.second), opts);
        std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        auto pj = analysis_to_json(a);
        if (timing)
            pj["timing"] = {{"seconds", dt.count()}};
        j["pairs"].push_back(std::move(pj));
        if (keep)
            keep->push_back(std::move(a));
    }
    return j;
}

RuleOverlap overlap_from_json(const Json& j, const TypeGraphPtr& types, const Rule& first, const Rule& second,
                              const std::string& where) {
    auto apex = graph_from_json(j.at("apex"), types, where + ".apex");
    auto pj = graph_from_json(j.at("Pj"), types, where + ".Pj");
    auto pi = graph_from_json(j.at("Pi"), types, where + ".Pi");
    return {morphism_from_json(j.at("bj"), apex, pj, where + ".bj"),
            morphism_from_json(j.at("bi"), apex, pi, where + ".bi"),
            morphism_from_json(j.at("pL1"), first.L, pj, where + ".pL1"),
            morphism_from_json(j.at("pL2"), second.L, pi, where + ".pL2")};
}

std::vector<std::string> recheck_report(const Json& report, const RuleSet& rs) {
    std::vector<std::string> problems;
    if (report.value("schema", "") != kReportSchema)
        problems.push_back("schema: expected " + std::string(kReportSchema));
    const auto& pairs = report.at("pairs");
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto& pj = pairs[p];
        const auto& r1 = rs.rule(pj.at("first").get<std::string>());
        const auto& r2 = rs.rule(pj.at("second").get<std::string>());
        auto base = "pairs[" + std::to_string(p) + "]";
        auto guard = [&](const std::string& where, auto&& body) {
            try {
                if (auto msg = body(); !msg.empty())
                    problems.push_back(where + ": " + msg);
            } catch (const std::exception& e) {
                problems.push_back(where + ": " + e.what());
            }
        };
        auto disabling = [&](const char* key, const Rule& disabler, const Rule& disabled) {
            const auto& list = pj.at(key);
            for (std::size_t i = 0; i < list.size(); ++i) {
                auto w = base + "." + key + "[" + std::to_string(i) + "]";
                guard(w, [&]() -> std::string {
                    auto ro = overlap_from_json(list[i].at("overlap"), rs.types, disabler, disabled, w + ".overlap");
                    auto ess = graph_from_json(list[i].at("essence"), rs.types, w + ".essence");
                    auto c = morphism_from_json(list[i].at("c"), ess, ro.apex(), w + ".c");
                    if (!c.is_injective())
                        return "essence is not a subgraph of the apex";
                    if (!ro.pL1.is_iso())
                        return "disabler side is not its left-hand side";
                    if (!embeddable_at_overlap(ro, disabler, disabled))
                        return "overlap is not embeddable";
                    return {};
                });
            }
        };
        disabling("forward", r1, r2);
        disabling("backward", r2, r1);

        const auto& ces = pj.at("conflict_essences");
        std::vector<RuleOverlap> overlaps(ces.size());
        for (std::size_t i = 0; i < ces.size(); ++i) {
            auto w = base + ".conflict_essences[" + std::to_string(i) + "]";
            guard(w, [&]() -> std::string {
                overlaps[i] = overlap_from_json(ces[i].at("overlap"), rs.types, r1, r2, w + ".overlap");
                if (is_ac_conflicting(overlaps[i], r1, r2) != ces[i].at("ac_conflicting").get<bool>())
                    return "ac_conflicting flag does not match";
                return {};
            });
        }

        if (!pj.contains("initial_conflict"))
            continue;
        const auto& init = pj.at("initial_conflict");
        GraphPtr sum;
        Morphism in1, in2;
        guard(base + ".initial_conflict", [&]() -> std::string {
            sum = graph_from_json(init.at("sum"), rs.types, base + ".initial_conflict.sum");
            in1 = morphism_from_json(init.at("in_first"), r1.L, sum, base + ".initial_conflict.in_first");
            in2 = morphism_from_json(init.at("in_second"), r2.L, sum, base + ".initial_conflict.in_second");
            return {};
        });
        const auto& sym = pj.at("symbolic");
        for (std::size_t i = 0; i < sym.size(); ++i) {
            if (sym[i].at("trivial").get<bool>())
                continue;
            auto w = base + ".symbolic[" + std::to_string(i) + "]";
            guard(w, [&]() -> std::string {
                auto k = sym[i].at("essence").get<std::size_t>();
                if (k >= overlaps.size() || !overlaps[k].bj.valid())
                    return "refers to a missing conflict essence";
                const auto& ro = overlaps[k];
                auto D = graph_from_json(sym[i].at("D"), rs.types, w + ".D");
                auto fj = morphism_from_json(sym[i].at("from_Pj"), ro.Pj(), D, w + ".from_Pj");
                auto fi = morphism_from_json(sym[i].at("from_Pi"), ro.Pi(), D, w + ".from_Pi");
                auto ms = morphism_from_json(sym[i].at("m_star"), sum, D, w + ".m_star");
                if (!is_pushout(ro.bj, ro.bi, fj, fi))
                    return "D is not the gluing of the overlap";
                if (compose(in1, ms) != compose(ro.pL1, fj) || compose(in2, ms) != compose(ro.pL2, fi))
                    return "m* does not commute with the overlap";
                return {};
            });
        }
    }
    return problems;
}

Json limits_to_json(const HostLimits& l) {
    Json j;
    j["hosts"] = mode_name(l.mode);
    if (l.mode == HostMode::Quotient) {
        j["max_extra_nodes"] = l.max_extra_nodes;
        j["extra_edges"] = l.extra_edges;
    } else {
        j["max_nodes"] = l.max_nodes;
        j["max_edges"] = l.max_edges;
    }
    return j;
}

Json verify_result_to_json(const VerifyResult& r) {
    Json j;
    j["first"] = r.r1;
    j["second"] = r.r2;
    j["hosts"] = r.hosts;
    j["pairs"] = r.pairs;
    j["ac_pairs"] = r.ac_pairs;
    j["passed"] = r.passed();
    j["checks"] = Json::array();
    for (const auto& c : r.reports) {
        Json e;
        e["check"] = to_string(c.check);
        e["instances"] = c.instances;
        e["counterexamples"] = c.failures;
        e["passed"] = c.passed();
        e["examples"] = Json::array();
        for (const auto& x : c.examples)
            e["examples"].push_back({{"host", x.host}, {"m1", x.m1}, {"m2", x.m2}, {"detail", x.detail}});
        j["checks"].push_back(std::move(e));
    }
    return j;
}

Json check_pair(const ConflictAnalysis& a, const Morphism& m1, const Morphism& m2) {
    Json j;
    j["schema"] = kVerdictSchema;
    j["first"] = a.r1->name;
    j["second"] = a.r2->name;
    j["m1"] = morphism_to_json(m1);
    j["m2"] = morphism_to_json(m2);
    bool ok1 = applicable(*a.r1, m1, MatchMode::RespectAc), ok2 = applicable(*a.r2, m2, MatchMode::RespectAc);
    j["applicable"] = {{"first", ok1}, {"second", ok2}};
    j["embedded"] = Json::array();
    if (!ok1 || !ok2) {
        j["verdict"] = nullptr;
        return j;
    }
    auto v = parallel_independence(apply(*a.r1, m1), apply(*a.r2, m2));
    j["verdict"] = {{"classification", to_string(v.classification())},
                    {"independent", v.independent()},
                    {"first_disables_second", v.first_disables_second()},
                    {"second_disables_first", v.second_disables_first()},
                    {"ac_disregarding_independent", v.ac_disregarding_independent()}};
    for (std::size_t i = 0; i < a.essences.size(); ++i) {
        const auto& ce = a.essences[i];
        Json found = Json::array();
        for (const auto& [x, y] : embed(ce.overlap, m1, m2)) {
            if (i < a.symbolic.size() && !a.symbolic[i].satisfied_by(x, y))
                continue;
            found.push_back({{"m1j", morphism_to_json(x)}, {"m2i", morphism_to_json(y)}});
        }
        if (found.empty())
            continue;
        Json e;
        e["essence"] = i;
        e["origin"] = to_string(ce.origin);
        e["ac_conflicting"] = ce.ac_conflicting;
        e["apex"] = graph_to_json(*ce.overlap.apex());
        e["embeddings"] = std::move(found);
        j["embedded"].push_back(std::move(e));
    }
    return j;
}

std::string graph_dot(const TypedGraph& g, const std::string& title) {
    std::ostringstream os;
    os << "digraph " << dot_quote(title.empty() ? g.name() : title) << " {\n";
    emit_graph(os, g, "", "  ");
    os << "}\n";
    return os.str();
}

std::string overlap_dot(const RuleOverlap& ro, const Morphism* c, const std::string& title) {
    std::ostringstream os;
    os << "digraph " << dot_quote(title) << " {\n  compound=true;\n";
    std::vector<char> hn(ro.apex()->node_count(), 0), he(ro.apex()->edge_count(), 0);
    if (c) {
        for (int x : c->node_map())
            hn[static_cast<std::size_t>(x)] = 1;
        for (int x : c->edge_map())
            he[static_cast<std::size_t>(x)] = 1;
    }
    auto cluster = [&](const char* key, const char* label, const TypedGraph& g, bool hot) {
        os << "  subgraph cluster_" << key << " {\n    label=" << dot_quote(label) << ";\n";
        emit_graph(os, g, std::string(key) + ":", "    ", hot ? &hn : nullptr, hot ? &he : nullptr);
        os << "  }\n";
    };
    cluster("Pj", "Pj", *ro.Pj(), false);
    cluster("A", "A", *ro.apex(), true);
    cluster("Pi", "Pi", *ro.Pi(), false);
    auto legs = [&](const Morphism& m, const std::string& from, const std::string& to) {
        for (std::size_t i = 0; i < m.node_map().size(); ++i)
            os << "  " << dot_quote(from + m.domain()->node(static_cast<int>(i)).id) << " -> "
               << dot_quote(to + m.codomain()->node(m.node(static_cast<int>(i))).id)
               << " [style=dashed, color=grey, arrowhead=open];\n";
    };
    legs(ro.bj, "A:", "Pj:");
    legs(ro.bi, "A:", "Pi:");
    os << "}\n";
    return os.str();
}

std::vector<std::string> export_analysis_dot(const ConflictAnalysis& a, const std::string& dir) {
    std::vector<std::string> out;
    std::filesystem::path d = std::filesystem::path(dir) / (file_safe(a.r1->name) + "__" + file_safe(a.r2->name));
    auto each = [&](const std::vector<DisablingEssence>& des, const std::string& tag) {
        for (std::size_t i = 0; i < des.size(); ++i) {
            auto title = tag + "_" + std::to_string(i) + "_" + to_string(des[i].kind) + "_" + des[i].target();
            out.push_back(write_dot(d, title, overlap_dot(des[i].overlap, &des[i].c, title)));
        }
    };
    each(a.forward, "forward");
    each(a.backward, "backward");
    for (std::size_t i = 0; i < a.essences.size(); ++i) {
        const auto& ce = a.essences[i];
        auto title = "conflict_" + std::to_string(i) + "_" + to_string(ce.origin);
        out.push_back(write_dot(d, title, overlap_dot(ce.overlap, ce.c.valid() ? &ce.c : nullptr, title)));
    }
    return out;
}

std::vector<std::string> export_ruleset_dot(const RuleSet& rs, const std::string& dir) {
    std::vector<std::string> out;
    for (const auto& r : rs.rules) {
        auto d = std::filesystem::path(dir) / file_safe(r.name);
        out.push_back(write_dot(d, "L", graph_dot(*r.L, r.name + " L")));
        out.push_back(write_dot(d, "K", graph_dot(*r.K, r.name + " K")));
        out.push_back(write_dot(d, "R", graph_dot(*r.R, r.name + " R")));
        auto t = tree(r.ac);
        for (std::size_t i = 1; i < t.nodes.size(); ++i) {
            const auto& g = *t.nodes[i].graph;
            auto stem = "cond_" + std::to_string(i) + "_" + g.name();
            out.push_back(write_dot(d, stem, graph_dot(g, r.name + " " + g.name())));
        }
    }
    return out;
}

}  // namespace essentia
