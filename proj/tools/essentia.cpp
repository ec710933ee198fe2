#include "essentia/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>

using namespace essentia;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kEngine = 3, kCounterexample = 4 };

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string rules;
    std::string pair;
    int compose_depth = 1;
    std::string out;
    std::vector<std::string> mutations;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--rules", c.rules, "rule-set document")->required()->check(CLI::ExistingFile);
    app->add_option("--pair", c.pair, "two rule names, comma separated");
    app->add_option("--compose-depth", c.compose_depth, "composition rounds")->check(CLI::NonNegativeNumber);
    app->add_option("--out", c.out, "output path (stdout when absent)");
    app->add_option("--mutation", c.mutations,
                    "broken engine variant: ignore-binding, no-level-escalation, composition-wrong-leg, trivial-ac-ce");
}

EngineOptions engine_options(const Common& c) {
    EngineOptions o;
    o.compose_depth = c.compose_depth;
    for (const auto& m : c.mutations) {
        if (m == "ignore-binding")
            o.mutations.ignore_binding = true;
        else if (m == "no-level-escalation")
            o.mutations.no_level_escalation = true;
        else if (m == "composition-wrong-leg")
            o.mutations.composition_wrong_leg = true;
        else if (m == "trivial-ac-ce")
            o.mutations.trivial_ac_ce = true;
        else
            throw Usage("unknown mutation '" + m + "'");
    }
    return o;
}

std::vector<RulePair> pairs_of(const RuleSet& rs, const std::string& selector) {
    try {
        return select_pairs(rs, selector);
    } catch (const Error& e) {
        throw Usage(e.what());
    }
}

void emit(const Json& j, const std::string& out, int indent = 2) {
    auto text = j.dump(indent) + "\n";
    if (out.empty())
        std::cout << text;
    else
        write_file(out, text);
}

unsigned seed_from_env() {
    const char* s = std::getenv("ESSENTIA_SEED");
    if (!s || !*s)
        return 0;
    try {
        return static_cast<unsigned>(std::stoul(s));
    } catch (const std::exception&) {
        throw Usage("ESSENTIA_SEED must be a non-negative integer");
    }
}

std::vector<Check> checks_from(const std::vector<std::string>& names) {
    if (names.empty())
        return all_checks();
    std::vector<Check> out;
    for (const auto& n : names) {
        bool found = false;
        for (auto c : all_checks())
            if (n == to_string(c)) {
                out.push_back(c);
                found = true;
            }
        if (!found)
            throw Usage("unknown theorem id '" + n + "'");
    }
    return out;
}

int run_analyze(const Common& c, const std::string& dot_dir, bool timing, int indent) {
    auto rs = load_ruleset(c.rules);
    auto pairs = pairs_of(rs, c.pair);
    auto opts = engine_options(c);
    std::vector<ConflictAnalysis> kept;
    auto t0 = std::chrono::steady_clock::now();
    auto report = analyze(rs, pairs, opts, &kept, timing);
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    emit(report, c.out, indent);
    if (!dot_dir.empty())
        for (const auto& a : kept)
            export_analysis_dot(a, dot_dir);
    for (const auto& p : report["pairs"])
        std::cerr << p["first"].get<std::string>() << " x " << p["second"].get<std::string>() << ": "
                  << p["summary"].dump() << "\n";
    std::cerr << "analysis took " << dt.count() << " s\n";
    return kOk;
}

int run_check_pair(const Common& c, const std::string& host_path) {
    auto rs = load_ruleset(c.rules);
    if (c.pair.empty())
        throw Usage("check-pair needs --pair");
    auto p = pairs_of(rs, c.pair).front();
    const auto& r1 = rs.rule(p.first);
    const auto& r2 = rs.rule(p.second);
    Json doc;
    try {
        doc = Json::parse(read_file(host_path));
    } catch (const Json::parse_error& e) {
        throw ParseError(host_path, e.what());
    }
    const Json& gj = doc.contains("graph") ? doc.at("graph") : doc;
    auto host = graph_from_json(gj, rs.types, "graph", "G");
    auto a = symbolic_conflict_essences(r1, r2, engine_options(c));

    std::vector<std::pair<Morphism, Morphism>> instances;
    if (doc.contains("m1") || doc.contains("m2")) {
        if (!doc.contains("m1") || !doc.contains("m2"))
            throw ParseError("m1", "give both matches or neither");
        instances.emplace_back(morphism_from_json(doc.at("m1"), r1.L, host, "m1"),
                               morphism_from_json(doc.at("m2"), r2.L, host, "m2"));
    } else {
        for (const auto& m1 : find_matches(r1, host, MatchMode::RespectAc))
            for (const auto& m2 : find_matches(r2, host, MatchMode::RespectAc))
                instances.emplace_back(m1, m2);
    }
    Json out;
    out["schema"] = kVerdictSchema;
    out["config"] = {{"ruleset", rs.name}, {"pair", {p.first, p.second}}, {"compose_depth", c.compose_depth}};
    out["host"] = graph_to_json(*host);
    out["instances"] = Json::array();
    for (const auto& [m1, m2] : instances) {
        auto v = check_pair(a, m1, m2);
        v.erase("schema");
        out["instances"].push_back(std::move(v));
    }
    emit(out, c.out);
    return kOk;
}

struct VerifyArgs {
    std::string hosts = "quotient";
    int max_extra_nodes = 2;
    bool extra_edges = false;
    int max_nodes = 3;
    int max_edges = 3;
    std::vector<std::string> checks;
    std::size_t random_hosts = 0;
    int random_steps = 4;
};

int run_verify(const Common& c, const VerifyArgs& v) {
    auto rs = load_ruleset(c.rules);
    VerifyOptions opts;
    opts.engine = engine_options(c);
    opts.checks = checks_from(v.checks);
    opts.hosts.mode = v.hosts == "bounded" ? HostMode::Bounded : HostMode::Quotient;
    opts.hosts.max_extra_nodes = v.max_extra_nodes;
    opts.hosts.extra_edges = v.extra_edges;
    opts.hosts.max_nodes = v.max_nodes;
    opts.hosts.max_edges = v.max_edges;
    unsigned seed = seed_from_env();

    std::vector<RulePair> pairs;
    if (!c.pair.empty())
        pairs = pairs_of(rs, c.pair);
    else
        for (const auto& a : rs.rules)
            for (const auto& b : rs.rules)
                pairs.emplace_back(a.name, b.name);

    Json report;
    report["schema"] = kVerifySchema;
    Json cfg;
    cfg["ruleset"] = rs.name;
    cfg["limits"] = limits_to_json(opts.hosts);
    cfg["compose_depth"] = c.compose_depth;
    cfg["checks"] = Json::array();
    for (auto ch : opts.checks)
        cfg["checks"].push_back(to_string(ch));
    if (v.random_hosts)
        cfg["random_hosts"] = {{"count", v.random_hosts}, {"steps", v.random_steps}, {"seed", seed}};
    if (!c.mutations.empty())
        cfg["mutations"] = c.mutations;
    report["config"] = std::move(cfg);
    report["results"] = Json::array();
    bool passed = true;
    for (const auto& p : pairs) {
        const auto& r1 = rs.rule(p.first);
        const auto& r2 = rs.rule(p.second);
        auto t0 = std::chrono::steady_clock::now();
        auto hosts = enumerate_hosts(r1, r2, opts.hosts);
        if (v.random_hosts) {
            auto extra = random_hosts(r1, r2, v.random_hosts, v.random_steps, seed);
            hosts.insert(hosts.end(), extra.begin(), extra.end());
        }
        auto analysis = symbolic_conflict_essences(r1, r2, opts.engine);
        auto res = verify_pair(analysis, hosts, opts);
        std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        passed = passed && res.passed();
        std::cerr << p.first << " x " << p.second << ": " << res.hosts << " hosts, " << res.ac_pairs
                  << " applicable pairs, " << (res.passed() ? "pass" : "FAIL") << " (" << dt.count() << " s)\n";
        for (const auto& r : res.reports)
            if (!r.passed())
                std::cerr << "  " << to_string(r.check) << ": " << r.failures << " counterexamples\n";
        report["results"].push_back(verify_result_to_json(res));
    }
    report["passed"] = passed;
    emit(report, c.out);
    return passed ? kOk : kCounterexample;
}

int run_export_dot(const Common& c, const std::string& dot_dir) {
    auto rs = load_ruleset(c.rules);
    auto files = export_ruleset_dot(rs, dot_dir);
    if (!c.pair.empty()) {
        auto p = pairs_of(rs, c.pair).front();
        auto a = conflict_essences(rs.rule(p.first), rs.rule(p.second), engine_options(c));
        auto more = export_analysis_dot(a, dot_dir);
        files.insert(files.end(), more.begin(), more.end());
    }
    for (const auto& f : files)
        std::cout << f << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conflict and dependency analysis for graph transformation rules with application conditions"};
    app.require_subcommand(1);

    Common c;
    std::string dot_dir, host;
    bool timing = false;
    int indent = -1;
    VerifyArgs v;

    auto* analyze_cmd = app.add_subcommand("analyze", "compute disabling, conflict and symbolic conflict essences");
    add_common(analyze_cmd, c);
    analyze_cmd->add_option("--dot-dir", dot_dir, "write one DOT file per essence");
    analyze_cmd->add_flag("--timing", timing, "record wall-clock seconds per pair in the report");
    analyze_cmd->add_option("--indent", indent, "pretty-print the report (compact by default)");

    auto* check_cmd = app.add_subcommand("check-pair", "decide independence of two matches and list embedded essences");
    add_common(check_cmd, c);
    check_cmd->add_option("--host", host, "host document: a graph, or {graph, m1, m2}")->required()->check(CLI::ExistingFile);

    auto* verify_cmd = app.add_subcommand("verify", "check the engine against brute force on small hosts");
    add_common(verify_cmd, c);
    verify_cmd->add_option("--hosts", v.hosts, "host enumeration")->check(CLI::IsMember({"quotient", "bounded"}));
    verify_cmd->add_option("--max-extra-nodes", v.max_extra_nodes, "quotient mode: extension steps")
        ->check(CLI::NonNegativeNumber);
    verify_cmd->add_flag("--extra-edges", v.extra_edges, "quotient mode: extension steps may add edges only");
    verify_cmd->add_option("--max-nodes", v.max_nodes, "bounded mode: node limit")->check(CLI::NonNegativeNumber);
    verify_cmd->add_option("--max-edges", v.max_edges, "bounded mode: edge limit")->check(CLI::NonNegativeNumber);
    verify_cmd->add_option("--checks", v.checks, "theorem ids (default: all)")->delimiter(',');
    verify_cmd->add_option("--random-hosts", v.random_hosts, "extra random hosts per pair, seeded by ESSENTIA_SEED");
    verify_cmd->add_option("--random-steps", v.random_steps, "max growth steps of a random host")
        ->check(CLI::PositiveNumber);

    auto* dot_cmd = app.add_subcommand("export-dot", "write DOT files for rule graphs, and essences with --pair");
    add_common(dot_cmd, c);
    dot_cmd->add_option("--dot-dir", dot_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*analyze_cmd)
            return run_analyze(c, dot_dir, timing, indent);
        if (*check_cmd)
            return run_check_pair(c, host);
        if (*verify_cmd)
            return run_verify(c, v);
        return run_export_dot(c, dot_dir);
    } catch (const Usage& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const std::exception& e) {
        std::cerr << "engine error: " << e.what() << "\n";
        return kEngine;
    }
}
