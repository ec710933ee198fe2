#pragma once

#include "essentia/essence.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace essentia {

enum class HostMode { Quotient, Bounded };

struct HostLimits {
    HostMode mode = HostMode::Quotient;
    /// Quotient mode: extension steps on top of each gluing. A step adds a node attached by one edge,
    /// or, with `extra_edges`, an edge between existing nodes.
    int max_extra_nodes = 2;
    bool extra_edges = false;
    /// Bounded mode: every graph up to this size.
    int max_nodes = 3;
    int max_edges = 3;
};

/// Gluings of the left-hand sides and condition graphs of both rules, extended by a few context
/// elements, or all small graphs. One per iso class, in a deterministic order.
std::vector<GraphPtr> enumerate_hosts(const Rule& r1, const Rule& r2, const HostLimits& limits);

/// Supplementary random hosts: a gluing picked at random, grown by 1..`steps` random extension
/// steps (extra edges included). Deterministic for a given seed.
std::vector<GraphPtr> random_hosts(const Rule& r1, const Rule& r2, std::size_t count, int steps, unsigned seed);

enum class Check {
    Correctness,       // conflict iff some symbolic conflict essence is satisfied
    Completeness,      // every disabling is witnessed by a disabling essence
    Disjointness,      // ac-conflicting essences only embed into ac-disregarding independent pairs, and back
    Composition,       // both constituents embed iff one of their compositions does
    Containment,       // level-0 essences are exactly the nontrivial plain essences
    ConflictEmbedding, // every conflict embeds some conflict essence
    Reference,         // disabling essences agree with an unpruned re-derivation
    ChurchRosser,      // independent pairs converge
};

const char* to_string(Check c);
std::vector<Check> all_checks();

struct Counterexample {
    std::string host;
    std::string m1, m2;
    std::string detail;
};

struct CheckReport {
    Check check = Check::Correctness;
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::vector<Counterexample> examples;  // the first few

    bool passed() const { return failures == 0; }
};

struct VerifyOptions {
    HostLimits hosts;
    EngineOptions engine;
    std::vector<Check> checks = all_checks();
    std::size_t max_examples = 5;
    /// The hosts contain every quotient-mode gluing, so every level-0 essence must show up as a plain
    /// essence somewhere. Off for hand-picked or random host lists.
    bool gluings_included = true;
};

struct VerifyResult {
    std::string r1, r2;
    std::size_t hosts = 0;
    std::size_t pairs = 0;     // ac-disregarding match pairs
    std::size_t ac_pairs = 0;  // pairs where both matches satisfy their conditions
    std::vector<CheckReport> reports;

    bool passed() const;
    const CheckReport& report(Check c) const;
};

/// Brute force over the hosts for one ordered rule pair. Dependence is decided from the
/// transformations alone; the analysis is only consulted for its claims.
VerifyResult verify_pair(const Rule& r1, const Rule& r2, const VerifyOptions& opts);
/// Same, against an analysis computed beforehand with the same engine options.
VerifyResult verify_pair(const ConflictAnalysis& analysis, const std::vector<GraphPtr>& hosts,
                         const VerifyOptions& opts);

/// Disabling essences of r1 in r2 derived from scratch: every level of every path is computed and
/// polarity is read off the condition itself.
std::vector<RuleOverlap> reference_disabling_essences(const Rule& r1, const Rule& r2);

}  // namespace essentia
