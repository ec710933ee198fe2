#pragma once

#include "essentia/io.hpp"
#include "essentia/oracle.hpp"

#include <string>
#include <utility>
#include <vector>

namespace essentia {

inline constexpr const char* kReportSchema = "essentia-report/1";
inline constexpr const char* kVerifySchema = "essentia-verify/1";
inline constexpr const char* kVerdictSchema = "essentia-verdict/1";

using RulePair = std::pair<std::string, std::string>;

/// "a,b" -> (a, b); empty -> every unordered pair of the rule set, self pairs included.
std::vector<RulePair> select_pairs(const RuleSet& rs, const std::string& selector);

Json overlap_to_json(const RuleOverlap& ro);
/// `first` and `second` are the rules whose left-hand sides pL1 and pL2 start from.
RuleOverlap overlap_from_json(const Json& j, const TypeGraphPtr& types, const Rule& first, const Rule& second,
                              const std::string& where);
/// Forward, backward and conflict essences with provenance, plus the symbolic layer.
Json analysis_to_json(const ConflictAnalysis& a);

/// Full analysis of every selected pair. Deterministic unless `timing` adds wall-clock seconds per pair.
Json analyze(const RuleSet& rs, const std::vector<RulePair>& pairs, const EngineOptions& opts,
             std::vector<ConflictAnalysis>* keep = nullptr, bool timing = false);

/// Reloads every essence of a report against the rule set and re-checks its witnesses: morphisms
/// well-formed, disabling essences embeddable, ac-conflicting flags, symbolic gluings commuting.
/// Returns one line per problem.
std::vector<std::string> recheck_report(const Json& report, const RuleSet& rs);

Json verify_result_to_json(const VerifyResult& r);
Json limits_to_json(const HostLimits& l);

/// Verdict for one pair of matches: independence, and every conflict essence that embeds
/// with its condition satisfied, with the embedding spelled out.
Json check_pair(const ConflictAnalysis& a, const Morphism& m1, const Morphism& m2);

/// Graphviz rendering. Nodes carry "1,10:Class" labels.
std::string graph_dot(const TypedGraph& g, const std::string& title = {});
/// The overlap as three clusters: Pj, apex, Pi, with the apex legs dashed. Elements of the
/// essence image are filled when `c` is given.
std::string overlap_dot(const RuleOverlap& ro, const Morphism* c, const std::string& title);

/// Writes one DOT file per essence of the analysis into dir/<r1>__<r2>/. Returns the paths.
std::vector<std::string> export_analysis_dot(const ConflictAnalysis& a, const std::string& dir);
/// One DOT file per rule graph (L, K, R and condition graphs) into dir/<rule>/.
std::vector<std::string> export_ruleset_dot(const RuleSet& rs, const std::string& dir);

}  // namespace essentia
