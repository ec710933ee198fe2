#pragma once

#include "essentia/rewriting.hpp"

#include <optional>
#include <string>
#include <vector>

namespace essentia {

/// Deliberately broken engine variants, used to show that the oracle notices.
struct Mutations {
    bool ignore_binding = false;        // keep essences whatever the polarity of their target
    bool no_level_escalation = false;   // only look at the first level of each path
    bool composition_wrong_leg = false; // build the composed apex from the constituents' legs
    bool trivial_ac_ce = false;         // every symbolic essence gets condition true
};

struct EngineOptions {
    int compose_depth = 1;
    Mutations mutations;
};

/// (bj: A -> Pj, bi: A -> Pi, pL1: L1 -> Pj, pL2: L2 -> Pi). Pj is on the first rule's side.
struct RuleOverlap {
    Morphism bj;
    Morphism bi;
    Morphism pL1;
    Morphism pL2;

    const GraphPtr& apex() const { return bj.domain(); }
    const GraphPtr& Pj() const { return bj.codomain(); }
    const GraphPtr& Pi() const { return bi.codomain(); }
    /// The same overlap seen from the other rule's side.
    RuleOverlap flipped() const { return {bi, bj, pL2, pL1}; }
};

/// Isomorphism of the whole tuple: apex and both objects, commuting with all four arrows.
bool overlaps_isomorphic(const RuleOverlap& x, const RuleOverlap& y);

/// Pullback of m1: L -> X and m2: Y -> X, its pullback A' along l: K >-> L and the initial pushout over A' >-> A.
struct PlainEssence {
    Morphism a1;    // A -> L
    Morphism a2;    // A -> Y
    Morphism kept;  // A' >-> A
    Morphism to_k;  // A' -> K
    InitialPushout ipo;

    const GraphPtr& apex() const { return a1.domain(); }
    const GraphPtr& essence() const { return ipo.context; }
    const Morphism& c() const { return ipo.c; }
    bool trivial() const { return ipo.context->empty(); }
};

PlainEssence plain_essence(const Morphism& l, const Morphism& m1, const Morphism& m2);

enum class EssenceKind { Deletion, Insertion };
const char* to_string(EssenceKind k);
const char* to_string(ConditionTree::Binding b);

/// Result of the level recursion for one path and one overlap of the first rule's side with the leaf.
struct ProtoEssence {
    EssenceKind kind = EssenceKind::Deletion;
    Cospan base;             // (e_L, e_Pn) into the overlap object
    std::vector<int> path;   // tree node indices from the root to the leaf
    int level = 0;           // position in path of the object the essence points to
    Morphism anchor;         // L2 -> P_level along the path
    PlainEssence ess;
    /// Every level visited, for tracing: (apex, kept part) per level.
    std::vector<PlainEssence> trace;
};

/// Levels 0..n of every root-to-leaf path of tree(ac2), and the root itself, over every overlap of L1 with the leaf.
std::vector<ProtoEssence> proto_essences_by_deletion(const Rule& r1, const Rule& r2, const EngineOptions& opts = {});
/// The same over R1 (the inverse of r1), starting at level 1.
std::vector<ProtoEssence> proto_essences_by_insertion(const Rule& r1, const Rule& r2, const EngineOptions& opts = {});

/// Level recursion for one base cospan along `path`; starts at level `first`.
ProtoEssence level_recursion(const Morphism& l, const ConditionTree& t, const std::vector<int>& path,
                             const Cospan& base, int first, bool escalate = true);

/// Disabling essence of `disabler` in `disabled`, as an overlap with pL1 = id.
struct DisablingEssence {
    EssenceKind kind = EssenceKind::Deletion;
    RuleOverlap overlap;
    Morphism c;  // essence object -> apex
    int level = 0;
    ConditionTree::Binding binding = ConditionTree::Binding::Root;
    std::vector<std::string> path;  // graph names from L2 to the target object
    ProtoEssence proto;

    const GraphPtr& essence() const { return c.domain(); }
    std::string target() const { return path.empty() ? std::string() : path[level]; }
};

/// Shift of an insertion proto-essence over the rule: the part of the overlap that exists before r1 is applied.
/// Empty when the pushout complement does not exist or L2 touches elements created by r1.
std::optional<DisablingEssence> shift_insertion_essence(const ProtoEssence& pe, const Rule& r1, const Rule& r2,
                                                        std::string* why = nullptr);

/// Some jointly surjective (L1 -> X, P -> X) realizes the overlap as a pullback with both rules applicable.
bool embeddable_at_overlap(const RuleOverlap& ro, const Rule& r1, const Rule& r2);

std::vector<DisablingEssence> disabling_essences(const Rule& r1, const Rule& r2, const EngineOptions& opts = {});

/// All (m1^j, m2^i) with m1 = m1^j o pL1, m2 = m2^i o pL2 and (bj, bi) a pullback of them.
std::vector<std::pair<Morphism, Morphism>> embed(const RuleOverlap& ro, const Morphism& m1, const Morphism& m2);
bool embeds(const RuleOverlap& ro, const Morphism& m1, const Morphism& m2);

/// The part of L1 and L2 shared by any pair of matches the overlap embeds into, with its two legs.
struct MatchOverlap {
    Morphism to_l1;  // L12 -> L1
    Morphism to_l2;  // L12 -> L2
};
MatchOverlap match_overlap(const RuleOverlap& ro);

/// Neither rule deletes anything of the match overlap, so every embedding lands in an ac-disregarding
/// parallel independent pair.
bool is_ac_conflicting(const RuleOverlap& ro, const Rule& r1, const Rule& r2);

/// Pullbacks (2) and (3) for an overlap with pL1 = id: L2' over the apex and K2' over L2'.
struct SecondRuleTrace {
    Pullback l2p;   // L2' with legs to the apex and to L2
    Pullback k2p;   // K2' with legs to K2 and to L2'
    bool l2p_iso() const { return k2p.to_b.is_iso(); }
};
SecondRuleTrace second_rule_trace(const RuleOverlap& ro, const Rule& r2);

std::vector<RuleOverlap> compose_overlaps(const RuleOverlap& ro, const RuleOverlap& ro2, const EngineOptions& opts = {});

struct ConflictEssence {
    RuleOverlap overlap;
    Morphism c;  // essence object -> apex, for disabling essences
    bool ac_conflicting = false;
    enum class Origin { Forward, Backward, Composed } origin = Origin::Forward;
    int source = -1;            // index into the forward or backward disabling essences
    int left = -1, right = -1;  // constituents of a composition
    int depth = 0;
};

const char* to_string(ConflictEssence::Origin o);

struct SymbolicInitialConflict {
    Coproduct sum;
    Transformation t1, t2;
    CondPtr ac;           // both conditions hold before
    CondPtr ac_star;      // the pair is in conflict
    CondPtr ac_star_d1;   // the second rule's condition holds after the first
    CondPtr ac_star_d2;
};

SymbolicInitialConflict symbolic_initial_conflict(const Rule& r1, const Rule& r2);

/// ac_ce = exists(Pj -> D <- Pi, shift(m*, ac and ac*)). The shifted body is evaluated through m*
/// (q |= shift(m*, c) iff q o m* |= c) and only built on request.
struct SymbolicConflictEssence {
    int essence = -1;
    bool trivial = true;  // ac_ce = true
    GraphPtr left_root, right_root;  // Pj, Pi
    Pushout glued;        // D with the legs from Pj and Pi
    Morphism m_star;      // L1 + L2 -> D
    CondPtr condition;    // ac and ac* over L1 + L2

    /// (q1, q2) |= ac_ce.
    bool satisfied_by(const Morphism& q1, const Morphism& q2) const;
    CospanCondPtr materialize() const;
};

/// (m1^j, m2^i) embeds the essence and satisfies its condition.
bool embeds_symbolic(const ConflictEssence& ce, const SymbolicConflictEssence& se, const Morphism& m1,
                     const Morphism& m2);

struct ConflictAnalysis {
    const Rule* r1 = nullptr;
    const Rule* r2 = nullptr;
    std::vector<DisablingEssence> forward;   // r1 in r2
    std::vector<DisablingEssence> backward;  // r2 in r1
    std::vector<ConflictEssence> essences;
    /// Every pair that was composed, with the essences its compositions ended up as.
    struct Composition {
        int left = -1, right = -1;
        std::vector<int> results;
    };
    std::vector<Composition> compositions;
    std::optional<SymbolicInitialConflict> initial;
    std::vector<SymbolicConflictEssence> symbolic;
};

ConflictAnalysis conflict_essences(const Rule& r1, const Rule& r2, const EngineOptions& opts = {});
/// conflict_essences plus the symbolic initial conflict and one symbolic essence per conflict essence.
ConflictAnalysis symbolic_conflict_essences(const Rule& r1, const Rule& r2, const EngineOptions& opts = {});

}  // namespace essentia
