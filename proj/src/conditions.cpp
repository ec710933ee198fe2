#include "essentia/conditions.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace essentia {

struct ConditionAccess {
    static CondPtr build(Condition::Kind kind, GraphPtr root, Morphism arrow, CondPtr body,
                         std::vector<CondPtr> children) {
        auto c = std::shared_ptr<Condition>(new Condition());
        c->kind_ = kind;
        c->root_ = std::move(root);
        c->arrow_ = std::move(arrow);
        c->body_ = std::move(body);
        c->children_ = std::move(children);
        return c;
    }
};

namespace {

CondPtr make(Condition::Kind kind, GraphPtr root, Morphism arrow, CondPtr body, std::vector<CondPtr> children) {
    return ConditionAccess::build(kind, std::move(root), std::move(arrow), std::move(body), std::move(children));
}

}  // namespace

CondPtr Condition::make_true(GraphPtr root) { return make(Kind::True, std::move(root), {}, nullptr, {}); }
CondPtr Condition::make_false(GraphPtr root) { return make(Kind::False, std::move(root), {}, nullptr, {}); }

CondPtr Condition::exists(Morphism arrow, CondPtr body) {
    if (!same_graph(arrow.codomain(), body->root()))
        throw Error("exists: body is not rooted at the arrow's codomain");
    auto root = arrow.domain();
    return make(Kind::Exists, root, std::move(arrow), std::move(body), {});
}

CondPtr Condition::exists(Morphism arrow) {
    auto body = make_true(arrow.codomain());
    return exists(std::move(arrow), body);
}

CondPtr Condition::forall(Morphism arrow, CondPtr body) {
    if (!same_graph(arrow.codomain(), body->root()))
        throw Error("forall: body is not rooted at the arrow's codomain");
    auto root = arrow.domain();
    return make(Kind::Forall, root, std::move(arrow), std::move(body), {});
}

CondPtr Condition::conj(GraphPtr root, std::vector<CondPtr> children) {
    for (const auto& c : children)
        if (!same_graph(c->root(), root))
            throw Error("and: operand over a different root");
    return make(Kind::And, std::move(root), {}, nullptr, std::move(children));
}

CondPtr Condition::disj(GraphPtr root, std::vector<CondPtr> children) {
    for (const auto& c : children)
        if (!same_graph(c->root(), root))
            throw Error("or: operand over a different root");
    return make(Kind::Or, std::move(root), {}, nullptr, std::move(children));
}

CondPtr Condition::negate(CondPtr body) {
    auto root = body->root();
    return make(Kind::Not, root, {}, std::move(body), {});
}

// ---------------------------------------------------------------------------

std::string canonical_string(const CondPtr& c) {
    using K = Condition::Kind;
    std::ostringstream os;
    switch (c->kind()) {
    case K::True:
        return "T";
    case K::False:
        return "F";
    case K::Not:
        return "!(" + canonical_string(c->body()) + ")";
    case K::And:
    case K::Or: {
        os << (c->kind() == K::And ? "&(" : "|(");
        for (std::size_t i = 0; i < c->children().size(); ++i)
            os << (i ? "," : "") << canonical_string(c->children()[i]);
        os << ")";
        return os.str();
    }
    case K::Exists:
    case K::Forall: {
        const auto& a = c->arrow();
        os << (c->kind() == K::Exists ? "E[" : "A[") << a.codomain()->describe() << " n";
        for (int x : a.node_map())
            os << "." << x;
        os << " e";
        for (int x : a.edge_map())
            os << "." << x;
        os << "](" << canonical_string(c->body()) << ")";
        return os.str();
    }
    }
    return {};
}

namespace {

// Rebases a condition over P1 onto P0 along an iso a: P0 -> P1.
CondPtr transport(const CondPtr& c, const Morphism& a) {
    using K = Condition::Kind;
    const auto& root = a.domain();
    switch (c->kind()) {
    case K::True:
        return Condition::make_true(root);
    case K::False:
        return Condition::make_false(root);
    case K::Not:
        return Condition::negate(transport(c->body(), a));
    case K::And:
    case K::Or: {
        std::vector<CondPtr> ch;
        for (const auto& x : c->children())
            ch.push_back(transport(x, a));
        return c->kind() == K::And ? Condition::conj(root, ch) : Condition::disj(root, ch);
    }
    case K::Exists:
        return Condition::exists(compose(a, c->arrow()), c->body());
    case K::Forall:
        return Condition::forall(compose(a, c->arrow()), c->body());
    }
    return c;
}

CondPtr norm(const CondPtr& c, bool neg, bool at_root) {
    using K = Condition::Kind;
    const auto& root = c->root();
    switch (c->kind()) {
    case K::True:
        return neg ? Condition::make_false(root) : Condition::make_true(root);
    case K::False:
        return neg ? Condition::make_true(root) : Condition::make_false(root);
    case K::Not:
        return norm(c->body(), !neg, at_root);
    case K::And:
    case K::Or: {
        bool is_and = (c->kind() == K::And) != neg;
        std::map<std::string, CondPtr> parts;
        for (const auto& x : c->children()) {
            auto n = norm(x, neg, at_root);
            if (n->kind() == (is_and ? K::True : K::False))
                continue;
            if (n->kind() == (is_and ? K::False : K::True))
                return n;
            if (n->kind() == (is_and ? K::And : K::Or)) {
                for (const auto& y : n->children())
                    parts.emplace(canonical_string(y), y);
                continue;
            }
            parts.emplace(canonical_string(n), n);
        }
        if (parts.empty())
            return is_and ? Condition::make_true(root) : Condition::make_false(root);
        if (parts.size() == 1)
            return parts.begin()->second;
        std::vector<CondPtr> ch;
        for (auto& [k, v] : parts)
            ch.push_back(v);
        return is_and ? Condition::conj(root, ch) : Condition::disj(root, ch);
    }
    case K::Exists:
    case K::Forall: {
        bool is_exists = (c->kind() == K::Exists) != neg;
        const auto& a = c->arrow();
        if (!at_root) {
            if (!a.is_injective())
                return is_exists ? Condition::make_false(root) : Condition::make_true(root);
            if (a.is_iso()) {
                auto moved = transport(c->body(), a);
                return norm(moved, neg, false);
            }
        }
        auto body = norm(c->body(), neg, false);
        if (is_exists && body->kind() == K::False)
            return Condition::make_false(root);
        if (!is_exists && body->kind() == K::True)
            return Condition::make_true(root);
        return is_exists ? Condition::exists(a, body) : Condition::forall(a, body);
    }
    }
    return c;
}

}  // namespace

CondPtr normalize(const CondPtr& c) { return norm(c, false, true); }

bool is_normalized(const CondPtr& c) { return canonical_string(normalize(c)) == canonical_string(c); }

bool satisfies(const Morphism& q, const CondPtr& c) {
    using K = Condition::Kind;
    switch (c->kind()) {
    case K::True:
        return true;
    case K::False:
        return false;
    case K::Not:
        return !satisfies(q, c->body());
    case K::And:
        return std::all_of(c->children().begin(), c->children().end(),
                           [&](const CondPtr& x) { return satisfies(q, x); });
    case K::Or:
        return std::any_of(c->children().begin(), c->children().end(),
                           [&](const CondPtr& x) { return satisfies(q, x); });
    case K::Exists: {
        bool found = false;
        for_each_extension(c->arrow(), q, true, [&](const Morphism& q1) {
            found = satisfies(q1, c->body());
            return !found;
        });
        return found;
    }
    case K::Forall: {
        bool ok = true;
        for_each_extension(c->arrow(), q, true, [&](const Morphism& q1) {
            ok = satisfies(q1, c->body());
            return ok;
        });
        return ok;
    }
    }
    return false;
}

namespace {

CondPtr shift_raw(const Morphism& b, const CondPtr& c, bool injective_match) {
    using K = Condition::Kind;
    const auto& root = b.codomain();
    switch (c->kind()) {
    case K::True:
        return Condition::make_true(root);
    case K::False:
        return Condition::make_false(root);
    case K::Not:
        return Condition::negate(shift_raw(b, c->body(), injective_match));
    case K::And:
    case K::Or: {
        std::vector<CondPtr> ch;
        for (const auto& x : c->children())
            ch.push_back(shift_raw(b, x, injective_match));
        return c->kind() == K::And ? Condition::conj(root, ch) : Condition::disj(root, ch);
    }
    case K::Exists:
    case K::Forall: {
        const auto& a = c->arrow();
        QuotientProblem p;
        p.parts = {a.codomain(), root};
        p.mono = {true, injective_match};
        p.name = a.codomain()->name() + "'";
        for (std::size_t x = 0; x < a.node_map().size(); ++x)
            p.node_pairs.push_back({{0, a.node(static_cast<int>(x))}, {1, b.node(static_cast<int>(x))}});
        for (std::size_t x = 0; x < a.edge_map().size(); ++x)
            p.edge_pairs.push_back({{0, a.edge(static_cast<int>(x))}, {1, b.edge(static_cast<int>(x))}});
        std::vector<CondPtr> branches;
        for_each_quotient(p, [&](const std::vector<Morphism>& legs) {
            const auto& b2 = legs[0];
            const auto& a2 = legs[1];
            auto body = normalize(shift_raw(b2, c->body(), true));
            if (c->kind() == K::Exists)
                branches.push_back(Condition::exists(a2, body));
            else
                branches.push_back(Condition::forall(a2, body));
            return true;
        });
        return c->kind() == K::Exists ? Condition::disj(root, branches) : Condition::conj(root, branches);
    }
    }
    return c;
}

CondPtr left_raw(const Morphism& l, const Morphism& r, const CondPtr& c) {
    using K = Condition::Kind;
    const auto& root = l.codomain();
    switch (c->kind()) {
    case K::True:
        return Condition::make_true(root);
    case K::False:
        return Condition::make_false(root);
    case K::Not:
        return Condition::negate(left_raw(l, r, c->body()));
    case K::And:
    case K::Or: {
        std::vector<CondPtr> ch;
        for (const auto& x : c->children())
            ch.push_back(left_raw(l, r, x));
        return c->kind() == K::And ? Condition::conj(root, ch) : Condition::disj(root, ch);
    }
    case K::Exists:
    case K::Forall: {
        bool is_exists = c->kind() == K::Exists;
        auto pc = pushout_complement(r, c->arrow());
        if (!pc)
            return is_exists ? Condition::make_false(root) : Condition::make_true(root);
        auto po = pushout(l, pc->k);
        auto target = po.object->renamed(c->arrow().codomain()->name() + "*");
        auto a2 = Morphism::trusted(l.codomain(), target, po.from_b.node_map(), po.from_b.edge_map());
        auto z2 = Morphism::trusted(pc->object, target, po.from_c.node_map(), po.from_c.edge_map());
        auto body = left_raw(z2, pc->d, c->body());
        return is_exists ? Condition::exists(a2, body) : Condition::forall(a2, body);
    }
    }
    return c;
}

}  // namespace

CondPtr shift(const Morphism& b, const CondPtr& c, bool injective_match) {
    if (!same_graph(b.domain(), c->root()))
        throw Error("shift: morphism does not start at the condition's root");
    return normalize(shift_raw(b, c, injective_match));
}

CondPtr left(const Morphism& l, const Morphism& r, const CondPtr& c) {
    if (!same_graph(r.codomain(), c->root()))
        throw Error("left: condition is not rooted at the span's right object");
    if (!same_graph(l.domain(), r.domain()))
        throw Error("left: span legs have different domains");
    if (!l.is_injective() || !r.is_injective())
        throw Error("left: span legs must be injective");
    return normalize(left_raw(l, r, c));
}

std::string pretty(const CondPtr& c) {
    using K = Condition::Kind;
    switch (c->kind()) {
    case K::True:
        return "true";
    case K::False:
        return "false";
    case K::Not:
        return "not(" + pretty(c->body()) + ")";
    case K::And:
    case K::Or: {
        std::string s = c->kind() == K::And ? "and(" : "or(";
        for (std::size_t i = 0; i < c->children().size(); ++i)
            s += (i ? ", " : "") + pretty(c->children()[i]);
        return s + ")";
    }
    case K::Exists:
    case K::Forall: {
        std::string s = c->kind() == K::Exists ? "exists(" : "forall(";
        s += c->arrow().codomain()->name();
        bool trivial = c->body()->kind() == (c->kind() == K::Exists ? K::True : K::False);
        if (!trivial)
            s += ", " + pretty(c->body());
        return s + ")";
    }
    }
    return {};
}

std::size_t quantifier_count(const CondPtr& c) {
    std::size_t n = c->is_quantifier() ? 1 : 0;
    if (c->body())
        n += quantifier_count(c->body());
    for (const auto& x : c->children())
        n += quantifier_count(x);
    return n;
}

// ---------------------------------------------------------------------------

std::vector<int> ConditionTree::leaves() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].children.empty())
            out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> ConditionTree::path_to(int node) const {
    std::vector<int> path;
    for (int x = node; x >= 0; x = nodes[static_cast<std::size_t>(x)].parent)
        path.push_back(x);
    std::reverse(path.begin(), path.end());
    return path;
}

Morphism ConditionTree::arrow_between(int from, int to) const {
    auto path = path_to(to);
    auto it = std::find(path.begin(), path.end(), from);
    if (it == path.end())
        throw Error("tree: node is not an ancestor");
    Morphism m = Morphism::identity(nodes[static_cast<std::size_t>(from)].graph);
    for (++it; it != path.end(); ++it)
        m = compose(m, nodes[static_cast<std::size_t>(*it)].arrow);
    return m;
}

namespace {

void collect(const CondPtr& c, int parent, ConditionTree& t) {
    using K = Condition::Kind;
    switch (c->kind()) {
    case K::True:
    case K::False:
        return;
    case K::Not:
        throw Error("tree: condition is not normalized");
    case K::And:
    case K::Or:
        for (const auto& x : c->children())
            collect(x, parent, t);
        return;
    case K::Exists:
    case K::Forall: {
        ConditionTree::Node n;
        n.graph = c->arrow().codomain();
        n.parent = parent;
        n.arrow = c->arrow();
        n.binding = c->kind() == K::Exists ? ConditionTree::Binding::Existential : ConditionTree::Binding::Universal;
        int idx = static_cast<int>(t.nodes.size());
        t.nodes.push_back(n);
        t.nodes[static_cast<std::size_t>(parent)].children.push_back(idx);
        collect(c->body(), idx, t);
        return;
    }
    }
}

}  // namespace

ConditionTree tree(const CondPtr& c) {
    ConditionTree t;
    ConditionTree::Node root;
    root.graph = c->root();
    t.nodes.push_back(root);
    collect(c, 0, t);
    return t;
}

// ---------------------------------------------------------------------------

std::shared_ptr<const CospanCondition> CospanCondition::make_true(GraphPtr root, GraphPtr root2) {
    auto c = std::shared_ptr<CospanCondition>(new CospanCondition());
    c->kind_ = Kind::True;
    c->root_ = std::move(root);
    c->root2_ = std::move(root2);
    return c;
}

std::shared_ptr<const CospanCondition> CospanCondition::exists(Morphism p1, Morphism p1b, CondPtr body) {
    if (!same_graph(p1.codomain(), p1b.codomain()) || !same_graph(p1.codomain(), body->root()))
        throw Error("cospan condition: legs and body disagree on the target");
    auto c = std::shared_ptr<CospanCondition>(new CospanCondition());
    c->kind_ = Kind::Exists;
    c->root_ = p1.domain();
    c->root2_ = p1b.domain();
    c->p1_ = std::move(p1);
    c->p1b_ = std::move(p1b);
    c->body_ = std::move(body);
    return c;
}

bool satisfies_cospan(const Morphism& q, const Morphism& q2, const CospanCondPtr& cc) {
    if (!same_graph(q.codomain(), q2.codomain()))
        throw Error("cospan satisfaction: matches have different codomains");
    switch (cc->kind()) {
    case CospanCondition::Kind::True:
        return true;
    case CospanCondition::Kind::False:
        return false;
    case CospanCondition::Kind::Exists:
        break;
    }
    auto c1 = extension_constraints(cc->left(), q, false);
    auto c2 = extension_constraints(cc->right(), q2, false);
    if (!c1 || !c2)
        return false;
    for (std::size_t i = 0; i < c1->fixed_nodes.size(); ++i) {
        int& a = c1->fixed_nodes[i];
        int b = c2->fixed_nodes[i];
        if (a >= 0 && b >= 0 && a != b)
            return false;
        if (a < 0)
            a = b;
    }
    for (std::size_t i = 0; i < c1->fixed_edges.size(); ++i) {
        int& a = c1->fixed_edges[i];
        int b = c2->fixed_edges[i];
        if (a >= 0 && b >= 0 && a != b)
            return false;
        if (a < 0)
            a = b;
    }
    bool found = false;
    for_each_morphism(cc->left().codomain(), q.codomain(), *c1, [&](const Morphism& q1) {
        found = satisfies(q1, cc->body());
        return !found;
    });
    return found;
}

std::string pretty(const CospanCondPtr& cc) {
    switch (cc->kind()) {
    case CospanCondition::Kind::True:
        return "true";
    case CospanCondition::Kind::False:
        return "false";
    case CospanCondition::Kind::Exists:
        break;
    }
    return "exists(" + cc->root()->name() + " -> " + cc->left().codomain()->name() + " <- " + cc->root2()->name() +
           ", " + pretty(cc->body()) + ")";
}

}  // namespace essentia
