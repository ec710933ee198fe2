#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace essentia {

/// Raised for malformed graphs, morphisms and other contract violations.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EdgeType {
    std::string name;
    int source = -1;
    int target = -1;
};

/// Node and edge type declarations. Every TypedGraph refers to one of these.
class TypeGraph {
public:
    int add_node_type(const std::string& name);
    int add_edge_type(const std::string& name, const std::string& source, const std::string& target);

    int node_type(const std::string& name) const;
    int edge_type(const std::string& name) const;
    std::optional<int> find_node_type(const std::string& name) const;
    std::optional<int> find_edge_type(const std::string& name) const;

    const std::vector<std::string>& node_types() const { return node_types_; }
    const std::vector<EdgeType>& edge_types() const { return edge_types_; }

    bool operator==(const TypeGraph& other) const;

private:
    std::vector<std::string> node_types_;
    std::vector<EdgeType> edge_types_;
    std::map<std::string, int> node_index_;
    std::map<std::string, int> edge_index_;
};

using TypeGraphPtr = std::shared_ptr<const TypeGraph>;

struct Node {
    std::string id;
    int type = -1;
};

struct Edge {
    std::string id;
    int type = -1;
    int source = -1;
    int target = -1;
};

class TypedGraph;
using GraphPtr = std::shared_ptr<const TypedGraph>;

/// A finite graph typed over a TypeGraph. Immutable once built; build with GraphBuilder.
/// Nodes and edges are addressed by dense indices; ids are opaque strings kept for output.
class TypedGraph {
public:
    const TypeGraphPtr& types() const { return types_; }
    const std::string& name() const { return name_; }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return nodes_.empty() && edges_.empty(); }

    const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const Edge& edge(int i) const { return edges_[static_cast<std::size_t>(i)]; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::optional<int> find_node(const std::string& id) const;
    std::optional<int> find_edge(const std::string& id) const;
    int node_index(const std::string& id) const;
    int edge_index(const std::string& id) const;

    const std::vector<int>& out_edges(int node) const { return out_[static_cast<std::size_t>(node)]; }
    const std::vector<int>& in_edges(int node) const { return in_[static_cast<std::size_t>(node)]; }

    /// Structural value equality: same types, ids, typing and incidence in the same order.
    /// The display name is not part of the value.
    bool same_as(const TypedGraph& other) const;

    /// Human-readable "1,10:Class" style listing.
    std::string describe() const;
    std::string node_label(int i) const;

    /// A copy carrying a different display name.
    GraphPtr renamed(const std::string& name) const;

private:
    friend class GraphBuilder;
    TypeGraphPtr types_;
    std::string name_;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::map<std::string, int> node_index_;
    std::map<std::string, int> edge_index_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
};

bool same_graph(const GraphPtr& a, const GraphPtr& b);

class GraphBuilder {
public:
    explicit GraphBuilder(TypeGraphPtr types, std::string name = {});

    int add_node(const std::string& id, int type);
    int add_node(const std::string& id, const std::string& type);
    int add_edge(const std::string& id, int type, int source, int target);
    int add_edge(const std::string& id, const std::string& type, const std::string& source,
                 const std::string& target);

    /// Picks `preferred` when free, otherwise appends primes until unique.
    std::string fresh_node_id(const std::string& preferred) const;
    std::string fresh_edge_id(const std::string& preferred) const;

    std::size_t node_count() const { return graph_.nodes_.size(); }
    std::size_t edge_count() const { return graph_.edges_.size(); }

    GraphPtr build() const;

private:
    TypedGraph graph_;
};

/// Comma-joined union of the id tokens of `a` and `b` ("1" + "10" -> "1,10").
std::string join_ids(const std::string& a, const std::string& b);

/// A total, type- and structure-preserving map between two graphs.
class Morphism {
public:
    Morphism() = default;
    /// Validates typing and incidence; throws Error otherwise.
    Morphism(GraphPtr domain, GraphPtr codomain, std::vector<int> node_map, std::vector<int> edge_map);

    /// Skips validation; for maps produced by constructions that guarantee well-formedness.
    static Morphism trusted(GraphPtr domain, GraphPtr codomain, std::vector<int> node_map,
                            std::vector<int> edge_map);
    static Morphism identity(const GraphPtr& g);
    /// The unique morphism from the empty graph.
    static Morphism from_empty(const GraphPtr& g);

    const GraphPtr& domain() const { return domain_; }
    const GraphPtr& codomain() const { return codomain_; }
    int node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    int edge(int i) const { return edges_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& node_map() const { return nodes_; }
    const std::vector<int>& edge_map() const { return edges_; }

    bool valid() const { return static_cast<bool>(domain_); }
    bool is_injective() const;
    bool is_surjective() const;
    bool is_iso() const { return is_injective() && is_surjective(); }

    /// Pointwise equality (same domain/codomain values and maps).
    bool operator==(const Morphism& other) const;
    bool operator!=(const Morphism& other) const { return !(*this == other); }

    std::string describe() const;

private:
    GraphPtr domain_;
    GraphPtr codomain_;
    std::vector<int> nodes_;
    std::vector<int> edges_;
};

/// g after f: domain(f) -> codomain(g). Requires codomain(f) == domain(g).
Morphism compose(const Morphism& f, const Morphism& g);
/// Right-to-left reading: after(g, f) == compose(f, g).
inline Morphism after(const Morphism& g, const Morphism& f) { return compose(f, g); }

bool is_mono(const Morphism& f);

/// Constraints for morphism search. `fixed_nodes[i]` >= 0 pins domain node i.
struct MorphismConstraints {
    bool injective = false;
    std::vector<int> fixed_nodes;
    std::vector<int> fixed_edges;
};

/// Calls `visit` for every morphism A -> B satisfying the constraints, in canonical order.
/// Stops early when `visit` returns false.
void for_each_morphism(const GraphPtr& a, const GraphPtr& b, const MorphismConstraints& constraints,
                       const std::function<bool(const Morphism&)>& visit);

std::vector<Morphism> enumerate_morphisms(const GraphPtr& a, const GraphPtr& b, bool mono_only);
std::optional<Morphism> find_morphism(const GraphPtr& a, const GraphPtr& b,
                                      const MorphismConstraints& constraints);
std::size_t count_morphisms(const GraphPtr& a, const GraphPtr& b, const MorphismConstraints& constraints);

/// Constraints pinning a morphism X -> G so that it extends `q` along `p`, i.e. result o p == q.
/// Returns nullopt when `p` identifies elements that `q` keeps apart.
std::optional<MorphismConstraints> extension_constraints(const Morphism& p, const Morphism& q,
                                                         bool injective);

/// All morphisms x with x o p == q (x injective when requested).
void for_each_extension(const Morphism& p, const Morphism& q, bool injective,
                        const std::function<bool(const Morphism&)>& visit);

std::optional<Morphism> are_isomorphic(const GraphPtr& a, const GraphPtr& b);

/// Cheap isomorphism invariant: equal for isomorphic graphs.
std::string graph_invariant(const TypedGraph& g);

/// For a mono f, the unique x with f o x == g if g factors through f.
std::optional<Morphism> factor_through_mono(const Morphism& g, const Morphism& f);

GraphPtr empty_graph(const TypeGraphPtr& types);

}  // namespace essentia
