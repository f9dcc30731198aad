#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rankwitness::graph {

struct VariableSpec {
    std::string name;
    std::uint32_t cardinality = 1;
    bool observed = true;
};

using VarId = std::size_t;
using NamedEdge = std::pair<std::string, std::string>;

/// Immutable DAG over declared variables. Construction validates names,
/// cardinalities and acyclicity; every query afterwards is const.
class CausalGraph {
public:
    static CausalGraph build(std::vector<VariableSpec> variables, const std::vector<NamedEdge>& edges);

    std::size_t size() const noexcept { return variables_.size(); }
    const std::vector<VariableSpec>& variables() const noexcept { return variables_; }
    const VariableSpec& variable(VarId v) const { return variables_.at(v); }

    /// Throws UnknownVariable.
    VarId id(std::string_view name) const;
    bool contains(std::string_view name) const noexcept;

    std::span<const VarId> parents(VarId v) const { return parents_.at(v); }
    std::span<const VarId> children(VarId v) const { return children_.at(v); }
    bool has_edge(VarId parent, VarId child) const;
    bool adjacent(VarId a, VarId b) const { return has_edge(a, b) || has_edge(b, a); }

    const std::vector<VarId>& topological_order() const noexcept { return topo_; }
    std::vector<std::pair<VarId, VarId>> edges() const;

    /// Indicator over vertices: v itself plus everything reachable along directed edges.
    std::vector<bool> descendants(VarId v) const;

private:
    std::vector<VariableSpec> variables_;
    std::unordered_map<std::string, VarId> index_;
    std::vector<std::vector<VarId>> parents_;
    std::vector<std::vector<VarId>> children_;
    std::vector<VarId> topo_;
};

struct SeparationQuery {
    std::vector<std::string> x_set;
    std::vector<std::string> y_set;
    std::vector<std::string> z_set;
};

/// A path is blocked by z_set when some interior vertex is a non-collider in
/// z_set, or a collider with neither itself nor any descendant in z_set.
bool path_is_blocked(const CausalGraph& graph, std::span<const std::string> path,
                     std::span<const std::string> z_set);
bool path_is_blocked(const CausalGraph& graph, std::span<const VarId> path, std::span<const VarId> z_set);

bool d_separated(const CausalGraph& graph, const SeparationQuery& query);
bool d_separated(const CausalGraph& graph, std::span<const VarId> x_set, std::span<const VarId> y_set,
                 std::span<const VarId> z_set);

/// Product of member cardinalities; 1 for the empty set.
std::uint64_t separator_cardinality(const CausalGraph& graph, std::span<const std::string> z_set);

struct HiddenSeparator {
    std::vector<std::string> members;
    std::uint64_t cardinality = 1;
};

/// All inclusion-minimal sets S of hidden variables such that S together
/// with `conditioned` d-separates x and y. Ordered by size, then by
/// declaration order of members.
std::vector<HiddenSeparator> find_hidden_separators(const CausalGraph& graph, std::string_view x,
                                                    std::string_view y,
                                                    std::span<const std::string> conditioned);

/// Graphviz export; hidden variables are drawn dashed.
std::string to_dot(const CausalGraph& graph);

}  // namespace rankwitness::graph
