#include "causal_graph.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <deque>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace rankwitness::graph {

CausalGraph CausalGraph::build(std::vector<VariableSpec> variables, const std::vector<NamedEdge>& edges) {
    CausalGraph g;
    g.variables_ = std::move(variables);
    const std::size_t n = g.variables_.size();
    for (VarId v = 0; v < n; ++v) {
        const auto& spec = g.variables_[v];
        if (spec.name.empty()) throw Error(ErrorCode::InvalidArgument, "variable name must be nonempty");
        if (spec.cardinality < 1)
            throw Error(ErrorCode::InvalidArgument, "variable '" + spec.name + "' has cardinality 0");
        if (!g.index_.emplace(spec.name, v).second)
            throw Error(ErrorCode::DuplicateName, "variable '" + spec.name + "' declared twice");
    }

    g.parents_.assign(n, {});
    g.children_.assign(n, {});
    for (const auto& [from, to] : edges) {
        const VarId p = g.id(from);
        const VarId c = g.id(to);
        if (p == c) throw Error(ErrorCode::CycleDetected, "self-loop on '" + from + "'");
        if (std::find(g.children_[p].begin(), g.children_[p].end(), c) != g.children_[p].end()) continue;
        g.children_[p].push_back(c);
        g.parents_[c].push_back(p);
    }
    for (auto& list : g.parents_) std::sort(list.begin(), list.end());
    for (auto& list : g.children_) std::sort(list.begin(), list.end());

    // Kahn's algorithm; smallest id first keeps the order deterministic.
    std::vector<std::size_t> indegree(n);
    for (VarId v = 0; v < n; ++v) indegree[v] = g.parents_[v].size();
    std::vector<VarId> ready;
    for (VarId v = n; v-- > 0;)
        if (indegree[v] == 0) ready.push_back(v);
    while (!ready.empty()) {
        std::sort(ready.begin(), ready.end(), std::greater<>());
        const VarId v = ready.back();
        ready.pop_back();
        g.topo_.push_back(v);
        for (VarId c : g.children_[v])
            if (--indegree[c] == 0) ready.push_back(c);
    }
    if (g.topo_.size() != n) throw Error(ErrorCode::CycleDetected, "edge set contains a directed cycle");
    return g;
}

VarId CausalGraph::id(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw Error(ErrorCode::UnknownVariable, "no variable named '" + std::string(name) + "'");
    return it->second;
}

bool CausalGraph::contains(std::string_view name) const noexcept {
    return index_.count(std::string(name)) != 0;
}

bool CausalGraph::has_edge(VarId parent, VarId child) const {
    const auto& ch = children_.at(parent);
    return std::binary_search(ch.begin(), ch.end(), child);
}

std::vector<std::pair<VarId, VarId>> CausalGraph::edges() const {
    std::vector<std::pair<VarId, VarId>> out;
    for (VarId p = 0; p < size(); ++p)
        for (VarId c : children_[p]) out.emplace_back(p, c);
    return out;
}

std::vector<bool> CausalGraph::descendants(VarId v) const {
    std::vector<bool> seen(size(), false);
    std::vector<VarId> stack{v};
    seen.at(v) = true;
    while (!stack.empty()) {
        const VarId u = stack.back();
        stack.pop_back();
        for (VarId c : children_[u])
            if (!seen[c]) {
                seen[c] = true;
                stack.push_back(c);
            }
    }
    return seen;
}

namespace {

std::vector<VarId> resolve(const CausalGraph& graph, std::span<const std::string> names) {
    std::vector<VarId> ids;
    ids.reserve(names.size());
    for (const auto& n : names) ids.push_back(graph.id(n));
    return ids;
}

std::vector<bool> indicator(std::size_t n, std::span<const VarId> ids) {
    std::vector<bool> out(n, false);
    for (VarId v : ids) out.at(v) = true;
    return out;
}

void validate_query(const CausalGraph& graph, std::span<const VarId> x, std::span<const VarId> y,
                    std::span<const VarId> z) {
    if (x.empty() || y.empty()) throw Error(ErrorCode::InvalidArgument, "x_set and y_set must be nonempty");
    std::vector<int> owner(graph.size(), -1);
    int tag = 0;
    for (auto set : {x, y, z}) {
        for (VarId v : set) {
            if (v >= graph.size()) throw Error(ErrorCode::UnknownVariable, "variable id out of range");
            if (owner[v] != -1 && owner[v] != tag)
                throw Error(ErrorCode::InvalidArgument,
                            "separation query sets must be disjoint ('" + graph.variable(v).name + "')");
            owner[v] = tag;
        }
        ++tag;
    }
}

}  // namespace

bool path_is_blocked(const CausalGraph& graph, std::span<const VarId> path, std::span<const VarId> z_set) {
    if (path.empty()) throw Error(ErrorCode::InvalidPath, "empty path");
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path[i] >= graph.size()) throw Error(ErrorCode::InvalidPath, "vertex id out of range");
        for (std::size_t j = 0; j < i; ++j)
            if (path[i] == path[j]) throw Error(ErrorCode::InvalidPath, "path revisits a vertex");
        if (i > 0 && !graph.adjacent(path[i - 1], path[i]))
            throw Error(ErrorCode::InvalidPath, "'" + graph.variable(path[i - 1]).name + "' and '" +
                                                    graph.variable(path[i]).name + "' are not adjacent");
    }
    const auto in_z = indicator(graph.size(), z_set);
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const VarId prev = path[i - 1], mid = path[i], next = path[i + 1];
        const bool collider = graph.has_edge(prev, mid) && graph.has_edge(next, mid);
        if (!collider) {
            if (in_z[mid]) return true;
            continue;
        }
        const auto desc = graph.descendants(mid);
        bool opened = false;
        for (VarId v = 0; v < graph.size(); ++v)
            if (desc[v] && in_z[v]) opened = true;
        if (!opened) return true;
    }
    return false;
}

bool path_is_blocked(const CausalGraph& graph, std::span<const std::string> path,
                     std::span<const std::string> z_set) {
    const auto p = resolve(graph, path);
    const auto z = resolve(graph, z_set);
    return path_is_blocked(graph, std::span<const VarId>(p), std::span<const VarId>(z));
}

bool d_separated(const CausalGraph& graph, std::span<const VarId> x_set, std::span<const VarId> y_set,
                 std::span<const VarId> z_set) {
    validate_query(graph, x_set, y_set, z_set);
    const std::size_t n = graph.size();
    const auto in_z = indicator(n, z_set);
    const auto in_y = indicator(n, y_set);

    // Vertices that are in z_set or have a descendant there; a collider at
    // such a vertex is open.
    std::vector<bool> z_ancestor(n, false);
    std::vector<VarId> stack(z_set.begin(), z_set.end());
    for (VarId v : z_set) z_ancestor[v] = true;
    while (!stack.empty()) {
        const VarId v = stack.back();
        stack.pop_back();
        for (VarId p : graph.parents(v))
            if (!z_ancestor[p]) {
                z_ancestor[p] = true;
                stack.push_back(p);
            }
    }

    // Active-trail reachability over (vertex, direction) states. `up` means
    // the trail entered the vertex from one of its children.
    enum Dir : int { up = 0, down = 1 };
    std::vector<std::array<bool, 2>> visited(n, {false, false});
    std::deque<std::pair<VarId, Dir>> queue;
    for (VarId x : x_set) queue.emplace_back(x, up);
    while (!queue.empty()) {
        const auto [v, dir] = queue.front();
        queue.pop_front();
        if (visited[v][dir]) continue;
        visited[v][dir] = true;
        if (!in_z[v] && in_y[v]) return false;

        if (dir == up) {
            if (in_z[v]) continue;
            for (VarId p : graph.parents(v)) queue.emplace_back(p, up);
            for (VarId c : graph.children(v)) queue.emplace_back(c, down);
        } else {
            if (!in_z[v])
                for (VarId c : graph.children(v)) queue.emplace_back(c, down);
            if (z_ancestor[v])
                for (VarId p : graph.parents(v)) queue.emplace_back(p, up);
        }
    }
    return true;
}

bool d_separated(const CausalGraph& graph, const SeparationQuery& query) {
    const auto x = resolve(graph, query.x_set);
    const auto y = resolve(graph, query.y_set);
    const auto z = resolve(graph, query.z_set);
    return d_separated(graph, std::span<const VarId>(x), std::span<const VarId>(y), std::span<const VarId>(z));
}

std::uint64_t separator_cardinality(const CausalGraph& graph, std::span<const std::string> z_set) {
    std::uint64_t product = 1;
    for (const auto& name : z_set) {
        const std::uint64_t c = graph.variable(graph.id(name)).cardinality;
        if (product > std::numeric_limits<std::uint64_t>::max() / c)
            throw Error(ErrorCode::TooLarge, "separator cardinality overflows 64 bits");
        product *= c;
    }
    return product;
}

std::vector<HiddenSeparator> find_hidden_separators(const CausalGraph& graph, std::string_view x,
                                                    std::string_view y,
                                                    std::span<const std::string> conditioned) {
    const VarId xi = graph.id(x);
    const VarId yi = graph.id(y);
    if (xi == yi) throw Error(ErrorCode::InvalidArgument, "x and y must differ");
    const auto cond = resolve(graph, conditioned);
    for (VarId c : cond) {
        if (!graph.variable(c).observed)
            throw Error(ErrorCode::InvalidArgument,
                        "conditioning variable '" + graph.variable(c).name + "' is not observed");
        if (c == xi || c == yi) throw Error(ErrorCode::InvalidArgument, "conditioning set contains x or y");
    }

    std::vector<VarId> hidden;
    for (VarId v = 0; v < graph.size(); ++v)
        if (!graph.variable(v).observed && v != xi && v != yi) hidden.push_back(v);
    constexpr std::size_t max_hidden = 20;
    if (hidden.size() > max_hidden)
        throw Error(ErrorCode::TooLarge, "separator search is limited to 20 hidden variables");

    const std::uint32_t full = 1u << hidden.size();
    std::vector<std::uint32_t> masks(full);
    for (std::uint32_t m = 0; m < full; ++m) masks[m] = m;
    std::stable_sort(masks.begin(), masks.end(),
                     [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });

    const VarId xs[] = {xi};
    const VarId ys[] = {yi};
    std::vector<std::uint32_t> minimal;
    std::vector<HiddenSeparator> out;
    for (std::uint32_t m : masks) {
        bool dominated = false;
        for (std::uint32_t kept : minimal)
            if ((kept & m) == kept) dominated = true;
        if (dominated) continue;

        std::vector<VarId> z = cond;
        HiddenSeparator sep;
        for (std::size_t i = 0; i < hidden.size(); ++i)
            if (m & (1u << i)) {
                z.push_back(hidden[i]);
                sep.members.push_back(graph.variable(hidden[i]).name);
            }
        if (!d_separated(graph, xs, ys, z)) continue;
        sep.cardinality = separator_cardinality(graph, sep.members);
        minimal.push_back(m);
        out.push_back(std::move(sep));
    }
    return out;
}

std::string to_dot(const CausalGraph& graph) {
    std::ostringstream os;
    os << "digraph causal {\n";
    for (const auto& v : graph.variables()) {
        os << "  \"" << v.name << "\" [shape=ellipse, style=" << (v.observed ? "solid" : "dashed")
           << ", label=\"" << v.name << " (" << v.cardinality << ")\"];\n";
    }
    for (const auto& [p, c] : graph.edges())
        os << "  \"" << graph.variable(p).name << "\" -> \"" << graph.variable(c).name << "\";\n";
    os << "}\n";
    return os.str();
}

}  // namespace rankwitness::graph
