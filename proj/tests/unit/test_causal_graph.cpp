#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "causal_graph.hpp"
#include "error.hpp"
#include "oracles.hpp"

using namespace rankwitness;
using namespace rankwitness::graph;

namespace {

CausalGraph fig_common_cause() {
    return CausalGraph::build({{"X", 3, true}, {"Y", 3, true}, {"Z", 3, false}}, {{"Z", "X"}, {"Z", "Y"}});
}

CausalGraph fig_seed_and_message() {
    return CausalGraph::build({{"X", 3, true}, {"Z2", 2, false}, {"Y", 3, true}, {"Z1", 2, false}},
                              {{"Z1", "X"}, {"Z1", "Y"}, {"X", "Z2"}, {"Z2", "Y"}});
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::IoError;
}

}  // namespace

TEST(CausalGraph, RejectsMalformedInput) {
    EXPECT_EQ(code_of([] { CausalGraph::build({{"A", 2}, {"B", 2}}, {{"A", "B"}, {"B", "A"}}); }),
              ErrorCode::CycleDetected);
    EXPECT_EQ(code_of([] { CausalGraph::build({{"A", 2}}, {{"A", "A"}}); }), ErrorCode::CycleDetected);
    EXPECT_EQ(code_of([] { CausalGraph::build({{"A", 2}, {"A", 3}}, {}); }), ErrorCode::DuplicateName);
    EXPECT_EQ(code_of([] { CausalGraph::build({{"A", 2}}, {{"A", "Q"}}); }), ErrorCode::UnknownVariable);
    EXPECT_EQ(code_of([] { CausalGraph::build({{"A", 0}}, {}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { CausalGraph::build({{"", 2}}, {}); }), ErrorCode::InvalidArgument);
}

TEST(CausalGraph, LongerCycleDetected) {
    EXPECT_EQ(code_of([] {
                  CausalGraph::build({{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}},
                                     {{"A", "B"}, {"B", "C"}, {"C", "D"}, {"D", "B"}});
              }),
              ErrorCode::CycleDetected);
}

TEST(CausalGraph, TopologicalOrderRespectsEdges) {
    const auto g = fig_seed_and_message();
    const auto& order = g.topological_order();
    ASSERT_EQ(order.size(), g.size());
    std::vector<std::size_t> pos(g.size());
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& [p, c] : g.edges()) EXPECT_LT(pos[p], pos[c]);
}

TEST(CausalGraph, DescendantsIncludeSelf) {
    const auto g = fig_seed_and_message();
    const auto d = g.descendants(g.id("X"));
    EXPECT_TRUE(d[g.id("X")]);
    EXPECT_TRUE(d[g.id("Z2")]);
    EXPECT_TRUE(d[g.id("Y")]);
    EXPECT_FALSE(d[g.id("Z1")]);
}

TEST(CausalGraph, DuplicateEdgesCollapse) {
    const auto g = CausalGraph::build({{"A", 2}, {"B", 2}}, {{"A", "B"}, {"A", "B"}});
    EXPECT_EQ(g.edges().size(), 1u);
}

TEST(PathBlocking, ForkChainAndCollider) {
    const auto fork = fig_common_cause();
    const std::vector<std::string> p{"X", "Z", "Y"};
    const std::vector<std::string> none, z{"Z"};
    EXPECT_FALSE(path_is_blocked(fork, p, none));
    EXPECT_TRUE(path_is_blocked(fork, p, z));

    const auto collider = CausalGraph::build({{"X", 2}, {"Y", 2}, {"C", 2}, {"D", 2}},
                                             {{"X", "C"}, {"Y", "C"}, {"C", "D"}});
    const std::vector<std::string> q{"X", "C", "Y"};
    EXPECT_TRUE(path_is_blocked(collider, q, none));
    EXPECT_FALSE(path_is_blocked(collider, q, std::vector<std::string>{"C"}));
    // A conditioned descendant opens the collider too.
    EXPECT_FALSE(path_is_blocked(collider, q, std::vector<std::string>{"D"}));
}

TEST(PathBlocking, InvalidPaths) {
    const auto g = fig_common_cause();
    const std::vector<std::string> none;
    EXPECT_EQ(code_of([&] { path_is_blocked(g, std::vector<std::string>{"X", "Y"}, none); }), ErrorCode::InvalidPath);
    EXPECT_EQ(code_of([&] { path_is_blocked(g, std::vector<std::string>{"X", "Z", "X"}, none); }),
              ErrorCode::InvalidPath);
    EXPECT_EQ(code_of([&] { path_is_blocked(g, std::vector<std::string>{}, none); }), ErrorCode::InvalidPath);
    EXPECT_EQ(code_of([&] { path_is_blocked(g, std::vector<std::string>{"X", "W"}, none); }),
              ErrorCode::UnknownVariable);
}

TEST(DSeparation, ExampleStructures) {
    const auto a = fig_common_cause();
    EXPECT_TRUE(d_separated(a, {{"X"}, {"Y"}, {"Z"}}));
    EXPECT_FALSE(d_separated(a, {{"X"}, {"Y"}, {}}));

    const auto b = CausalGraph::build({{"X", 3}, {"Z", 3, false}, {"Y", 3}}, {{"X", "Z"}, {"Z", "Y"}});
    EXPECT_TRUE(d_separated(b, {{"X"}, {"Y"}, {"Z"}}));
    EXPECT_FALSE(d_separated(b, {{"X"}, {"Y"}, {}}));

    const auto c = fig_seed_and_message();
    EXPECT_TRUE(d_separated(c, {{"X"}, {"Y"}, {"Z1", "Z2"}}));
    EXPECT_FALSE(d_separated(c, {{"X"}, {"Y"}, {"Z1"}}));
    EXPECT_FALSE(d_separated(c, {{"X"}, {"Y"}, {"Z2"}}));
}

TEST(DSeparation, SetsAndValidation) {
    const auto c = fig_seed_and_message();
    EXPECT_TRUE(d_separated(c, {{"Z1"}, {"Z2"}, {"X"}}));
    EXPECT_FALSE(d_separated(c, {{"Z1", "X"}, {"Y"}, {"Z2"}}));
    EXPECT_EQ(code_of([&] { d_separated(c, {{"X"}, {"X"}, {}}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { d_separated(c, {{}, {"Y"}, {}}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { d_separated(c, {{"X"}, {"Y"}, {"X"}}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { d_separated(c, {{"X"}, {"Q"}, {}}); }), ErrorCode::UnknownVariable);
}

TEST(DSeparation, AgreesWithPathEnumerationOnRandomDags) {
    std::mt19937_64 rng(7);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 6;
        const auto dag = oracle::random_dag(rng, n, 0.45, 3);
        std::vector<VariableSpec> vars;
        std::vector<NamedEdge> edges;
        for (int v = 0; v < n; ++v) {
            vars.push_back({"v" + std::to_string(v), static_cast<std::uint32_t>(dag.card[v]), true});
            for (int p : dag.parents[v]) edges.emplace_back("v" + std::to_string(p), "v" + std::to_string(v));
        }
        const auto g = CausalGraph::build(vars, edges);
        // Random disjoint (X, Y, Z) by labeling each vertex.
        std::uniform_int_distribution<int> label(0, 3);
        std::vector<int> x, y, z;
        for (int v = 0; v < n; ++v) {
            switch (label(rng)) {
                case 0: x.push_back(v); break;
                case 1: y.push_back(v); break;
                case 2: z.push_back(v); break;
                default: break;
            }
        }
        if (x.empty() || y.empty()) continue;
        const std::vector<VarId> xi(x.begin(), x.end()), yi(y.begin(), y.end()), zi(z.begin(), z.end());
        EXPECT_EQ(d_separated(g, xi, yi, zi), oracle::d_separated_by_paths(dag, x, y, z)) << "trial " << trial;
        ++checked;
    }
    EXPECT_GT(checked, 150);
}

TEST(DSeparation, PathBlockingAgreesWithOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto dag = oracle::random_dag(rng, 5, 0.5, 2);
        std::vector<VariableSpec> vars;
        std::vector<NamedEdge> edges;
        for (int v = 0; v < dag.n; ++v) {
            vars.push_back({"v" + std::to_string(v), 2, true});
            for (int p : dag.parents[v]) edges.emplace_back("v" + std::to_string(p), "v" + std::to_string(v));
        }
        const auto g = CausalGraph::build(vars, edges);
        std::vector<bool> in_z(dag.n, false);
        std::vector<VarId> z;
        for (int v = 1; v < dag.n - 1; ++v)
            if (rng() % 2) {
                in_z[v] = true;
                z.push_back(v);
            }
        for (const auto& p : oracle::simple_paths(dag, 0, dag.n - 1)) {
            const std::vector<VarId> path(p.begin(), p.end());
            EXPECT_EQ(path_is_blocked(g, path, z), oracle::blocked(dag, p, in_z));
        }
    }
}

TEST(HiddenSeparators, CommonCauseAndPartialObservation) {
    const auto a = fig_common_cause();
    auto seps = find_hidden_separators(a, "X", "Y", {});
    ASSERT_EQ(seps.size(), 1u);
    EXPECT_EQ(seps[0].members, std::vector<std::string>{"Z"});
    EXPECT_EQ(seps[0].cardinality, 3u);

    const auto c = CausalGraph::build({{"X", 3}, {"Y", 3}, {"U", 2, false}, {"Z", 2}},
                                      {{"U", "X"}, {"U", "Y"}, {"Z", "X"}, {"Z", "Y"}});
    EXPECT_TRUE(find_hidden_separators(c, "X", "Y", {}).empty());
    const std::vector<std::string> cond{"Z"};
    seps = find_hidden_separators(c, "X", "Y", cond);
    ASSERT_EQ(seps.size(), 1u);
    EXPECT_EQ(seps[0].members, std::vector<std::string>{"U"});
    EXPECT_EQ(seps[0].cardinality, 2u);
}

TEST(HiddenSeparators, SeedAndMessageNeedsBoth) {
    const auto c = fig_seed_and_message();
    const auto seps = find_hidden_separators(c, "X", "Y", {});
    ASSERT_EQ(seps.size(), 1u);
    EXPECT_EQ(seps[0].cardinality, 4u);
}

TEST(HiddenSeparators, MinimalOnlyAndDirectEdge) {
    // Two parallel hidden routes: either alone fails, both together separate;
    // a third hidden variable off the paths never appears.
    const auto g = CausalGraph::build({{"X", 2}, {"Y", 2}, {"A", 2, false}, {"B", 3, false}, {"C", 5, false}},
                                      {{"A", "X"}, {"A", "Y"}, {"X", "B"}, {"B", "Y"}, {"C", "A"}});
    const auto seps = find_hidden_separators(g, "X", "Y", {});
    ASSERT_EQ(seps.size(), 1u);
    EXPECT_EQ(seps[0].members, (std::vector<std::string>{"A", "B"}));
    EXPECT_EQ(seps[0].cardinality, 6u);

    const auto direct = CausalGraph::build({{"X", 2}, {"Y", 2}, {"U", 2, false}}, {{"X", "Y"}, {"U", "X"}});
    EXPECT_TRUE(find_hidden_separators(direct, "X", "Y", {}).empty());

    const std::vector<std::string> hidden_cond{"A"};
    EXPECT_EQ(code_of([&] { find_hidden_separators(g, "X", "Y", hidden_cond); }), ErrorCode::InvalidArgument);
}

TEST(SeparatorCardinality, ProductAndOverflow) {
    const auto g = fig_seed_and_message();
    EXPECT_EQ(separator_cardinality(g, std::vector<std::string>{}), 1u);
    EXPECT_EQ(separator_cardinality(g, std::vector<std::string>{"Z1", "Z2", "X"}), 12u);
    std::vector<VariableSpec> big;
    std::vector<std::string> names;
    for (int i = 0; i < 3; ++i) {
        big.push_back({"B" + std::to_string(i), 4000000000u, false});
        names.push_back("B" + std::to_string(i));
    }
    const auto h = CausalGraph::build(big, {});
    EXPECT_EQ(code_of([&] { separator_cardinality(h, names); }), ErrorCode::TooLarge);
}

TEST(Dot, HiddenVariablesDashed) {
    const auto dot = to_dot(fig_common_cause());
    EXPECT_NE(dot.find("\"Z\" [shape=ellipse, style=dashed"), std::string::npos);
    EXPECT_NE(dot.find("\"X\" [shape=ellipse, style=solid"), std::string::npos);
    EXPECT_NE(dot.find("\"Z\" -> \"X\""), std::string::npos);
}
