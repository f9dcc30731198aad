#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "error.hpp"
#include "io.hpp"
#include "oracles.hpp"
#include "witness.hpp"

using namespace rankwitness;
using namespace rankwitness::witness;

namespace {

dist::RationalDistribution table1() {
    const Rational s(1, 6);
    return dist::RationalDistribution::from_values({{"X", 3, {}}, {"Y", 3, {}}}, {0, s, s, s, 0, s, s, s, 0});
}

graph::CausalGraph common_cause(std::uint32_t card_u, std::uint32_t nx = 3, std::uint32_t ny = 3) {
    return graph::CausalGraph::build({{"X", nx, true}, {"Y", ny, true}, {"U", card_u, false}},
                                     {{"U", "X"}, {"U", "Y"}});
}

io::json load(const std::string& name) {
    std::ifstream in(std::string(RW_DATA_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return io::parse(ss.str());
}

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::IoError;
}

bool disjunction(ExpectationPair p, double tol) {
    const double lo = std::min(p.first, p.second), hi = std::max(p.first, p.second);
    return std::abs(std::abs(p.first) - std::abs(p.second)) <= tol || std::abs(lo + 1.0) <= tol ||
           std::abs(hi - 1.0) <= tol;
}

}  // namespace

TEST(Classify, ComparesCertifiedBounds) {
    nnrank::RankBounds b;
    b.lower = 3;
    b.upper = 3;
    EXPECT_EQ(classify(b, 2), Status::Refuted);
    EXPECT_EQ(classify(b, 3), Status::Consistent);
    b.lower = 2;
    b.upper = 4;
    EXPECT_EQ(classify(b, 3), Status::Inconclusive);
    EXPECT_EQ(classify(b, 1), Status::Refuted);
}

TEST(RankCheck, TableOneNeedsThreeStates) {
    EXPECT_EQ(corollary1_check(table1(), 2).status, Status::Refuted);
    EXPECT_EQ(corollary1_check(table1(), 3).status, Status::Consistent);
    EXPECT_EQ(corollary1_check(dist::to_float(table1()), 2).status, Status::Refuted);
    EXPECT_EQ(lower_bound_hidden_cardinality(table1()), 3u);
    EXPECT_EQ(code_of([] { corollary1_check(table1(), 0); }), ErrorCode::InvalidArgument);
}

TEST(RankCheck, InconclusiveWhenSearchDisabled) {
    const auto d = dist::FloatDistribution::from_values({{"X", 3, {}}, {"Y", 3, {}}},
                                                        {0.1, 0.1, 0.1, 0.2, 0.2, 0.0, 0.1, 0.1, 0.1});
    nnrank::RankConfig cfg;
    cfg.restarts = 0;
    cfg.exact_lb_max_support = 0;
    const auto v = corollary1_check(d, 2, cfg);
    EXPECT_EQ(v.status, Status::Inconclusive);
}

TEST(DirectInfluence, TableOneRefutesBinaryCommonCause) {
    const auto v = witness_direct_influence({common_cause(2), "X", "Y", {}}, table1());
    EXPECT_EQ(v.status, Status::Refuted);
    ASSERT_EQ(v.evidence.size(), 1u);
    EXPECT_EQ(v.evidence[0].rank_lower, 3u);
    EXPECT_EQ(v.evidence[0].separator_cardinality, 2u);
    EXPECT_NE(v.message.find("direct causal influence"), std::string::npos);

    EXPECT_EQ(witness_direct_influence({common_cause(3), "X", "Y", {}}, table1()).status, Status::Consistent);
}

TEST(DirectInfluence, ConditionedSlices) {
    const auto g = io::graph_from_json(load("fig2c.json"));
    const auto data = std::get<dist::RationalDistribution>(io::distribution_from_json(load("fig2c_data.json")));
    const auto v = witness_direct_influence({g, "X", "Y", {"Z"}}, data);
    EXPECT_EQ(v.status, Status::Refuted);
    ASSERT_EQ(v.evidence.size(), 2u);
    EXPECT_EQ(v.evidence[1].assignment[0].first, "Z");
    EXPECT_EQ(v.evidence[1].assignment[0].second, 1u);
    EXPECT_EQ(v.evidence[0].probability, 0.5);
}

TEST(DirectInfluence, SkipsEmptySlices) {
    // Table 1 in slice Z=0, nothing in Z=1.
    const Rational s(1, 6);
    std::vector<Rational> values;
    for (int i = 0; i < 9; ++i) {
        values.push_back(i % 4 == 0 ? Rational(0) : s);
        values.push_back(0);
    }
    const auto data = dist::RationalDistribution::from_values({{"X", 3, {}}, {"Y", 3, {}}, {"Z", 2, {}}}, values);
    const auto g = graph::CausalGraph::build({{"X", 3, true}, {"Y", 3, true}, {"U", 3, false}, {"Z", 2, true}},
                                             {{"U", "X"}, {"U", "Y"}, {"Z", "X"}});
    const auto v = witness_direct_influence({g, "X", "Y", {"Z"}}, data);
    EXPECT_EQ(v.status, Status::Consistent);
    EXPECT_EQ(v.evidence.size(), 1u);
    EXPECT_TRUE(std::any_of(v.notes.begin(), v.notes.end(),
                            [](const std::string& n) { return n.find("skipped") != std::string::npos; }));
}

TEST(DirectInfluence, DirectEdgeIsVacuous) {
    const auto g = graph::CausalGraph::build({{"X", 3, true}, {"Y", 3, true}}, {{"X", "Y"}});
    const auto v = witness_direct_influence({g, "X", "Y", {}}, table1());
    EXPECT_EQ(v.status, Status::Consistent);
    EXPECT_TRUE(v.evidence.empty());
}

TEST(DirectInfluence, ValidatesHypothesis) {
    EXPECT_EQ(code_of([] { witness_direct_influence({common_cause(2), "X", "U", {}}, table1()); }),
              ErrorCode::InvalidArgument);
    const auto g = graph::CausalGraph::build({{"X", 3, true}, {"W", 3, true}, {"U", 2, false}},
                                             {{"U", "X"}, {"U", "W"}});
    EXPECT_EQ(code_of([&] { witness_direct_influence({g, "X", "W", {}}, table1()); }), ErrorCode::NoObservedData);
    EXPECT_EQ(code_of([] { witness_direct_influence({common_cause(2, 4), "X", "Y", {}}, table1()); }),
              ErrorCode::ShapeMismatch);
}

TEST(DirectInfluence, NeverRefutesTrueModels) {
    // Data generated by the hypothesis itself must never be refuted.
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const int card_u = 2 + trial % 2;
        oracle::Dag dag;
        dag.n = 3;
        dag.card = {card_u, 3 + trial % 2, 3};
        dag.parents = {{}, {0}, {0}};
        const auto joint = oracle::markov_joint(dag, oracle::random_cpts(rng, dag));
        const auto full = dist::RationalDistribution::from_values(
            {{"U", static_cast<std::uint32_t>(card_u), {}},
             {"X", static_cast<std::uint32_t>(dag.card[1]), {}},
             {"Y", 3, {}}},
            joint);
        const auto v = witness_direct_influence(
            {common_cause(static_cast<std::uint32_t>(card_u), static_cast<std::uint32_t>(dag.card[1])), "X", "Y", {}},
            full);
        EXPECT_NE(v.status, Status::Refuted) << "trial " << trial;
    }
}

TEST(PerfectCorrelation, Branches) {
    auto status = [](ExpectationPair x, ExpectationPair y) { return perfect_correlation_check(x, y, {1, 1}).status; };
    EXPECT_EQ(status({0.5, 0.3}, {0.5, 0.3}), Status::Refuted);
    EXPECT_EQ(status({1.0, 0.3}, {1.0, 0.3}), Status::Consistent);
    EXPECT_EQ(status({-1.0, 0.3}, {-1.0, 0.3}), Status::Consistent);
    EXPECT_EQ(status({0.4, -0.4}, {0.4, -0.4}), Status::Consistent);
    EXPECT_EQ(status({0.4, 0.4}, {0.4, 0.4}), Status::Consistent);
    EXPECT_EQ(status({0.4, 0.4}, {0.4, -0.4}), Status::Refuted);
    EXPECT_EQ(perfect_correlation_check({0.5, 0.3}, {0.5, 0.3}, {0.9, 1}).status, Status::Inconclusive);
    EXPECT_EQ(code_of([] { perfect_correlation_check({1.5, 0}, {0, 0}, {1, 1}); }), ErrorCode::OutOfRange);
    EXPECT_EQ(perfect_correlation_check({0.5, 0.3}, {0.5, 0.3}, {1, 1}).message,
              "An additional causal influence between X and Y is needed");
}

TEST(ResponseOracle, FindsWitnessesAndRejects) {
    const auto ok = brute_force_response_oracle({1.0, 0.3}, 1.0 / 128);
    EXPECT_TRUE(ok.feasible);
    ASSERT_TRUE(ok.witness);
    EXPECT_NEAR(ok.witness->attained.first, 1.0, 1.0 / 128);
    EXPECT_NEAR(ok.witness->attained.second, 0.3, 1.0 / 128);
    const auto bad = brute_force_response_oracle({0.5, 0.3}, 1.0 / 128);
    EXPECT_FALSE(bad.feasible);
    EXPECT_FALSE(bad.witness);
    EXPECT_GT(bad.distance, 0.05);
}

TEST(ResponseOracle, AchievablePointsSatisfyDisjunction) {
    const auto region = achievable_region(64);
    EXPECT_GT(region.size(), 100u);
    for (const auto& p : region) EXPECT_TRUE(disjunction(p, 1e-12)) << p.first << "," << p.second;
}
