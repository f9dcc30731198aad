#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "oracles.hpp"
#include "protocol.hpp"

using namespace rankwitness;
using namespace rankwitness::protocol;

namespace {

const Rational h(1, 2), t(1, 3);

std::vector<ProbVector<Rational>> table1_bob() { return {{0, h, h}, {h, 0, h}, {h, h, 0}}; }
std::vector<ProbVector<Rational>> identity3() { return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}; }

SeedProtocol<Rational> table1_seed() { return {{t, t, t}, identity3(), table1_bob()}; }

std::vector<Rational> table1_values() {
    const Rational s(1, 6);
    return {0, s, s, s, 0, s, s, s, 0};
}

std::vector<std::vector<Rational>> random_rows(std::mt19937_64& rng, int rows, int n) {
    std::vector<std::vector<Rational>> out;
    for (int i = 0; i < rows; ++i) out.push_back(oracle::random_simplex(rng, n, 6, 0.25));
    return out;
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

}  // namespace

TEST(Simulate, ThreeProtocolsReproduceTableOne) {
    EXPECT_EQ(simulate_seed_protocol(table1_seed()).values(), table1_values());

    MessageProtocol<Rational> msg{{t, t, t}, identity3(), table1_bob()};
    EXPECT_EQ(simulate_message_protocol(msg).values(), table1_values());

    // Seed z1 picks {0,1} or {2}; a one-bit message tells Bob which of x=0 / x=1.
    HybridProtocol<Rational> hyb;
    hyb.seed = {Rational(2, 3), t};
    hyb.alice_encoder = {{h, h, 0}, {0, 0, 1}};
    hyb.message_channel = {{{1, 0}, {1, 0}}, {{0, 1}, {1, 0}}, {{1, 0}, {1, 0}}};
    hyb.bob_decoder = {{{0, h, h}, {h, 0, h}}, {{h, h, 0}, {h, h, 0}}};
    EXPECT_EQ(simulate_hybrid_protocol(hyb).values(), table1_values());
    EXPECT_EQ(hybrid_factorization(hyb).r(), 4u);
}

TEST(Simulate, StructuralFactorizationsReconstruct) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int nz = 2 + trial % 2, nx = 2 + trial % 3, ny = 3;
        SeedProtocol<Rational> p{oracle::random_simplex(rng, nz), random_rows(rng, nz, nx), random_rows(rng, nz, ny)};
        const auto joint = simulate_seed_protocol(p);
        const auto f = seed_factorization(p);
        EXPECT_EQ(f.r(), static_cast<std::size_t>(nz));
        const auto m = f.reconstruct();
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) EXPECT_NEAR(m(i, j), joint(i, j).get_d(), 1e-15);

        // Replacing the seed by a message of equal size keeps the joint exactly.
        const auto msg = seed_to_message(p);
        EXPECT_EQ(simulate_message_protocol(msg).values(), joint.values());
        EXPECT_EQ(message_factorization(msg).r(), static_cast<std::size_t>(nz));
    }
}

TEST(Simulate, FloatSeedToMessage) {
    SeedProtocol<double> p{{0.25, 0.75}, {{0.3, 0.7}, {0.9, 0.1}}, {{1.0, 0.0}, {0.2, 0.8}}};
    const auto a = simulate_seed_protocol(p);
    const auto b = simulate_message_protocol(seed_to_message(p));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.values()[i], b.values()[i], 1e-15);
}

TEST(Simulate, Validation) {
    auto p = table1_seed();
    p.seed = {h, h};
    EXPECT_EQ(code_of([&] { simulate_seed_protocol(p); }), ErrorCode::ShapeMismatch);
    p = table1_seed();
    p.seed = {t, t, h};
    EXPECT_EQ(code_of([&] { simulate_seed_protocol(p); }), ErrorCode::NotNormalized);
    p = table1_seed();
    p.bob_encoder[0] = {Rational(3, 2), Rational(-1, 2), 0};
    EXPECT_EQ(code_of([&] { simulate_seed_protocol(p); }), ErrorCode::NegativeEntry);
    MessageProtocol<Rational> msg{{t, t, t}, identity3(), {{1, 0}}};
    EXPECT_EQ(code_of([&] { simulate_message_protocol(msg); }), ErrorCode::ShapeMismatch);
}

TEST(Complexity, TableOneIsLogThree) {
    const auto d = simulate_seed_protocol(table1_seed());
    const auto r = correlation_complexity(d);
    EXPECT_TRUE(r.exact);
    EXPECT_NEAR(r.rcorr_bits_lower, std::log2(3.0), 1e-12);
    EXPECT_NEAR(r.rcorr_bits_upper, std::log2(3.0), 1e-12);
    EXPECT_DOUBLE_EQ(r.rcomm_bits_lower, r.rcorr_bits_lower);
}

TEST(Tradeoff, CapacityAgainstLowerBound) {
    const auto bounds = nnrank::nonnegative_rank(simulate_seed_protocol(table1_seed()).matrix());
    auto r = tradeoff_check(2, 2, bounds);
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.capacity, 4u);
    EXPECT_EQ(r.margin, 1);
    r = tradeoff_check(1, 2, bounds);
    EXPECT_FALSE(r.holds);
    EXPECT_EQ(r.margin, -1);
    EXPECT_EQ(code_of([&] { tradeoff_check(0, 2, bounds); }), ErrorCode::InvalidArgument);
}

TEST(Latent, SeedFromLatentReproducesJoint) {
    nnrank::LatentDecomposition dec;
    dec.p_z = Eigen::Vector2d(0.4, 0.6);
    dec.cond_x = {Eigen::Vector3d(0.2, 0.3, 0.5), Eigen::Vector3d(1.0, 0.0, 0.0)};
    dec.cond_y = {Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.1, 0.9)};
    const auto joint = simulate_seed_protocol(seed_from_latent(dec));
    const auto expect = nnrank::latent_to_joint(dec);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(joint(i, j), expect(i, j), 1e-15);
}

TEST(Soundness, RankNeverExceedsSeedSize) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        const int nz = 2 + trial % 2;
        SeedProtocol<Rational> p{oracle::random_simplex(rng, nz), random_rows(rng, nz, 4), random_rows(rng, nz, 4)};
        const auto d = simulate_seed_protocol(p);
        const auto f = seed_factorization(p);
        const auto b = nnrank::nonnegative_rank(d.matrix(), {}, std::span<const nnrank::NNFactorization>(&f, 1));
        EXPECT_LE(b.lower, static_cast<std::size_t>(nz));
        EXPECT_LE(b.upper, static_cast<std::size_t>(nz));
    }
}
