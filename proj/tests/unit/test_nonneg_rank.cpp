#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "error.hpp"
#include "nonneg_rank.hpp"
#include "oracles.hpp"

using namespace rankwitness;
using namespace rankwitness::nnrank;

namespace {

MatrixXd table1() {
    MatrixXd m(3, 3);
    m << 0, 1, 1, 1, 0, 1, 1, 1, 0;
    return m / 6.0;
}

RationalMatrix table1_exact() {
    RationalMatrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) m(i, j) = i == j ? Rational(0) : Rational(1, 6);
    return m;
}

// Linear rank 3, nonnegative rank 4: the slack matrix of a square.
MatrixXd square_slack() {
    MatrixXd m(4, 4);
    m << 1, 1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0, 1;
    return m / m.sum();
}

MatrixXd random_factorized(std::mt19937_64& rng, int rows, int cols, int r) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MatrixXd w(rows, r), h(r, cols);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = u(rng);
    MatrixXd m = w * h;
    return m / m.sum();
}

bool has_note(const RankBounds& b, const std::string& fragment) {
    return std::any_of(b.notes.begin(), b.notes.end(),
                       [&](const std::string& n) { return n.find(fragment) != std::string::npos; });
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

TEST(LinearRank, ExactAndFloat) {
    // det(table 1) = 2/216, so the rank is full.
    EXPECT_EQ(linear_rank(table1_exact()), 3u);
    EXPECT_EQ(linear_rank(table1()), 3u);
    EXPECT_EQ(linear_rank(square_slack()), 3u);
    EXPECT_EQ(linear_rank(to_rational(square_slack())), 3u);
    RationalMatrix zero(2, 3);
    EXPECT_EQ(linear_rank(zero), 0u);
    RationalMatrix dep(3, 2);
    dep(0, 0) = Rational(1, 3);
    dep(0, 1) = Rational(2, 7);
    dep(1, 0) = Rational(2, 3);
    dep(1, 1) = Rational(4, 7);
    EXPECT_EQ(linear_rank(dep), 1u);
}

TEST(LinearRank, ExactSeesTinyDifferencesFloatIgnores) {
    RationalMatrix m(2, 2);
    m(0, 0) = 1;
    m(0, 1) = 1;
    m(1, 0) = 1;
    m(1, 1) = Rational(1) + Rational(mpz_class(1), mpz_class("1000000000000000000000"));
    EXPECT_EQ(linear_rank(m), 2u);
    EXPECT_EQ(linear_rank(to_eigen(m)), 1u);
}

TEST(RectangleCover, KnownValues) {
    EXPECT_EQ(rectangle_cover_lower_bound(table1()), 3u);
    EXPECT_EQ(rectangle_cover_lower_bound(square_slack()), 4u);
    EXPECT_EQ(rectangle_cover_lower_bound(MatrixXd::Identity(5, 5)), 5u);
    EXPECT_EQ(rectangle_cover_lower_bound(MatrixXd::Ones(4, 4)), 1u);
    EXPECT_EQ(rectangle_cover_lower_bound(MatrixXd::Zero(3, 3)), 0u);
    EXPECT_EQ(code_of([] { rectangle_cover_lower_bound(MatrixXd::Ones(5, 5), 24); }), ErrorCode::TooLarge);
}

TEST(NonnegativeRank, TableOneIsExactlyThree) {
    const auto b = nonnegative_rank(table1_exact(), RankConfig{});
    EXPECT_EQ(b.lower, 3u);
    EXPECT_EQ(b.upper, 3u);
    EXPECT_TRUE(b.exact);
    ASSERT_TRUE(b.upper_certificate);
    EXPECT_LE(relative_residual(table1(), *b.upper_certificate), 1e-12);
}

TEST(NonnegativeRank, RectangleCoverBeatsLinearRank) {
    const auto b = nonnegative_rank(square_slack());
    EXPECT_EQ(b.lower, 4u);
    EXPECT_EQ(b.upper, 4u);
    EXPECT_TRUE(b.exact);
}

TEST(NonnegativeRank, RankOneAndZero) {
    Eigen::VectorXd px(3), py(2);
    px << 0.2, 0.3, 0.5;
    py << 0.6, 0.4;
    const MatrixXd m = px * py.transpose();
    auto b = nonnegative_rank(m);
    EXPECT_EQ(b.lower, 1u);
    EXPECT_EQ(b.upper, 1u);
    EXPECT_EQ(b.upper_method, "rank_one");

    b = nonnegative_rank(MatrixXd::Zero(2, 2));
    EXPECT_EQ(b.lower, 0u);
    EXPECT_EQ(b.upper, 0u);
    EXPECT_TRUE(b.exact);
}

TEST(NonnegativeRank, FindsPlantedFactorizations) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const int rows = 3 + trial % 4, cols = 3 + (trial / 4) % 4, r = 2 + trial % 2;
        const MatrixXd m = random_factorized(rng, rows, cols, r);
        const auto b = nonnegative_rank(m);
        EXPECT_LE(b.lower, b.upper);
        EXPECT_EQ(b.lower, static_cast<std::size_t>(r)) << "trial " << trial;
        EXPECT_EQ(b.upper, static_cast<std::size_t>(r)) << "trial " << trial;
        ASSERT_TRUE(b.upper_certificate);
        EXPECT_LE(relative_residual(m, *b.upper_certificate), 1e-9);
        for (const auto& p : b.upper_certificate->pairs) {
            EXPECT_GE(p.x.minCoeff(), 0.0);
            EXPECT_GE(p.y.minCoeff(), 0.0);
        }
    }
}

TEST(NonnegativeRank, SuppliedCertificates) {
    const MatrixXd m = square_slack();
    NNFactorization bogus;
    bogus.pairs.push_back({Eigen::VectorXd::Ones(4), Eigen::VectorXd::Ones(4)});
    RankConfig cfg;
    cfg.restarts = 0;
    auto b = nonnegative_rank(m, cfg, std::span<const NNFactorization>(&bogus, 1));
    EXPECT_EQ(b.upper, 4u);
    EXPECT_TRUE(has_note(b, "rejected"));

    // A valid width-3 certificate for a rank-3 planted matrix.
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    NNFactorization good;
    MatrixXd sum = MatrixXd::Zero(5, 5);
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd x(5), y(5);
        for (int i = 0; i < 5; ++i) x(i) = u(rng), y(i) = u(rng);
        good.pairs.push_back({x, y});
        sum += x * y.transpose();
    }
    const double total = sum.sum();
    for (auto& p : good.pairs) p.x /= total;
    b = nonnegative_rank(sum / total, cfg, std::span<const NNFactorization>(&good, 1));
    EXPECT_EQ(b.upper, 3u);
    EXPECT_EQ(b.upper_method, "supplied");
    EXPECT_TRUE(b.exact);
}

TEST(NonnegativeRank, SearchDisabledIsReported) {
    std::mt19937_64 rng(9);
    const MatrixXd m = random_factorized(rng, 5, 5, 2);
    RankConfig cfg;
    cfg.restarts = 0;
    const auto b = nonnegative_rank(m, cfg);
    EXPECT_EQ(b.lower, 2u);
    EXPECT_EQ(b.upper, 5u);
    EXPECT_FALSE(b.exact);
    EXPECT_TRUE(has_note(b, "disabled"));
}

TEST(NonnegativeRank, DeterministicForFixedSeed) {
    std::mt19937_64 rng(13);
    const MatrixXd m = random_factorized(rng, 6, 5, 3);
    RankConfig cfg;
    cfg.seed = 99;
    const auto a = nonnegative_rank(m, cfg);
    const auto b = nonnegative_rank(m, cfg);
    ASSERT_TRUE(a.upper_certificate && b.upper_certificate);
    ASSERT_EQ(a.upper_certificate->r(), b.upper_certificate->r());
    for (std::size_t k = 0; k < a.upper_certificate->r(); ++k) {
        EXPECT_EQ(a.upper_certificate->pairs[k].x, b.upper_certificate->pairs[k].x);
        EXPECT_EQ(a.upper_certificate->pairs[k].y, b.upper_certificate->pairs[k].y);
    }
}

TEST(NonnegativeRank, RejectsBadInput) {
    MatrixXd neg = table1();
    neg(0, 0) = -0.1;
    EXPECT_EQ(code_of([&] { nonnegative_rank(neg); }), ErrorCode::NegativeEntry);
    EXPECT_EQ(code_of([] { nonnegative_rank(MatrixXd(0, 0)); }), ErrorCode::ShapeMismatch);
}

TEST(NonnegativeRank, LargeSupportSkipsCover) {
    std::mt19937_64 rng(4);
    const MatrixXd m = random_factorized(rng, 6, 6, 2);
    const auto b = nonnegative_rank(m);
    ASSERT_EQ(b.lower_certificates.size(), 1u);
    EXPECT_EQ(b.lower_certificates[0].method, "linear_rank");
    EXPECT_TRUE(has_note(b, "rectangle cover skipped"));
}

TEST(NmfUpperBound, TrivialWidthAndDisabled) {
    const auto f = nmf_upper_bound(table1(), 4, 4, 100, 1e-9);
    ASSERT_TRUE(f);
    EXPECT_EQ(f->r(), 4u);
    EXPECT_LE(relative_residual(table1(), *f), 1e-12);
    EXPECT_FALSE(nmf_upper_bound(table1(), 2, 0, 100, 1e-9));
    // Width 2 cannot reach table 1, whose nonnegative rank is 3.
    EXPECT_FALSE(nmf_upper_bound(table1(), 2, 8, 2000, 1e-9));
}

TEST(Latent, RoundTripReproducesMatrix) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const MatrixXd m = random_factorized(rng, 4, 5, 3);
        const auto b = nonnegative_rank(m);
        ASSERT_TRUE(b.upper_certificate);
        const auto dec = factorization_to_latent(*b.upper_certificate);
        EXPECT_NEAR(dec.p_z.sum(), 1.0, 1e-12);
        for (std::size_t z = 0; z < dec.r(); ++z) {
            EXPECT_NEAR(dec.cond_x[z].sum(), 1.0, 1e-12);
            EXPECT_NEAR(dec.cond_y[z].sum(), 1.0, 1e-12);
        }
        EXPECT_LE((latent_to_joint(dec) - m).norm() / m.norm(), 2e-9);
    }
}

TEST(Latent, DropsZeroMassAndValidates) {
    NNFactorization f;
    Eigen::VectorXd x(2), y(2);
    x << 0.5, 0.5;
    y << 0.5, 0.5;
    f.pairs.push_back({x, y});
    f.pairs.push_back({Eigen::VectorXd::Zero(2), y});
    const auto dec = factorization_to_latent(f);
    EXPECT_EQ(dec.r(), 1u);
    EXPECT_EQ(dec.dropped_components, 1u);

    NNFactorization light;
    light.pairs.push_back({x * 0.5, y});
    EXPECT_EQ(code_of([&] { factorization_to_latent(light); }), ErrorCode::NotNormalized);
    NNFactorization empty_mass;
    empty_mass.pairs.push_back({Eigen::VectorXd::Zero(2), y});
    EXPECT_EQ(code_of([&] { factorization_to_latent(empty_mass, 2.0); }), ErrorCode::ZeroMassComponent);
}
