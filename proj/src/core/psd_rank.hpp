#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nonneg_rank.hpp"

namespace rankwitness::psd {

using Eigen::MatrixXd;

inline constexpr double kEigenvalueTolerance = 1e-10;

/// P_ab = tr(E_a F_b) with one r×r PSD factor per row (E) and per column (F).
struct PsdFactorization {
    std::size_t r = 0;
    std::vector<MatrixXd> e_factors;
    std::vector<MatrixXd> f_factors;
};

struct PsdRankBounds {
    std::size_t lower = 0;
    std::size_t upper = 0;
    std::optional<PsdFactorization> upper_certificate;
    std::vector<std::string> notes;
};

/// Throws ShapeMismatch when the factor counts or sizes do not fit `m`.
bool verify_psd_factorization(const MatrixXd& m, const PsdFactorization& fact, double tol);

/// Upper bound from rank_PSD ≤ rank₊; lower bound from rank ≤ k(k+1)/2.
/// A supplied certificate that verifies at `tol` can tighten the upper bound.
PsdRankBounds psd_rank_bounds(const MatrixXd& m, const nnrank::RankBounds& nn_bounds,
                              const std::optional<PsdFactorization>& certificate = std::nullopt,
                              double tol = 1e-8);

struct PsdSearchConfig {
    int restarts = 64;
    int max_iters = 2000;
    double tol = 1e-8;  // max absolute entry error
    std::uint64_t seed = 0;
    std::chrono::milliseconds time_budget{60'000};
};

/// Levenberg–Marquardt over Gram parametrizations E_a = A_a A_aᵀ,
/// F_b = B_b B_bᵀ, with random restarts. Failure proves nothing.
std::optional<PsdFactorization> psd_search(const MatrixXd& m, std::size_t r, const PsdSearchConfig& config = {});

}  // namespace rankwitness::psd
