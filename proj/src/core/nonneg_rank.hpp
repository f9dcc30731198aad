#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scalar.hpp"

namespace rankwitness::nnrank {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Arithmetic { exact, floating };

struct RankConfig {
    int restarts = 32;
    int max_iters = 5000;
    double residual_tol = 1e-9;  // relative Frobenius
    std::uint64_t seed = 0;
    std::size_t exact_lb_max_support = 24;
    Arithmetic arithmetic = Arithmetic::floating;
};

struct FactorPair {
    VectorXd x;  // over rows
    VectorXd y;  // over columns
};

/// M ≈ Σ_z x_z y_zᵀ with nonnegative vectors.
struct NNFactorization {
    std::vector<FactorPair> pairs;
    double residual = 0.0;  // relative Frobenius residual against the certified matrix

    std::size_t r() const noexcept { return pairs.size(); }
    MatrixXd reconstruct() const;
};

struct LowerCertificate {
    std::string method;  // "linear_rank" or "rectangle_cover"
    std::size_t value = 0;
};

struct RankBounds {
    std::size_t lower = 0;
    std::size_t upper = 0;
    std::vector<LowerCertificate> lower_certificates;
    std::optional<NNFactorization> upper_certificate;
    std::string upper_method;  // "nmf", "rank_one", "trivial_rows", "trivial_cols", "supplied"
    std::vector<std::string> notes;
    bool exact = false;
};

/// Latent-variable form of a factorization: P = Σ_z p_z cond_x[z] cond_y[z]ᵀ.
struct LatentDecomposition {
    VectorXd p_z;
    std::vector<VectorXd> cond_x;
    std::vector<VectorXd> cond_y;
    std::size_t dropped_components = 0;  // zero-mass pairs removed during extraction

    std::size_t r() const noexcept { return static_cast<std::size_t>(p_z.size()); }
};

MatrixXd to_eigen(const RationalMatrix& m);
RationalMatrix to_rational(const MatrixXd& m);

/// Fraction-free Gaussian elimination over the integers after clearing
/// denominators row by row.
std::size_t linear_rank(const RationalMatrix& m);
/// Singular values below 1e-9 × the largest count as zero.
std::size_t linear_rank(const MatrixXd& m);
std::size_t linear_rank(const MatrixXd& m, Arithmetic arithmetic);

/// Minimum number of all-positive combinatorial rectangles covering the
/// support. Throws TooLarge when the support exceeds `max_entries` cells.
std::size_t rectangle_cover_lower_bound(const MatrixXd& m, std::size_t max_entries = 24);

/// Relative Frobenius residual ‖M − Σ x yᵀ‖ / ‖M‖ (absolute when M = 0).
double relative_residual(const MatrixXd& m, const NNFactorization& f);

/// Best-effort search for a width-r nonnegative factorization. Absence says
/// nothing about the nonnegative rank.
std::optional<NNFactorization> nmf_upper_bound(const MatrixXd& m, std::size_t r, int restarts, int max_iters,
                                               double residual_tol, std::uint64_t seed = 0);

/// Certified interval for the nonnegative rank. `supplied` factorizations are
/// checked (nonnegativity, residual ≤ tol) and, when valid, seed the upper bound.
RankBounds nonnegative_rank(const MatrixXd& m, const RankConfig& config = {},
                            std::span<const NNFactorization> supplied = {});
RankBounds nonnegative_rank(const RationalMatrix& m, RankConfig config = {},
                            std::span<const NNFactorization> supplied = {});

/// Throws NotNormalized when the pairs do not carry total mass 1 within
/// `mass_tolerance`, ZeroMassComponent when every pair has zero mass.
LatentDecomposition factorization_to_latent(const NNFactorization& fact, double mass_tolerance = 1e-9);
MatrixXd latent_to_joint(const LatentDecomposition& dec);

}  // namespace rankwitness::nnrank
