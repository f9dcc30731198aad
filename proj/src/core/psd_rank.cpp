#include "psd_rank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "error.hpp"

namespace rankwitness::psd {

namespace {

bool is_psd(const MatrixXd& f) {
    const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
    if ((f - f.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(f, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) return false;
    return solver.eigenvalues().minCoeff() >= -kEigenvalueTolerance;
}

void check_shapes(const MatrixXd& m, const PsdFactorization& fact) {
    if (fact.r == 0) throw Error(ErrorCode::ShapeMismatch, "PSD factorization needs r >= 1");
    if (fact.e_factors.size() != static_cast<std::size_t>(m.rows()) ||
        fact.f_factors.size() != static_cast<std::size_t>(m.cols()))
        throw Error(ErrorCode::ShapeMismatch, "need one E factor per row and one F factor per column");
    const auto r = static_cast<Eigen::Index>(fact.r);
    for (const auto* set : {&fact.e_factors, &fact.f_factors})
        for (const auto& f : *set)
            if (f.rows() != r || f.cols() != r)
                throw Error(ErrorCode::ShapeMismatch, "factor is not " + std::to_string(fact.r) + "x" +
                                                          std::to_string(fact.r));
}

std::size_t smallest_k_covering(std::size_t rank) {
    std::size_t k = 0;
    while (k * (k + 1) / 2 < rank) ++k;
    return k;
}

double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& gen) {
    const double u1 = std::max(uniform01(gen), 0x1.0p-53);
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

bool verify_psd_factorization(const MatrixXd& m, const PsdFactorization& fact, double tol) {
    check_shapes(m, fact);
    for (const auto* set : {&fact.e_factors, &fact.f_factors})
        for (const auto& f : *set)
            if (!f.allFinite() || !is_psd(f)) return false;
    for (Eigen::Index a = 0; a < m.rows(); ++a)
        for (Eigen::Index b = 0; b < m.cols(); ++b) {
            const double trace = (fact.e_factors[a] * fact.f_factors[b]).trace();
            if (!(std::abs(trace - m(a, b)) <= tol)) return false;
        }
    return true;
}

PsdRankBounds psd_rank_bounds(const MatrixXd& m, const nnrank::RankBounds& nn_bounds,
                              const std::optional<PsdFactorization>& certificate, double tol) {
    if ((m.array() < 0.0).any()) throw Error(ErrorCode::NegativeEntry, "matrix has a negative entry");
    std::size_t lin = 0;
    bool found = false;
    for (const auto& c : nn_bounds.lower_certificates)
        if (c.method == "linear_rank") {
            lin = c.value;
            found = true;
        }
    if (!found) lin = nnrank::linear_rank(m);

    PsdRankBounds b;
    b.lower = smallest_k_covering(lin);
    b.upper = nn_bounds.upper;
    b.notes.push_back("lower: smallest k with k(k+1)/2 >= linear rank " + std::to_string(lin));
    b.notes.push_back("upper: nonnegative rank upper bound " + std::to_string(nn_bounds.upper));
    if (certificate) {
        if (verify_psd_factorization(m, *certificate, tol)) {
            if (certificate->r < b.upper) {
                b.upper = certificate->r;
                b.upper_certificate = certificate;
            }
            b.notes.push_back("certificate with r=" + std::to_string(certificate->r) + " verified");
        } else {
            b.notes.push_back("certificate with r=" + std::to_string(certificate->r) + " failed verification");
        }
    }
    if (b.upper < b.lower) {
        // Only possible for a certificate that verified loosely against a
        // matrix whose linear rank is numerically larger.
        b.notes.push_back("upper bound raised to the certified lower bound");
        b.upper = b.lower;
        b.upper_certificate.reset();
    }
    return b;
}

std::optional<PsdFactorization> psd_search(const MatrixXd& m, std::size_t r, const PsdSearchConfig& config) {
    if (r < 1) throw Error(ErrorCode::InvalidArgument, "PSD factor size must be at least 1");
    if ((m.array() < 0.0).any()) throw Error(ErrorCode::NegativeEntry, "matrix has a negative entry");
    const auto rows = m.rows(), cols = m.cols();
    const auto ri = static_cast<Eigen::Index>(r);
    const double scale = m.size() ? m.maxCoeff() : 0.0;
    if (scale == 0.0) {
        PsdFactorization zero{r, std::vector<MatrixXd>(rows, MatrixXd::Zero(ri, ri)),
                              std::vector<MatrixXd>(cols, MatrixXd::Zero(ri, ri))};
        return zero;
    }
    const MatrixXd target = m / scale;
    const Eigen::Index block = ri * ri;
    const Eigen::Index params = (rows + cols) * block;
    const Eigen::Index equations = rows * cols;
    const auto started = std::chrono::steady_clock::now();

    auto factor = [&](const Eigen::VectorXd& theta, Eigen::Index k) {
        return Eigen::Map<const MatrixXd>(theta.data() + k * block, ri, ri);
    };
    auto residuals = [&](const Eigen::VectorXd& theta) {
        Eigen::VectorXd res(equations);
        for (Eigen::Index a = 0; a < rows; ++a)
            for (Eigen::Index b = 0; b < cols; ++b)
                res(a * cols + b) = (factor(theta, a).transpose() * factor(theta, rows + b)).squaredNorm() -
                                    target(a, b);
        return res;
    };

    for (int restart = 0; restart < config.restarts; ++restart) {
        if (std::chrono::steady_clock::now() - started > config.time_budget) break;
        std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                          static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(restart)};
        std::mt19937_64 gen(seq);
        Eigen::VectorXd theta(params);
        for (Eigen::Index i = 0; i < params; ++i) theta(i) = standard_normal(gen) / std::sqrt(double(r));

        Eigen::VectorXd res = residuals(theta);
        double cost = res.squaredNorm();
        double lambda = 1e-3;
        for (int it = 0; it < config.max_iters && res.cwiseAbs().maxCoeff() * scale > 0.01 * config.tol; ++it) {
            MatrixXd jac = MatrixXd::Zero(equations, params);
            for (Eigen::Index a = 0; a < rows; ++a) {
                const MatrixXd ea = factor(theta, a) * factor(theta, a).transpose();
                for (Eigen::Index b = 0; b < cols; ++b) {
                    const MatrixXd fb = factor(theta, rows + b) * factor(theta, rows + b).transpose();
                    const MatrixXd d_a = 2.0 * fb * factor(theta, a);
                    const MatrixXd d_b = 2.0 * ea * factor(theta, rows + b);
                    const Eigen::Index row = a * cols + b;
                    jac.block(row, a * block, 1, block) = Eigen::Map<const Eigen::RowVectorXd>(d_a.data(), block);
                    jac.block(row, (rows + b) * block, 1, block) =
                        Eigen::Map<const Eigen::RowVectorXd>(d_b.data(), block);
                }
            }
            const MatrixXd jtj = jac.transpose() * jac;
            const Eigen::VectorXd grad = jac.transpose() * res;
            bool improved = false;
            for (int attempt = 0; attempt < 30 && !improved; ++attempt) {
                MatrixXd lhs = jtj;
                lhs.diagonal().array() += lambda;
                const Eigen::VectorXd step = lhs.ldlt().solve(-grad);
                const Eigen::VectorXd trial = theta + step;
                const Eigen::VectorXd trial_res = residuals(trial);
                const double trial_cost = trial_res.squaredNorm();
                if (trial_cost < cost) {
                    theta = trial;
                    res = trial_res;
                    cost = trial_cost;
                    lambda = std::max(lambda / 3.0, 1e-15);
                    improved = true;
                } else {
                    lambda *= 4.0;
                }
            }
            if (!improved) break;
        }

        PsdFactorization fact;
        fact.r = r;
        for (Eigen::Index a = 0; a < rows; ++a) {
            MatrixXd e = scale * factor(theta, a) * factor(theta, a).transpose();
            fact.e_factors.push_back(0.5 * (e + e.transpose()));
        }
        for (Eigen::Index b = 0; b < cols; ++b) {
            MatrixXd f = factor(theta, rows + b) * factor(theta, rows + b).transpose();
            fact.f_factors.push_back(0.5 * (f + f.transpose()));
        }
        if (verify_psd_factorization(m, fact, config.tol)) return fact;
    }
    return std::nullopt;
}

}  // namespace rankwitness::psd
