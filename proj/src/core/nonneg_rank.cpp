#include "nonneg_rank.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <thread>

#include "error.hpp"

namespace rankwitness::nnrank {

MatrixXd NNFactorization::reconstruct() const {
    if (pairs.empty()) return MatrixXd();
    MatrixXd m = MatrixXd::Zero(pairs.front().x.size(), pairs.front().y.size());
    for (const auto& p : pairs) m += p.x * p.y.transpose();
    return m;
}

MatrixXd to_eigen(const RationalMatrix& m) {
    MatrixXd out(m.rows, m.cols);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j).get_d();
    return out;
}

RationalMatrix to_rational(const MatrixXd& m) {
    RationalMatrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (!std::isfinite(m(i, j))) throw Error(ErrorCode::InvalidArgument, "non-finite matrix entry");
            out(i, j) = Rational(m(i, j));
        }
    return out;
}

std::size_t linear_rank(const RationalMatrix& m) {
    const std::size_t rows = m.rows, cols = m.cols;
    DenseMatrix<mpz_class> a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        mpz_class lcm = 1;
        for (std::size_t j = 0; j < cols; ++j) {
            mpz_class den = m(i, j).get_den();
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
        }
        for (std::size_t j = 0; j < cols; ++j) {
            mpz_class scaled = m(i, j).get_num() * (lcm / m(i, j).get_den());
            a(i, j) = scaled;
        }
    }

    // Bareiss: after each step the trailing block holds minors of the input,
    // so the division by the previous pivot is exact.
    std::size_t rank = 0;
    mpz_class prev = 1;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t pivot = rank;
        while (pivot < rows && a(pivot, c) == 0) ++pivot;
        if (pivot == rows) continue;
        if (pivot != rank)
            for (std::size_t j = 0; j < cols; ++j) std::swap(a(pivot, j), a(rank, j));
        for (std::size_t i = rank + 1; i < rows; ++i) {
            for (std::size_t j = c + 1; j < cols; ++j) {
                mpz_class t = a(rank, c) * a(i, j) - a(i, c) * a(rank, j);
                mpz_divexact(a(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            a(i, c) = 0;
        }
        prev = a(rank, c);
        ++rank;
    }
    return rank;
}

std::size_t linear_rank(const MatrixXd& m) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double threshold = 1e-9 * s(0);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > threshold) ++rank;
    return rank;
}

std::size_t linear_rank(const MatrixXd& m, Arithmetic arithmetic) {
    return arithmetic == Arithmetic::exact ? linear_rank(to_rational(m)) : linear_rank(m);
}

namespace {

struct Support {
    std::vector<Eigen::Index> rows;  // nonzero rows
    std::vector<Eigen::Index> cols;  // nonzero columns
    std::size_t cells = 0;
};

Support support_of(const MatrixXd& m) {
    Support s;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if ((m.row(i).array() > 0.0).any()) s.rows.push_back(i);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        if ((m.col(j).array() > 0.0).any()) s.cols.push_back(j);
    s.cells = static_cast<std::size_t>((m.array() > 0.0).count());
    return s;
}

class CoverSearch {
public:
    CoverSearch(std::vector<std::uint32_t> rects, std::uint32_t universe)
        : rects_(std::move(rects)), universe_(universe) {
        std::sort(rects_.begin(), rects_.end(),
                  [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) > std::popcount(b); });
        largest_ = rects_.empty() ? 1 : std::popcount(rects_.front());
        best_ = greedy();
    }

    std::size_t solve() {
        branch(0, 0);
        return best_;
    }

private:
    std::size_t greedy() const {
        std::uint32_t covered = 0;
        std::size_t count = 0;
        while (covered != universe_) {
            std::uint32_t pick = 0;
            int gain = -1;
            for (std::uint32_t r : rects_) {
                const int g = std::popcount(r & ~covered);
                if (g > gain) {
                    gain = g;
                    pick = r;
                }
            }
            covered |= pick;
            ++count;
        }
        return count;
    }

    void branch(std::uint32_t covered, std::size_t depth) {
        if (covered == universe_) {
            best_ = std::min(best_, depth);
            return;
        }
        const std::uint32_t open = universe_ & ~covered;
        const std::size_t bound = depth + (std::popcount(open) + largest_ - 1) / largest_;
        if (bound >= best_) return;

        // Branch on the uncovered cell with the fewest candidate rectangles.
        int chosen = -1;
        std::size_t fewest = std::numeric_limits<std::size_t>::max();
        for (int bit = 0; bit < 32; ++bit) {
            if (!(open & (1u << bit))) continue;
            std::size_t count = 0;
            for (std::uint32_t r : rects_)
                if (r & (1u << bit)) ++count;
            if (count < fewest) {
                fewest = count;
                chosen = bit;
            }
        }
        for (std::uint32_t r : rects_)
            if (r & (1u << chosen)) branch(covered | r, depth + 1);
    }

    std::vector<std::uint32_t> rects_;
    std::uint32_t universe_;
    int largest_ = 1;
    std::size_t best_;
};

}  // namespace

std::size_t rectangle_cover_lower_bound(const MatrixXd& m, std::size_t max_entries) {
    const Support s = support_of(m);
    if (s.cells > max_entries || s.cells > 32)
        throw Error(ErrorCode::TooLarge, "support has " + std::to_string(s.cells) + " nonzero entries (limit " +
                                             std::to_string(std::min<std::size_t>(max_entries, 32)) + ")");
    if (s.cells == 0) return 0;

    // Index cells and describe each nonzero row by its column set.
    std::vector<std::vector<int>> cell_id(s.rows.size(), std::vector<int>(s.cols.size(), -1));
    std::vector<std::uint32_t> row_cols(s.rows.size(), 0);
    int next = 0;
    for (std::size_t a = 0; a < s.rows.size(); ++a)
        for (std::size_t b = 0; b < s.cols.size(); ++b)
            if (m(s.rows[a], s.cols[b]) > 0.0) {
                cell_id[a][b] = next++;
                row_cols[a] |= 1u << b;
            }

    // Maximal rectangles correspond to column sets closed under the row
    // supports: every nonempty intersection of row supports.
    std::set<std::uint32_t> closed;
    for (std::uint32_t rc : row_cols) {
        std::vector<std::uint32_t> fresh{rc};
        for (std::uint32_t c : closed)
            if (std::uint32_t meet = c & rc; meet != 0) fresh.push_back(meet);
        closed.insert(fresh.begin(), fresh.end());
    }

    std::set<std::uint32_t> rects;
    for (std::uint32_t cols : closed) {
        std::uint32_t cells = 0;
        for (std::size_t a = 0; a < s.rows.size(); ++a) {
            if ((row_cols[a] & cols) != cols) continue;
            for (std::size_t b = 0; b < s.cols.size(); ++b)
                if (cols & (1u << b)) cells |= 1u << cell_id[a][b];
        }
        rects.insert(cells);
    }

    const std::uint32_t universe = next == 32 ? ~0u : ((1u << next) - 1u);
    CoverSearch search({rects.begin(), rects.end()}, universe);
    return search.solve();
}

double relative_residual(const MatrixXd& m, const NNFactorization& f) {
    const MatrixXd diff = f.pairs.empty() ? MatrixXd(m) : MatrixXd(m - f.reconstruct());
    const double norm = m.norm();
    return norm > 0.0 ? diff.norm() / norm : diff.norm();
}

namespace {

double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

struct RestartOutcome {
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
    MatrixXd w, h;
};

constexpr double kDeadlockEpsilon = 1e-12;

// Damped Gauss-Newton over the strictly positive entries of (W, H). Entries
// at zero stay fixed; a step that drives an entry negative clamps it. Near an
// exact fit this converges far faster than the first-order sweeps.
double lm_polish(const MatrixXd& m, MatrixXd& w, MatrixXd& h, double tol, int iters) {
    const double norm = m.norm() > 0.0 ? m.norm() : 1.0;
    auto residual = [&](const MatrixXd& a, const MatrixXd& b) { return (m - a * b).norm() / norm; };
    double res = residual(w, h);
    double lambda = 1e-3;
    const auto rows = m.rows(), cols = m.cols(), r = w.cols();
    for (int it = 0; it < iters && res > tol; ++it) {
        std::vector<std::pair<bool, Eigen::Index>> free;  // (is_w, flat index)
        for (Eigen::Index i = 0; i < w.size(); ++i)
            if (w.data()[i] > 0.0) free.emplace_back(true, i);
        for (Eigen::Index i = 0; i < h.size(); ++i)
            if (h.data()[i] > 0.0) free.emplace_back(false, i);
        const auto n = static_cast<Eigen::Index>(free.size());
        if (n == 0) break;
        MatrixXd jac = MatrixXd::Zero(rows * cols, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto [is_w, flat] = free[static_cast<std::size_t>(k)];
            if (is_w) {
                const Eigen::Index i = flat % rows, c = flat / rows;  // column-major
                for (Eigen::Index j = 0; j < cols; ++j) jac(i + j * rows, k) = h(c, j);
            } else {
                const Eigen::Index c = flat % r, j = flat / r;
                for (Eigen::Index i = 0; i < rows; ++i) jac(i + j * rows, k) = w(i, c);
            }
        }
        const MatrixXd diff = m - w * h;
        const Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(diff.data(), diff.size());
        const MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * e;
        bool improved = false;
        for (int attempt = 0; attempt < 8 && !improved; ++attempt) {
            MatrixXd a = jtj;
            a.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
            const Eigen::VectorXd step = a.ldlt().solve(g);
            MatrixXd w2 = w, h2 = h;
            for (Eigen::Index k = 0; k < n; ++k) {
                const auto [is_w, flat] = free[static_cast<std::size_t>(k)];
                double& v = is_w ? w2.data()[flat] : h2.data()[flat];
                v = std::max(0.0, v + step(k));
            }
            const double trial = residual(w2, h2);
            if (std::isfinite(trial) && trial < res) {
                w = std::move(w2);
                h = std::move(h2);
                res = trial;
                lambda = std::max(lambda * 0.1, 1e-15);
                improved = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) break;
    }
    return res;
}

RestartOutcome run_restart(const MatrixXd& m, std::size_t r, int max_iters, double tol, std::uint64_t seed,
                           std::size_t restart) {
    const auto rows = m.rows(), cols = m.cols();
    const auto ri = static_cast<Eigen::Index>(r);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(restart)};
    std::mt19937_64 gen(seq);

    MatrixXd w(rows, ri), h(ri, cols);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = uniform01(gen);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = uniform01(gen);
    const double mass = m.sum();
    const double init_mass = (w * h).sum();
    if (init_mass > 0.0 && mass > 0.0) {
        const double s = std::sqrt(mass / init_mass);
        w *= s;
        h *= s;
    }

    const double norm = m.norm() > 0.0 ? m.norm() : 1.0;
    auto residual = [&] { return (m - w * h).norm() / norm; };

    const int mu_iters = std::min(max_iters / 10, 200);
    for (int it = 0; it < mu_iters; ++it) {
        const MatrixXd wt_m = w.transpose() * m;
        const MatrixXd wt_wh = w.transpose() * w * h;
        h = (h.array() * wt_m.array() / (wt_wh.array() + kDeadlockEpsilon)).matrix();
        h = h.cwiseMax(kDeadlockEpsilon);
        const MatrixXd m_ht = m * h.transpose();
        const MatrixXd whht = w * (h * h.transpose());
        w = (w.array() * m_ht.array() / (whht.array() + kDeadlockEpsilon)).matrix();
        w = w.cwiseMax(kDeadlockEpsilon);
    }

    // Projected alternating least squares, one column/row block at a time.
    RestartOutcome out;
    const int window = 200;
    double window_start = residual();
    for (int it = mu_iters; it < max_iters; ++it) {
        {
            const MatrixXd hht = h * h.transpose();
            const MatrixXd mht = m * h.transpose();
            for (Eigen::Index k = 0; k < ri; ++k) {
                const double d = std::max(hht(k, k), 1e-300);
                w.col(k) = (w.col(k) + (mht.col(k) - w * hht.col(k)) / d).cwiseMax(0.0);
            }
        }
        {
            const MatrixXd wtw = w.transpose() * w;
            const MatrixXd wtm = w.transpose() * m;
            for (Eigen::Index k = 0; k < ri; ++k) {
                const double d = std::max(wtw(k, k), 1e-300);
                h.row(k) = (h.row(k) + (wtm.row(k) - wtw.row(k) * h) / d).cwiseMax(0.0);
            }
        }
        if ((it - mu_iters) % 10 == 9) {
            const double res = residual();
            if (res <= tol) break;
            if ((it - mu_iters + 1) % window == 0) {
                // Give up when the observed linear rate cannot reach tol in
                // the remaining budget.
                const double ratio = res / window_start;
                const double remaining = static_cast<double>(max_iters - it) / window;
                if (ratio >= 1.0 || std::log(tol / res) / std::log(ratio) > remaining) break;
                window_start = res;
            }
        }
    }
    out.residual = residual();
    // The polish solves an (rows*cols) x (free entries) system per step, so
    // only small problems get it.
    if (out.residual > tol && out.residual < 1e-2 && m.size() * static_cast<Eigen::Index>(r) * (rows + cols) <= 400000)
        out.residual = lm_polish(m, w, h, tol, 50);
    out.converged = out.residual <= tol;
    out.w = std::move(w);
    out.h = std::move(h);
    return out;
}

NNFactorization to_factorization(const MatrixXd& w, const MatrixXd& h, double residual) {
    NNFactorization f;
    for (Eigen::Index k = 0; k < w.cols(); ++k) f.pairs.push_back({w.col(k), h.row(k).transpose()});
    f.residual = residual;
    return f;
}

NNFactorization trivial_factorization(const MatrixXd& m, const Support& s, std::string& method) {
    NNFactorization f;
    if (s.rows.size() <= s.cols.size()) {
        method = "trivial_rows";
        for (Eigen::Index i : s.rows) {
            VectorXd x = VectorXd::Zero(m.rows());
            x(i) = 1.0;
            f.pairs.push_back({x, m.row(i).transpose()});
        }
    } else {
        method = "trivial_cols";
        for (Eigen::Index j : s.cols) {
            VectorXd y = VectorXd::Zero(m.cols());
            y(j) = 1.0;
            f.pairs.push_back({m.col(j), y});
        }
    }
    f.residual = relative_residual(m, f);
    return f;
}

bool valid_certificate(const MatrixXd& m, const NNFactorization& f, double tol, double& residual) {
    if (f.pairs.empty()) return false;
    for (const auto& p : f.pairs) {
        if (p.x.size() != m.rows() || p.y.size() != m.cols()) return false;
        if ((p.x.array() < 0.0).any() || (p.y.array() < 0.0).any()) return false;
        if (!p.x.allFinite() || !p.y.allFinite()) return false;
    }
    residual = relative_residual(m, f);
    return residual <= tol;
}

RankBounds bounds_with_linear_rank(const MatrixXd& m, std::size_t lin, const RankConfig& config,
                                   std::span<const NNFactorization> supplied) {
    if ((m.array() < 0.0).any()) throw Error(ErrorCode::NegativeEntry, "matrix has a negative entry");
    if (!m.allFinite()) throw Error(ErrorCode::InvalidArgument, "matrix has a non-finite entry");

    RankBounds b;
    b.lower = lin;
    b.lower_certificates.push_back({"linear_rank", lin});

    const Support s = support_of(m);
    if (s.cells <= config.exact_lb_max_support && s.cells <= 32) {
        const std::size_t cover = rectangle_cover_lower_bound(m, config.exact_lb_max_support);
        b.lower_certificates.push_back({"rectangle_cover", cover});
        b.lower = std::max(b.lower, cover);
    } else {
        b.notes.push_back("rectangle cover skipped: support has " + std::to_string(s.cells) +
                          " nonzero entries (limit " + std::to_string(config.exact_lb_max_support) + ")");
    }

    if (s.cells == 0) {
        b.upper = 0;
        b.upper_method = "zero_matrix";
        b.exact = b.lower == 0;
        return b;
    }

    b.upper_certificate = trivial_factorization(m, s, b.upper_method);
    b.upper = b.upper_certificate->r();

    for (const auto& f : supplied) {
        double res = 0.0;
        if (!valid_certificate(m, f, config.residual_tol, res)) {
            b.notes.push_back("supplied factorization with r=" + std::to_string(f.r()) + " rejected");
            continue;
        }
        if (f.r() < b.lower) {
            b.notes.push_back("supplied factorization with r=" + std::to_string(f.r()) +
                              " conflicts with the certified lower bound; rejected");
            continue;
        }
        if (f.r() < b.upper) {
            b.upper = f.r();
            b.upper_certificate = f;
            b.upper_certificate->residual = res;
            b.upper_method = "supplied";
        }
    }

    if (b.lower == 1 && b.upper > 1) {
        NNFactorization f;
        const double total = m.sum();
        f.pairs.push_back({m.rowwise().sum(), m.colwise().sum().transpose() / total});
        double res = 0.0;
        if (valid_certificate(m, f, config.residual_tol, res)) {
            f.residual = res;
            b.upper = 1;
            b.upper_certificate = std::move(f);
            b.upper_method = "rank_one";
        }
    }

    if (config.restarts <= 0) {
        if (b.lower < b.upper) b.notes.push_back("factorization search disabled (restarts = 0)");
    } else {
        for (std::size_t r = std::max<std::size_t>(b.lower, 1); r < b.upper; ++r) {
            auto f = nmf_upper_bound(m, r, config.restarts, config.max_iters, config.residual_tol, config.seed);
            if (f) {
                b.upper = r;
                b.upper_certificate = std::move(*f);
                b.upper_method = "nmf";
                break;
            }
        }
    }
    b.exact = b.lower == b.upper;
    return b;
}

}  // namespace

std::optional<NNFactorization> nmf_upper_bound(const MatrixXd& m, std::size_t r, int restarts, int max_iters,
                                               double residual_tol, std::uint64_t seed) {
    if (r < 1) throw Error(ErrorCode::InvalidArgument, "factorization width must be at least 1");
    if ((m.array() < 0.0).any()) throw Error(ErrorCode::NegativeEntry, "matrix has a negative entry");
    if (m.size() == 0) throw Error(ErrorCode::ShapeMismatch, "empty matrix");

    const Support s = support_of(m);
    if (r >= std::min(s.rows.size(), s.cols.size())) {
        std::string method;
        NNFactorization f = trivial_factorization(m, s, method);
        while (f.r() < r) f.pairs.push_back({VectorXd::Zero(m.rows()), VectorXd::Zero(m.cols())});
        return f;
    }
    if (restarts <= 0) return std::nullopt;

    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < outcomes.size(); k = next++)
            outcomes[k] = run_restart(m, r, max_iters, residual_tol, seed, k);
    };
    const std::size_t threads =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), outcomes.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    // Deterministic reduction: smallest residual, then smallest restart index.
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        if (!outcomes[k].converged) continue;
        if (!best || outcomes[k].residual < outcomes[*best].residual) best = k;
    }
    if (!best) return std::nullopt;
    return to_factorization(outcomes[*best].w, outcomes[*best].h, outcomes[*best].residual);
}

RankBounds nonnegative_rank(const MatrixXd& m, const RankConfig& config, std::span<const NNFactorization> supplied) {
    if (m.size() == 0) throw Error(ErrorCode::ShapeMismatch, "empty matrix");
    if ((m.array() < 0.0).any()) throw Error(ErrorCode::NegativeEntry, "matrix has a negative entry");
    return bounds_with_linear_rank(m, linear_rank(m, config.arithmetic), config, supplied);
}

RankBounds nonnegative_rank(const RationalMatrix& m, RankConfig config, std::span<const NNFactorization> supplied) {
    if (m.data.empty()) throw Error(ErrorCode::ShapeMismatch, "empty matrix");
    for (const auto& v : m.data)
        if (sgn(v) < 0) throw Error(ErrorCode::NegativeEntry, "matrix has a negative entry");
    const MatrixXd approx = to_eigen(m);
    const std::size_t lin = config.arithmetic == Arithmetic::exact ? linear_rank(m) : linear_rank(approx);
    return bounds_with_linear_rank(approx, lin, config, supplied);
}

LatentDecomposition factorization_to_latent(const NNFactorization& fact, double mass_tolerance) {
    if (fact.pairs.empty()) throw Error(ErrorCode::InvalidArgument, "empty factorization");
    double mass = 0.0;
    for (const auto& p : fact.pairs) {
        if ((p.x.array() < 0.0).any() || (p.y.array() < 0.0).any())
            throw Error(ErrorCode::NegativeEntry, "factor has a negative entry");
        mass += p.x.sum() * p.y.sum();
    }
    if (std::abs(mass - 1.0) > mass_tolerance)
        throw Error(ErrorCode::NotNormalized, "factorization has total mass " + std::to_string(mass) +
                                                  "; it does not describe a distribution");

    LatentDecomposition dec;
    std::vector<double> weights;
    for (const auto& p : fact.pairs) {
        const double qx = p.x.sum();
        const double qy = p.y.sum();
        if (qx <= 0.0 || qy <= 0.0) {
            ++dec.dropped_components;
            continue;
        }
        weights.push_back(qx * qy);
        dec.cond_x.push_back(p.x / qx);
        dec.cond_y.push_back(p.y / qy);
    }
    if (weights.empty()) throw Error(ErrorCode::ZeroMassComponent, "every component has zero mass");
    double total = 0.0;
    for (double w : weights) total += w;
    dec.p_z.resize(static_cast<Eigen::Index>(weights.size()));
    for (std::size_t z = 0; z < weights.size(); ++z) dec.p_z(static_cast<Eigen::Index>(z)) = weights[z] / total;
    return dec;
}

MatrixXd latent_to_joint(const LatentDecomposition& dec) {
    if (dec.r() == 0 || dec.cond_x.size() != dec.r() || dec.cond_y.size() != dec.r())
        throw Error(ErrorCode::ShapeMismatch, "decomposition components are inconsistent");
    MatrixXd m = MatrixXd::Zero(dec.cond_x.front().size(), dec.cond_y.front().size());
    for (std::size_t z = 0; z < dec.r(); ++z) {
        if (dec.cond_x[z].size() != m.rows() || dec.cond_y[z].size() != m.cols())
            throw Error(ErrorCode::ShapeMismatch, "conditional distributions have inconsistent lengths");
        m += dec.p_z(static_cast<Eigen::Index>(z)) * dec.cond_x[z] * dec.cond_y[z].transpose();
    }
    return m;
}

}  // namespace rankwitness::nnrank
