#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "distribution.hpp"
#include "error.hpp"
#include "nonneg_rank.hpp"

namespace rankwitness::protocol {

template <Scalar T>
using ProbVector = std::vector<T>;

/// Shared random seed Z handed to both parties; no communication.
template <Scalar T>
struct SeedProtocol {
    ProbVector<T> seed;                       // P(z)
    std::vector<ProbVector<T>> alice_encoder;  // [z] -> P(x|z)
    std::vector<ProbVector<T>> bob_encoder;    // [z] -> P(y|z)
};

/// Alice samples X, sends M through a channel, Bob decodes Y from M.
template <Scalar T>
struct MessageProtocol {
    ProbVector<T> alice_dist;                    // P(x)
    std::vector<ProbVector<T>> message_channel;  // [x] -> P(m|x)
    std::vector<ProbVector<T>> bob_decoder;      // [m] -> P(y|m)
};

/// Shared seed Z1 plus a one-way message Z2.
template <Scalar T>
struct HybridProtocol {
    ProbVector<T> seed;                                       // P(z1)
    std::vector<ProbVector<T>> alice_encoder;                 // [z1] -> P(x|z1)
    std::vector<std::vector<ProbVector<T>>> message_channel;  // [x][z1] -> P(z2|x,z1)
    std::vector<std::vector<ProbVector<T>>> bob_decoder;      // [z1][z2] -> P(y|z1,z2)
};

struct ComplexityReport {
    nnrank::RankBounds rank_bounds;
    double rcorr_bits_lower = 0.0;
    double rcorr_bits_upper = 0.0;
    double rcomm_bits_lower = 0.0;
    double rcomm_bits_upper = 0.0;
    bool exact = false;
};

struct TradeoffReport {
    bool holds = false;
    std::uint64_t capacity = 0;  // |Z1| × |Z2|
    std::size_t rank_lower = 0;
    long long margin = 0;  // capacity − certified lower bound
};

template <Scalar T>
dist::JointDistribution<T> simulate_seed_protocol(const SeedProtocol<T>& p);
template <Scalar T>
dist::JointDistribution<T> simulate_message_protocol(const MessageProtocol<T>& p);
template <Scalar T>
dist::JointDistribution<T> simulate_hybrid_protocol(const HybridProtocol<T>& p);

/// Width-|Z| (resp. |M|, |Z1||Z2|) factorization read off the protocol structure.
template <Scalar T>
nnrank::NNFactorization seed_factorization(const SeedProtocol<T>& p);
template <Scalar T>
nnrank::NNFactorization message_factorization(const MessageProtocol<T>& p);
template <Scalar T>
nnrank::NNFactorization hybrid_factorization(const HybridProtocol<T>& p);

/// Same joint distribution with the seed replaced by a message of equal
/// cardinality: P(m=z|x) = P(z)P(x|z)/P(x); rows with P(x) = 0 get a uniform message.
template <Scalar T>
MessageProtocol<T> seed_to_message(const SeedProtocol<T>& p);

/// Seed protocol whose simulation reproduces latent_to_joint(dec).
SeedProtocol<double> seed_from_latent(const nnrank::LatentDecomposition& dec);

ComplexityReport correlation_complexity(const nnrank::RankBounds& bounds);
ComplexityReport correlation_complexity(const dist::FloatDistribution& dist, const nnrank::RankConfig& config = {});
ComplexityReport correlation_complexity(const dist::RationalDistribution& dist, nnrank::RankConfig config = {});

/// Necessary condition |Z1|·|Z2| ≥ rank₊ against the certified lower bound.
TradeoffReport tradeoff_check(std::uint64_t card_z1, std::uint64_t card_z2, const nnrank::RankBounds& bounds);

// ---------------------------------------------------------------------------

namespace detail {

template <Scalar T>
void check_distribution(const ProbVector<T>& v, std::size_t expected, const char* what) {
    if (v.size() != expected || v.empty())
        throw Error(ErrorCode::ShapeMismatch, std::string(what) + " has length " + std::to_string(v.size()) +
                                                  ", expected " + std::to_string(expected));
    T sum(0);
    for (const auto& e : v) {
        if (e < 0) throw Error(ErrorCode::NegativeEntry, std::string(what) + " has a negative entry");
        sum += e;
    }
    if constexpr (std::same_as<T, double>) {
        if (std::abs(sum - 1.0) > dist::kNormalizationTolerance)
            throw Error(ErrorCode::NotNormalized, std::string(what) + " does not sum to 1");
    } else {
        if (sum != 1) throw Error(ErrorCode::NotNormalized, std::string(what) + " does not sum to 1");
    }
}

template <Scalar T>
std::size_t common_length(const std::vector<ProbVector<T>>& rows, const char* what) {
    if (rows.empty() || rows.front().empty()) throw Error(ErrorCode::ShapeMismatch, std::string(what) + " is empty");
    const std::size_t n = rows.front().size();
    for (const auto& r : rows) check_distribution(r, n, what);
    return n;
}

template <Scalar T>
dist::JointDistribution<T> make_joint(std::size_t nx, std::size_t ny, std::vector<T> values) {
    return dist::JointDistribution<T>::from_values(
        {{"X", static_cast<std::uint32_t>(nx), {}}, {"Y", static_cast<std::uint32_t>(ny), {}}}, std::move(values));
}

template <Scalar T>
Eigen::VectorXd to_vector(const std::vector<T>& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = to_double(v[i]);
    return out;
}

template <Scalar T>
std::size_t validate(const SeedProtocol<T>& p, std::size_t& nx, std::size_t& ny) {
    const std::size_t nz = p.seed.size();
    check_distribution(p.seed, nz, "seed distribution");
    if (p.alice_encoder.size() != nz || p.bob_encoder.size() != nz)
        throw Error(ErrorCode::ShapeMismatch, "need one encoder row per seed value");
    nx = common_length(p.alice_encoder, "Alice's encoder");
    ny = common_length(p.bob_encoder, "Bob's encoder");
    return nz;
}

template <Scalar T>
std::size_t validate(const MessageProtocol<T>& p, std::size_t& nx, std::size_t& ny) {
    nx = p.alice_dist.size();
    check_distribution(p.alice_dist, nx, "Alice's distribution");
    if (p.message_channel.size() != nx) throw Error(ErrorCode::ShapeMismatch, "need one channel row per value of X");
    const std::size_t nm = common_length(p.message_channel, "message channel");
    if (p.bob_decoder.size() != nm) throw Error(ErrorCode::ShapeMismatch, "need one decoder row per message");
    ny = common_length(p.bob_decoder, "Bob's decoder");
    return nm;
}

template <Scalar T>
void validate(const HybridProtocol<T>& p, std::size_t& nz1, std::size_t& nz2, std::size_t& nx, std::size_t& ny) {
    nz1 = p.seed.size();
    check_distribution(p.seed, nz1, "seed distribution");
    if (p.alice_encoder.size() != nz1) throw Error(ErrorCode::ShapeMismatch, "need one encoder row per seed value");
    nx = common_length(p.alice_encoder, "Alice's encoder");
    if (p.message_channel.size() != nx) throw Error(ErrorCode::ShapeMismatch, "channel must be indexed [x][z1]");
    nz2 = 0;
    for (const auto& per_x : p.message_channel) {
        if (per_x.size() != nz1) throw Error(ErrorCode::ShapeMismatch, "channel must be indexed [x][z1]");
        const std::size_t n = common_length(per_x, "message channel");
        if (nz2 != 0 && n != nz2) throw Error(ErrorCode::ShapeMismatch, "message alphabets differ");
        nz2 = n;
    }
    if (p.bob_decoder.size() != nz1) throw Error(ErrorCode::ShapeMismatch, "decoder must be indexed [z1][z2]");
    ny = 0;
    for (const auto& per_z1 : p.bob_decoder) {
        if (per_z1.size() != nz2) throw Error(ErrorCode::ShapeMismatch, "decoder must be indexed [z1][z2]");
        const std::size_t n = common_length(per_z1, "Bob's decoder");
        if (ny != 0 && n != ny) throw Error(ErrorCode::ShapeMismatch, "decoder output alphabets differ");
        ny = n;
    }
}

}  // namespace detail

template <Scalar T>
dist::JointDistribution<T> simulate_seed_protocol(const SeedProtocol<T>& p) {
    std::size_t nx = 0, ny = 0;
    const std::size_t nz = detail::validate(p, nx, ny);
    std::vector<T> values(nx * ny, T(0));
    for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t x = 0; x < nx; ++x) {
            const T px = p.seed[z] * p.alice_encoder[z][x];
            for (std::size_t y = 0; y < ny; ++y) values[x * ny + y] += px * p.bob_encoder[z][y];
        }
    return detail::make_joint(nx, ny, std::move(values));
}

template <Scalar T>
dist::JointDistribution<T> simulate_message_protocol(const MessageProtocol<T>& p) {
    std::size_t nx = 0, ny = 0;
    const std::size_t nm = detail::validate(p, nx, ny);
    std::vector<T> values(nx * ny, T(0));
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) {
            T acc(0);
            for (std::size_t m = 0; m < nm; ++m) acc += p.message_channel[x][m] * p.bob_decoder[m][y];
            values[x * ny + y] = p.alice_dist[x] * acc;
        }
    return detail::make_joint(nx, ny, std::move(values));
}

template <Scalar T>
dist::JointDistribution<T> simulate_hybrid_protocol(const HybridProtocol<T>& p) {
    std::size_t nz1 = 0, nz2 = 0, nx = 0, ny = 0;
    detail::validate(p, nz1, nz2, nx, ny);
    std::vector<T> values(nx * ny, T(0));
    for (std::size_t z1 = 0; z1 < nz1; ++z1)
        for (std::size_t x = 0; x < nx; ++x) {
            const T px = p.seed[z1] * p.alice_encoder[z1][x];
            for (std::size_t z2 = 0; z2 < nz2; ++z2) {
                const T pm = px * p.message_channel[x][z1][z2];
                for (std::size_t y = 0; y < ny; ++y) values[x * ny + y] += pm * p.bob_decoder[z1][z2][y];
            }
        }
    return detail::make_joint(nx, ny, std::move(values));
}

template <Scalar T>
nnrank::NNFactorization seed_factorization(const SeedProtocol<T>& p) {
    std::size_t nx = 0, ny = 0;
    const std::size_t nz = detail::validate(p, nx, ny);
    nnrank::NNFactorization f;
    for (std::size_t z = 0; z < nz; ++z)
        f.pairs.push_back({to_double(p.seed[z]) * detail::to_vector(p.alice_encoder[z]),
                           detail::to_vector(p.bob_encoder[z])});
    return f;
}

template <Scalar T>
nnrank::NNFactorization message_factorization(const MessageProtocol<T>& p) {
    std::size_t nx = 0, ny = 0;
    const std::size_t nm = detail::validate(p, nx, ny);
    nnrank::NNFactorization f;
    for (std::size_t m = 0; m < nm; ++m) {
        Eigen::VectorXd x(static_cast<Eigen::Index>(nx));
        for (std::size_t i = 0; i < nx; ++i)
            x(static_cast<Eigen::Index>(i)) = to_double(p.alice_dist[i]) * to_double(p.message_channel[i][m]);
        f.pairs.push_back({x, detail::to_vector(p.bob_decoder[m])});
    }
    return f;
}

template <Scalar T>
nnrank::NNFactorization hybrid_factorization(const HybridProtocol<T>& p) {
    std::size_t nz1 = 0, nz2 = 0, nx = 0, ny = 0;
    detail::validate(p, nz1, nz2, nx, ny);
    nnrank::NNFactorization f;
    for (std::size_t z1 = 0; z1 < nz1; ++z1)
        for (std::size_t z2 = 0; z2 < nz2; ++z2) {
            Eigen::VectorXd x(static_cast<Eigen::Index>(nx));
            for (std::size_t i = 0; i < nx; ++i)
                x(static_cast<Eigen::Index>(i)) = to_double(p.seed[z1]) * to_double(p.alice_encoder[z1][i]) *
                                                  to_double(p.message_channel[i][z1][z2]);
            f.pairs.push_back({x, detail::to_vector(p.bob_decoder[z1][z2])});
        }
    return f;
}

template <Scalar T>
MessageProtocol<T> seed_to_message(const SeedProtocol<T>& p) {
    std::size_t nx = 0, ny = 0;
    const std::size_t nz = detail::validate(p, nx, ny);
    MessageProtocol<T> out;
    out.alice_dist.assign(nx, T(0));
    for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t x = 0; x < nx; ++x) out.alice_dist[x] += p.seed[z] * p.alice_encoder[z][x];
    out.message_channel.assign(nx, ProbVector<T>(nz, T(0)));
    for (std::size_t x = 0; x < nx; ++x) {
        if (out.alice_dist[x] == 0) {
            for (auto& v : out.message_channel[x]) v = T(1) / T(static_cast<double>(nz));
            continue;
        }
        for (std::size_t z = 0; z < nz; ++z)
            out.message_channel[x][z] = p.seed[z] * p.alice_encoder[z][x] / out.alice_dist[x];
    }
    if constexpr (std::same_as<T, double>) {
        // Rounding can leave the renormalized rows a few ulps away from 1.
        for (auto& row : out.message_channel) {
            double sum = 0.0;
            for (double v : row) sum += v;
            for (double& v : row) v /= sum;
        }
        double sum = 0.0;
        for (double v : out.alice_dist) sum += v;
        for (double& v : out.alice_dist) v /= sum;
    }
    out.bob_decoder = p.bob_encoder;
    return out;
}

}  // namespace rankwitness::protocol
