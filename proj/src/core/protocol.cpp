#include "protocol.hpp"

namespace rankwitness::protocol {

SeedProtocol<double> seed_from_latent(const nnrank::LatentDecomposition& dec) {
    SeedProtocol<double> p;
    for (std::size_t z = 0; z < dec.r(); ++z) {
        p.seed.push_back(dec.p_z(static_cast<Eigen::Index>(z)));
        p.alice_encoder.emplace_back(dec.cond_x[z].data(), dec.cond_x[z].data() + dec.cond_x[z].size());
        p.bob_encoder.emplace_back(dec.cond_y[z].data(), dec.cond_y[z].data() + dec.cond_y[z].size());
    }
    return p;
}

ComplexityReport correlation_complexity(const nnrank::RankBounds& bounds) {
    ComplexityReport r;
    r.rank_bounds = bounds;
    r.rcorr_bits_lower = std::log2(static_cast<double>(bounds.lower));
    r.rcorr_bits_upper = std::log2(static_cast<double>(bounds.upper));
    // One quantity: seed and message both d-separate X and Y.
    r.rcomm_bits_lower = r.rcorr_bits_lower;
    r.rcomm_bits_upper = r.rcorr_bits_upper;
    r.exact = bounds.exact;
    return r;
}

ComplexityReport correlation_complexity(const dist::FloatDistribution& d, const nnrank::RankConfig& config) {
    if (d.num_axes() != 2) throw Error(ErrorCode::ShapeMismatch, "complexity needs a two-variable distribution");
    const auto m = d.matrix();
    const Eigen::MatrixXd e = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        m.data.data(), static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
    return correlation_complexity(nnrank::nonnegative_rank(e, config));
}

ComplexityReport correlation_complexity(const dist::RationalDistribution& d, nnrank::RankConfig config) {
    if (d.num_axes() != 2) throw Error(ErrorCode::ShapeMismatch, "complexity needs a two-variable distribution");
    config.arithmetic = nnrank::Arithmetic::exact;
    return correlation_complexity(nnrank::nonnegative_rank(d.matrix(), config));
}

TradeoffReport tradeoff_check(std::uint64_t card_z1, std::uint64_t card_z2, const nnrank::RankBounds& bounds) {
    if (card_z1 < 1 || card_z2 < 1) throw Error(ErrorCode::InvalidArgument, "cardinalities must be positive");
    if (card_z1 > (1ull << 31) || card_z2 > (1ull << 31))
        throw Error(ErrorCode::TooLarge, "cardinalities above 2^31 are not supported");
    TradeoffReport r;
    r.capacity = card_z1 * card_z2;
    r.rank_lower = bounds.lower;
    r.holds = r.capacity >= bounds.lower;
    r.margin = static_cast<long long>(r.capacity) - static_cast<long long>(bounds.lower);
    return r;
}

}  // namespace rankwitness::protocol
