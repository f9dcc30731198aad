#include "witness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "error.hpp"

namespace rankwitness::witness {

std::string_view to_string(Status status) noexcept {
    switch (status) {
        case Status::Consistent: return "Consistent";
        case Status::Refuted: return "Refuted";
        case Status::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

Status classify(const nnrank::RankBounds& bounds, std::uint64_t separator_cardinality) noexcept {
    if (bounds.lower > separator_cardinality) return Status::Refuted;
    if (bounds.upper <= separator_cardinality) return Status::Consistent;
    return Status::Inconclusive;
}

namespace {

nnrank::RankBounds bounds_of(const nnrank::MatrixXd& m, const nnrank::RankConfig& config) {
    return nnrank::nonnegative_rank(m, config);
}

nnrank::RankBounds bounds_of(const RationalMatrix& m, nnrank::RankConfig config) {
    config.arithmetic = nnrank::Arithmetic::exact;
    return nnrank::nonnegative_rank(m, config);
}

nnrank::MatrixXd as_eigen(const DenseMatrix<double>& m) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        m.data.data(), static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
}

template <Scalar T>
nnrank::RankBounds slice_bounds(const DenseMatrix<T>& m, const nnrank::RankConfig& config) {
    if constexpr (std::same_as<T, double>) {
        return bounds_of(as_eigen(m), config);
    } else {
        return bounds_of(m, config);
    }
}

std::string slice_label(const SliceEvidence& e) {
    if (e.assignment.empty()) return "P_XY";
    std::ostringstream os;
    os << "slice ";
    for (std::size_t i = 0; i < e.assignment.size(); ++i)
        os << (i ? "," : "") << e.assignment[i].first << "=" << e.assignment[i].second;
    return os.str();
}

std::string describe(const SliceEvidence& e) {
    std::ostringstream os;
    os << slice_label(e) << ": rank+ in [" << e.rank_lower << ", " << e.rank_upper << "] vs separator cardinality "
       << e.separator_cardinality;
    return os.str();
}

template <Scalar T>
WitnessVerdict check_two_axis(const dist::JointDistribution<T>& dist, std::uint64_t card,
                              const nnrank::RankConfig& config) {
    if (dist.num_axes() != 2)
        throw Error(ErrorCode::ShapeMismatch, "rank check needs a distribution over exactly two variables");
    if (card < 1) throw Error(ErrorCode::InvalidArgument, "separator cardinality must be positive");
    const auto bounds = slice_bounds(dist.matrix(), config);
    SliceEvidence e;
    e.rank_lower = bounds.lower;
    e.rank_upper = bounds.upper;
    e.exact = bounds.exact;
    e.separator_cardinality = card;
    e.status = classify(bounds, card);

    WitnessVerdict v;
    v.status = e.status;
    v.notes = bounds.notes;
    switch (v.status) {
        case Status::Refuted:
            v.message = "certified rank+ lower bound " + std::to_string(bounds.lower) +
                        " exceeds the separator cardinality " + std::to_string(card) +
                        "; the separation hypothesis is refuted";
            break;
        case Status::Consistent:
            v.message = "certified rank+ upper bound " + std::to_string(bounds.upper) + " fits within " +
                        std::to_string(card);
            break;
        case Status::Inconclusive:
            v.message = "rank+ interval [" + std::to_string(bounds.lower) + ", " + std::to_string(bounds.upper) +
                        "] straddles the separator cardinality " + std::to_string(card);
            break;
    }
    v.evidence.push_back(std::move(e));
    return v;
}

template <Scalar T>
WitnessVerdict witness_impl(const CausalHypothesis& h, const dist::JointDistribution<T>& data,
                            const nnrank::RankConfig& config) {
    const auto& g = h.graph;
    std::vector<std::string> observed_axes{h.x, h.y};
    observed_axes.insert(observed_axes.end(), h.conditioning.begin(), h.conditioning.end());
    for (const auto& name : observed_axes) {
        const auto& spec = g.variable(g.id(name));
        if (!spec.observed)
            throw Error(ErrorCode::InvalidArgument, "hypothesis variable '" + name + "' must be observed");
        if (!data.has_axis(name))
            throw Error(ErrorCode::NoObservedData, "data has no axis for observed variable '" + name + "'");
        const auto& axis = data.axes()[data.axis_index(name)];
        if (axis.cardinality != spec.cardinality)
            throw Error(ErrorCode::ShapeMismatch, "axis '" + name + "' has cardinality " +
                                                      std::to_string(axis.cardinality) + " but the graph declares " +
                                                      std::to_string(spec.cardinality));
    }

    WitnessVerdict verdict;
    const auto separators = graph::find_hidden_separators(g, h.x, h.y, h.conditioning);
    if (separators.empty()) {
        verdict.status = Status::Consistent;
        verdict.notes.push_back("no set of hidden variables d-separates " + h.x + " and " + h.y +
                                " in the hypothesis graph (direct edge); nothing to test");
        verdict.message = "hypothesis places no rank constraint on the data; vacuously consistent";
        return verdict;
    }
    std::uint64_t card = 0;
    std::string chosen;
    for (const auto& s : separators) {
        std::ostringstream os;
        os << "{";
        for (std::size_t i = 0; i < s.members.size(); ++i) os << (i ? "," : "") << s.members[i];
        os << "}";
        verdict.notes.push_back("minimal hidden separator " + os.str() + " with cardinality " +
                                std::to_string(s.cardinality));
        if (s.cardinality > card) {
            card = s.cardinality;
            chosen = os.str();
        }
    }

    const auto joint = dist::marginalize(data, std::span<const std::string>(observed_axes));
    const std::size_t nx = joint.axes()[0].cardinality;
    const std::size_t ny = joint.axes()[1].cardinality;
    const std::size_t slices = joint.size() / (nx * ny);

    // Conditioning assignments run over the trailing axes; each (x, y) cell
    // of one assignment sits `slices` apart in row-major order.
    bool any_refuted = false, all_consistent = true;
    for (std::size_t s = 0; s < slices; ++s) {
        SliceEvidence e;
        std::size_t rem = s;
        for (std::size_t k = h.conditioning.size(); k-- > 0;) {
            const std::size_t c = joint.axes()[2 + k].cardinality;
            e.assignment.insert(e.assignment.begin(), {h.conditioning[k], rem % c});
            rem /= c;
        }
        DenseMatrix<T> m(nx, ny);
        T mass(0);
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t j = 0; j < ny; ++j) {
                m(i, j) = joint.values()[(i * ny + j) * slices + s];
                mass += m(i, j);
            }
        e.probability = to_double(mass);
        e.separator_cardinality = card;
        if (e.probability < kMinSliceProbability) {
            verdict.notes.push_back(slice_label(e) + " skipped: conditioning event has probability below 1e-9");
            continue;
        }
        for (auto& v : m.data) v /= mass;
        const auto bounds = slice_bounds(m, config);
        e.rank_lower = bounds.lower;
        e.rank_upper = bounds.upper;
        e.exact = bounds.exact;
        e.status = classify(bounds, card);
        any_refuted = any_refuted || e.status == Status::Refuted;
        all_consistent = all_consistent && e.status == Status::Consistent;
        verdict.evidence.push_back(std::move(e));
    }

    if (verdict.evidence.empty()) throw Error(ErrorCode::ZeroConditioningEvent, "every slice has zero probability");
    if (any_refuted) {
        verdict.status = Status::Refuted;
        for (const auto& e : verdict.evidence)
            if (e.status == Status::Refuted) {
                verdict.message = describe(e) + ". No hidden separator of the hypothesis (largest " + chosen +
                                  ") is large enough; conclude that there must be a direct causal influence "
                                  "between " + h.x + " and " + h.y;
                break;
            }
    } else if (all_consistent) {
        verdict.status = Status::Consistent;
        verdict.message = "every slice satisfies rank+ <= " + std::to_string(card) + " (separator " + chosen + ")";
    } else {
        verdict.status = Status::Inconclusive;
        verdict.message = "no slice refutes the hypothesis, but some rank+ interval exceeds " + std::to_string(card);
    }
    return verdict;
}

}  // namespace

WitnessVerdict corollary1_check(const dist::FloatDistribution& dist, std::uint64_t card,
                                const nnrank::RankConfig& config) {
    return check_two_axis(dist, card, config);
}

WitnessVerdict corollary1_check(const dist::RationalDistribution& dist, std::uint64_t card,
                                const nnrank::RankConfig& config) {
    return check_two_axis(dist, card, config);
}

WitnessVerdict witness_direct_influence(const CausalHypothesis& hypothesis, const dist::FloatDistribution& data,
                                        const nnrank::RankConfig& config) {
    return witness_impl(hypothesis, data, config);
}

WitnessVerdict witness_direct_influence(const CausalHypothesis& hypothesis, const dist::RationalDistribution& data,
                                        const nnrank::RankConfig& config) {
    return witness_impl(hypothesis, data, config);
}

std::size_t lower_bound_hidden_cardinality(const dist::FloatDistribution& dist, const nnrank::RankConfig& config) {
    if (dist.num_axes() != 2) throw Error(ErrorCode::ShapeMismatch, "need a distribution over two variables");
    return slice_bounds(dist.matrix(), config).lower;
}

std::size_t lower_bound_hidden_cardinality(const dist::RationalDistribution& dist,
                                           const nnrank::RankConfig& config) {
    if (dist.num_axes() != 2) throw Error(ErrorCode::ShapeMismatch, "need a distribution over two variables");
    return slice_bounds(dist.matrix(), config).lower;
}

namespace {

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

struct BranchResult {
    bool equal_magnitude = false;
    bool min_is_minus_one = false;
    bool max_is_one = false;
    bool any() const { return equal_magnitude || min_is_minus_one || max_is_one; }
};

BranchResult branches(ExpectationPair p, double tol) {
    return {near(std::abs(p.first), std::abs(p.second), tol), near(std::min(p.first, p.second), -1.0, tol),
            near(std::max(p.first, p.second), 1.0, tol)};
}

std::string branch_note(const char* var, ExpectationPair p, const BranchResult& b) {
    std::ostringstream os;
    os << "<" << var << "|z=+1>=" << p.first << ", <" << var << "|z=-1>=" << p.second << ": ";
    if (!b.any()) {
        os << "no branch holds";
    } else {
        os << "holds via";
        if (b.equal_magnitude) os << " equal-magnitude";
        if (b.min_is_minus_one) os << " min=-1";
        if (b.max_is_one) os << " max=1";
    }
    return os.str();
}

}  // namespace

WitnessVerdict perfect_correlation_check(ExpectationPair ex_x, ExpectationPair ex_y, ExpectationPair ex_xy,
                                         double tol) {
    for (double v : {ex_x.first, ex_x.second, ex_y.first, ex_y.second, ex_xy.first, ex_xy.second})
        if (!std::isfinite(v) || v < -1.0 || v > 1.0)
            throw Error(ErrorCode::OutOfRange, "expectation values must lie in [-1, 1]");
    if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be nonnegative");

    WitnessVerdict v;
    if (!near(ex_xy.first, 1.0, tol) || !near(ex_xy.second, 1.0, tol)) {
        v.status = Status::Inconclusive;
        v.notes.push_back("not applicable: <XY|Z=z> must equal 1 for both values of Z");
        v.message = "perfect-correlation constraints do not apply";
        return v;
    }

    const bool y_copies_x = near(ex_y.first, ex_x.first, tol) && near(ex_y.second, ex_x.second, tol);
    const auto bx = branches(ex_x, tol);
    const auto by = branches(ex_y, tol);
    v.notes.push_back(branch_note("X", ex_x, bx));
    v.notes.push_back(branch_note("Y", ex_y, by));
    if (!y_copies_x) v.notes.push_back("<Y|Z=z> differs from <X|Z=z>, which perfect correlation forbids");

    if (y_copies_x && bx.any() && by.any()) {
        v.status = Status::Consistent;
        v.message = "the conditional expectations are attainable with a hidden binary common cause";
    } else {
        v.status = Status::Refuted;
        v.message = "An additional causal influence between X and Y is needed";
    }
    return v;
}

namespace {

template <class Visit>
void enumerate_responses(int grid_steps, Visit&& visit) {
    if (grid_steps < 1) throw Error(ErrorCode::InvalidArgument, "grid must have at least one step");
    for (int k = 0; k <= grid_steps; ++k) {
        const double q = static_cast<double>(k) / grid_steps;
        for (int f = 0; f < 16; ++f) {
            auto value = [f](int zi, int ui) { return (f >> (2 * zi + ui)) & 1 ? -1.0 : 1.0; };
            const double plus = q * value(0, 0) + (1.0 - q) * value(0, 1);
            const double minus = q * value(1, 0) + (1.0 - q) * value(1, 1);
            visit(f, q, ExpectationPair{plus, minus});
        }
    }
}

}  // namespace

OracleReport brute_force_response_oracle(ExpectationPair target, double tol, int grid_steps) {
    OracleReport report;
    report.distance = std::numeric_limits<double>::infinity();
    enumerate_responses(grid_steps, [&](int f, double q, ExpectationPair got) {
        const double d = std::max(std::abs(got.first - target.first), std::abs(got.second - target.second));
        if (d < report.distance) {
            report.distance = d;
            report.witness = OracleWitness{f, q, got};
        }
    });
    report.feasible = report.distance <= tol;
    if (!report.feasible) report.witness.reset();
    report.notes.push_back("Y copies X's response, so <XY|Z=z> = 1 holds for every candidate");
    report.notes.push_back("constraints are per value of Z; P(Z) does not enter");
    return report;
}

std::vector<ExpectationPair> achievable_region(int grid_steps) {
    std::set<ExpectationPair> points;
    enumerate_responses(grid_steps, [&](int, double, ExpectationPair got) { points.insert(got); });
    return {points.begin(), points.end()};
}

}  // namespace rankwitness::witness
