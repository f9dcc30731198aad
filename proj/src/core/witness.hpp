#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causal_graph.hpp"
#include "distribution.hpp"
#include "nonneg_rank.hpp"

namespace rankwitness::witness {

enum class Status { Consistent, Refuted, Inconclusive };

std::string_view to_string(Status status) noexcept;

/// Slices whose conditioning event has less mass than this carry no constraint.
inline constexpr double kMinSliceProbability = 1e-9;
inline constexpr double kDefaultMomentTolerance = 1e-6;

struct SliceEvidence {
    std::vector<std::pair<std::string, std::size_t>> assignment;  // empty when unconditioned
    double probability = 1.0;
    std::size_t rank_lower = 0;
    std::size_t rank_upper = 0;
    bool exact = false;
    std::uint64_t separator_cardinality = 1;
    Status status = Status::Inconclusive;
};

struct WitnessVerdict {
    Status status = Status::Inconclusive;
    std::vector<SliceEvidence> evidence;
    std::vector<std::string> notes;
    std::string message;
};

struct CausalHypothesis {
    graph::CausalGraph graph;
    std::string x;
    std::string y;
    std::vector<std::string> conditioning;
};

/// Refuted iff the certified lower bound exceeds the separator cardinality;
/// Consistent iff the certified upper bound fits within it.
Status classify(const nnrank::RankBounds& bounds, std::uint64_t separator_cardinality) noexcept;

WitnessVerdict corollary1_check(const dist::FloatDistribution& dist, std::uint64_t separator_cardinality,
                                const nnrank::RankConfig& config = {});
WitnessVerdict corollary1_check(const dist::RationalDistribution& dist, std::uint64_t separator_cardinality,
                                const nnrank::RankConfig& config = {});

/// Finds the minimal hidden separators of (x, y) given the observed
/// conditioning set and checks every positive-probability slice of the data
/// against the largest separator cardinality.
WitnessVerdict witness_direct_influence(const CausalHypothesis& hypothesis, const dist::FloatDistribution& data,
                                        const nnrank::RankConfig& config = {});
WitnessVerdict witness_direct_influence(const CausalHypothesis& hypothesis, const dist::RationalDistribution& data,
                                        const nnrank::RankConfig& config = {});

std::size_t lower_bound_hidden_cardinality(const dist::FloatDistribution& dist, const nnrank::RankConfig& config = {});
std::size_t lower_bound_hidden_cardinality(const dist::RationalDistribution& dist,
                                           const nnrank::RankConfig& config = {});

/// Conditional expectations for z = +1 (first) and z = -1 (second).
using ExpectationPair = std::pair<double, double>;

/// Binary X, Y, Z, U with X and Y perfectly correlated in both slices of Z
/// and a hidden common cause U. Consistent iff <Y|z> = <X|z> for both z and
/// each pair has equal magnitudes, or its min is -1, or its max is 1.
WitnessVerdict perfect_correlation_check(ExpectationPair ex_x, ExpectationPair ex_y, ExpectationPair ex_xy,
                                         double tol = kDefaultMomentTolerance);

struct OracleWitness {
    int response = 0;  // bit (2*zi + ui) holds f(z, u) = -1, zi/ui = 0 for +1 and 1 for -1
    double p_u_plus = 0.0;
    ExpectationPair attained{0.0, 0.0};
};

struct OracleReport {
    bool feasible = false;
    double distance = 0.0;  // Chebyshev distance from target to the nearest enumerated point
    std::optional<OracleWitness> witness;
    std::vector<std::string> notes;
};

/// Enumerates every deterministic response f: (Z, U) → {±1} for X (Y copies
/// it) and every P(U = +1) on a grid of step 1/grid_steps.
OracleReport brute_force_response_oracle(ExpectationPair target_ex_x, double tol, int grid_steps = 256);

/// Every (<X|z=+1>, <X|z=-1>) pair the enumeration attains, deduplicated and sorted.
std::vector<ExpectationPair> achievable_region(int grid_steps = 256);

}  // namespace rankwitness::witness
