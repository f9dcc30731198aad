#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "scalar.hpp"

namespace rankwitness::dist {

inline constexpr double kNormalizationTolerance = 1e-12;

struct Axis {
    std::string name;
    std::uint32_t cardinality = 1;
    /// Optional ±1 value attached to each index of a binary axis. Empty means
    /// the default convention: index 0 is +1, index 1 is -1.
    std::vector<int> labels;

    /// Value of index `i` under the ±1 encoding.
    int sign(std::size_t i) const {
        if (!labels.empty()) return labels.at(i);
        return i == 0 ? 1 : -1;
    }
};

/// Dense joint distribution over named discrete axes, row-major (last axis
/// fastest). Immutable once built.
template <Scalar T>
class JointDistribution {
public:
    /// Validates shape, nonnegativity and normalization. Float inputs whose
    /// total is within `tolerance` of 1 are renormalized; rational inputs must
    /// sum to exactly 1.
    static JointDistribution from_values(std::vector<Axis> axes, std::vector<T> values,
                                         double tolerance = kNormalizationTolerance);

    const std::vector<Axis>& axes() const noexcept { return axes_; }
    const std::vector<T>& values() const noexcept { return values_; }
    std::size_t num_axes() const noexcept { return axes_.size(); }
    std::size_t size() const noexcept { return values_.size(); }

    /// Throws UnknownVariable.
    std::size_t axis_index(std::string_view name) const;
    bool has_axis(std::string_view name) const noexcept;

    std::size_t stride(std::size_t axis) const { return strides_.at(axis); }
    std::size_t flat_index(std::span<const std::size_t> coords) const;
    std::vector<std::size_t> coords(std::size_t flat) const;

    const T& at(std::span<const std::size_t> coords) const { return values_[flat_index(coords)]; }

    /// Two-axis view: first axis indexes rows.
    std::size_t rows() const { return axes_.at(0).cardinality; }
    std::size_t cols() const { return axes_.size() > 1 ? axes_[1].cardinality : 1; }
    const T& operator()(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }

    DenseMatrix<T> matrix() const;

private:
    std::vector<Axis> axes_;
    std::vector<std::size_t> strides_;
    std::vector<T> values_;
};

using FloatDistribution = JointDistribution<double>;
using RationalDistribution = JointDistribution<Rational>;

template <Scalar T>
struct ConditionalSlice {
    JointDistribution<T> slice;
    std::string conditioning_variable;
    std::size_t conditioning_value = 0;
    T probability{0};  // P(conditioning_variable = conditioning_value)
};

/// Moments <V_S> indexed by the bitmask of S over `names`; entry 0 is the
/// empty product and always equals 1.
template <Scalar T>
struct ExpectationTable {
    std::vector<std::string> names;
    std::vector<T> moments;

    std::size_t n() const noexcept { return names.size(); }
    const T& moment(std::uint32_t mask) const { return moments.at(mask); }
};

/// Distribution of the remaining axes given variable = value. Throws
/// ZeroConditioningEvent when that event has probability zero.
template <Scalar T>
ConditionalSlice<T> condition_slice(const JointDistribution<T>& dist, std::string_view variable, std::size_t value);

/// Sums out every axis not in `keep`; result axes follow the order of `keep`.
template <Scalar T>
JointDistribution<T> marginalize(const JointDistribution<T>& dist, std::span<const std::string> keep);

template <Scalar T>
ExpectationTable<T> probs_to_expectations(const JointDistribution<T>& dist);

/// Inverse moment transform. Throws InfeasibleMoments when some resulting
/// probability is below -tolerance (any negative value for rationals).
template <Scalar T>
JointDistribution<T> expectations_to_probs(const ExpectationTable<T>& table, double tolerance = 1e-9);

JointDistribution<double> to_float(const JointDistribution<Rational>& dist);

// ---------------------------------------------------------------------------

namespace detail {

inline bool is_negative(double v) { return v < 0.0; }
inline bool is_negative(const Rational& v) { return sgn(v) < 0; }

}  // namespace detail

template <Scalar T>
JointDistribution<T> JointDistribution<T>::from_values(std::vector<Axis> axes, std::vector<T> values,
                                                       double tolerance) {
    if (axes.empty()) throw Error(ErrorCode::ShapeMismatch, "distribution needs at least one axis");
    std::size_t total = 1;
    for (std::size_t a = 0; a < axes.size(); ++a) {
        const auto& axis = axes[a];
        if (axis.cardinality < 1)
            throw Error(ErrorCode::ShapeMismatch, "axis '" + axis.name + "' has cardinality 0");
        for (std::size_t b = 0; b < a; ++b)
            if (axes[b].name == axis.name)
                throw Error(ErrorCode::DuplicateName, "axis '" + axis.name + "' appears twice");
        if (!axis.labels.empty()) {
            if (axis.cardinality != 2 || axis.labels.size() != 2 ||
                !((axis.labels[0] == 1 && axis.labels[1] == -1) || (axis.labels[0] == -1 && axis.labels[1] == 1)))
                throw Error(ErrorCode::InvalidArgument,
                            "labels on axis '" + axis.name + "' must be a permutation of [1,-1] on a binary axis");
        }
        total *= axis.cardinality;
    }
    if (values.size() != total)
        throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(total) + " values, got " +
                                                  std::to_string(values.size()));

    T sum(0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if constexpr (std::same_as<T, double>) {
            if (!std::isfinite(values[i])) throw Error(ErrorCode::InvalidArgument, "non-finite entry");
        }
        if (detail::is_negative(values[i]))
            throw Error(ErrorCode::NegativeEntry, "entry " + std::to_string(i) + " is negative");
        sum += values[i];
    }
    if constexpr (std::same_as<T, double>) {
        if (std::abs(sum - 1.0) > tolerance)
            throw Error(ErrorCode::NotNormalized, "entries sum to " + std::to_string(sum));
        for (auto& v : values) v /= sum;
    } else {
        if (sum != 1) throw Error(ErrorCode::NotNormalized, "entries sum to " + to_string(sum));
    }

    JointDistribution d;
    d.axes_ = std::move(axes);
    d.values_ = std::move(values);
    d.strides_.assign(d.axes_.size(), 1);
    for (std::size_t a = d.axes_.size() - 1; a-- > 0;)
        d.strides_[a] = d.strides_[a + 1] * d.axes_[a + 1].cardinality;
    return d;
}

template <Scalar T>
std::size_t JointDistribution<T>::axis_index(std::string_view name) const {
    for (std::size_t a = 0; a < axes_.size(); ++a)
        if (axes_[a].name == name) return a;
    throw Error(ErrorCode::UnknownVariable, "distribution has no axis '" + std::string(name) + "'");
}

template <Scalar T>
bool JointDistribution<T>::has_axis(std::string_view name) const noexcept {
    for (const auto& axis : axes_)
        if (axis.name == name) return true;
    return false;
}

template <Scalar T>
std::size_t JointDistribution<T>::flat_index(std::span<const std::size_t> coords) const {
    if (coords.size() != axes_.size()) throw Error(ErrorCode::ShapeMismatch, "coordinate arity mismatch");
    std::size_t flat = 0;
    for (std::size_t a = 0; a < coords.size(); ++a) {
        if (coords[a] >= axes_[a].cardinality) throw Error(ErrorCode::OutOfRange, "coordinate out of range");
        flat += coords[a] * strides_[a];
    }
    return flat;
}

template <Scalar T>
std::vector<std::size_t> JointDistribution<T>::coords(std::size_t flat) const {
    std::vector<std::size_t> c(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        c[a] = flat / strides_[a];
        flat %= strides_[a];
    }
    return c;
}

template <Scalar T>
DenseMatrix<T> JointDistribution<T>::matrix() const {
    if (axes_.size() != 2) throw Error(ErrorCode::ShapeMismatch, "matrix view needs exactly two axes");
    DenseMatrix<T> m(rows(), cols());
    m.data = values_;
    return m;
}

template <Scalar T>
ConditionalSlice<T> condition_slice(const JointDistribution<T>& dist, std::string_view variable, std::size_t value) {
    const std::size_t axis = dist.axis_index(variable);
    if (dist.num_axes() < 2) throw Error(ErrorCode::ShapeMismatch, "cannot slice a one-axis distribution");
    if (value >= dist.axes()[axis].cardinality)
        throw Error(ErrorCode::OutOfRange, "value " + std::to_string(value) + " out of range for '" +
                                               std::string(variable) + "'");

    std::vector<Axis> rest;
    for (std::size_t a = 0; a < dist.num_axes(); ++a)
        if (a != axis) rest.push_back(dist.axes()[a]);

    std::vector<T> values;
    T mass(0);
    for (std::size_t flat = 0; flat < dist.size(); ++flat) {
        if (dist.coords(flat)[axis] != value) continue;
        values.push_back(dist.values()[flat]);
        mass += dist.values()[flat];
    }
    if (mass == 0)
        throw Error(ErrorCode::ZeroConditioningEvent,
                    "P(" + std::string(variable) + "=" + std::to_string(value) + ") is zero");
    for (auto& v : values) v /= mass;
    return {JointDistribution<T>::from_values(std::move(rest), std::move(values)), std::string(variable), value, mass};
}

template <Scalar T>
JointDistribution<T> marginalize(const JointDistribution<T>& dist, std::span<const std::string> keep) {
    if (keep.empty()) throw Error(ErrorCode::InvalidArgument, "marginal needs at least one axis");
    std::vector<std::size_t> src;
    std::vector<Axis> axes;
    for (const auto& name : keep) {
        const std::size_t a = dist.axis_index(name);
        for (std::size_t s : src)
            if (s == a) throw Error(ErrorCode::DuplicateName, "axis '" + name + "' requested twice");
        src.push_back(a);
        axes.push_back(dist.axes()[a]);
    }
    std::size_t total = 1;
    for (const auto& axis : axes) total *= axis.cardinality;
    std::vector<T> values(total, T(0));
    for (std::size_t flat = 0; flat < dist.size(); ++flat) {
        const auto c = dist.coords(flat);
        std::size_t out = 0;
        for (std::size_t k = 0; k < src.size(); ++k) out = out * axes[k].cardinality + c[src[k]];
        values[out] += dist.values()[flat];
    }
    return JointDistribution<T>::from_values(std::move(axes), std::move(values));
}

template <Scalar T>
ExpectationTable<T> probs_to_expectations(const JointDistribution<T>& dist) {
    const std::size_t n = dist.num_axes();
    if (n > 20) throw Error(ErrorCode::TooLarge, "moment table limited to 20 binary variables");
    ExpectationTable<T> table;
    for (const auto& axis : dist.axes()) {
        if (axis.cardinality != 2) throw Error(ErrorCode::NonBinaryAxis, "axis '" + axis.name + "' is not binary");
        table.names.push_back(axis.name);
    }
    const std::uint32_t subsets = 1u << n;
    table.moments.assign(subsets, T(0));
    for (std::size_t flat = 0; flat < dist.size(); ++flat) {
        const auto c = dist.coords(flat);
        for (std::uint32_t mask = 0; mask < subsets; ++mask) {
            int sign = 1;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) sign *= dist.axes()[i].sign(c[i]);
            if (sign > 0)
                table.moments[mask] += dist.values()[flat];
            else
                table.moments[mask] -= dist.values()[flat];
        }
    }
    return table;
}

template <Scalar T>
JointDistribution<T> expectations_to_probs(const ExpectationTable<T>& table, double tolerance) {
    const std::size_t n = table.n();
    if (n == 0 || n > 20) throw Error(ErrorCode::InvalidArgument, "moment table needs 1..20 variables");
    const std::uint32_t subsets = 1u << n;
    if (table.moments.size() != subsets)
        throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(subsets) + " moments");

    std::vector<Axis> axes;
    for (const auto& name : table.names) axes.push_back({name, 2, {}});
    std::vector<T> values(subsets, T(0));
    const T scale = T(1) / T(static_cast<double>(subsets));
    for (std::size_t flat = 0; flat < subsets; ++flat) {
        // Axis 0 is the most significant coordinate in row-major order.
        T acc(1);
        for (std::uint32_t mask = 1; mask < subsets; ++mask) {
            int sign = 1;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) {
                    const std::size_t coord = (flat >> (n - 1 - i)) & 1u;
                    sign *= coord == 0 ? 1 : -1;
                }
            if (sign > 0)
                acc += table.moments[mask];
            else
                acc -= table.moments[mask];
        }
        T p = acc * scale;
        if constexpr (std::same_as<T, double>) {
            if (p < -tolerance)
                throw Error(ErrorCode::InfeasibleMoments, "moments imply probability " + std::to_string(p));
            if (p < 0) p = 0;
        } else {
            if (sgn(p) < 0) throw Error(ErrorCode::InfeasibleMoments, "moments imply probability " + to_string(p));
        }
        values[flat] = p;
    }
    if constexpr (std::same_as<T, double>) {
        return JointDistribution<T>::from_values(std::move(axes), std::move(values), 1e-9);
    } else {
        return JointDistribution<T>::from_values(std::move(axes), std::move(values));
    }
}

}  // namespace rankwitness::dist
