#pragma once

#include <gmpxx.h>

#include <concepts>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rankwitness {

using Rational = mpq_class;

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

inline double to_double(double v) noexcept { return v; }
inline double to_double(const Rational& v) { return v.get_d(); }

/// Accepts "p/q", integers and decimal literals ("0.25" is read as 1/4).
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& value);

/// Dense row-major matrix used where Eigen does not fit (exact arithmetic).
template <class T>
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T(0)) {}

    T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

using RationalMatrix = DenseMatrix<Rational>;

}  // namespace rankwitness
