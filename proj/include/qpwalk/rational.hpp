#pragma once

#include <gmpxx.h>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "qpwalk/errors.hpp"

namespace qpwalk {

/// Exact scalar used by the default arithmetic mode. GMP rationals keep the
/// condition checks and balance residuals exact; `double` instantiations of
/// the same templates form the float mode.
using Rat = mpq_class;

/// Parses "p/q", a decimal ("0.0405", "-3", "1e-3", "2.5e2"), or an integer.
Rat rat_from_string(std::string_view text);

/// Exact value of the binary double (every finite double is rational).
Rat rat_from_double(double value);

/// Canonical "p/q" (or "n" when the denominator is 1).
std::string rat_to_string(const Rat& value);

inline double to_double(const Rat& value) { return value.get_d(); }
inline double to_double(double value) { return value; }

/// Exact square root when `value` is a perfect rational square.
std::optional<Rat> exact_sqrt(const Rat& value);

template <typename T>
T pow_int(T base, long exponent) {
  if (exponent < 0) {
    base = T(1) / base;
    exponent = -exponent;
  }
  T result(1);
  while (exponent > 0) {
    if (exponent & 1) result = T(result * base);
    base = T(base * base);
    exponent >>= 1;
  }
  return result;
}

namespace num {

inline Rat abs(const Rat& x) { return Rat(::abs(x)); }
inline double abs(double x) { return std::fabs(x); }

/// GMP rationals only compare correctly in canonical form; callers may have
/// built values as mpq_class(n, d) without reducing them.
inline void canonicalize(Rat& x) { x.canonicalize(); }
inline void canonicalize(double&) {}

/// |x| <= eps; eps is 0 in exact mode so this degenerates to equality with 0.
template <typename T>
bool within_eps(const T& x, const T& eps) {
  return num::abs(x) <= eps;
}

template <typename T>
bool equal_eps(const T& a, const T& b, const T& eps) {
  return num::abs(T(a - b)) <= eps;
}

}  // namespace num

/// Conversion used to instantiate float-mode structures from exact ones.
template <typename T>
T scalar_cast(const Rat& value);

template <>
inline Rat scalar_cast<Rat>(const Rat& value) {
  return value;
}

template <>
inline double scalar_cast<double>(const Rat& value) {
  return value.get_d();
}

}  // namespace qpwalk
