#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qpwalk/errors.hpp"
#include "qpwalk/rational.hpp"

namespace qpwalk {

/// The nine one-step displacements (k,l), k,l in {-1,0,1}.
inline constexpr std::array<std::pair<int, int>, 9> kOffsets{{{-1, -1},
                                                              {-1, 0},
                                                              {-1, 1},
                                                              {0, -1},
                                                              {0, 0},
                                                              {0, 1},
                                                              {1, -1},
                                                              {1, 0},
                                                              {1, 1}}};

enum class Region { Interior, Horizontal, Vertical, Origin };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::Interior: return "interior";
    case Region::Horizontal: return "horizontal";
    case Region::Vertical: return "vertical";
    case Region::Origin: return "origin";
  }
  return "?";
}

/// 3x3 displacement-probability table for one region of the quarter plane.
template <typename T>
struct TransitionKernel {
  std::array<T, 9> p{};

  static constexpr int index(int k, int l) { return (k + 1) * 3 + (l + 1); }

  const T& at(int k, int l) const { return p[index(k, l)]; }
  T& at(int k, int l) { return p[index(k, l)]; }

  T row_sum() const {
    T sum(0);
    for (const T& value : p) sum = T(sum + value);
    return sum;
  }
};

/// The four kernels of a homogeneous nearest-neighbor quarter-plane walk.
/// `eps` is the comparison tolerance: exactly 0 for Rat, typically 1e-12 for
/// double. All values are immutable after build_spec; operations are pure.
template <typename T>
struct WalkSpec {
  TransitionKernel<T> interior;
  TransitionKernel<T> horizontal;
  TransitionKernel<T> vertical;
  TransitionKernel<T> origin;
  T eps{};
  std::vector<std::string> warnings;

  const TransitionKernel<T>& kernel(Region r) const {
    switch (r) {
      case Region::Interior: return interior;
      case Region::Horizontal: return horizontal;
      case Region::Vertical: return vertical;
      case Region::Origin: return origin;
    }
    return interior;
  }

  static Region region_of(long m, long n) {
    if (m == 0 && n == 0) return Region::Origin;
    if (n == 0) return Region::Horizontal;
    if (m == 0) return Region::Vertical;
    return Region::Interior;
  }

  /// Kernel governing transitions out of state (m,n).
  const TransitionKernel<T>& kernel_at(long m, long n) const { return kernel(region_of(m, n)); }

  /// Shorthand accessors for interior entries, q(k,l).
  const T& q(int k, int l) const { return interior.at(k, l); }
  const T& qh(int k, int l) const { return horizontal.at(k, l); }
  const T& qv(int k, int l) const { return vertical.at(k, l); }
  const T& q0(int k, int l) const { return origin.at(k, l); }
};

namespace detail {

template <typename T>
void validate_kernel(TransitionKernel<T>& kernel, Region region, const T& eps) {
  for (auto [k, l] : kOffsets) {
    T& value = kernel.at(k, l);
    num::canonicalize(value);
    if (value < T(0))
      raise(Errc::NegativeEntry, std::string(region_name(region)) + " entry (" +
                                     std::to_string(k) + "," + std::to_string(l) + ") is negative");
    bool forbidden = false;
    switch (region) {
      case Region::Interior: break;
      case Region::Horizontal: forbidden = (l == -1); break;
      case Region::Vertical: forbidden = (k == -1); break;
      case Region::Origin: forbidden = (k == -1 || l == -1); break;
    }
    if (forbidden && value > T(0))
      raise(Errc::ForbiddenTransition, std::string(region_name(region)) + " entry (" +
                                           std::to_string(k) + "," + std::to_string(l) +
                                           ") must be zero");
  }
  T deficit = T(kernel.row_sum() - T(1));
  if (!num::within_eps(deficit, eps))
    raise(Errc::NonStochastic,
          std::string(region_name(region)) + " kernel rows do not sum to 1");
}

}  // namespace detail

/// Validates the four kernels and assembles a WalkSpec. Emits the
/// drift-positivity warnings used as an irreducibility proxy.
template <typename T>
WalkSpec<T> build_spec(TransitionKernel<T> interior, TransitionKernel<T> horizontal,
                       TransitionKernel<T> vertical, TransitionKernel<T> origin, T eps = T(0)) {
  detail::validate_kernel(interior, Region::Interior, eps);
  detail::validate_kernel(horizontal, Region::Horizontal, eps);
  detail::validate_kernel(vertical, Region::Vertical, eps);
  detail::validate_kernel(origin, Region::Origin, eps);
  WalkSpec<T> spec{std::move(interior), std::move(horizontal), std::move(vertical),
                   std::move(origin), eps, {}};
  const auto& q = spec.interior;
  struct {
    const char* what;
    T sum;
  } drifts[] = {
      {"rightward", T(q.at(1, 0) + q.at(1, -1) + q.at(1, 1))},
      {"leftward", T(q.at(-1, 0) + q.at(-1, 1) + q.at(-1, -1))},
      {"upward", T(q.at(0, 1) + q.at(-1, 1) + q.at(1, 1))},
      {"downward", T(q.at(0, -1) + q.at(1, -1) + q.at(-1, -1))},
  };
  for (const auto& d : drifts)
    if (d.sum == T(0))
      spec.warnings.push_back(std::string("degenerate interior: no ") + d.what +
                              " transitions; component-chain irreducibility fails");
  return spec;
}

inline WalkSpec<double> to_float(const WalkSpec<Rat>& spec, double eps = 1e-12) {
  auto convert = [](const TransitionKernel<Rat>& k) {
    TransitionKernel<double> out;
    for (int i = 0; i < 9; ++i) out.p[i] = k.p[i].get_d();
    return out;
  };
  WalkSpec<double> out{convert(spec.interior), convert(spec.horizontal), convert(spec.vertical),
                       convert(spec.origin), eps, spec.warnings};
  return out;
}

// ---------------------------------------------------------------------------
// Balance-equation residuals

/// Equation classes of the equilibrium system, keyed by the state they govern.
enum class EqClass { Int, V1, V2, H1, H2, Eq00, Eq01, Eq10, Eq11 };

inline constexpr std::array<EqClass, 9> kEqClasses{EqClass::Int,  EqClass::V1,   EqClass::V2,
                                                   EqClass::H1,   EqClass::H2,   EqClass::Eq00,
                                                   EqClass::Eq01, EqClass::Eq10, EqClass::Eq11};

inline const char* eq_class_name(EqClass c) {
  switch (c) {
    case EqClass::Int: return "int";
    case EqClass::V1: return "v1";
    case EqClass::V2: return "v2";
    case EqClass::H1: return "h1";
    case EqClass::H2: return "h2";
    case EqClass::Eq00: return "eq00";
    case EqClass::Eq01: return "eq01";
    case EqClass::Eq10: return "eq10";
    case EqClass::Eq11: return "eq11";
  }
  return "?";
}

inline EqClass classify_state(long m, long n) {
  if (m == 0 && n == 0) return EqClass::Eq00;
  if (m == 0 && n == 1) return EqClass::Eq01;
  if (m == 1 && n == 0) return EqClass::Eq10;
  if (m == 1 && n == 1) return EqClass::Eq11;
  if (m == 0) return EqClass::V2;
  if (m == 1) return EqClass::V1;
  if (n == 0) return EqClass::H2;
  if (n == 1) return EqClass::H1;
  return EqClass::Int;
}

/// Per-equation-class maximum absolute residual over a finite window.
template <typename T>
struct Residuals {
  std::array<T, 9> max_abs{};
  T overall{};

  const T& of(EqClass c) const { return max_abs[static_cast<int>(c)]; }
};

/// Signed balance residual pi(m,n) - sum over sources of pi(source) * p.
/// `pi` is any callable (long, long) -> T defined on m,n >= 0.
template <typename T, typename Pi>
T balance_residual_at(const WalkSpec<T>& spec, Pi&& pi, long m, long n) {
  T acc = pi(m, n);
  for (auto [k, l] : kOffsets) {
    long sm = m - k, sn = n - l;
    if (sm < 0 || sn < 0) continue;
    const T& prob = spec.kernel_at(sm, sn).at(k, l);
    if (prob == T(0)) continue;
    acc = T(acc - pi(sm, sn) * prob);
  }
  return acc;
}

/// Maximum absolute residual per equation class for states with m,n <= W.
/// `pi` must be defined for m,n <= W+1.
template <typename T, typename Pi>
Residuals<T> balance_residuals(const WalkSpec<T>& spec, Pi&& pi, long window) {
  if (window < 3) raise(Errc::WindowTooSmall, "residual window must be at least 3");
  Residuals<T> out;
  for (long m = 0; m <= window; ++m) {
    for (long n = 0; n <= window; ++n) {
      T r = num::abs(balance_residual_at(spec, pi, m, n));
      int c = static_cast<int>(classify_state(m, n));
      if (r > out.max_abs[c]) out.max_abs[c] = r;
      if (r > out.overall) out.overall = r;
    }
  }
  return out;
}

}  // namespace qpwalk
