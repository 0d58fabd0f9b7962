#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "qpwalk/model.hpp"

namespace qpwalk {

// ---------------------------------------------------------------------------
// Kernel and boundary polynomials.
//
// All forms are generic over the full 3x3 kernels, so the relaxed-Condition-A
// (q(1,1), q(-1,-1) > 0) variants come out of the same expressions; with zero
// diagonals they reduce to the classic polynomials.

/// K(g,d) = g*d - sum over (k,l) of q(k,l) g^(1-k) d^(1-l).
template <typename T>
T eval_K(const WalkSpec<T>& spec, const T& g, const T& d) {
  T acc = T(g * d);
  for (auto [k, l] : kOffsets) {
    const T& prob = spec.q(k, l);
    if (prob == T(0)) continue;
    acc = T(acc - prob * pow_int(g, 1 - k) * pow_int(d, 1 - l));
  }
  return acc;
}

template <typename T>
T eval_H1(const WalkSpec<T>& spec, const T& g, const T& d) {
  T acc = T(g * d);
  for (int k = -1; k <= 1; ++k) {
    T gk = pow_int(g, 1 - k);
    acc = T(acc - spec.q(k, 0) * gk * d - spec.q(k, -1) * gk * d * d - spec.qh(k, 1) * gk);
  }
  return acc;
}

template <typename T>
T eval_H0(const WalkSpec<T>& spec, const T& g, const T& d) {
  T acc = g;
  for (int k = -1; k <= 1; ++k) {
    T gk = pow_int(g, 1 - k);
    acc = T(acc - spec.qh(k, 0) * gk - spec.q(k, -1) * gk * d);
  }
  return acc;
}

template <typename T>
T eval_V1(const WalkSpec<T>& spec, const T& g, const T& d) {
  T acc = T(g * d);
  for (int l = -1; l <= 1; ++l) {
    T dl = pow_int(d, 1 - l);
    acc = T(acc - spec.q(0, l) * g * dl - spec.q(-1, l) * g * g * dl - spec.qv(1, l) * dl);
  }
  return acc;
}

template <typename T>
T eval_V0(const WalkSpec<T>& spec, const T& g, const T& d) {
  T acc = d;
  for (int l = -1; l <= 1; ++l) {
    T dl = pow_int(d, 1 - l);
    acc = T(acc - spec.qv(0, l) * dl - spec.q(-1, l) * g * dl);
  }
  return acc;
}

template <typename T>
T eval_H(const WalkSpec<T>& spec, const T& g, const T& d) {
  return T(eval_H1(spec, g, d) + eval_H0(spec, g, d));
}

template <typename T>
T eval_V(const WalkSpec<T>& spec, const T& g, const T& d) {
  return T(eval_V1(spec, g, d) + eval_V0(spec, g, d));
}

// Helper polynomials shared with the compensation engine.

/// Interior upward flux at ratio g: q(-1,1) g^2 + q(0,1) g + q(1,1).
template <typename T>
T poly_QN(const WalkSpec<T>& spec, const T& g) {
  return T(spec.q(-1, 1) * g * g + spec.q(0, 1) * g + spec.q(1, 1));
}

/// Horizontal-kernel upward flux: qh(-1,1) g^2 + qh(0,1) g + qh(1,1).
template <typename T>
T poly_HN(const WalkSpec<T>& spec, const T& g) {
  return T(spec.qh(-1, 1) * g * g + spec.qh(0, 1) * g + spec.qh(1, 1));
}

/// Interior downward flux coefficient: q(1,-1) + q(0,-1) g + q(-1,-1) g^2.
template <typename T>
T poly_Sh(const WalkSpec<T>& spec, const T& g) {
  return T(spec.q(1, -1) + spec.q(0, -1) * g + spec.q(-1, -1) * g * g);
}

/// g (1 - qh(0,0)) - qh(-1,0) g^2 - qh(1,0); equals -W(g) of the h-boundary.
template <typename T>
T poly_Ah(const WalkSpec<T>& spec, const T& g) {
  return T(g * (T(1) - spec.qh(0, 0)) - spec.qh(-1, 0) * g * g - spec.qh(1, 0));
}

template <typename T>
T poly_QE(const WalkSpec<T>& spec, const T& d) {
  return T(spec.q(1, -1) * d * d + spec.q(1, 0) * d + spec.q(1, 1));
}

template <typename T>
T poly_VE(const WalkSpec<T>& spec, const T& d) {
  return T(spec.qv(1, -1) * d * d + spec.qv(1, 0) * d + spec.qv(1, 1));
}

template <typename T>
T poly_Sv(const WalkSpec<T>& spec, const T& d) {
  return T(spec.q(-1, 1) + spec.q(-1, 0) * d + spec.q(-1, -1) * d * d);
}

/// d (1 - qv(0,0)) - qv(0,-1) d^2 - qv(0,1); equals -L(d) of the v-boundary.
template <typename T>
T poly_Av(const WalkSpec<T>& spec, const T& d) {
  return T(d * (T(1) - spec.qv(0, 0)) - spec.qv(0, -1) * d * d - spec.qv(0, 1));
}

// ---------------------------------------------------------------------------
// Drift ratios and the f / phi root maps.

/// rho1 = rightward / leftward interior flux (diagonal entries included, so
/// the relaxed-Condition-A form is automatic).
template <typename T>
T rho1(const WalkSpec<T>& spec) {
  T den = T(spec.q(-1, 0) + spec.q(-1, 1) + spec.q(-1, -1));
  if (den == T(0)) raise(Errc::ZeroDenominator, "rho1: no leftward interior transitions");
  return T(T(spec.q(1, 0) + spec.q(1, -1) + spec.q(1, 1)) / den);
}

template <typename T>
T rho2(const WalkSpec<T>& spec) {
  T den = T(spec.q(0, -1) + spec.q(1, -1) + spec.q(-1, -1));
  if (den == T(0)) raise(Errc::ZeroDenominator, "rho2: no downward interior transitions");
  return T(T(spec.q(0, 1) + spec.q(-1, 1) + spec.q(1, 1)) / den);
}

/// f(g) = (q(0,1) + q(-1,1) g) / (q(1,-1) + q(0,-1) g); delta = g f(g).
template <typename T>
T map_f(const WalkSpec<T>& spec, const T& g) {
  T den = T(spec.q(1, -1) + spec.q(0, -1) * g);
  if (den == T(0)) raise(Errc::ZeroDenominator, "f map: q(1,-1) + q(0,-1) g vanishes");
  return T(T(spec.q(0, 1) + spec.q(-1, 1) * g) / den);
}

/// phi(d) = (q(1,0) + q(1,-1) d) / (q(-1,1) + q(-1,0) d); gamma = d phi(d).
template <typename T>
T map_phi(const WalkSpec<T>& spec, const T& d) {
  T den = T(spec.q(-1, 1) + spec.q(-1, 0) * d);
  if (den == T(0)) raise(Errc::ZeroDenominator, "phi map: q(-1,1) + q(-1,0) d vanishes");
  return T(T(spec.q(1, 0) + spec.q(1, -1) * d) / den);
}

// ---------------------------------------------------------------------------
// Quadratic root solving.

/// Roots of one kernel quadratic, sorted ascending by real part then
/// imaginary part. In exact mode a non-square discriminant downgrades the
/// solve to float (flagged); the in-scope model class always stays rational.
template <typename T>
struct QuadRoots {
  std::vector<T> roots;                        // 2 entries, or 1 when degenerate_linear
  bool degenerate_linear = false;              // leading coefficient vanished
  bool downgraded = false;                     // exact mode fell back to float
  bool complex_pair = false;                   // no real roots
  std::array<std::complex<double>, 2> approx;  // populated when downgraded or complex

  bool has_unit_root(const T& eps) const {
    for (const T& r : roots)
      if (num::equal_eps(r, T(1), eps)) return true;
    return false;
  }
};

namespace detail {

inline QuadRoots<double> solve_quadratic(double a, double b, double c) {
  QuadRoots<double> out;
  if (a == 0.0) {
    if (b == 0.0) raise(Errc::DegenerateQuadratic, "both leading coefficients vanish");
    out.degenerate_linear = true;
    out.roots = {-c / b};
    return out;
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    out.complex_pair = true;
    double re = -b / (2.0 * a), im = std::sqrt(-disc) / (2.0 * std::fabs(a));
    out.approx = {std::complex<double>(re, -im), std::complex<double>(re, im)};
    return out;
  }
  double sq = std::sqrt(disc);
  double r1 = (-b - sq) / (2.0 * a), r2 = (-b + sq) / (2.0 * a);
  if (r2 < r1) std::swap(r1, r2);
  out.roots = {r1, r2};
  return out;
}

inline QuadRoots<Rat> solve_quadratic(const Rat& a, const Rat& b, const Rat& c) {
  QuadRoots<Rat> out;
  if (a == 0) {
    if (b == 0) raise(Errc::DegenerateQuadratic, "both leading coefficients vanish");
    out.degenerate_linear = true;
    out.roots = {Rat(-c / b)};
    return out;
  }
  Rat disc = Rat(b * b - 4 * a * c);
  if (auto sq = exact_sqrt(disc)) {
    Rat r1 = Rat((-b - *sq) / (2 * a));
    Rat r2 = Rat((-b + *sq) / (2 * a));
    if (r2 < r1) std::swap(r1, r2);
    out.roots = {r1, r2};
    return out;
  }
  QuadRoots<double> fallback = solve_quadratic(a.get_d(), b.get_d(), c.get_d());
  out.downgraded = true;
  out.complex_pair = fallback.complex_pair;
  if (fallback.complex_pair) {
    out.approx = fallback.approx;
  } else {
    out.approx = {std::complex<double>(fallback.roots[0], 0.0),
                  std::complex<double>(fallback.roots[1], 0.0)};
  }
  return out;
}

/// Coefficients of P as a quadratic in its second argument, recovered from
/// evaluations at d = 0, 1, -1 (works for every polynomial here, all of
/// which are bi-quadratic).
template <typename T, typename F>
std::array<T, 3> quad_coeffs(F&& poly, const T& fixed) {
  T p0 = poly(fixed, T(0));
  T p1 = poly(fixed, T(1));
  T pm = poly(fixed, T(-1));
  T half(1);
  half = T(half / T(2));
  T a = T((T(p1 + pm) - T(2) * p0) * half);
  T b = T(T(p1 - pm) * half);
  return {a, b, p0};
}

}  // namespace detail

/// Both roots of K(., d) = 0 in gamma.
template <typename T>
QuadRoots<T> solve_K_for_gamma(const WalkSpec<T>& spec, const T& d) {
  auto coeffs = detail::quad_coeffs<T>(
      [&](const T& dd, const T& gg) { return eval_K(spec, gg, dd); }, d);
  return detail::solve_quadratic(coeffs[0], coeffs[1], coeffs[2]);
}

/// Both roots of K(g, .) = 0 in delta.
template <typename T>
QuadRoots<T> solve_K_for_delta(const WalkSpec<T>& spec, const T& g) {
  auto coeffs = detail::quad_coeffs<T>(
      [&](const T& gg, const T& dd) { return eval_K(spec, gg, dd); }, g);
  return detail::solve_quadratic(coeffs[0], coeffs[1], coeffs[2]);
}

// ---------------------------------------------------------------------------
// Initial product-form pairs.

template <typename T>
struct PairGD {
  T gamma;
  T delta;
};

enum class Side { Horizontal, Vertical };

inline const char* side_name(Side s) {
  return s == Side::Horizontal ? "horizontal" : "vertical";
}

/// The product-form pair meeting K = 0 and the chosen boundary curve:
/// horizontal -> (rho1, rho1 f(rho1)), vertical -> (rho2 phi(rho2), rho2).
/// The second component is computed as the non-unit root of the kernel
/// quadratic (identical to the f/phi expression whenever Condition A holds,
/// and on-curve also for relaxed-A walks).
template <typename T>
PairGD<T> initial_pair(const WalkSpec<T>& spec, Side side) {
  T r1 = rho1(spec), r2 = rho2(spec);
  if (!(r1 < T(1)) || !(r2 < T(1)))
    raise(Errc::NotErgodic, "initial pair requires rho1 < 1 and rho2 < 1");
  PairGD<T> pair;
  if (side == Side::Horizontal) {
    pair.gamma = r1;
    T den = poly_Sh(spec, pair.gamma);
    if (den == T(0)) raise(Errc::ZeroDenominator, "no downward flux at gamma0");
    pair.delta = T(poly_QN(spec, pair.gamma) / den);
  } else {
    pair.delta = r2;
    T den = poly_Sv(spec, pair.delta);
    if (den == T(0)) raise(Errc::ZeroDenominator, "no leftward flux at delta0");
    pair.gamma = T(poly_QE(spec, pair.delta) / den);
  }
  if (!(pair.gamma > T(0)) || !(pair.gamma < T(1)) || !(pair.delta > T(0)) ||
      !(pair.delta < T(1)))
    raise(Errc::PairOutOfRange, "initial pair leaves (0,1); finite procedure inapplicable");
  return pair;
}

// ---------------------------------------------------------------------------
// Curve sampling for the K = 0, H = 0, V = 0 plots.

struct CurvePoint {
  char curve;  // 'K', 'H' or 'V'
  double gamma;
  double delta;
};

/// Samples the three curves on an n-point grid over (0, 1.05] in each
/// variable; only real roots are kept.
std::vector<CurvePoint> sample_curves(const WalkSpec<double>& spec, int resolution);

inline std::vector<CurvePoint> sample_curves(const WalkSpec<Rat>& spec, int resolution) {
  return sample_curves(to_float(spec), resolution);
}

}  // namespace qpwalk
