#pragma once

#include <cstdint>
#include <vector>

#include "qpwalk/compensation.hpp"

namespace qpwalk {

enum class OracleMethod { LinearSolve, PowerIteration, Simulation };

inline const char* oracle_method_name(OracleMethod m) {
  switch (m) {
    case OracleMethod::LinearSolve: return "linear-solve";
    case OracleMethod::PowerIteration: return "power-iteration";
    case OracleMethod::Simulation: return "simulation";
  }
  return "?";
}

/// Stationary probabilities of the truncated chain on {0..N}^2. Transitions
/// leaving the box are redirected to their source state, so the truncation is
/// mass-conserving and its bias is bounded by the tail mass beyond N.
template <typename T>
struct OracleGrid {
  long N = 0;
  std::vector<T> p;  // (N+1)^2 entries, row-major in m
  OracleMethod method = OracleMethod::LinearSolve;
  double tail_estimate = 0;     // truncation bound plus method floor
  double achieved_residual = 0; // power iteration's final l1 residual
  double sample_mass = 1;       // simulation: fraction of steps inside the box

  const T& at(long m, long n) const { return p[m * (N + 1) + n]; }
  T& at(long m, long n) { return p[m * (N + 1) + n]; }

  T total() const {
    T sum(0);
    for (const T& v : p) sum = T(sum + v);
    return sum;
  }
};

namespace detail {

/// Banded LU solve of A x = rhs with partial pivoting inside the band.
/// A is stored by the caller through `entry(row, col)` for |row-col| <= band;
/// rows/cols outside that band are zero. Works for Rat (exact) and double.
template <typename T>
std::vector<T> solve_banded(long size, long band, std::vector<T>& storage,
                            std::vector<T>& rhs) {
  // storage layout: row r holds columns r-band .. r+2*band (pivot fill)
  const long width = 3 * band + 1;
  auto entry = [&](long r, long c) -> T& { return storage[r * width + (c - r + band)]; };
  for (long col = 0; col < size; ++col) {
    long pivot_row = col;
    for (long r = col; r <= std::min(size - 1, col + band); ++r)
      if (num::abs(entry(r, col)) > num::abs(entry(pivot_row, col))) pivot_row = r;
    if (entry(pivot_row, col) == T(0))
      raise(Errc::SingularSystem, "truncated chain is not irreducible");
    if (pivot_row != col) {
      for (long c = col; c <= std::min(size - 1, col + 2 * band); ++c)
        std::swap(entry(pivot_row, c), entry(col, c));
      std::swap(rhs[pivot_row], rhs[col]);
    }
    T pivot = entry(col, col);
    for (long r = col + 1; r <= std::min(size - 1, col + band); ++r) {
      T factor = T(entry(r, col) / pivot);
      if (factor == T(0)) continue;
      entry(r, col) = T(0);
      for (long c = col + 1; c <= std::min(size - 1, col + 2 * band); ++c)
        entry(r, c) = T(entry(r, c) - factor * entry(col, c));
      rhs[r] = T(rhs[r] - factor * rhs[col]);
    }
  }
  std::vector<T> x(size);
  for (long r = size - 1; r >= 0; --r) {
    T acc = rhs[r];
    for (long c = r + 1; c <= std::min(size - 1, r + 2 * band); ++c)
      acc = T(acc - entry(r, c) * x[c]);
    x[r] = T(acc / entry(r, r));
  }
  return x;
}

/// Destination of a step from (m,n) by displacement (k,l) under redirect
/// semantics on the N-box.
inline std::pair<long, long> redirect(long N, long m, long n, int k, int l) {
  long tm = m + k, tn = n + l;
  if (tm < 0 || tn < 0 || tm > N || tn > N) return {m, n};
  return {tm, tn};
}

double analytic_tail_bound(const WalkSpec<double>& spec, long N);

}  // namespace detail

/// Stationary vector of the truncated chain via a banded direct solve. With
/// T = Rat the result is exact (intended for N <= 25); with T = double it is
/// the float linear-solve method.
template <typename T>
OracleGrid<T> truncated_stationary(const WalkSpec<T>& spec, long N) {
  if (N < 5) raise(Errc::InvalidArgument, "truncation size must be at least 5");
  const long side = N + 1, size = side * side, band = side + 1;
  const long width = 3 * band + 1;
  // equations: for every target t, sum_s pi_s (P[s][t] - I) = 0; drop the
  // last equation and pin pi_last = 1, then renormalize.
  std::vector<T> storage(static_cast<size_t>((size - 1) * width), T(0));
  std::vector<T> rhs(size - 1, T(0));
  auto entry = [&](long r, long c) -> T& { return storage[r * width + (c - r + band)]; };
  auto add = [&](long target, long source, const T& value) {
    if (target == size - 1) return;  // dropped equation
    if (source == size - 1)
      rhs[target] = T(rhs[target] - value);  // pinned unknown moves to the rhs
    else
      entry(target, source) = T(entry(target, source) + value);
  };
  for (long m = 0; m < side; ++m) {
    for (long n = 0; n < side; ++n) {
      long s = m * side + n;
      const TransitionKernel<T>& kernel = spec.kernel_at(m, n);
      add(s, s, T(-1));
      for (auto [k, l] : kOffsets) {
        const T& prob = kernel.at(k, l);
        if (prob == T(0)) continue;
        auto [tm, tn] = detail::redirect(N, m, n, k, l);
        add(tm * side + tn, s, prob);
      }
    }
  }
  std::vector<T> x = detail::solve_banded(size - 1, band, storage, rhs);
  OracleGrid<T> grid;
  grid.N = N;
  grid.method = OracleMethod::LinearSolve;
  grid.p.assign(size, T(0));
  T total(1);  // the pinned unknown
  for (long i = 0; i < size - 1; ++i) total = T(total + x[i]);
  if (total == T(0)) raise(Errc::SingularSystem, "stationary mass vanished");
  for (long i = 0; i < size - 1; ++i) grid.p[i] = T(x[i] / total);
  grid.p[size - 1] = T(T(1) / total);
  if constexpr (std::is_same_v<T, double>) {
    for (double v : grid.p)
      if (!std::isfinite(v)) raise(Errc::SingularSystem, "solve produced non-finite values");
    grid.tail_estimate = detail::analytic_tail_bound(spec, N) + 1e-13;
  } else {
    grid.tail_estimate = detail::analytic_tail_bound(to_float(spec), N);
  }
  return grid;
}

/// Power iteration pi <- pi P until the l1 step residual drops below `tol`
/// (or `max_iters` sweeps). The achieved residual is reported in the grid.
OracleGrid<double> power_stationary(const WalkSpec<double>& spec, long N, double tol = 1e-13,
                                    long max_iters = 1000000);

/// Empirical occupation frequencies of one seeded trajectory from (0,0).
/// Uses a counter-based SplitMix64 stream, so runs are reproducible.
OracleGrid<double> simulate(const WalkSpec<double>& spec, long N, std::uint64_t steps,
                            std::uint64_t burn_in, std::uint64_t seed);

struct Comparison {
  double max_abs_err = 0;
  double max_rel_err = 0;
  long states_compared = 0;
};

/// Elementwise comparison of a closed-form measure against an oracle grid;
/// relative errors are recorded only where the reference is at least `floor`.
template <typename T, typename T2>
Comparison compare(const InvariantMeasure<T>& reference, const OracleGrid<T2>& grid,
                   double floor = 1e-12) {
  Comparison cmp;
  for (long m = 0; m <= grid.N; ++m) {
    for (long n = 0; n <= grid.N; ++n) {
      double ref = to_double(reference.evaluate(m, n));
      double err = std::fabs(ref - to_double(grid.at(m, n)));
      cmp.max_abs_err = std::max(cmp.max_abs_err, err);
      if (ref >= floor) cmp.max_rel_err = std::max(cmp.max_rel_err, err / ref);
      ++cmp.states_compared;
    }
  }
  return cmp;
}

/// Comparison of two oracle grids over their common window.
template <typename A, typename B>
Comparison compare(const OracleGrid<A>& lhs, const OracleGrid<B>& rhs, double floor = 1e-12) {
  Comparison cmp;
  long N = std::min(lhs.N, rhs.N);
  for (long m = 0; m <= N; ++m) {
    for (long n = 0; n <= N; ++n) {
      double a = to_double(lhs.at(m, n));
      double err = std::fabs(a - to_double(rhs.at(m, n)));
      cmp.max_abs_err = std::max(cmp.max_abs_err, err);
      if (a >= floor) cmp.max_rel_err = std::max(cmp.max_rel_err, err / a);
      ++cmp.states_compared;
    }
  }
  return cmp;
}

}  // namespace qpwalk
