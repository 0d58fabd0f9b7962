#pragma once

#include <algorithm>
#include <sstream>
#include <vector>

#include "qpwalk/conditions.hpp"
#include "qpwalk/marginals.hpp"
#include "qpwalk/spectral.hpp"

namespace qpwalk {

/// One product-form contribution coeff * gamma^m * delta^n on m,n > 0.
template <typename T>
struct GeometricTerm {
  T coeff, gamma, delta;
};

/// One axis contribution coeff * ratio^k along a boundary.
template <typename T>
struct BoundaryTerm {
  T coeff, ratio;
};

/// Piecewise invariant measure: interior product-form terms plus geometric
/// sums on each axis. The origin is covered by both axis families; accepted
/// measures keep the two origin values equal.
template <typename T>
struct InvariantMeasure {
  std::vector<GeometricTerm<T>> interior;
  std::vector<BoundaryTerm<T>> h_axis;  // n = 0, ratios in gamma
  std::vector<BoundaryTerm<T>> v_axis;  // m = 0, ratios in delta

  T evaluate(long m, long n) const {
    T acc(0);
    if (m > 0 && n > 0) {
      for (const auto& t : interior)
        acc = T(acc + t.coeff * pow_int(t.gamma, m) * pow_int(t.delta, n));
    } else if (n == 0) {
      for (const auto& t : h_axis) acc = T(acc + t.coeff * pow_int(t.ratio, m));
    } else {
      for (const auto& t : v_axis) acc = T(acc + t.coeff * pow_int(t.ratio, n));
    }
    return acc;
  }

  T origin_via_h() const {
    T acc(0);
    for (const auto& t : h_axis) acc = T(acc + t.coeff);
    return acc;
  }

  T origin_via_v() const {
    T acc(0);
    for (const auto& t : v_axis) acc = T(acc + t.coeff);
    return acc;
  }

  /// Total mass by closed-form geometric sums. Requires every ratio to lie
  /// strictly inside the unit interval in absolute value.
  T total_mass() const {
    T total(0);
    for (const auto& t : interior) {
      if (!(num::abs(t.gamma) < T(1)) || !(num::abs(t.delta) < T(1)))
        raise(Errc::NonSummable, "interior term ratio outside (-1,1)");
      total = T(total + t.coeff * t.gamma / T(T(1) - t.gamma) * t.delta / T(T(1) - t.delta));
    }
    for (const auto& t : h_axis) {
      if (!(num::abs(t.ratio) < T(1))) raise(Errc::NonSummable, "h-axis ratio outside (-1,1)");
      total = T(total + t.coeff * t.ratio / T(T(1) - t.ratio));
    }
    for (const auto& t : v_axis) {
      if (!(num::abs(t.ratio) < T(1))) raise(Errc::NonSummable, "v-axis ratio outside (-1,1)");
      total = T(total + t.coeff * t.ratio / T(T(1) - t.ratio));
    }
    total = T(total + origin_via_h());
    return total;
  }

  /// Sorts terms so equal measures compare equal term-by-term.
  void canonicalize() {
    std::sort(interior.begin(), interior.end(), [](const auto& a, const auto& b) {
      if (a.gamma != b.gamma) return a.gamma < b.gamma;
      return a.delta < b.delta;
    });
    auto by_ratio = [](const auto& a, const auto& b) { return a.ratio < b.ratio; };
    std::sort(h_axis.begin(), h_axis.end(), by_ratio);
    std::sort(v_axis.begin(), v_axis.end(), by_ratio);
  }
};

/// Scales all coefficients so the total mass is 1; returns the multiplier.
template <typename T>
T normalize(InvariantMeasure<T>& measure) {
  T total = measure.total_mass();
  if (!(total > T(0))) raise(Errc::NonSummable, "total mass is not positive");
  T c0 = T(T(1) / total);
  for (auto& t : measure.interior) t.coeff = T(t.coeff * c0);
  for (auto& t : measure.h_axis) t.coeff = T(t.coeff * c0);
  for (auto& t : measure.v_axis) t.coeff = T(t.coeff * c0);
  return c0;
}

template <typename T>
Residuals<T> measure_residuals(const WalkSpec<T>& spec, const InvariantMeasure<T>& measure,
                               long window) {
  return balance_residuals(
      spec, [&](long m, long n) { return measure.evaluate(m, n); }, window);
}

// ---------------------------------------------------------------------------
// Compensation procedure.

enum class StepKind {
  InitialHorizontal,
  InitialVertical,
  Vertical,
  Horizontal,
  TerminalVertical,
  TerminalHorizontal,
};

inline const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::InitialHorizontal: return "initial-horizontal";
    case StepKind::InitialVertical: return "initial-vertical";
    case StepKind::Vertical: return "vertical";
    case StepKind::Horizontal: return "horizontal";
    case StepKind::TerminalVertical: return "terminal-vertical";
    case StepKind::TerminalHorizontal: return "terminal-horizontal";
  }
  return "?";
}

template <typename T>
struct CompensationStep {
  StepKind kind;
  T gamma{}, delta{};      // pair the step works with
  T coeff{};               // interior coefficient introduced (0 at termination)
  T axis_coeff{};          // boundary coefficient produced
};

template <typename T>
struct CompensationTrace {
  std::vector<CompensationStep<T>> steps;
  bool terminated = false;
  std::string diagnosis;

  /// Interior pair sequence, in the order terms were introduced.
  std::vector<PairGD<T>> pairs() const {
    std::vector<PairGD<T>> out;
    for (const auto& s : steps)
      if (s.kind != StepKind::TerminalVertical && s.kind != StepKind::TerminalHorizontal)
        out.push_back({s.gamma, s.delta});
    return out;
  }
};

/// Build state of the procedure: the unnormalized formal solution so far.
template <typename T>
struct PartialSolution {
  InvariantMeasure<T> x;
  CompensationTrace<T> trace;
  Side pending = Side::Vertical;  // boundary violated by the newest term
  bool terminated = false;
};

namespace detail {

template <typename T>
T route_tolerance(const T& eps, const T& a, const T& b) {
  T scale = T(num::abs(a) + num::abs(b) + T(1));
  return T(eps * scale);
}

template <typename T>
void check_routes(const T& eps, const T& a, const T& b, Errc code, const char* what) {
  if (!(num::abs(T(a - b)) <= route_tolerance(eps, a, b))) {
    std::ostringstream os;
    os << what << ": " << to_double(a) << " vs " << to_double(b);
    raise(code, os.str());
  }
}

/// The root of `roots` other than `current` (selection by exclusion).
template <typename T>
T other_root(const QuadRoots<T>& roots, const T& current) {
  if (roots.downgraded)
    raise(Errc::DegenerateQuadratic, "kernel roots left the rational field");
  if (roots.complex_pair)
    raise(Errc::RootOutOfRange, "kernel roots are complex; finite procedure fails");
  if (roots.degenerate_linear) return roots.roots[0];
  T d0 = num::abs(T(roots.roots[0] - current));
  T d1 = num::abs(T(roots.roots[1] - current));
  return d0 <= d1 ? roots.roots[1] : roots.roots[0];
}

}  // namespace detail

/// Initial product-form solution on one boundary (the paper's Step 1). The
/// boundary coefficient must satisfy both boundary equations; when the two
/// derivations disagree there is no single coefficient and the procedure
/// cannot start (the diagnosis for the false-initiation counterexample).
template <typename T>
PartialSolution<T> initial_solution(const WalkSpec<T>& spec, Side side) {
  PairGD<T> pair = initial_pair(spec, side);
  PartialSolution<T> partial;
  partial.x.interior.push_back({T(1), pair.gamma, pair.delta});
  if (side == Side::Horizontal) {
    T hn = poly_HN(spec, pair.gamma);
    T ah = poly_Ah(spec, pair.gamma);
    if (hn == T(0) || ah == T(0))
      raise(Errc::ZeroDenominator, "H_N or W vanishes at gamma0");
    // the two e0 routes of (h1)/(h2); upward flux without the diagonal term
    T up = T(pair.gamma * (spec.q(0, 1) + spec.q(-1, 1) * pair.gamma));
    T down = T(spec.q(1, -1) + spec.q(0, -1) * pair.gamma);
    T e_h1 = T(up / hn);
    T e_h2 = T(pair.delta * down / ah);
    detail::check_routes(spec.eps, e_h1, e_h2, Errc::InconsistentBoundary,
                         "no single e0 satisfies both horizontal boundary equations");
    partial.x.h_axis.push_back({e_h1, pair.gamma});
    partial.trace.steps.push_back(
        {StepKind::InitialHorizontal, pair.gamma, pair.delta, T(1), e_h1});
    partial.pending = Side::Vertical;
  } else {
    T ve = poly_VE(spec, pair.delta);
    T av = poly_Av(spec, pair.delta);
    if (ve == T(0) || av == T(0))
      raise(Errc::ZeroDenominator, "V_E or L vanishes at delta0");
    T right = T(pair.delta * (spec.q(1, 0) + spec.q(1, -1) * pair.delta));
    T left = T(spec.q(-1, 1) + spec.q(-1, 0) * pair.delta);
    T z_v1 = T(right / ve);
    T z_v2 = T(pair.gamma * left / av);
    detail::check_routes(spec.eps, z_v1, z_v2, Errc::InconsistentBoundary,
                         "no single z satisfies both vertical boundary equations");
    partial.x.v_axis.push_back({z_v1, pair.delta});
    partial.trace.steps.push_back(
        {StepKind::InitialVertical, pair.gamma, pair.delta, T(1), z_v1});
    partial.pending = Side::Horizontal;
  }
  return partial;
}

/// Vertical compensation step: pairs the newest interior term with the other
/// kernel root at the same delta and solves the two vertical boundary
/// equations for the new coefficients. A vanishing companion coefficient
/// terminates the procedure.
template <typename T>
void vertical_step(const WalkSpec<T>& spec, PartialSolution<T>& partial) {
  if (partial.terminated) raise(Errc::InvalidArgument, "procedure already terminated");
  if (partial.pending != Side::Vertical)
    raise(Errc::InvalidArgument, "vertical boundary is currently satisfied");
  const GeometricTerm<T>& current = partial.x.interior.back();
  T delta = current.delta;
  T gamma_new = detail::other_root(solve_K_for_gamma(spec, delta), current.gamma);

  T qe = poly_QE(spec, delta);
  T ve = poly_VE(spec, delta);
  T av = poly_Av(spec, delta);  // equals -L(delta)
  if (ve == T(0)) raise(Errc::ZeroDenominator, "V_E vanishes at delta");
  if (gamma_new == T(0)) raise(Errc::ZeroDenominator, "companion root is zero");
  T num = T(ve / gamma_new - av);         // V_E/gamma_new + L
  T den = T(ve / current.gamma - av);     // V_E/gamma_cur + L
  if (den == T(0)) raise(Errc::ZeroDenominator, "vertical-step denominator vanishes");

  T term_scale = T(num::abs(T(ve / gamma_new)) + num::abs(av) + T(1));
  if (num::abs(num) <= T(spec.eps * term_scale)) {
    // companion coefficient is zero: no new interior term is needed
    T z = T(current.coeff * qe / ve);
    detail::check_routes(spec.eps, T(z * av),
                         T(current.coeff * current.gamma * poly_Sv(spec, delta)),
                         Errc::InconsistentBoundary, "termination z fails the (v2) route");
    partial.x.v_axis.push_back({z, delta});
    partial.trace.steps.push_back({StepKind::TerminalVertical, gamma_new, delta, T(0), z});
    partial.trace.terminated = true;
    partial.terminated = true;
    return;
  }

  if (!(num::abs(gamma_new) < T(1))) {
    partial.trace.diagnosis = "companion gamma root outside the unit interval";
    raise(Errc::RootOutOfRange, partial.trace.diagnosis);
  }
  T coeff_new = T(-current.coeff * num / den);
  T z = T(-current.coeff * qe * (T(1) / gamma_new - T(1) / current.gamma) / den);
  // the new pair must still solve (v1) and (v2)
  detail::check_routes(spec.eps, z, T((current.coeff + coeff_new) * qe / ve),
                       Errc::InconsistentBoundary, "vertical step fails the (v1) route");
  detail::check_routes(
      spec.eps, T(z * av),
      T((current.coeff * current.gamma + coeff_new * gamma_new) * poly_Sv(spec, delta)),
      Errc::InconsistentBoundary, "vertical step fails the (v2) route");
  partial.x.interior.push_back({coeff_new, gamma_new, delta});
  partial.x.v_axis.push_back({z, delta});
  partial.trace.steps.push_back({StepKind::Vertical, gamma_new, delta, coeff_new, z});
  partial.pending = Side::Horizontal;
}

/// Horizontal compensation step; mirror of vertical_step.
template <typename T>
void horizontal_step(const WalkSpec<T>& spec, PartialSolution<T>& partial) {
  if (partial.terminated) raise(Errc::InvalidArgument, "procedure already terminated");
  if (partial.pending != Side::Horizontal)
    raise(Errc::InvalidArgument, "horizontal boundary is currently satisfied");
  const GeometricTerm<T>& current = partial.x.interior.back();
  T gamma = current.gamma;
  T delta_new = detail::other_root(solve_K_for_delta(spec, gamma), current.delta);

  T qn = poly_QN(spec, gamma);
  T hn = poly_HN(spec, gamma);
  T ah = poly_Ah(spec, gamma);  // equals -W(gamma)
  if (hn == T(0)) raise(Errc::ZeroDenominator, "H_N vanishes at gamma");
  if (delta_new == T(0)) raise(Errc::ZeroDenominator, "companion root is zero");
  T num = T(hn / delta_new - ah);
  T den = T(hn / current.delta - ah);
  if (den == T(0)) raise(Errc::ZeroDenominator, "horizontal-step denominator vanishes");

  T term_scale = T(num::abs(T(hn / delta_new)) + num::abs(ah) + T(1));
  if (num::abs(num) <= T(spec.eps * term_scale)) {
    T e = T(current.coeff * qn / hn);
    detail::check_routes(spec.eps, T(e * ah),
                         T(current.coeff * current.delta * poly_Sh(spec, gamma)),
                         Errc::InconsistentBoundary, "termination e fails the (h2) route");
    partial.x.h_axis.push_back({e, gamma});
    partial.trace.steps.push_back({StepKind::TerminalHorizontal, gamma, delta_new, T(0), e});
    partial.trace.terminated = true;
    partial.terminated = true;
    return;
  }

  if (!(num::abs(delta_new) < T(1))) {
    partial.trace.diagnosis = "companion delta root outside the unit interval";
    raise(Errc::RootOutOfRange, partial.trace.diagnosis);
  }
  T coeff_new = T(-current.coeff * num / den);
  T e = T(-current.coeff * qn * (T(1) / delta_new - T(1) / current.delta) / den);
  detail::check_routes(spec.eps, e, T((current.coeff + coeff_new) * qn / hn),
                       Errc::InconsistentBoundary, "horizontal step fails the (h1) route");
  detail::check_routes(
      spec.eps, T(e * ah),
      T((current.coeff * current.delta + coeff_new * delta_new) * poly_Sh(spec, gamma)),
      Errc::InconsistentBoundary, "horizontal step fails the (h2) route");
  partial.x.interior.push_back({coeff_new, gamma, delta_new});
  partial.x.h_axis.push_back({e, gamma});
  partial.trace.steps.push_back({StepKind::Horizontal, gamma, delta_new, coeff_new, e});
  partial.pending = Side::Vertical;
}

/// Runs the compensation loop from one starting side until the companion
/// coefficient vanishes. The result is the unnormalized formal solution.
template <typename T>
PartialSolution<T> compensate(const WalkSpec<T>& spec, Side start,
                              int max_steps = 6) {
  PartialSolution<T> partial = initial_solution(spec, start);
  for (int step = 0; step < max_steps && !partial.terminated; ++step) {
    if (partial.pending == Side::Vertical)
      vertical_step(spec, partial);
    else
      horizontal_step(spec, partial);
  }
  if (!partial.terminated)
    raise(Errc::NonTerminating,
          "companion coefficient did not vanish within " + std::to_string(max_steps) +
              " steps; outside the finite class");
  return partial;
}

template <typename T>
struct SolveResult {
  InvariantMeasure<T> measure;  // normalized
  T c0{};                       // normalization constant applied
  CompensationTrace<T> trace;
};

namespace detail {

/// Verifies the origin block of the formal solution: the two axis families
/// must agree at (0,0) and the four origin-adjacent balance equations must
/// close. Both fail exactly when Condition D does, so the report carries the
/// Condition D violations when they explain the failure.
template <typename T>
void verify_origin_block(const WalkSpec<T>& spec, const InvariantMeasure<T>& x,
                         const char* context) {
  T e_sum = x.origin_via_h(), z_sum = x.origin_via_v();
  bool consistent = num::abs(T(e_sum - z_sum)) <= route_tolerance(spec.eps, e_sum, z_sum);
  std::ostringstream os;
  os << context;
  if (!consistent) {
    os << ": axis coefficient sums disagree at the origin (" << to_double(e_sum) << " vs "
       << to_double(z_sum) << ")";
  } else {
    Residuals<T> residuals = measure_residuals(spec, x, 4);
    T scale(1);
    for (const auto& t : x.interior) scale = T(scale + num::abs(t.coeff));
    if (residuals.overall <= T(T(10) * spec.eps * scale)) return;
    os << ": max residual " << to_double(residuals.overall);
  }
  if (spec.q(1, 0) != T(0) && spec.q(0, 1) != T(0)) {
    ConditionReport<T> d = check_condition_d(spec);
    if (!d.holds) os << "\n" << d.summary();
  }
  raise(Errc::OriginEquationsUnsatisfied, os.str());
}

template <typename T>
bool measures_equal(const InvariantMeasure<T>& a, const InvariantMeasure<T>& b, const T& eps) {
  if (a.interior.size() != b.interior.size() || a.h_axis.size() != b.h_axis.size() ||
      a.v_axis.size() != b.v_axis.size())
    return false;
  auto close = [&](const T& x, const T& y) {
    return num::abs(T(x - y)) <= route_tolerance(eps, x, y);
  };
  for (size_t i = 0; i < a.interior.size(); ++i)
    if (!close(a.interior[i].coeff, b.interior[i].coeff) ||
        !close(a.interior[i].gamma, b.interior[i].gamma) ||
        !close(a.interior[i].delta, b.interior[i].delta))
      return false;
  for (size_t i = 0; i < a.h_axis.size(); ++i)
    if (!close(a.h_axis[i].coeff, b.h_axis[i].coeff) ||
        !close(a.h_axis[i].ratio, b.h_axis[i].ratio))
      return false;
  for (size_t i = 0; i < a.v_axis.size(); ++i)
    if (!close(a.v_axis[i].coeff, b.v_axis[i].coeff) ||
        !close(a.v_axis[i].ratio, b.v_axis[i].ratio))
      return false;
  return true;
}

template <typename T>
[[noreturn]] void conditions_unmet(const std::vector<ConditionReport<T>>& failing) {
  std::ostringstream os;
  os << "spec outside the finite-compensation class";
  for (const auto& report : failing) os << "\n" << report.summary();
  raise(Errc::ConditionsUnmet, os.str());
}

}  // namespace detail

template <typename T>
SolveResult<T> run_single_extended(const WalkSpec<T>& spec);

/// Full solver: dispatches on the structural conditions, runs the
/// compensation procedure from the requested side, verifies termination
/// shape, origin consistency and closure, checks that the opposite starting
/// side yields the same measure, and normalizes.
template <typename T>
SolveResult<T> run(const WalkSpec<T>& spec, Side start = Side::Horizontal) {
  ConditionReport<T> a = check_condition_a(spec);
  if (!a.holds) {
    ConditionReport<T> extended = check_extended_variant(spec);
    if (extended.holds) return run_single_extended(spec);
    detail::conditions_unmet<T>({a, extended});
  }
  if (!ergodic_rho(spec)) raise(Errc::NotErgodic, "rho1 or rho2 is not below 1");

  bool reduced_shape = spec.q(1, -1) == T(0) && spec.q(-1, 1) == T(0);
  size_t expected_terms = 0;
  if (reduced_shape) {
    ConditionReport<T> reduced = check_reduced_variant(spec);
    if (!reduced.holds) detail::conditions_unmet<T>({reduced});
    expected_terms = 1;
  } else {
    ConditionReport<T> b1 = check_condition_b1(spec);
    ConditionReport<T> b2 = check_condition_b2(spec);
    ConditionReport<T> c = check_condition_c(spec);
    if (!b1.holds || !b2.holds || !c.holds) {
      std::vector<ConditionReport<T>> failing;
      for (const auto& report : {b1, b2, c})
        if (!report.holds) failing.push_back(report);
      if (spec.q(1, 0) != T(0) && spec.q(0, 1) != T(0)) {
        ConditionReport<T> d = check_condition_d(spec);
        if (!d.holds) failing.push_back(d);
      }
      detail::conditions_unmet<T>(failing);
    }
    expected_terms = 3;
  }

  PartialSolution<T> partial = compensate(spec, start);
  if (partial.x.interior.size() != expected_terms)
    raise(Errc::NonTerminating,
          "terminated with " + std::to_string(partial.x.interior.size()) +
              " interior terms, expected " + std::to_string(expected_terms));
  // the formal solution solves the interior and boundary equations by
  // construction; the origin block is where a Condition D violation surfaces
  detail::verify_origin_block(spec, partial.x, "formal solution fails at the origin");

  // both starting sides must give the same normalized solution; the two
  // formal solutions differ only by which term carries the unit coefficient
  Side other = start == Side::Horizontal ? Side::Vertical : Side::Horizontal;
  PartialSolution<T> mirror = compensate(spec, other);
  InvariantMeasure<T> lhs = partial.x, rhs = mirror.x;
  lhs.canonicalize();
  rhs.canonicalize();
  T c0 = normalize(lhs);
  normalize(rhs);
  if (!detail::measures_equal(lhs, rhs, spec.eps))
    raise(Errc::InconsistentBoundary, "horizontal-start and vertical-start solutions differ");

  SolveResult<T> result;
  result.measure = lhs;
  result.c0 = c0;
  result.trace = partial.trace;
  return result;
}

/// Relaxed-Condition-A single product form: gamma0 = rho1, delta0 = rho2,
/// with the boundary coefficients from the extended flux polynomials. The
/// construction only closes when e0 = z1 = c0.
template <typename T>
SolveResult<T> run_single_extended(const WalkSpec<T>& spec) {
  ConditionReport<T> extended = check_extended_variant(spec);
  if (!extended.holds) detail::conditions_unmet<T>({extended});
  T r1 = rho1(spec), r2 = rho2(spec);
  if (!(r1 < T(1)) || !(r2 < T(1))) raise(Errc::NotErgodic, "rho1 or rho2 is not below 1");
  PairGD<T> pair = initial_pair(spec, Side::Horizontal);
  detail::check_routes(spec.eps, pair.delta, r2, Errc::ConditionsUnmet,
                       "stopping criterion delta0 = rho2 fails");

  T hn = poly_HN(spec, pair.gamma), ah = poly_Ah(spec, pair.gamma);
  T ve = poly_VE(spec, pair.delta), av = poly_Av(spec, pair.delta);
  if (hn == T(0) || ah == T(0) || ve == T(0) || av == T(0))
    raise(Errc::ZeroDenominator, "boundary polynomial vanishes at the initial pair");
  T e0 = T(poly_QN(spec, pair.gamma) / hn);
  detail::check_routes(spec.eps, e0, T(pair.delta * poly_Sh(spec, pair.gamma) / ah),
                       Errc::InconsistentBoundary, "extended e0 routes disagree");
  T z1 = T(poly_QE(spec, pair.delta) / ve);
  detail::check_routes(spec.eps, z1, T(pair.gamma * poly_Sv(spec, pair.delta) / av),
                       Errc::InconsistentBoundary, "extended z1 routes disagree");

  SolveResult<T> result;
  result.measure.interior.push_back({T(1), pair.gamma, pair.delta});
  result.measure.h_axis.push_back({e0, pair.gamma});
  result.measure.v_axis.push_back({z1, pair.delta});
  result.trace.steps.push_back(
      {StepKind::InitialHorizontal, pair.gamma, pair.delta, T(1), e0});
  result.trace.steps.push_back({StepKind::TerminalVertical, T(1), pair.delta, T(0), z1});
  result.trace.terminated = true;
  // e0 = z1 is required for a well-defined origin value; it fails exactly
  // when the single product form cannot close there
  detail::verify_origin_block(spec, result.measure, "single product form fails at the origin");
  result.c0 = normalize(result.measure);
  return result;
}

}  // namespace qpwalk
