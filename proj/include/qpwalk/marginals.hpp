#pragma once

#include "qpwalk/conditions.hpp"
#include "qpwalk/spectral.hpp"

namespace qpwalk {

/// Mean one-step displacement in the interior and on each boundary.
template <typename T>
struct DriftVectors {
  T mx{}, my{};    // interior
  T mxh{}, myh{};  // horizontal boundary
  T mxv{}, myv{};  // vertical boundary
};

template <typename T>
DriftVectors<T> drift_vectors(const WalkSpec<T>& spec) {
  DriftVectors<T> d;
  for (auto [k, l] : kOffsets) {
    d.mx = T(d.mx + T(k) * spec.q(k, l));
    d.my = T(d.my + T(l) * spec.q(k, l));
    d.mxh = T(d.mxh + T(k) * spec.qh(k, l));
    d.myh = T(d.myh + T(l) * spec.qh(k, l));
    d.mxv = T(d.mxv + T(k) * spec.qv(k, l));
    d.myv = T(d.myv + T(l) * spec.qv(k, l));
  }
  return d;
}

/// rho-criterion: ergodic iff rho1 < 1 and rho2 < 1. Exact only under
/// Conditions A and B.1; outside them the ratios are still computed and
/// `*warning` (if given) flags the result as heuristic.
template <typename T>
bool ergodic_rho(const WalkSpec<T>& spec, std::string* warning = nullptr) {
  if (warning) {
    warning->clear();
    if (!check_condition_a(spec).holds || !check_condition_b1(spec).holds)
      *warning = "Conditions A/B.1 do not hold; the rho criterion is heuristic here";
  }
  return rho1(spec) < T(1) && rho2(spec) < T(1);
}

/// Drift (Lyapunov) ergodicity test on the mean-drift vectors.
template <typename T>
bool ergodic_fayolle(const WalkSpec<T>& spec) {
  DriftVectors<T> d = drift_vectors(spec);
  if (d.mx == T(0) && d.my == T(0))
    raise(Errc::ZeroMeanDrift, "interior mean drift is zero; criterion inapplicable");
  T zero(0);
  T cross_h = T(d.mx * d.myh - d.my * d.mxh);
  T cross_v = T(d.my * d.mxv - d.mx * d.myv);
  if (d.mx < zero && d.my < zero) return cross_h < zero && cross_v < zero;
  if (d.mx < zero && !(d.my < zero)) return cross_v < zero;
  if (!(d.mx < zero) && d.my < zero) return cross_h < zero;
  return false;
}

/// pi0 = p0 and pi_k = prefactor * ratio^k for k >= 1.
template <typename T>
struct GeometricMarginal {
  T p0{};
  T prefactor{};
  T ratio{};

  T value(long k) const {
    if (k == 0) return p0;
    return T(prefactor * pow_int(ratio, k));
  }
};

namespace detail {

template <typename T>
void require_marginal_preconditions(const WalkSpec<T>& spec) {
  bool classic = check_condition_a(spec).holds && check_condition_b1(spec).holds &&
                 check_condition_b2(spec).holds;
  bool extended = false;
  if (!classic) {
    // relaxed-Condition-A walks keep geometric marginals under updated B
    ConditionReport<T> x = check_extended_variant(spec);
    extended = true;
    for (const auto& c : x.checks)
      if ((c.id.rfind("B1x", 0) == 0 || c.id.rfind("B2x", 0) == 0) && !c.ok) extended = false;
  }
  if (!classic && !extended)
    raise(Errc::ConditionsUnmet, "geometric marginals need Conditions A and B (or their "
                                 "relaxed-A updates)");
  for (const auto& w : spec.warnings)
    if (w.rfind("degenerate interior", 0) == 0)
      raise(Errc::ConditionsUnmet, "degenerate interior kernel: " + w);
}

}  // namespace detail

/// Closed-form marginal of the m-component chain.
template <typename T>
GeometricMarginal<T> marginal_m(const WalkSpec<T>& spec) {
  detail::require_marginal_preconditions(spec);
  T ratio = rho1(spec);
  if (!(ratio < T(1))) raise(Errc::NotErgodic, "rho1 >= 1; marginal not normalizable");
  T interior_right = T(spec.q(1, 0) + spec.q(1, -1) + spec.q(1, 1));
  T boundary_right = T(spec.qv(1, -1) + spec.qv(1, 0) + spec.qv(1, 1));
  GeometricMarginal<T> marginal;
  marginal.ratio = ratio;
  T one_minus = T(T(1) - ratio);
  marginal.p0 =
      T(one_minus * interior_right / T(one_minus * interior_right + ratio * boundary_right));
  marginal.prefactor = T(marginal.p0 * boundary_right / interior_right);
  return marginal;
}

/// Closed-form marginal of the n-component chain.
template <typename T>
GeometricMarginal<T> marginal_n(const WalkSpec<T>& spec) {
  detail::require_marginal_preconditions(spec);
  T ratio = rho2(spec);
  if (!(ratio < T(1))) raise(Errc::NotErgodic, "rho2 >= 1; marginal not normalizable");
  T interior_up = T(spec.q(0, 1) + spec.q(-1, 1) + spec.q(1, 1));
  T boundary_up = T(spec.qh(-1, 1) + spec.qh(0, 1) + spec.qh(1, 1));
  GeometricMarginal<T> marginal;
  marginal.ratio = ratio;
  T one_minus = T(T(1) - ratio);
  marginal.p0 = T(one_minus * interior_up / T(one_minus * interior_up + ratio * boundary_up));
  marginal.prefactor = T(marginal.p0 * boundary_up / interior_up);
  return marginal;
}

}  // namespace qpwalk
