#pragma once

#include "qpwalk/compensation.hpp"

namespace qpwalk {

// ---------------------------------------------------------------------------
// Parameter sets for the concrete queueing models.

/// Randomly alternating service: the server picks queue I with probability a,
/// arrivals are independent Bernoulli(lambda1), Bernoulli(lambda2).
template <typename T>
struct AlternatingParams {
  T a, lambda1, lambda2;
};

/// Paired-service option: probabilities a0 (serve both), a1, a2 (sum to 1).
template <typename T>
struct PairedParams {
  T a0, a1, a2, lambda1, lambda2;
};

/// False service initiation: the switch to the chosen queue succeeds with
/// probability b.
template <typename T>
struct FalseInitParams {
  T a, b, lambda1, lambda2;
};

/// Geometric batch arrivals routed to the queues with probabilities
/// lambda_k / lambda_total.
template <typename T>
struct BatchGeometricParams {
  T a, lambda1, lambda2;

  T lambda_total() const { return T(lambda1 + lambda2); }
};

namespace detail {

template <typename T>
void require_unit_interval(const T& value, const char* what, bool open_left = true,
                           bool open_right = true) {
  bool ok = (open_left ? value > T(0) : value >= T(0)) &&
            (open_right ? value < T(1) : value <= T(1));
  if (!ok) raise(Errc::InvalidArgument, std::string(what) + " outside its admissible range");
}

template <typename T>
T canon(T value) {
  num::canonicalize(value);
  return value;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Builders.

/// The two-queue randomly alternating service model; satisfies Conditions
/// A, B, C, D by construction.
template <typename T>
WalkSpec<T> alternating_service(const AlternatingParams<T>& params, T eps = T(0)) {
  T a = detail::canon(params.a), l1 = detail::canon(params.lambda1),
    l2 = detail::canon(params.lambda2);
  detail::require_unit_interval(a, "a");
  detail::require_unit_interval(l1, "lambda1", false);
  detail::require_unit_interval(l2, "lambda2", false);
  T ab = T(T(1) - a), m1 = T(T(1) - l1), m2 = T(T(1) - l2);
  TransitionKernel<T> interior, horizontal, vertical, origin;
  interior.at(0, 1) = T(a * l1 * l2);
  interior.at(-1, 1) = T(a * m1 * l2);
  interior.at(0, 0) = T(a * l1 * m2 + ab * m1 * l2);
  interior.at(1, 0) = T(ab * l2 * l1);
  interior.at(1, -1) = T(ab * l1 * m2);
  interior.at(-1, 0) = T(a * m1 * m2);
  interior.at(0, -1) = T(ab * m1 * m2);
  horizontal.at(0, 1) = T(a * l1 * l2 + ab * m1 * l2);
  horizontal.at(-1, 1) = T(a * m1 * l2);
  horizontal.at(0, 0) = T(a * l1 * m2 + ab * m1 * m2);
  horizontal.at(1, 0) = T(ab * m2 * l1);
  horizontal.at(1, 1) = T(ab * l1 * l2);
  horizontal.at(-1, 0) = T(a * m1 * m2);
  vertical.at(0, 1) = T(a * m1 * l2);
  vertical.at(1, -1) = T(ab * l1 * m2);
  vertical.at(0, 0) = T(a * m1 * m2 + ab * m1 * l2);
  vertical.at(1, 0) = T(ab * l1 * l2 + a * l1 * m2);
  vertical.at(1, 1) = T(a * l1 * l2);
  vertical.at(0, -1) = T(ab * m1 * m2);
  origin.at(0, 0) = T(m1 * m2);
  origin.at(1, 0) = T(l1 * m2);
  origin.at(0, 1) = T(l2 * m1);
  origin.at(1, 1) = T(l2 * l1);
  WalkSpec<T> spec = build_spec(interior, horizontal, vertical, origin, eps);
  if (l1 == T(0) && l2 == T(0))
    spec.warnings.push_back("no arrivals: the walk is absorbed near the origin");
  return spec;
}

/// Single stream adding one job to each queue simultaneously; satisfies the
/// reduced-variant conditions by construction.
template <typename T>
WalkSpec<T> simultaneous_arrivals(const T& a_in, const T& lambda_in, T eps = T(0)) {
  T a = detail::canon(a_in), lambda = detail::canon(lambda_in);
  detail::require_unit_interval(a, "a");
  detail::require_unit_interval(lambda, "lambda", false);
  T ab = T(T(1) - a), mb = T(T(1) - lambda);
  TransitionKernel<T> interior, horizontal, vertical, origin;
  interior.at(0, 1) = T(a * lambda);
  interior.at(1, 0) = T(ab * lambda);
  interior.at(-1, 0) = T(a * mb);
  interior.at(0, -1) = T(ab * mb);
  horizontal.at(0, 1) = T(a * lambda);
  horizontal.at(1, 1) = T(ab * lambda);
  horizontal.at(-1, 0) = T(a * mb);
  horizontal.at(0, 0) = T(ab * mb);
  vertical.at(1, 1) = T(a * lambda);
  vertical.at(1, 0) = T(ab * lambda);
  vertical.at(0, 0) = T(a * mb);
  vertical.at(0, -1) = T(ab * mb);
  origin.at(1, 1) = lambda;
  origin.at(0, 0) = mb;
  return build_spec(interior, horizontal, vertical, origin, eps);
}

/// Work-conserving companion model: same interior and origin as the
/// alternating-service model, boundaries serve the non-empty queue.
template <typename T>
WalkSpec<T> work_conserving(const T& a, const T& l1_in, const T& l2_in, T eps = T(0)) {
  T l1 = detail::canon(l1_in), l2 = detail::canon(l2_in);
  WalkSpec<T> base = alternating_service<T>({a, l1, l2}, eps);
  T m1 = T(T(1) - l1), m2 = T(T(1) - l2);
  TransitionKernel<T> horizontal, vertical;
  horizontal.at(-1, 0) = T(m1 * m2);
  horizontal.at(0, 0) = T(l1 * m2);
  horizontal.at(-1, 1) = T(m1 * l2);
  horizontal.at(0, 1) = T(l1 * l2);
  vertical.at(0, -1) = T(m1 * m2);
  vertical.at(1, -1) = T(l1 * m2);
  vertical.at(0, 0) = T(m1 * l2);
  vertical.at(1, 0) = T(l1 * l2);
  return build_spec(base.interior, horizontal, vertical, base.origin, eps);
}

/// Paired-service option; allows interior transitions to the South-West.
template <typename T>
WalkSpec<T> paired_service(const PairedParams<T>& params, T eps = T(0)) {
  T a0 = detail::canon(params.a0), a1 = detail::canon(params.a1), a2 = detail::canon(params.a2);
  T l1 = detail::canon(params.lambda1), l2 = detail::canon(params.lambda2);
  if (T(a0 + a1 + a2) != T(1) && num::abs(T(a0 + a1 + a2 - T(1))) > eps)
    raise(Errc::InvalidArgument, "a0 + a1 + a2 must be 1");
  T m1 = T(T(1) - l1), m2 = T(T(1) - l2);
  TransitionKernel<T> interior, horizontal, vertical, origin;
  interior.at(0, 0) = T(a0 * l1 * l2 + a1 * l1 * m2 + a2 * l2 * m1);
  interior.at(-1, 0) = T(a0 * m1 * l2 + a1 * m1 * m2);
  interior.at(0, -1) = T(a0 * m2 * l1 + a2 * m1 * m2);
  interior.at(-1, -1) = T(a0 * m1 * m2);
  interior.at(0, 1) = T(a1 * l1 * l2);
  interior.at(-1, 1) = T(a1 * m1 * l2);
  interior.at(1, 0) = T(a2 * l1 * l2);
  interior.at(1, -1) = T(a2 * l1 * m2);
  T a01 = T(a0 + a1), a02 = T(a0 + a2);
  horizontal.at(0, 0) = T(a01 * l1 * m2 + a2 * m2 * m1);
  horizontal.at(-1, 0) = T(a01 * m1 * m2);
  horizontal.at(0, 1) = T(a01 * l1 * l2 + a2 * m1 * l2);
  horizontal.at(-1, 1) = T(a01 * m1 * l2);
  horizontal.at(1, 0) = T(a2 * l1 * m2);
  horizontal.at(1, 1) = T(a2 * l1 * l2);
  vertical.at(0, 0) = T(a02 * l2 * m1 + a1 * m2 * m1);
  vertical.at(0, -1) = T(a02 * m1 * m2);
  vertical.at(1, 0) = T(a02 * l1 * l2 + a1 * m2 * l1);
  vertical.at(1, -1) = T(a02 * m2 * l1);
  vertical.at(0, 1) = T(a1 * l2 * m1);
  vertical.at(1, 1) = T(a1 * l1 * l2);
  origin.at(0, 0) = T(m1 * m2);
  origin.at(1, 0) = T(l1 * m2);
  origin.at(0, 1) = T(l2 * m1);
  origin.at(1, 1) = T(l2 * l1);
  return build_spec(interior, horizontal, vertical, origin, eps);
}

/// False service initiation; allows interior transitions to the North-East.
template <typename T>
WalkSpec<T> false_initiation(const FalseInitParams<T>& params, T eps = T(0)) {
  T a = detail::canon(params.a), b = detail::canon(params.b);
  T l1 = detail::canon(params.lambda1), l2 = detail::canon(params.lambda2);
  detail::require_unit_interval(b, "b", true, false);
  T ab = T(T(1) - a), bb = T(T(1) - b), m1 = T(T(1) - l1), m2 = T(T(1) - l2);
  // probability that queue 1 (resp. 2) receives no successful service
  T s1 = T(ab * b + a * bb + ab * bb);
  T s2 = T(a * b + a * bb + ab * bb);
  TransitionKernel<T> interior, horizontal, vertical, origin;
  interior.at(0, 1) = T(a * b * l1 * l2 + bb * m1 * l2);
  interior.at(-1, 1) = T(a * b * m1 * l2);
  interior.at(0, 0) = T(a * b * l1 * m2 + ab * b * m1 * l2 + bb * m1 * m2);
  interior.at(1, 0) = T(ab * b * l2 * l1 + bb * l1 * m2);
  interior.at(1, -1) = T(ab * b * l1 * m2);
  interior.at(-1, 0) = T(a * b * m1 * m2);
  interior.at(0, -1) = T(ab * b * m1 * m2);
  interior.at(1, 1) = T(bb * l1 * l2);
  horizontal.at(0, 1) = T(a * b * l1 * l2 + s1 * m1 * l2);
  horizontal.at(-1, 1) = T(a * b * m1 * l2);
  horizontal.at(0, 0) = T(a * b * l1 * m2 + s1 * m1 * m2);
  horizontal.at(1, 0) = T(s1 * m2 * l1);
  horizontal.at(1, 1) = T(s1 * l1 * l2);
  horizontal.at(-1, 0) = T(a * b * m1 * m2);
  vertical.at(0, 1) = T(s2 * m1 * l2);
  vertical.at(1, -1) = T(ab * b * l1 * m2);
  vertical.at(0, 0) = T(s2 * m1 * m2 + ab * b * m1 * l2);
  vertical.at(1, 0) = T(ab * b * l1 * l2 + s2 * l1 * m2);
  vertical.at(1, 1) = T(s2 * l1 * l2);
  vertical.at(0, -1) = T(ab * b * m1 * m2);
  origin.at(0, 0) = T(m1 * m2);
  origin.at(1, 0) = T(l1 * m2);
  origin.at(0, 1) = T(l2 * m1);
  origin.at(1, 1) = T(l2 * l1);
  return build_spec(interior, horizontal, vertical, origin, eps);
}

/// The reference spec behind the condition-satisfying curve plots: interior
/// entries fixed, boundaries and origin completed through B.1, D and B.2.
inline WalkSpec<Rat> fig2_spec() {
  TransitionKernel<Rat> interior, horizontal, vertical, origin;
  interior.at(0, 1) = Rat(81, 2000);    // 0.0405
  interior.at(1, 0) = Rat(27, 1000);    // 0.027
  interior.at(-1, 1) = Rat(99, 2000);   // 0.0495
  interior.at(1, -1) = Rat(153, 1000);  // 0.153
  interior.at(-1, 0) = Rat(561, 2000);  // 0.2805
  interior.at(0, -1) = Rat(187, 1000);  // 0.187
  interior.at(0, 0) = Rat(21, 80);      // 0.2625
  horizontal.at(1, 1) = interior.at(1, 0);
  horizontal.at(1, 0) = interior.at(1, -1);
  horizontal.at(-1, 0) = interior.at(-1, 0);
  horizontal.at(-1, 1) = interior.at(-1, 1);
  horizontal.at(0, 1) = Rat(147, 2000);  // 0.0735 via Condition D
  horizontal.at(0, 0) = Rat(833, 2000);  // 0.4165
  vertical.at(1, 1) = interior.at(0, 1);
  vertical.at(0, 1) = interior.at(-1, 1);
  vertical.at(0, -1) = interior.at(0, -1);
  vertical.at(1, -1) = interior.at(1, -1);
  vertical.at(1, 0) = Rat(513, 2000);  // 0.2565 via Condition D
  vertical.at(0, 0) = Rat(627, 2000);  // 0.3135
  origin.at(0, 1) = Rat(33, 400);    // 0.0825
  origin.at(1, 0) = Rat(153, 400);   // 0.3825
  origin.at(1, 1) = Rat(27, 400);    // 0.0675
  origin.at(0, 0) = Rat(187, 400);   // 0.4675
  return build_spec(interior, horizontal, vertical, origin);
}

/// Completes boundary and origin kernels for a bare interior kernel through
/// the (updated) Conditions B.1, D and B.2. Diagonal-free interiors get the
/// classic completion; interiors with diagonal entries must satisfy the cubic
/// stopping criterion.
template <typename T>
WalkSpec<T> extended_neighbors(TransitionKernel<T> interior, T eps = T(0)) {
  for (auto [k, l] : kOffsets) {
    num::canonicalize(interior.at(k, l));
    if (interior.at(k, l) < T(0)) raise(Errc::NegativeEntry, "interior entry negative");
  }
  if (!num::within_eps(T(interior.row_sum() - T(1)), eps))
    raise(Errc::NonStochastic, "interior kernel rows do not sum to 1");

  auto q = [&](int k, int l) { return interior.at(k, l); };
  bool diagonals = q(1, 1) != T(0) || q(-1, -1) != T(0);
  T right = T(q(1, 0) + q(1, -1) + q(1, 1));
  T left = T(q(-1, 0) + q(-1, 1) + q(-1, -1));
  T up = T(q(0, 1) + q(-1, 1) + q(1, 1));
  T down = T(q(0, -1) + q(1, -1) + q(-1, -1));
  if (left == T(0) || down == T(0))
    raise(Errc::ZeroDenominator, "interior has no leftward/downward flux");
  T gamma0 = T(right / left), delta0 = T(up / down);
  if (!(gamma0 < T(1)) || !(delta0 < T(1)))
    raise(Errc::NotErgodic, "completion requires rho1 < 1 and rho2 < 1");

  if (diagonals) {
    T one_minus_q00 = T(T(1) - q(0, 0));
    T cubic_lhs = T(q(-1, 1) * q(1, -1) * one_minus_q00 + q(-1, 1) * q(1, 0) * q(0, -1) +
                    q(1, -1) * q(-1, 0) * q(0, 1));
    T cubic_rhs = T(q(-1, -1) * q(1, 1) * one_minus_q00 + q(-1, -1) * q(1, 0) * q(0, 1) +
                    q(1, 1) * q(-1, 0) * q(0, -1));
    if (!num::within_eps(T(cubic_lhs - cubic_rhs), eps))
      raise(Errc::ConditionsUnmet, "interior violates the cubic stopping criterion");
  } else if (q(1, -1) != T(0) || q(-1, 1) != T(0)) {
    T p12 = T(q(1, 0) * q(-1, 0)), p34 = T(q(0, 1) * q(0, -1)), p56 = T(q(-1, 1) * q(1, -1));
    if (!num::within_eps(T(p12 - p34), eps) || !num::within_eps(T(p34 - p56), eps))
      raise(Errc::ConditionsUnmet, "interior violates Condition C");
  } else {
    if (!num::within_eps(T(q(1, 0) * q(-1, 0) - q(0, 1) * q(0, -1)), eps))
      raise(Errc::ConditionsUnmet, "interior violates the reduced Condition C");
  }

  TransitionKernel<T> horizontal, vertical, origin;
  horizontal.at(1, 1) = T(q(1, 0) + q(1, 1));
  horizontal.at(1, 0) = q(1, -1);
  horizontal.at(-1, 1) = q(-1, 1);
  horizontal.at(-1, 0) = T(q(-1, 0) + q(-1, -1));
  if (T(q(-1, 1) * q(1, 0)) == T(0)) {
    horizontal.at(0, 1) = q(0, 1);
  } else {
    T den = T(q(1, 1) + q(0, 1) * gamma0);
    if (den == T(0)) raise(Errc::DegenerateDenominator, "updated D denominator vanishes");
    horizontal.at(0, 1) = T(q(0, 1) + q(-1, 1) * q(1, 0) * gamma0 / den);
  }
  vertical.at(1, 1) = T(q(0, 1) + q(1, 1));
  vertical.at(0, 1) = q(-1, 1);
  vertical.at(1, -1) = q(1, -1);
  vertical.at(0, -1) = T(q(0, -1) + q(-1, -1));
  if (T(q(1, -1) * q(0, 1)) == T(0)) {
    vertical.at(1, 0) = q(1, 0);
  } else {
    T den = T(q(1, 1) + q(1, 0) * delta0);
    if (den == T(0)) raise(Errc::DegenerateDenominator, "updated D denominator vanishes");
    vertical.at(1, 0) = T(q(1, 0) + q(1, -1) * q(0, 1) * delta0 / den);
  }
  origin.at(1, 0) = T(horizontal.at(1, 0) + vertical.at(1, 0) - q(1, 0));
  origin.at(0, 1) = T(horizontal.at(0, 1) + vertical.at(0, 1) - q(0, 1));
  origin.at(1, 1) = T(horizontal.at(1, 1) + vertical.at(1, 1) - q(1, 1));

  auto close_remainder = [&](TransitionKernel<T>& kernel, const char* which) {
    T rest = kernel.row_sum();
    if (rest > T(T(1) + eps))
      raise(Errc::CompletionInfeasible,
            std::string(which) + " completion exceeds total probability 1");
    kernel.at(0, 0) = T(T(1) - rest);
    if (kernel.at(0, 0) < T(0)) kernel.at(0, 0) = T(0);  // float-mode dust
  };
  close_remainder(horizontal, "horizontal");
  close_remainder(vertical, "vertical");
  for (auto [k, l] : kOffsets)
    if (origin.at(k, l) < T(0) && !num::within_eps(origin.at(k, l), eps))
      raise(Errc::CompletionInfeasible, "origin completion has a negative entry");
  close_remainder(origin, "origin");
  return build_spec(interior, horizontal, vertical, origin, eps);
}

// ---------------------------------------------------------------------------
// Closed-form reference measures.

/// The alternating-service stationary distribution in closed form, used as an
/// independent reference against the compensation engine.
template <typename T>
InvariantMeasure<T> closed_form_alternating(const AlternatingParams<T>& params) {
  T a = detail::canon(params.a), l1 = detail::canon(params.lambda1),
    l2 = detail::canon(params.lambda2);
  if (!(l1 < a) || !(l2 < T(T(1) - a))) raise(Errc::NotErgodic, "requires lambda1 < a, lambda2 < 1-a");
  T ab = T(T(1) - a), m1 = T(T(1) - l1), m2 = T(T(1) - l2);
  T r1 = T(ab * l1 / T(a * m1));
  T r2 = T(a * l2 / T(ab * m2));
  T rt = T(r1 * r2);
  T slack = T(T(1) - l1 - l2);
  InvariantMeasure<T> measure;
  measure.interior.push_back({T(T(a - l1) * slack / T(a * ab * l1 * m1)), r1, rt});
  measure.interior.push_back({T(-slack * slack / T(l1 * m1 * l2 * m2)), rt, rt});
  measure.interior.push_back({T(T(ab - l2) * slack / T(a * ab * l2 * m2)), rt, r2});
  measure.h_axis.push_back({T(T(a - l1) * slack / T(ab * m1 * a)), r1});
  measure.h_axis.push_back({T(-T(a - l1) * slack / T(ab * m1 * m2)), rt});
  measure.v_axis.push_back({T(-T(ab - l2) * slack / T(a * m2 * m1)), rt});
  measure.v_axis.push_back({T(T(ab - l2) * slack / T(a * m2 * ab)), r2});
  measure.canonicalize();
  return measure;
}

/// The simultaneous-arrivals stationary distribution in closed form.
template <typename T>
InvariantMeasure<T> closed_form_simultaneous(const T& a_in, const T& lambda_in) {
  T a = detail::canon(a_in), lambda = detail::canon(lambda_in);
  T ab = T(T(1) - a);
  if (!(lambda < a) || !(lambda < ab)) raise(Errc::NotErgodic, "requires lambda < min(a, 1-a)");
  T mb = T(T(1) - lambda);
  T r1 = T(ab * lambda / T(a * mb));
  T r2 = T(a * lambda / T(ab * mb));
  T c0 = T(T(a - lambda) * T(ab - lambda) / T(a * ab * mb * lambda));
  T axis = T(T(a - lambda) * T(ab - lambda) / T(a * ab * mb));
  InvariantMeasure<T> measure;
  measure.interior.push_back({c0, r1, r2});
  measure.h_axis.push_back({axis, r1});
  measure.v_axis.push_back({axis, r2});
  return measure;
}

// ---------------------------------------------------------------------------
// Geometric-batch-arrival machinery (not nearest-neighbor; handled apart).

/// P(i class-1 jobs and j class-2 jobs arrive in one slot).
inline Rat batch_arrival_pmf(const BatchGeometricParams<Rat>& params_in, long i, long j) {
  if (i < 0 || j < 0) raise(Errc::InvalidArgument, "negative batch index");
  BatchGeometricParams<Rat> params{detail::canon(params_in.a), detail::canon(params_in.lambda1),
                                   detail::canon(params_in.lambda2)};
  Rat lt = params.lambda_total();
  if (lt == 0) return (i == 0 && j == 0) ? Rat(1) : Rat(0);
  mpz_class binom;
  mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(i + j),
               static_cast<unsigned long>(i));
  Rat base = Rat(1 + lt);
  return Rat(Rat(binom) * pow_int(params.lambda1, i) * pow_int(params.lambda2, j) /
             pow_int(base, i + j + 1));
}

/// The state-difference equation's candidate ratio at lattice point (l,k);
/// constant in (l,k) and equal to lambda2 / (1-a) by the Pascal identity.
inline Rat delta_equation(const BatchGeometricParams<Rat>& params_in, long l, long k) {
  BatchGeometricParams<Rat> params{detail::canon(params_in.a), detail::canon(params_in.lambda1),
                                   detail::canon(params_in.lambda2)};
  Rat ab = Rat(1 - params.a);
  Rat num = Rat(batch_arrival_pmf(params, l + 1, k + 1) * Rat(1 + params.lambda1) -
                params.lambda1 * batch_arrival_pmf(params, l, k + 1));
  Rat den = Rat(ab * Rat(batch_arrival_pmf(params, l + 1, k) -
                         batch_arrival_pmf(params, l + 1, k + 1)));
  if (den == 0) raise(Errc::ZeroDenominator, "delta equation denominator vanishes");
  return Rat(num / den);
}

/// The product-form joint measure gamma = lambda1/a, delta = lambda2/(1-a).
inline InvariantMeasure<Rat> batch_geometric_measure(const BatchGeometricParams<Rat>& params_in) {
  BatchGeometricParams<Rat> params{detail::canon(params_in.a), detail::canon(params_in.lambda1),
                                   detail::canon(params_in.lambda2)};
  Rat ab = Rat(1 - params.a);
  if (!(params.lambda1 < params.a) || !(params.lambda2 < ab))
    raise(Errc::NotErgodic, "requires lambda1 < a and lambda2 < 1-a");
  Rat gamma = Rat(params.lambda1 / params.a);
  Rat delta = Rat(params.lambda2 / ab);
  Rat c = Rat(Rat(1 - gamma) * Rat(1 - delta));
  InvariantMeasure<Rat> measure;
  measure.interior.push_back({c, gamma, delta});
  measure.h_axis.push_back({c, gamma});
  measure.v_axis.push_back({c, delta});
  return measure;
}

/// Residual report for the batch model's balance equations on a window. The
/// convolution sums run over arrival sizes up to `arrival_cap`; indices past
/// the cap contribute at most `tail_bound` to any residual.
struct BatchBalanceReport {
  Rat max_residual;
  double tail_bound = 0;
  long arrival_cap = 0;
};

inline BatchBalanceReport batch_balance_residuals(const BatchGeometricParams<Rat>& params,
                                                  const InvariantMeasure<Rat>& measure,
                                                  long window, long arrival_cap = 60) {
  if (window < 1) raise(Errc::WindowTooSmall, "batch window must be at least 1");
  Rat a = params.a, ab = Rat(1 - params.a);
  auto pi = [&](long m, long n) { return measure.evaluate(m, n); };
  auto pmf = [&](long i, long j) -> Rat {
    if (i + j > arrival_cap) return Rat(0);  // truncated batch sizes
    return batch_arrival_pmf(params, i, j);
  };
  BatchBalanceReport report;
  report.arrival_cap = arrival_cap;
  for (long m = 0; m <= window; ++m) {
    for (long n = 0; n <= window; ++n) {
      Rat acc = pi(m, n);
      Rat serve1(0), serve2(0);
      for (long j = 0; j <= n; ++j) serve1 += pmf(m, n - j) * pi(0, j);
      for (long i = 0; i <= m; ++i)
        for (long j = 0; j <= n; ++j) serve1 += pmf(m - i, n - j) * pi(i + 1, j);
      for (long i = 0; i <= m; ++i) serve2 += pmf(m - i, n) * pi(i, 0);
      for (long i = 0; i <= m; ++i)
        for (long j = 0; j <= n; ++j) serve2 += pmf(m - i, n - j) * pi(i, j + 1);
      Rat residual = num::abs(Rat(acc - a * serve1 - ab * serve2));
      if (residual > report.max_residual) report.max_residual = residual;
    }
  }
  // arrival mass beyond the cap bounds the truncation error of any residual
  Rat mass(0);
  for (long i = 0; i <= arrival_cap; ++i)
    for (long j = 0; j + i <= arrival_cap; ++j) mass += batch_arrival_pmf(params, i, j);
  report.tail_bound = 1.0 - mass.get_d();
  return report;
}

}  // namespace qpwalk
