#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qpwalk/model.hpp"

namespace qpwalk {

enum class Cond { A, B1, B2, C, D, Reduced, Extended };

inline const char* cond_name(Cond c) {
  switch (c) {
    case Cond::A: return "A";
    case Cond::B1: return "B1";
    case Cond::B2: return "B2";
    case Cond::C: return "C";
    case Cond::D: return "D";
    case Cond::Reduced: return "Reduced";
    case Cond::Extended: return "Extended";
  }
  return "?";
}

/// One checked identity with its raw residual, so callers can re-judge under
/// their own tolerance.
template <typename T>
struct IdentityCheck {
  std::string id;
  T lhs{};
  T rhs{};
  T residual{};
  bool ok = false;
};

template <typename T>
struct ConditionReport {
  Cond condition = Cond::A;
  bool holds = true;
  std::vector<IdentityCheck<T>> checks;
  std::optional<T> common_value;  // Condition C's shared product when it holds

  std::vector<IdentityCheck<T>> violations() const {
    std::vector<IdentityCheck<T>> out;
    for (const auto& c : checks)
      if (!c.ok) out.push_back(c);
    return out;
  }

  std::string summary() const {
    std::ostringstream os;
    os << "Condition " << cond_name(condition) << ": " << (holds ? "holds" : "violated");
    for (const auto& c : checks)
      if (!c.ok)
        os << "\n  " << c.id << ": lhs=" << to_double(c.lhs) << " rhs=" << to_double(c.rhs);
    return os.str();
  }
};

namespace detail {

template <typename T>
void add_check(ConditionReport<T>& report, const WalkSpec<T>& spec, std::string id, const T& lhs,
               const T& rhs) {
  IdentityCheck<T> check;
  check.id = std::move(id);
  check.lhs = lhs;
  check.rhs = rhs;
  check.residual = num::abs(T(lhs - rhs));
  check.ok = num::within_eps(check.residual, spec.eps);
  if (!check.ok) report.holds = false;
  report.checks.push_back(std::move(check));
}

}  // namespace detail

/// Condition A: no interior transitions to the North-East or South-West.
template <typename T>
ConditionReport<T> check_condition_a(const WalkSpec<T>& spec) {
  ConditionReport<T> report;
  report.condition = Cond::A;
  detail::add_check(report, spec, "A.q(1,1)", spec.q(1, 1), T(0));
  detail::add_check(report, spec, "A.q(-1,-1)", spec.q(-1, -1), T(0));
  return report;
}

/// Condition B.1: boundary kernels repeat the interior flux pattern.
template <typename T>
ConditionReport<T> check_condition_b1(const WalkSpec<T>& spec) {
  ConditionReport<T> report;
  report.condition = Cond::B1;
  detail::add_check(report, spec, "B1.h.(1,1)", spec.qh(1, 1), spec.q(1, 0));
  detail::add_check(report, spec, "B1.h.(1,0)", spec.qh(1, 0), spec.q(1, -1));
  detail::add_check(report, spec, "B1.h.(-1,0)", spec.qh(-1, 0), spec.q(-1, 0));
  detail::add_check(report, spec, "B1.h.(-1,1)", spec.qh(-1, 1), spec.q(-1, 1));
  detail::add_check(report, spec, "B1.v.(1,1)", spec.qv(1, 1), spec.q(0, 1));
  detail::add_check(report, spec, "B1.v.(0,1)", spec.qv(0, 1), spec.q(-1, 1));
  detail::add_check(report, spec, "B1.v.(0,-1)", spec.qv(0, -1), spec.q(0, -1));
  detail::add_check(report, spec, "B1.v.(1,-1)", spec.qv(1, -1), spec.q(1, -1));
  return report;
}

/// Condition B.2: origin kernel matches the combined boundary kernels.
template <typename T>
ConditionReport<T> check_condition_b2(const WalkSpec<T>& spec) {
  ConditionReport<T> report;
  report.condition = Cond::B2;
  detail::add_check(report, spec, "B2.(0,1)", T(spec.q0(0, 1) + spec.q(0, 1)),
                    T(spec.qh(0, 1) + spec.qv(0, 1)));
  detail::add_check(report, spec, "B2.(1,0)", T(spec.q0(1, 0) + spec.q(1, 0)),
                    T(spec.qh(1, 0) + spec.qv(1, 0)));
  detail::add_check(report, spec, "B2.(1,1)", spec.q0(1, 1), T(spec.qh(1, 1) + spec.qv(1, 1)));
  // implied by the three above plus stochasticity; reported for visibility
  detail::add_check(report, spec, "B2.(0,0)", T(spec.q0(0, 0) + spec.q(0, 0)),
                    T(spec.qh(0, 0) + spec.qv(0, 0)));
  return report;
}

/// Condition C: the three interior cross products agree.
template <typename T>
ConditionReport<T> check_condition_c(const WalkSpec<T>& spec) {
  ConditionReport<T> report;
  report.condition = Cond::C;
  T p12 = T(spec.q(1, 0) * spec.q(-1, 0));
  T p34 = T(spec.q(0, 1) * spec.q(0, -1));
  T p56 = T(spec.q(-1, 1) * spec.q(1, -1));
  detail::add_check(report, spec, "C.prod12", p12, p34);
  detail::add_check(report, spec, "C.prod23", p34, p56);
  detail::add_check(report, spec, "C.prod13", p12, p56);
  if (report.holds) report.common_value = p12;
  return report;
}

/// Condition D: the boundary injection entries q(v)(1,0), q(h)(0,1).
template <typename T>
ConditionReport<T> check_condition_d(const WalkSpec<T>& spec) {
  if (spec.q(1, 0) == T(0) || spec.q(0, 1) == T(0))
    raise(Errc::DegenerateDenominator,
          "Condition D needs q(1,0) > 0 and q(0,1) > 0; use the reduced variant");
  ConditionReport<T> report;
  report.condition = Cond::D;
  detail::add_check(report, spec, "D.v", spec.qv(1, 0),
                    T(spec.q(1, 0) + spec.q(1, -1) * spec.q(0, 1) / spec.q(1, 0)));
  detail::add_check(report, spec, "D.h", spec.qh(0, 1),
                    T(spec.q(0, 1) + spec.q(-1, 1) * spec.q(1, 0) / spec.q(0, 1)));
  return report;
}

/// The q(1,-1) = q(-1,1) = 0 regime: surviving cross-product identity,
/// vanished origin injections, boundary entries equal to interior ones,
/// plus Conditions A, B.1, B.2.
template <typename T>
ConditionReport<T> check_reduced_variant(const WalkSpec<T>& spec) {
  ConditionReport<T> report;
  report.condition = Cond::Reduced;
  detail::add_check(report, spec, "R.q(1,-1)", spec.q(1, -1), T(0));
  detail::add_check(report, spec, "R.q(-1,1)", spec.q(-1, 1), T(0));
  detail::add_check(report, spec, "R.C", T(spec.q(1, 0) * spec.q(-1, 0)),
                    T(spec.q(0, 1) * spec.q(0, -1)));
  detail::add_check(report, spec, "R.q0(0,1)", spec.q0(0, 1), T(0));
  detail::add_check(report, spec, "R.q0(1,0)", spec.q0(1, 0), T(0));
  detail::add_check(report, spec, "R.h.(0,1)", spec.qh(0, 1), spec.q(0, 1));
  detail::add_check(report, spec, "R.v.(1,0)", spec.qv(1, 0), spec.q(1, 0));
  for (auto sub : {check_condition_a(spec), check_condition_b1(spec), check_condition_b2(spec)}) {
    for (auto& check : sub.checks) report.checks.push_back(check);
    if (!sub.holds) report.holds = false;
  }
  return report;
}

/// Relaxed-Condition-A variant: updated B.1/B.2, the cubic stopping
/// criterion (equivalent to delta0 = rho2 for drifting walks), and updated D.
template <typename T>
ConditionReport<T> check_extended_variant(const WalkSpec<T>& spec) {
  ConditionReport<T> report;
  report.condition = Cond::Extended;
  detail::add_check(report, spec, "B1x.h.(1,1)", spec.qh(1, 1), T(spec.q(1, 0) + spec.q(1, 1)));
  detail::add_check(report, spec, "B1x.h.(1,0)", spec.qh(1, 0), spec.q(1, -1));
  detail::add_check(report, spec, "B1x.h.(-1,0)", spec.qh(-1, 0),
                    T(spec.q(-1, 0) + spec.q(-1, -1)));
  detail::add_check(report, spec, "B1x.h.(-1,1)", spec.qh(-1, 1), spec.q(-1, 1));
  detail::add_check(report, spec, "B1x.v.(1,1)", spec.qv(1, 1), T(spec.q(0, 1) + spec.q(1, 1)));
  detail::add_check(report, spec, "B1x.v.(0,1)", spec.qv(0, 1), spec.q(-1, 1));
  detail::add_check(report, spec, "B1x.v.(0,-1)", spec.qv(0, -1),
                    T(spec.q(0, -1) + spec.q(-1, -1)));
  detail::add_check(report, spec, "B1x.v.(1,-1)", spec.qv(1, -1), spec.q(1, -1));

  detail::add_check(report, spec, "B2x.(1,0)", T(spec.q0(1, 0) + spec.q(1, 0)),
                    T(spec.qh(1, 0) + spec.qv(1, 0)));
  detail::add_check(report, spec, "B2x.(0,1)", T(spec.q0(0, 1) + spec.q(0, 1)),
                    T(spec.qh(0, 1) + spec.qv(0, 1)));
  detail::add_check(report, spec, "B2x.(1,1)", T(spec.q0(1, 1) + spec.q(1, 1)),
                    T(spec.qh(1, 1) + spec.qv(1, 1)));

  T one_minus_q00 = T(T(1) - spec.q(0, 0));
  T cubic_lhs = T(spec.q(-1, 1) * spec.q(1, -1) * one_minus_q00 +
                  spec.q(-1, 1) * spec.q(1, 0) * spec.q(0, -1) +
                  spec.q(1, -1) * spec.q(-1, 0) * spec.q(0, 1));
  T cubic_rhs = T(spec.q(-1, -1) * spec.q(1, 1) * one_minus_q00 +
                  spec.q(-1, -1) * spec.q(1, 0) * spec.q(0, 1) +
                  spec.q(1, 1) * spec.q(-1, 0) * spec.q(0, -1));
  detail::add_check(report, spec, "Cx.cubic", cubic_lhs, cubic_rhs);

  // updated D; gamma0 = rho1, delta0 = rho2 with the relaxed-A drift sums
  T right = T(spec.q(1, 0) + spec.q(1, -1) + spec.q(1, 1));
  T left = T(spec.q(-1, 0) + spec.q(-1, 1) + spec.q(-1, -1));
  T up = T(spec.q(0, 1) + spec.q(-1, 1) + spec.q(1, 1));
  T down = T(spec.q(0, -1) + spec.q(1, -1) + spec.q(-1, -1));
  if (left == T(0) || down == T(0))
    raise(Errc::ZeroDenominator, "zero leftward/downward drift; rho undefined");
  T gamma0 = T(right / left);
  T delta0 = T(up / down);
  T den_h = T(spec.q(1, 1) + spec.q(0, 1) * gamma0);
  T den_v = T(spec.q(1, 1) + spec.q(1, 0) * delta0);
  if (den_h == T(0) || den_v == T(0))
    raise(Errc::DegenerateDenominator, "updated Condition D denominator vanishes");
  detail::add_check(report, spec, "Dx.h", spec.qh(0, 1),
                    T(spec.q(0, 1) + spec.q(-1, 1) * spec.q(1, 0) * gamma0 / den_h));
  detail::add_check(report, spec, "Dx.v", spec.qv(1, 0),
                    T(spec.q(1, 0) + spec.q(1, -1) * spec.q(0, 1) * delta0 / den_v));
  return report;
}

/// All five base conditions in a fixed order (A, B1, B2, C, D). Condition D
/// is skipped (not appended) when its denominators vanish.
template <typename T>
std::vector<ConditionReport<T>> check_all(const WalkSpec<T>& spec) {
  std::vector<ConditionReport<T>> reports;
  reports.push_back(check_condition_a(spec));
  reports.push_back(check_condition_b1(spec));
  reports.push_back(check_condition_b2(spec));
  reports.push_back(check_condition_c(spec));
  if (spec.q(1, 0) != T(0) && spec.q(0, 1) != T(0)) reports.push_back(check_condition_d(spec));
  return reports;
}

}  // namespace qpwalk
