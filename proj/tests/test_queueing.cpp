#include <doctest.h>

#include "qpwalk/queueing.hpp"

using namespace qpwalk;

namespace {

Rat R(const char* text) { return rat_from_string(text); }

WalkSpec<Rat> alt_spec() { return alternating_service<Rat>({R("0.6"), R("0.4"), R("0.15")}); }

BatchGeometricParams<Rat> batch_params() {
  return {R("0.6"), R("0.4"), R("0.15")};
}

}  // namespace

TEST_CASE("alternating-service builder entries") {
  WalkSpec<Rat> spec = alt_spec();
  CHECK(spec.q(0, 1) == R("0.036"));
  CHECK(spec.q(1, 0) == R("0.024"));
  CHECK(spec.q(-1, 1) == R("0.054"));
  CHECK(spec.q(1, -1) == R("0.136"));
  CHECK(spec.q(-1, 0) == R("0.306"));
  CHECK(spec.q(0, -1) == R("0.204"));
  for (const auto& report : check_all(spec)) CHECK(report.holds);
  // no arrivals: degenerate, but still a valid stochastic spec
  WalkSpec<Rat> idle = alternating_service<Rat>({R("0.5"), R("0"), R("0")});
  CHECK(!idle.warnings.empty());
}

TEST_CASE("alternating-service conditions hold across the parameter grid") {
  for (const char* a : {"0.3", "0.5", "0.62"}) {
    for (const char* l1 : {"0.05", "0.35", "0.8"}) {
      for (const char* l2 : {"0.1", "0.45", "0.7"}) {
        WalkSpec<Rat> spec = alternating_service<Rat>({R(a), R(l1), R(l2)});
        for (const auto& report : check_all(spec)) CHECK(report.holds);
        ConditionReport<Rat> c = check_condition_c(spec);
        REQUIRE(c.common_value.has_value());
        Rat expected = R(a) * (Rat(1) - R(a)) * R(l1) * R(l2) * (Rat(1) - R(l1)) *
                       (Rat(1) - R(l2));
        CHECK(*c.common_value == expected);
        // rho1 collapses to abar l1 / (a (1 - l1)) identically in the parameters
        CHECK(rho1(spec) == Rat((Rat(1) - R(a)) * R(l1) / (R(a) * (Rat(1) - R(l1)))));
      }
    }
  }
}

TEST_CASE("simultaneous-arrivals builder") {
  WalkSpec<Rat> spec = simultaneous_arrivals<Rat>(R("0.6"), R("0.2"));
  CHECK(spec.q(0, 1) == R("0.12"));
  CHECK(spec.q(1, 0) == R("0.08"));
  CHECK(spec.q(-1, 0) == R("0.48"));
  CHECK(spec.q(0, -1) == R("0.32"));
  CHECK(spec.q0(1, 1) == R("0.2"));
  CHECK(check_reduced_variant(spec).holds);
  for (const char* a : {"0.4", "0.55", "0.7"}) {
    CHECK(check_reduced_variant(simultaneous_arrivals<Rat>(R(a), R("0.15"))).holds);
  }
  // boundary of stability: the builder constructs, the solver refuses
  WalkSpec<Rat> critical = simultaneous_arrivals<Rat>(R("0.5"), R("0.5"));
  CHECK_THROWS_AS(run(critical), Error);
}

TEST_CASE("counterexample builders reproduce the documented failures") {
  WalkSpec<Rat> wc = work_conserving<Rat>(R("0.6"), R("0.4"), R("0.15"));
  CHECK(!check_condition_b1(wc).holds);
  CHECK(!check_condition_b2(wc).holds);
  CHECK(!check_condition_d(wc).holds);
  CHECK(check_condition_a(wc).holds);
  CHECK(check_condition_c(wc).holds);  // interior matches the alternating model

  WalkSpec<Rat> paired = paired_service<Rat>({R("0.2"), R("0.5"), R("0.3"), R("0.3"), R("0.15")});
  CHECK(!check_condition_a(paired).holds);
  CHECK(paired.q(-1, -1) == R("0.119"));  // a0 (1-l1)(1-l2)
  CHECK(rho1(paired) == Rat(9, 49));
  CHECK(rho2(paired) == Rat(3, 17));

  WalkSpec<Rat> ne = false_initiation<Rat>({R("0.6"), R("0.8"), R("0.2"), R("0.15")});
  CHECK(ne.q(1, 1) == R("0.006"));
  CHECK(rho1(ne) == Rat(13, 48));  // lambda1 (abar + a bbar) / (a b (1-lambda1))
  // b = 1 recovers the alternating-service walk
  WalkSpec<Rat> recovered = false_initiation<Rat>({R("0.6"), R("1"), R("0.4"), R("0.15")});
  WalkSpec<Rat> reference = alt_spec();
  for (auto [k, l] : kOffsets) {
    CHECK(recovered.q(k, l) == reference.q(k, l));
    CHECK(recovered.qh(k, l) == reference.qh(k, l));
    CHECK(recovered.qv(k, l) == reference.qv(k, l));
    CHECK(recovered.q0(k, l) == reference.q0(k, l));
  }
}

TEST_CASE("closed_form_alternating matches the engine everywhere") {
  AlternatingParams<Rat> params{R("0.6"), R("0.4"), R("0.15")};
  InvariantMeasure<Rat> reference = closed_form_alternating(params);
  CHECK(reference.evaluate(0, 0) == Rat(25, 136));
  CHECK(reference.total_mass() == 1);
  SolveResult<Rat> result = run(alternating_service(params));
  REQUIRE(reference.interior.size() == result.measure.interior.size());
  for (size_t i = 0; i < reference.interior.size(); ++i) {
    CHECK(reference.interior[i].coeff == result.measure.interior[i].coeff);
    CHECK(reference.interior[i].gamma == result.measure.interior[i].gamma);
    CHECK(reference.interior[i].delta == result.measure.interior[i].delta);
  }
  for (long m = 0; m <= 10; ++m)
    for (long n = 0; n <= 10; ++n)
      CHECK(reference.evaluate(m, n) == result.measure.evaluate(m, n));
  CHECK_THROWS_AS(closed_form_alternating<Rat>({R("0.3"), R("0.4"), R("0.15")}), Error);
}

TEST_CASE("closed_form_simultaneous matches the engine and detailed balance") {
  InvariantMeasure<Rat> reference = closed_form_simultaneous(R("0.6"), R("0.2"));
  CHECK(reference.evaluate(0, 0) == Rat(5, 12));
  for (long m = 0; m <= 6; ++m)
    CHECK(reference.evaluate(m, 0) == Rat(5, 12) * pow_int(Rat(1, 6), m));
  WalkSpec<Rat> spec = simultaneous_arrivals<Rat>(R("0.6"), R("0.2"));
  SolveResult<Rat> result = run(spec);
  for (long m = 0; m <= 10; ++m)
    for (long n = 0; n <= 10; ++n)
      CHECK(reference.evaluate(m, n) == result.measure.evaluate(m, n));
  // detailed balance on the interior lattice
  for (long m = 1; m <= 8; ++m) {
    for (long n = 1; n <= 8; ++n) {
      CHECK(reference.evaluate(m, n) * spec.q(0, 1) ==
            reference.evaluate(m, n + 1) * spec.q(0, -1));
      CHECK(reference.evaluate(m, n) * spec.q(1, 0) ==
            reference.evaluate(m + 1, n) * spec.q(-1, 0));
    }
  }
  CHECK_THROWS_AS(closed_form_simultaneous(R("0.5"), R("0.5")), Error);
}

TEST_CASE("extended_neighbors completion") {
  // the classic reference interior completes to the reference spec
  WalkSpec<Rat> fig2 = fig2_spec();
  WalkSpec<Rat> completed = extended_neighbors(fig2.interior);
  for (auto [k, l] : kOffsets) {
    CHECK(completed.qh(k, l) == fig2.qh(k, l));
    CHECK(completed.qv(k, l) == fig2.qv(k, l));
    CHECK(completed.q0(k, l) == fig2.q0(k, l));
  }

  // a reduced interior completes to the simultaneous-arrivals spec
  WalkSpec<Rat> simu = simultaneous_arrivals<Rat>(R("0.6"), R("0.2"));
  WalkSpec<Rat> completed_reduced = extended_neighbors(simu.interior);
  for (auto [k, l] : kOffsets) {
    CHECK(completed_reduced.qh(k, l) == simu.qh(k, l));
    CHECK(completed_reduced.qv(k, l) == simu.qv(k, l));
    CHECK(completed_reduced.q0(k, l) == simu.q0(k, l));
  }

  // interiors violating the stopping criterion are rejected
  TransitionKernel<Rat> bad = fig2.interior;
  bad.at(0, -1) = bad.at(0, -1) + Rat(1, 100);
  bad.at(0, 0) = bad.at(0, 0) - Rat(1, 100);
  try {
    extended_neighbors(bad);
    FAIL("expected ConditionsUnmet");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::ConditionsUnmet);
  }
}

TEST_CASE("batch arrival pmf") {
  BatchGeometricParams<Rat> none{R("0.6"), R("0"), R("0")};
  CHECK(batch_arrival_pmf(none, 0, 0) == 1);
  CHECK(batch_arrival_pmf(none, 1, 0) == 0);

  BatchGeometricParams<Rat> params = batch_params();
  CHECK(batch_arrival_pmf(params, 1, 0) / batch_arrival_pmf(params, 0, 1) == Rat(8, 3));
  Rat mass(0);
  for (long i = 0; i <= 40; ++i)
    for (long j = 0; i + j <= 40; ++j) mass += batch_arrival_pmf(params, i, j);
  CHECK(Rat(1) - mass > 0);
  CHECK(to_double(Rat(1) - mass) < 1e-8);
}

TEST_CASE("delta equation is constant in the state") {
  BatchGeometricParams<Rat> params = batch_params();
  Rat expected(3, 8);  // lambda2 / (1 - a)
  for (long l = 0; l < 10; ++l)
    for (long k = 0; k < 10; ++k) CHECK(delta_equation(params, l, k) == expected);
  BatchGeometricParams<Rat> no_second{R("0.6"), R("0.4"), R("0")};
  CHECK(delta_equation(no_second, 0, 0) == 0);
}

TEST_CASE("batch product measure and balance residuals") {
  BatchGeometricParams<Rat> params = batch_params();
  InvariantMeasure<Rat> measure = batch_geometric_measure(params);
  REQUIRE(measure.interior.size() == 1);
  CHECK(measure.interior[0].gamma == Rat(2, 3));
  CHECK(measure.interior[0].delta == Rat(3, 8));
  CHECK(measure.evaluate(0, 0) == Rat(5, 24));  // (1-2/3)(1-3/8)
  CHECK(measure.total_mass() == 1);

  BatchBalanceReport report = batch_balance_residuals(params, measure, 8, 60);
  CHECK(report.max_residual == 0);
  CHECK(report.tail_bound >= 0);
  CHECK(report.tail_bound < 1e-8);

  // row sums are the closed-form geometric marginal (1 - l1/a)(l1/a)^m
  for (long m = 0; m <= 10; ++m) {
    Rat row = measure.evaluate(m, 0);
    if (m > 0) {
      for (const auto& t : measure.interior)
        row += t.coeff * pow_int(t.gamma, m) * t.delta / (Rat(1) - t.delta);
    } else {
      for (const auto& t : measure.v_axis) row += t.coeff * t.ratio / (Rat(1) - t.ratio);
    }
    CHECK(row == Rat(1, 3) * pow_int(Rat(2, 3), m));
  }

  BatchGeometricParams<Rat> unstable{R("0.3"), R("0.4"), R("0.15")};
  CHECK_THROWS_AS(batch_geometric_measure(unstable), Error);
}

TEST_CASE("engine equals the closed forms across a parameter grid") {
  for (const char* a : {"0.45", "0.6"}) {
    for (const char* l1 : {"0.2", "0.35"}) {
      AlternatingParams<Rat> params{R(a), R(l1), R("0.12")};
      SolveResult<Rat> result = run(alternating_service(params));
      InvariantMeasure<Rat> reference = closed_form_alternating(params);
      for (long m = 0; m <= 6; ++m)
        for (long n = 0; n <= 6; ++n)
          CHECK(result.measure.evaluate(m, n) == reference.evaluate(m, n));
    }
  }
  for (const char* a : {"0.4", "0.55"}) {
    for (const char* lam : {"0.1", "0.25"}) {
      SolveResult<Rat> result = run(simultaneous_arrivals<Rat>(R(a), R(lam)));
      InvariantMeasure<Rat> reference = closed_form_simultaneous(R(a), R(lam));
      for (long m = 0; m <= 6; ++m)
        for (long n = 0; n <= 6; ++n)
          CHECK(result.measure.evaluate(m, n) == reference.evaluate(m, n));
    }
  }
}

TEST_CASE("builders emit exact rationals enabling exact checks") {
  WalkSpec<Rat> spec = alternating_service<Rat>({Rat(3, 5), Rat(2, 5), Rat(3, 20)});
  WalkSpec<Rat> decimal = alt_spec();
  for (auto [k, l] : kOffsets) CHECK(spec.q(k, l) == decimal.q(k, l));
}
