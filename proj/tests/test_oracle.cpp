#include <doctest.h>

#include <cmath>

#include "qpwalk/oracle.hpp"
#include "qpwalk/queueing.hpp"

using namespace qpwalk;

namespace {

Rat R(const char* text) { return rat_from_string(text); }

WalkSpec<Rat> alt_spec() { return alternating_service<Rat>({R("0.6"), R("0.4"), R("0.15")}); }
WalkSpec<Rat> simu_spec() { return simultaneous_arrivals<Rat>(R("0.6"), R("0.2")); }

}  // namespace

TEST_CASE("float linear solve reproduces the simultaneous-arrivals closed form") {
  OracleGrid<double> grid = truncated_stationary(to_float(simu_spec()), 40);
  CHECK(std::fabs(grid.total() - 1.0) < 1e-14);
  CHECK(std::fabs(grid.at(0, 0) - 5.0 / 12.0) < 1e-9);
  Comparison cmp = compare(closed_form_simultaneous(R("0.6"), R("0.2")), grid);
  CHECK(cmp.max_abs_err <= 1e-9);
  CHECK(cmp.max_abs_err <= 10.0 * grid.tail_estimate);
  CHECK(cmp.states_compared == 41 * 41);
}

TEST_CASE("float linear solve reproduces the alternating-service closed form") {
  OracleGrid<double> grid = truncated_stationary(to_float(alt_spec()), 40);
  CHECK(std::fabs(grid.at(0, 0) - 25.0 / 136.0) < 1e-8);
  Comparison cmp = compare(closed_form_alternating<Rat>({R("0.6"), R("0.4"), R("0.15")}), grid);
  CHECK(cmp.max_abs_err <= 1e-8);
  CHECK(cmp.max_abs_err <= 10.0 * grid.tail_estimate);
}

TEST_CASE("power iteration agrees with the linear solve") {
  WalkSpec<double> spec = to_float(alt_spec());
  for (long N : {30L, 60L}) {
    OracleGrid<double> direct = truncated_stationary(spec, N);
    OracleGrid<double> power = power_stationary(spec, N);
    CHECK(power.achieved_residual <= 1e-13);
    CHECK(compare(direct, power).max_abs_err <= 1e-10);
  }
}

TEST_CASE("exact rational solve sums to one exactly") {
  OracleGrid<Rat> grid = truncated_stationary(simu_spec(), 10);
  CHECK(grid.total() == 1);
  for (const Rat& p : grid.p) CHECK(p >= 0);
  // agreement with the closed form is limited only by the truncation tail
  Comparison cmp = compare(closed_form_simultaneous(R("0.6"), R("0.2")), grid);
  CHECK(cmp.max_abs_err < 1e-4);
  OracleGrid<Rat> fig2 = truncated_stationary(fig2_spec(), 8);
  CHECK(fig2.total() == 1);
}

TEST_CASE("redirect truncation bias shrinks with the window") {
  InvariantMeasure<Rat> reference = closed_form_simultaneous(R("0.6"), R("0.2"));
  WalkSpec<double> spec = to_float(simu_spec());
  double previous = 1.0;
  for (long N : {8, 16, 32}) {
    Comparison cmp = compare(reference, truncated_stationary(spec, N));
    CHECK(cmp.max_abs_err < previous);
    previous = cmp.max_abs_err;
  }
}

TEST_CASE("absorbing origin makes the truncated system singular") {
  WalkSpec<Rat> spec = fig2_spec();
  TransitionKernel<Rat> absorbing;
  absorbing.at(0, 0) = 1;
  WalkSpec<Rat> trapped = build_spec(spec.interior, spec.horizontal, spec.vertical, absorbing);
  CHECK_THROWS_AS(truncated_stationary(trapped, 6), Error);
  try {
    truncated_stationary(trapped, 6);
  } catch (const Error& err) {
    CHECK(err.code() == Errc::SingularSystem);
  }
}

TEST_CASE("simulation is reproducible and statistically consistent") {
  WalkSpec<double> spec = to_float(simu_spec());
  const std::uint64_t steps = 2000000;
  OracleGrid<double> first = simulate(spec, 30, steps, steps / 10, 1);
  OracleGrid<double> second = simulate(spec, 30, steps, steps / 10, 1);
  for (size_t i = 0; i < first.p.size(); ++i) CHECK(first.p[i] == second.p[i]);

  // occupation samples of the chain are autocorrelated, so the binomial
  // standard error is scaled by sqrt(tau) with a conservative tau = 16
  double p = 5.0 / 12.0;
  double sample = static_cast<double>(steps - steps / 10);
  double bound = 4.0 * 4.0 * std::sqrt(p * (1.0 - p) / sample);
  CHECK(std::fabs(first.at(0, 0) - p) <= bound);

  OracleGrid<double> other_seed = simulate(spec, 30, steps, steps / 10, 2);
  CHECK(std::fabs(other_seed.at(0, 0) - p) <= bound);
  CHECK(first.at(0, 0) != other_seed.at(0, 0));

  CHECK_THROWS_AS(simulate(spec, 30, 1000, 1000, 1), Error);
}

TEST_CASE("comparison of a measure against its own export is exact") {
  SolveResult<Rat> result = run(simu_spec());
  OracleGrid<Rat> grid;
  grid.N = 12;
  grid.p.assign(13 * 13, Rat(0));
  for (long m = 0; m <= 12; ++m)
    for (long n = 0; n <= 12; ++n) grid.at(m, n) = result.measure.evaluate(m, n);
  Comparison cmp = compare(result.measure, grid);
  CHECK(cmp.max_abs_err == 0);
  CHECK(cmp.max_rel_err == 0);
}

TEST_CASE("mismatched windows compare over the intersection") {
  WalkSpec<double> spec = to_float(simu_spec());
  OracleGrid<double> small = truncated_stationary(spec, 8);
  OracleGrid<double> large = truncated_stationary(spec, 12);
  Comparison cmp = compare(small, large);
  CHECK(cmp.states_compared == 9 * 9);
}
