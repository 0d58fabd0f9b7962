#include <cmath>
#include <cstdio>
#include <ostream>

#include "qpwalk/marginals.hpp"
#include "qpwalk/oracle.hpp"
#include "qpwalk/spectral.hpp"

namespace qpwalk {

namespace {

// roots of P(fixed, .) as a quadratic, real ones only
void append_roots(std::vector<CurvePoint>& points, char curve, double fixed, double a, double b,
                  double c, bool fixed_is_gamma) {
  auto push = [&](double root) {
    if (!std::isfinite(root)) return;
    if (fixed_is_gamma)
      points.push_back({curve, fixed, root});
    else
      points.push_back({curve, root, fixed});
  };
  if (a == 0.0) {
    if (b != 0.0) push(-c / b);
    return;
  }
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  double sq = std::sqrt(disc);
  push((-b - sq) / (2.0 * a));
  push((-b + sq) / (2.0 * a));
}

template <typename F>
void sweep(std::vector<CurvePoint>& points, char curve, int resolution, bool fixed_is_gamma,
           F&& poly) {
  auto sample = [&](double fixed) {
    double p0 = poly(fixed, 0.0);
    double p1 = poly(fixed, 1.0);
    double pm = poly(fixed, -1.0);
    double a = 0.5 * (p1 + pm) - p0;
    double b = 0.5 * (p1 - pm);
    append_roots(points, curve, fixed, a, b, p0, fixed_is_gamma);
  };
  for (int i = 1; i <= resolution; ++i) sample(1.05 * i / resolution);
  sample(1.0);  // the unit point always lies on K
}

}  // namespace

std::vector<CurvePoint> sample_curves(const WalkSpec<double>& spec, int resolution) {
  if (resolution < 2) raise(Errc::InvalidArgument, "curve resolution must be at least 2");
  std::vector<CurvePoint> points;
  auto K = [&](double g, double d) { return eval_K(spec, g, d); };
  auto H = [&](double g, double d) { return eval_H(spec, g, d); };
  auto V = [&](double g, double d) { return eval_V(spec, g, d); };
  sweep(points, 'K', resolution, true, [&](double g, double d) { return K(g, d); });
  sweep(points, 'H', resolution, true, [&](double g, double d) { return H(g, d); });
  sweep(points, 'V', resolution, true, [&](double g, double d) { return V(g, d); });
  sweep(points, 'K', resolution, false, [&](double d, double g) { return K(g, d); });
  sweep(points, 'H', resolution, false, [&](double d, double g) { return H(g, d); });
  sweep(points, 'V', resolution, false, [&](double d, double g) { return V(g, d); });
  return points;
}

void write_curves_csv(std::ostream& os, const std::vector<CurvePoint>& points) {
  os << "curve,gamma,delta\n";
  char line[96];
  for (const CurvePoint& p : points) {
    std::snprintf(line, sizeof line, "%c,%.17g,%.17g\n", p.curve, p.gamma, p.delta);
    os << line;
  }
}

namespace detail {

double analytic_tail_bound(const WalkSpec<double>& spec, long N) {
  try {
    GeometricMarginal<double> mm = marginal_m(spec);
    GeometricMarginal<double> mn = marginal_n(spec);
    double tail_m = mm.prefactor * std::pow(mm.ratio, N + 1) / (1.0 - mm.ratio);
    double tail_n = mn.prefactor * std::pow(mn.ratio, N + 1) / (1.0 - mn.ratio);
    return tail_m + tail_n;
  } catch (const Error&) {
    return 0.0;  // marginal closed forms unavailable; only the method floor remains
  }
}

}  // namespace detail

OracleGrid<double> power_stationary(const WalkSpec<double>& spec, long N, double tol,
                                    long max_iters) {
  if (N < 5) raise(Errc::InvalidArgument, "truncation size must be at least 5");
  const long side = N + 1, size = side * side;
  std::vector<double> pi(size, 0.0), next(size, 0.0);
  pi[0] = 1.0;
  double residual = 1.0;
  for (long iter = 0; iter < max_iters && residual > tol; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (long m = 0; m < side; ++m) {
      for (long n = 0; n < side; ++n) {
        double mass = pi[m * side + n];
        if (mass == 0.0) continue;
        const TransitionKernel<double>& kernel = spec.kernel_at(m, n);
        for (auto [k, l] : kOffsets) {
          double prob = kernel.at(k, l);
          if (prob == 0.0) continue;
          auto [tm, tn] = detail::redirect(N, m, n, k, l);
          next[tm * side + tn] += mass * prob;
        }
      }
    }
    residual = 0.0;
    for (long i = 0; i < size; ++i) residual += std::fabs(next[i] - pi[i]);
    pi.swap(next);
  }
  OracleGrid<double> grid;
  grid.N = N;
  grid.method = OracleMethod::PowerIteration;
  grid.p = std::move(pi);
  grid.achieved_residual = residual;
  grid.tail_estimate = detail::analytic_tail_bound(spec, N) + std::max(1e-13, 10.0 * residual);
  return grid;
}

namespace {

// counter-based SplitMix64 stream: out(i) = mix(seed + i * golden)
struct CounterRng {
  std::uint64_t seed;
  std::uint64_t counter = 0;

  double next_unit() {
    std::uint64_t z = seed + (++counter) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }
};

}  // namespace

OracleGrid<double> simulate(const WalkSpec<double>& spec, long N, std::uint64_t steps,
                            std::uint64_t burn_in, std::uint64_t seed) {
  if (steps <= burn_in) raise(Errc::InvalidArgument, "steps must exceed burn_in");
  if (N < 1) raise(Errc::InvalidArgument, "grid size must be positive");
  const long side = N + 1;
  std::vector<std::uint64_t> visits(side * side, 0);
  CounterRng rng{seed};
  long m = 0, n = 0;
  std::uint64_t recorded = 0, inside = 0;
  for (std::uint64_t step = 0; step < steps; ++step) {
    if (step >= burn_in) {
      ++recorded;
      if (m <= N && n <= N) {
        ++inside;
        ++visits[m * side + n];
      }
    }
    const TransitionKernel<double>& kernel = spec.kernel_at(m, n);
    double u = rng.next_unit();
    double acc = 0.0;
    for (auto [k, l] : kOffsets) {
      acc += kernel.at(k, l);
      if (u < acc) {
        m += k;
        n += l;
        break;
      }
    }
    // numerical slack in the row sum leaves the state unchanged
    if (m < 0) m = 0;
    if (n < 0) n = 0;
  }
  OracleGrid<double> grid;
  grid.N = N;
  grid.method = OracleMethod::Simulation;
  grid.p.assign(side * side, 0.0);
  for (long i = 0; i < side * side; ++i)
    grid.p[i] = static_cast<double>(visits[i]) / static_cast<double>(recorded);
  grid.sample_mass = static_cast<double>(inside) / static_cast<double>(recorded);
  grid.tail_estimate = 3.0 / std::sqrt(static_cast<double>(recorded));
  return grid;
}

}  // namespace qpwalk
