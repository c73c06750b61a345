#pragma once

// Hand-rolled generators for the property tests.

#include <tube/geometry.hpp>
#include <tube/quadrature.hpp>
#include <tube/rng.hpp>

#include <cmath>

namespace tube::testing {

/// Interior point with |x_j| <= x_scale, |y'_j| <= 1 and rho log-uniform in [h_lo, h_hi].
inline TubePointd random_point(CounterRng& g, Index n, double x_scale = 3, double h_lo = 0.05, double h_hi = 20) {
  Vecd x(n), yp(n - 1);
  for (Index j = 0; j < n; ++j) x(j) = x_scale * (2 * g.uniform() - 1);
  for (Index j = 0; j + 1 < n; ++j) yp(j) = 2 * g.uniform() - 1;
  return TubePointd::from_chart(x, yp, h_lo * std::pow(h_hi / h_lo, g.uniform()));
}

/// Point of the open ball with |b| <= radius_max.
inline BallPointd random_ball_point(CounterRng& g, Index n, double radius_max = 0.95) {
  CVecd w(n);
  for (Index j = 0; j < n; ++j) w(j) = cplx(2 * g.uniform() - 1, 2 * g.uniform() - 1);
  w *= radius_max * std::pow(g.uniform(), 1.0 / double(2 * n)) / w.norm();
  return BallPointd(w);
}

inline SamplingPlan plan_of(std::uint64_t samples, std::uint64_t seed = kDefaultSeed) {
  SamplingPlan p;
  p.samples = samples;
  p.seed = seed;
  return p;
}

inline TubePointd chart(double x, double h) { return TubePointd::from_chart(Vecd::Constant(1, x), Vecd(0), h); }

}  // namespace tube::testing
