#include <doctest.h>

#include "support.hpp"

#include <tube/quadrature.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

using namespace tube;
using std::numbers::pi;
using tube::testing::plan_of;

namespace {

// Gamma-based C1 written out independently of the library.
double c1_oracle(int n, double r, double s, double t) {
  return std::pow(2.0, n + 1) * std::pow(pi, n) * std::tgamma(1 + t) * std::tgamma(r + s - t - n - 1) /
         (std::tgamma(r) * std::tgamma(s));
}

struct ThreadsEnv {
  explicit ThreadsEnv(const char* v) {
    if (const char* old = std::getenv("TUBE_THREADS")) saved = old, had = true;
    setenv("TUBE_THREADS", v, 1);
  }
  ~ThreadsEnv() {
    if (had) setenv("TUBE_THREADS", saved.c_str(), 1);
    else unsetenv("TUBE_THREADS");
  }
  std::string saved;
  bool had = false;
};

}  // namespace

TEST_CASE("C1 closed form") {
  CHECK(c1_constant(1, 2, 2, 0) == doctest::Approx(4 * pi).epsilon(1e-14));
  CHECK(c1_constant(1, 3, 3, 1) == doctest::Approx(2 * pi).epsilon(1e-14));
  for (auto [n, r, s, t] : {std::tuple{1, 2.5, 1.5, 0.5}, std::tuple{2, 3.0, 3.0, 0.0}, std::tuple{3, 4.0, 2.5, -0.5}})
    CHECK(c1_constant(n, r, s, t) == doctest::Approx(c1_oracle(n, r, s, t)).epsilon(1e-12));
}

TEST_CASE("two-kernel identity at the base point") {
  const TubePointd i = TubePointd::axis(1, 1.0);
  const IdentityReport rep = verify_identity(1, 2, 2, 0, i, i, plan_of(200000));
  CHECK(rep.predicted.real() == doctest::Approx(4 * pi).epsilon(1e-14));
  CHECK(rep.sigma_distance < 4);
  CHECK(rep.measured.value.real() == doctest::Approx(4 * pi).epsilon(0.02));

  const IdentityReport r2 = verify_identity(1, 3, 3, 1, i, i, plan_of(200000));
  CHECK(r2.predicted.real() == doctest::Approx(2 * pi).epsilon(1e-14));
  CHECK(r2.sigma_distance < 4);
}

TEST_CASE("two-kernel identity off the diagonal and in higher dimension") {
  CounterRng g(11, 0);
  for (Index n : {1, 2}) {
    for (int k = 0; k < 3; ++k) {
      const TubePointd z = testing::random_point(g, n, 1, 0.5, 2), u = testing::random_point(g, n, 1, 0.5, 2);
      const IdentityReport rep = verify_identity(n, 2.5, 2, 0.5, z, u, plan_of(200000, 100 + k));
      CHECK(rep.sigma_distance < 4);
    }
  }
}

TEST_CASE("sigma distance stays below 4 across seeds") {
  const TubePointd i = TubePointd::axis(1, 1.0);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    ok += verify_identity(1, 2, 2, 0, i, i, plan_of(10000, seed)).sigma_distance < 4;
  CHECK(ok >= 95);
}

TEST_CASE("identity refuses divergent parameters") {
  const TubePointd i = TubePointd::axis(1, 1.0);
  CHECK_THROWS_WITH_AS(verify_identity(1, 2, 2, -1.5, i, i, plan_of(1000)), doctest::Contains("divergent"),
                       DomainError);
  CHECK_THROWS_AS(verify_identity(1, 1, 1, 0, i, i, plan_of(1000)), DomainError);
  CHECK_THROWS_AS(verify_identity(1, 0, 3, 0, i, i, plan_of(1000)), DomainError);
  CHECK_THROWS_AS(verify_identity(2, 2, 2, 0, i, i, plan_of(1000)), DomainError);
}

TEST_CASE("zero integrand and exact linearity") {
  const WeightParams w(1, 0);
  const SamplingPlan p = plan_of(50000);
  const IntegralEstimate z = integrate_tube(w, TubeFunction([](const TubePointd&) { return cplx(0, 0); }), p);
  CHECK(z.value == cplx(0, 0));
  CHECK(z.std_error == 0.0);
  const TubePointd a = testing::chart(0.3, 0.7);
  const TubeFunction f = [&](const TubePointd& v) { return rho_pow(rho(v, a), -3.0); };
  const TubeFunction f2 = [&](const TubePointd& v) { return 2.0 * f(v); };
  const IntegralEstimate e1 = integrate_tube(w, f, p), e2 = integrate_tube(w, f2, p);
  CHECK(e2.value == 2.0 * e1.value);
  CHECK(e2.std_error == 2.0 * e1.std_error);
}

TEST_CASE("estimates are bit-identical across thread counts") {
  const WeightParams w(2, 0.5);
  const TubePointd a = TubePointd::axis(2, 1.3);
  const TubeFunction f = [&](const TubePointd& v) { return rho_pow(rho(v, a), -4.0); };
  const SamplingPlan p = plan_of(3 * 4096 * 5 + 17, 99);
  IntegralEstimate one, many;
  {
    ThreadsEnv env("1");
    one = integrate_tube(w, f, p);
  }
  {
    ThreadsEnv env("7");
    many = integrate_tube(w, f, p);
  }
  CHECK(one.value == many.value);
  CHECK(one.std_error == many.std_error);
  CHECK(integrate_tube(w, f, p).value == one.value);
}

TEST_CASE("all sampling strategies agree on a closed-form integral") {
  // int |rho(w, i)|^{-4} dV = 4 pi
  const WeightParams w(1, 0);
  const TubePointd i = TubePointd::axis(1, 1.0);
  const TubeFunction f = [&](const TubePointd& v) { return cplx(std::pow(std::abs(rho(v, i)), -4.0), 0); };
  for (Strategy s : {Strategy::ImportanceCauchy, Strategy::ImportanceExponential, Strategy::StratifiedGrid}) {
    SamplingPlan p = plan_of(200000);
    p.strategy = s;
    p = p.centered({i}, safe_h_tail(1, 4, 0));
    const IntegralEstimate e = integrate_tube(w, f, p);
    INFO(to_string(s));
    CHECK(std::abs(e.value.real() - 4 * pi) < 4 * e.std_error + 1e-12);
    CHECK(strategy_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(strategy_from_string("simpson"), DomainError);
}

TEST_CASE("adaptive rule reproduces 4 pi") {
  const WeightParams w(1, 0);
  const TubePointd i = TubePointd::axis(1, 1.0);
  const IntegralEstimate e = integrate_tube_adaptive(
      w, [&](const TubePointd& v) { return 1.0 / (rho_pow(rho(i, v), 2.0) * rho_pow(rho(v, i), 2.0)); }, i, 1e-10);
  CHECK(e.value.real() == doctest::Approx(4 * pi).epsilon(1e-8));
  CHECK(std::abs(e.value.imag()) < 1e-8);
  CHECK_THROWS_AS(integrate_tube_adaptive(WeightParams(2, 0), [](const TubePointd&) { return cplx(1, 0); },
                                          TubePointd::axis(2, 1.0)),
                  DomainError);
}

TEST_CASE("volume law for Bergman balls") {
  // D(z, 1) is the Euclidean disc of radius rho(z) sinh 2
  const WeightParams w(1, 0);
  std::vector<double> v;
  for (double h : {0.5, 1.0, 2.0, 4.0}) {
    const IntegralEstimate e = ball_volume(w, BergmanBall<double>(TubePointd::axis(1, h), 1.0), plan_of(200000));
    v.push_back(e.value.real() / (h * h));
    CHECK(e.value.real() == doctest::Approx(pi * std::pow(h * std::sinh(2.0), 2)).epsilon(0.02));
  }
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  CHECK((*hi - *lo) / *lo < 0.05);
}

TEST_CASE("weighted volume of a ball scales with rho^{n+1+alpha}") {
  for (double alpha : {-0.5, 1.0}) {
    const WeightParams w(2, alpha);
    const double a = ball_volume(w, BergmanBall<double>(TubePointd::axis(2, 1.0), 0.7), plan_of(100000)).value.real();
    const double b = ball_volume(w, BergmanBall<double>(TubePointd::axis(2, 3.0), 0.7), plan_of(100000)).value.real();
    CHECK(b / a == doctest::Approx(std::pow(3.0, 3 + alpha)).epsilon(0.05));
  }
}

TEST_CASE("comparability of rho(z, .) across a Bergman ball") {
  // For beta(u, v) < 1 the ratio |rho(z,u)| / |rho(z,v)| stays in a band that
  // does not widen as z moves away.
  CounterRng g(12, 0);
  auto band = [&](double z_scale) {
    double c = 1;
    for (int k = 0; k < 1000; ++k) {
      const TubePointd u = testing::random_point(g, 1, 2, 0.2, 5);
      TubePointd v = u;
      do {
        v = testing::chart(u.x(0) + rho(u) * (4 * g.uniform() - 2), rho(u) * std::exp(4 * g.uniform() - 2));
      } while (bergman_distance(u, v) >= 1);
      const TubePointd z = testing::random_point(g, 1, z_scale, 0.01, 100);
      const double q = std::abs(rho(z, u)) / std::abs(rho(z, v));
      c = std::max({c, q, 1 / q});
    }
    return c;
  };
  const double near = band(3), far = band(300);
  CHECK(near < 2 * std::exp(2.0));
  CHECK(far < 2 * std::exp(2.0));
}

TEST_CASE("norm_p_alpha: zero, homogeneity and divergence") {
  const SpaceIndex s(2, 0);
  const TubePointd i = TubePointd::axis(1, 1.0);
  SamplingPlan p = plan_of(40000).centered({i}, 1);
  CHECK(norm_p_alpha(s, [](const TubePointd&) { return cplx(0, 0); }, 1, p).value == 0.0);
  const TubeFunction f = [&](const TubePointd& v) { return rho_pow(rho(v, i), -2.0); };
  const double a = norm_p_alpha(s, f, 1, p).value;
  const double b = norm_p_alpha(s, [&](const TubePointd& v) { return cplx(0, -3) * f(v); }, 1, p).value;
  CHECK(b == doctest::Approx(3 * a).epsilon(1e-12));
  // |rho(., i)|^{-1/2} is far from square integrable
  CHECK_THROWS_AS(norm_p_alpha(s, [&](const TubePointd& v) { return rho_pow(rho(v, i), -0.5); }, 1,
                               plan_of(40000).centered({i}, 0.05)),
                  DivergenceError);
}

TEST_CASE("safe_h_tail stays in range") {
  CHECK(safe_h_tail(1, 4, 0) == 1.0);
  CHECK(safe_h_tail(1, 2.5, 0) == doctest::Approx(0.5));
  CHECK(safe_h_tail(1, 4, -0.8) == doctest::Approx(0.2));
  CHECK(safe_h_tail(1, 2, 0) == 0.05);
}
