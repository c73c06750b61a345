#include <doctest.h>

#include "support.hpp"

#include <tube/geometry.hpp>

#include <cmath>

using namespace tube;
using tube::testing::chart;
using tube::testing::random_ball_point;
using tube::testing::random_point;

TEST_CASE("rho at the base point and on the vertical axis") {
  const TubePointd i = TubePointd::axis(1, 1.0), i2 = TubePointd::axis(1, 2.0);
  CHECK(rho(i, i) == cplx(1, 0));
  // (-2i)(2i + ... ) / 4 with z_n - conj(w_n) = i + 2i = 3i
  const cplx r = rho(i, i2);
  CHECK(r.real() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(r.imag() == 0.0);
  CHECK(rho(i2) == 2.0);
  // boundary point y = (y', |y'|^2)
  TubePointd b(Vecd::Constant(2, 0.7), (Vecd(2) << 0.5, 0.25).finished());
  CHECK(rho(b) == 0.0);
  CHECK_FALSE(b.interior());
}

TEST_CASE("rho(z, z) equals the defect and is positive") {
  CounterRng g(1, 0);
  for (Index n : {1, 2, 3})
    for (int k = 0; k < 200; ++k) {
      const TubePointd z = random_point(g, n);
      const cplx d = rho(z, z);
      CHECK(d.real() == doctest::Approx(rho(z)).epsilon(1e-12));
      CHECK(std::abs(d.imag()) <= 1e-14 * std::abs(d.real()));
      CHECK(d.real() > 0);
    }
}

TEST_CASE("rho is Hermitian, has positive real part and satisfies |rho(z,w)|^2 >= rho(z) rho(w)") {
  CounterRng g(2, 0);
  for (Index n : {1, 2}) {
    for (int k = 0; k < 10000; ++k) {
      const TubePointd z = random_point(g, n), w = random_point(g, n);
      const cplx a = rho(z, w), b = rho(w, z);
      REQUIRE(std::abs(a - std::conj(b)) <= 1e-14 * std::max(1.0, std::abs(a)));
      REQUIRE(a.real() > 0);
      REQUIRE(std::norm(a) >= rho(z) * rho(w) * (1 - 1e-12));
    }
  }
}

TEST_CASE("rho_pow refuses a non-positive real part") {
  CHECK_THROWS_AS(rho_pow(cplx(-1, 0.5), 2.0), DomainError);
  CHECK_THROWS_AS(rho_pow(cplx(0, 1), 2.0), DomainError);
  const cplx r(1.5, -0.5);
  CHECK(std::abs(rho_pow(r, 2.0) - r * r) < 1e-14);
  CHECK(std::abs(rho_pow(r, -1.0) - 1.0 / r) < 1e-14);
}

TEST_CASE("bergman_distance examples") {
  const TubePointd i = TubePointd::axis(1, 1.0), i2 = TubePointd::axis(1, 2.0);
  CHECK(bergman_distance(i, i) == 0.0);
  CHECK(bergman_distance(i, i2) == doctest::Approx(std::atanh(1.0 / 3)).epsilon(1e-14));
  CHECK(bergman_distance(i, i2) == doctest::Approx(0.346574).epsilon(1e-6));
  TubePointd bnd(Vecd::Zero(1), Vecd::Zero(1));
  CHECK_THROWS_AS(bergman_distance(i, bnd), DomainError);
  CHECK_THROWS_AS(bergman_distance(i, TubePointd::axis(2, 1.0)), DomainError);
}

TEST_CASE("bergman_distance is a metric on sampled triples") {
  CounterRng g(3, 0);
  for (Index n : {1, 2}) {
    for (int k = 0; k < 10000; ++k) {
      const TubePointd a = random_point(g, n), b = random_point(g, n), c = random_point(g, n);
      const double ab = bergman_distance(a, b), ba = bergman_distance(b, a);
      REQUIRE(ab >= 0);
      REQUIRE(ab == ba);
      REQUIRE(bergman_distance(a, a) == 0.0);
      REQUIRE(bergman_distance(a, c) <= ab + bergman_distance(b, c) + 1e-10);
      // the distance dominates half the log-height gap
      REQUIRE(ab >= 0.5 * std::abs(std::log(rho(a) / rho(b))) - 1e-12);
    }
  }
}

TEST_CASE("bergman_distance is invariant under real translation and dilation (n = 1)") {
  CounterRng g(4, 0);
  for (int k = 0; k < 2000; ++k) {
    const TubePointd z = random_point(g, 1), w = random_point(g, 1);
    const double s = std::exp(4 * g.uniform() - 2), t = 10 * g.uniform() - 5;
    const TubePointd zs = chart(s * z.x(0) + t, s * rho(z)), ws = chart(s * w.x(0) + t, s * rho(w));
    REQUIRE(bergman_distance(zs, ws) == doctest::Approx(bergman_distance(z, w)).epsilon(1e-9));
  }
}

TEST_CASE("Bergman balls for n = 1 are Euclidean discs") {
  CounterRng g(5, 0);
  for (int k = 0; k < 200; ++k) {
    const TubePointd a = random_point(g, 1);
    const double R = 0.05 + 2 * g.uniform(), th = 2 * M_PI * g.uniform();
    const double h = rho(a);
    // centre (x_a, h cosh 2R), radius h sinh 2R
    const TubePointd z = chart(a.x(0) + h * std::sinh(2 * R) * std::cos(th),
                               h * std::cosh(2 * R) + h * std::sinh(2 * R) * std::sin(th));
    REQUIRE(bergman_distance(a, z) == doctest::Approx(R).epsilon(1e-8));
  }
}

TEST_CASE("in_ball is strict") {
  const TubePointd i = TubePointd::axis(1, 1.0), i2 = TubePointd::axis(1, 2.0);
  CHECK(in_ball(i, BergmanBall<double>(i, 0.1)));
  CHECK_FALSE(in_ball(i2, BergmanBall<double>(i, 0.3)));
  CHECK_FALSE(in_ball(i2, BergmanBall<double>(i, bergman_distance(i, i2))));
  CHECK(in_ball(i2, BergmanBall<double>(i, 0.35)));
  CHECK_THROWS_AS(BergmanBall<double>(i, 0.0), DomainError);
}

TEST_CASE("Cayley map examples and round trips") {
  for (Index n : {1, 2, 3}) {
    const TubePointd z = cayley(BallPointd(CVecd::Zero(n)));
    CHECK(z == TubePointd::axis(n, 1.0));
    CHECK(inverse_cayley(TubePointd::axis(n, 1.0)).w.norm() < 1e-15);
  }
  CounterRng g(6, 0);
  for (Index n : {1, 2}) {
    for (int k = 0; k < 2000; ++k) {
      const BallPointd b = random_ball_point(g, n);
      REQUIRE((inverse_cayley(cayley(b)).w - b.w).norm() < 1e-12);
      const TubePointd z = random_point(g, n);
      const TubePointd back = cayley(inverse_cayley(z));
      REQUIRE((back.x - z.x).norm() < 1e-12 * std::max(1.0, z.x.norm()));
      REQUIRE((back.y - z.y).norm() < 1e-12 * std::max(1.0, z.y.norm()));
    }
  }
  CHECK_THROWS_AS(BallPointd(CVecd::Constant(1, cplx(1, 0))), DomainError);
}

TEST_CASE("the Cayley map is an isometry of Bergman metrics") {
  CounterRng g(7, 0);
  for (Index n : {1, 2}) {
    double worst = 0;
    for (int k = 0; k < 10000; ++k) {
      const TubePointd z = random_point(g, n), w = random_point(g, n);
      worst = std::max(worst, std::abs(bergman_distance(z, w) -
                                       ball_metric_distance(inverse_cayley(z), inverse_cayley(w))));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("ball metric examples") {
  const BallPointd o(CVecd::Zero(2));
  CHECK(ball_metric_distance(o, o) == 0.0);
  for (double s : {0.1, 0.5, 0.9}) {
    CVecd w = CVecd::Zero(2);
    w(1) = s;
    CHECK(ball_metric_distance(o, BallPointd(w)) == doctest::Approx(std::atanh(s)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(ball_metric_distance(o, BallPointd(CVecd::Zero(1))), DomainError);
}

TEST_CASE("boundary paths") {
  CHECK(boundary_sequence(PathKind::VerticalDown, 2, 1.0) == TubePointd::axis(2, 1.0));
  CHECK(rho(boundary_sequence(PathKind::VerticalDown, 1, 250.0)) == doctest::Approx(1.0 / 250));
  const TubePointd i = TubePointd::axis(1, 1.0);
  // |rho(k + i, i)| = |k + 2i| / 2
  for (double k : {10.0, 100.0, 1000.0})
    CHECK(std::abs(rho(boundary_sequence(PathKind::Horizontal, 1, k), i)) ==
          doctest::Approx(std::hypot(k, 2.0) / 2).epsilon(1e-14));
  for (PathKind kind : {PathKind::VerticalDown, PathKind::VerticalUp, PathKind::Horizontal})
    CHECK(path_kind_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(path_kind_from_string("diagonal"), DomainError);
  CHECK_THROWS_AS(boundary_sequence(PathKind::VerticalUp, 1, 0.0), DomainError);

  const auto paths = standard_paths(2);
  REQUIRE(paths.size() == 3);
  for (const auto& p : paths) {
    CHECK(p.size() == 13);
    CHECK(p.parameters.front() == 1.0);
    CHECK(p.parameters.back() == doctest::Approx(1000.0));
  }
}

TEST_CASE("TubePoint construction errors") {
  CHECK_THROWS_AS(TubePointd(Vecd::Zero(2), Vecd::Zero(1)), DomainError);
  CHECK_THROWS_AS(TubePointd(Vecd(0), Vecd(0)), DomainError);
  CHECK_THROWS_AS(TubePointd::from_chart(Vecd::Zero(2), Vecd::Zero(2), 1.0), DomainError);
}
