#include <doctest.h>

#include "support.hpp"

#include <tube/measures.hpp>
#include <tube/suite.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace tube;
using std::numbers::pi;
using tube::testing::chart;
using tube::testing::plan_of;

namespace {

const TubePointd i1 = TubePointd::axis(1, 1.0);
const TubePointd i2 = TubePointd::axis(1, 2.0);

Measure atom_at(const TubePointd& z, double w = 1.0) { return Measure::discrete(z.dim(), {{z, w}}); }

}  // namespace

TEST_CASE("measure construction") {
  CHECK(Measure::zero(2).is_zero());
  CHECK(Measure::zero(2).dim() == 2);
  CHECK_THROWS_AS(Measure::discrete(1, {{i1, 0.0}}), DomainError);
  CHECK_THROWS_AS(Measure::discrete(1, {{i1, -1.0}}), DomainError);
  CHECK_THROWS_AS(Measure::discrete(2, {{i1, 1.0}}), DomainError);
  CHECK_THROWS_AS(Measure::density(1, "no-such-density", {}, 3), DomainError);
  CHECK_THROWS_AS(Measure::density(1, "weighted-volume", {}, 3), DomainError);
  CHECK_THROWS_AS(Measure::density(1, "weighted-volume", {{"beta", -1.0}}, 3), DomainError);
  CHECK_THROWS_AS(Measure::weighted_volume(1, 0, 0), DomainError);
  CHECK_THROWS_AS(atom_at(i1).scaled(-1), DomainError);
  CHECK_THROWS_AS(atom_at(i1).density_part(), DomainError);
  const Measure v = Measure::weighted_volume(1, 0.5, 3);
  CHECK_FALSE(v.is_discrete());
  CHECK(v.density_part().alpha == 0.5);
  const auto names = density_names();
  CHECK(std::count(names.begin(), names.end(), "weighted-volume") == 1);
  CHECK_THROWS_AS(CarlesonParams(0.9, 0), DomainError);
  CHECK_THROWS_AS(CarlesonParams(1, -1), DomainError);
}

TEST_CASE("registered densities") {
  register_density("test-bump", [](const std::map<std::string, double>& p) {
    Density d;
    d.alpha = 0;
    const double c = p.at("c");
    d.factor = [c](const TubePointd& z) { return c / (1 + z.x.squaredNorm()); };
    return d;
  });
  const Measure m = Measure::density(1, "test-bump", {{"c", 2.0}}, 4);
  CHECK(m.density_part().factor_at(i1) == 2.0);
  CHECK(m.density_part().factor_at(chart(1, 1)) == 1.0);
  CHECK(m.density_part().mplus_t == 4);
}

TEST_CASE("ball mass examples") {
  const SamplingPlan p = plan_of(100000);
  for (double r : {0.01, 0.5, 3.0}) CHECK(ball_mass(atom_at(i1), BergmanBall<double>(i1, r), p) == 1.0);
  CHECK(ball_mass(atom_at(i2), BergmanBall<double>(i1, 0.3), p) == 0.0);
  CHECK(ball_mass(atom_at(i2, 2.5), BergmanBall<double>(i1, 0.35), p) == 2.5);
  // V_0 balls are Euclidean discs of radius rho sinh 2r
  const Measure v = Measure::weighted_volume(1, 0, 3);
  const double h = 1.7, r = 0.5;
  CHECK(ball_mass(v, BergmanBall<double>(chart(0.4, h), r), p) ==
        doctest::Approx(pi * std::pow(h * std::sinh(2 * r), 2)).epsilon(0.02));
  const Measure v2 = Measure::weighted_volume(2, 0.5, 4);
  const double a = ball_mass(v2, BergmanBall<double>(TubePointd::axis(2, 1.0), 0.6), p);
  const double b = ball_mass(v2, BergmanBall<double>(TubePointd::axis(2, 0.25), 0.6), p);
  CHECK(a / b == doctest::Approx(std::pow(4.0, 3.5)).epsilon(0.05));
  CHECK(ball_mass(Measure::zero(1), BergmanBall<double>(i1, 1), p) == 0.0);
}

TEST_CASE("ball mass is additive and homogeneous") {
  CounterRng g(31, 0);
  const SamplingPlan p = plan_of(1000);
  for (int k = 0; k < 200; ++k) {
    std::vector<Atom> a, b;
    for (int j = 0; j < 6; ++j) a.push_back({testing::random_point(g, 1, 1, 0.3, 3), 0.1 + g.uniform()});
    for (int j = 0; j < 4; ++j) b.push_back({testing::random_point(g, 1, 1, 0.3, 3), 0.1 + g.uniform()});
    std::vector<Atom> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    const BergmanBall<double> ball(testing::random_point(g, 1, 1, 0.3, 3), 0.2 + g.uniform());
    const double ma = ball_mass(Measure::discrete(1, a), ball, p), mb = ball_mass(Measure::discrete(1, b), ball, p);
    REQUIRE(ball_mass(Measure::discrete(1, ab), ball, p) == doctest::Approx(ma + mb).epsilon(1e-14));
    REQUIRE(ball_mass(Measure::discrete(1, a).scaled(3), ball, p) == doctest::Approx(3 * ma).epsilon(1e-14));
  }
  // densities: scaling is exact because the samples do not change
  const Measure v = Measure::weighted_volume(1, 0.3, 3);
  const BergmanBall<double> ball(chart(0.2, 0.8), 0.7);
  CHECK(ball_mass(v.scaled(2.5), ball, plan_of(20000)) ==
        doctest::Approx(2.5 * ball_mass(v, ball, plan_of(20000))).epsilon(1e-13));
}

TEST_CASE("M_+ spot check") {
  const MplusCheck a = check_mplus(Measure::discrete(1, {{i1, 1.0}, {i2, 2.0}}), plan_of(1000));
  CHECK(a.t == 1.0);
  CHECK(a.value == doctest::Approx(1 + 2 / 1.5).epsilon(1e-14));
  CHECK(a.finite);
  const MplusCheck d = check_mplus(Measure::weighted_volume(1, 0, 3.5), plan_of(100000));
  CHECK(d.finite);
  CHECK(d.t == 3.5);
  CHECK(d.value > 0);
}

TEST_CASE("carleson_ratio examples") {
  const SamplingPlan p = plan_of(100000);
  const CarlesonParams cp(1.5, 0);
  CHECK(carleson_ratio(Measure::zero(1), cp, i1, 0.5, p) == 0.0);
  // matched V_{gamma'}: n + 1 + gamma' = 3
  const Measure v = Measure::weighted_volume(1, 1, 4);
  std::vector<double> r;
  for (double h : {0.5, 1.0, 2.0, 4.0}) r.push_back(carleson_ratio(v, cp, chart(0.3, h), 0.5, p));
  CHECK(*std::max_element(r.begin(), r.end()) / *std::min_element(r.begin(), r.end()) < 1.05);
  const Measure cloud = Measure::discrete(1, {{i1, 1.0}, {chart(0.1, 1.1), 0.5}});
  CHECK(carleson_ratio(cloud.scaled(4), cp, i1, 0.5, p) == 4 * carleson_ratio(cloud, cp, i1, 0.5, p));
}

TEST_CASE("carleson_test on a single atom") {
  const SamplingPlan p = plan_of(1000);
  const CarlesonParams cp(1, 0);
  const std::vector<TubePointd> probes = default_probe_design(1, 0.5, 5);
  const CarlesonReport rep = carleson_test(atom_at(i1), cp, 1.0, probes, p);
  CHECK(rep.probe_count == probes.size());
  CHECK(std::isfinite(rep.sup_ratio));
  CHECK(bergman_distance(rep.argmax_center, i1) < 1.0);
  // ratio = rho(a)^{-2} on D(i, 1): brute force over the same probes
  double best = 0;
  for (const auto& a : probes)
    if (bergman_distance(a, i1) < 1) best = std::max(best, std::pow(rho(a), -2.0));
  CHECK(rep.sup_ratio == doctest::Approx(best).epsilon(1e-14));
  // no probe in D(i, 1) reaches below rho = e^{-2}
  CHECK(rep.sup_ratio < std::exp(4.0));

  CHECK(carleson_test(Measure::zero(1), cp, 1.0, probes, p).sup_ratio == 0.0);
  CHECK_THROWS_AS(carleson_test(atom_at(i1), cp, 1.0, {}, p), DomainError);
}

TEST_CASE("mismatched density grows toward the boundary") {
  const CarlesonParams cp(1.5, 0);
  const auto paths = standard_paths(1);
  const auto prof = vanishing_test(Measure::weighted_volume(1, 0.25, 3.25), cp, 0.5, paths, plan_of(20000));
  const auto down = std::find_if(prof.begin(), prof.end(), [](const PathProfile& pp) {
    return pp.kind == PathKind::VerticalDown;
  });
  REQUIRE(down != prof.end());
  // exponent mismatch 2.25 - 3 = -0.75
  const double k = down->parameter.back();
  CHECK(down->value.back() / down->value.front() == doctest::Approx(std::pow(k, 0.75)).epsilon(0.05));
  CHECK(growth_verdict(prof) == Verdict::Unbounded);
}

TEST_CASE("vanishing profiles") {
  const CarlesonParams cp(1.5, 0);
  const auto paths = standard_paths(1);
  const auto zero = vanishing_test(Measure::zero(1), cp, 0.5, paths, plan_of(1000));
  for (const auto& pp : zero)
    for (double x : pp.value) CHECK(x == 0.0);
  CHECK(vanishing_verdict(zero));

  const Measure cloud = Measure::discrete(1, {{i1, 1.0}, {chart(0.5, 0.5), 1.0}, {chart(-1, 2), 0.3}});
  const auto c = vanishing_test(cloud, cp, 0.5, paths, plan_of(1000));
  CHECK(vanishing_verdict(c));
  for (const auto& pp : c) CHECK(pp.value.back() == 0.0);

  const auto m = vanishing_test(Measure::weighted_volume(1, 1, 4), cp, 0.5, paths, plan_of(20000));
  CHECK_FALSE(vanishing_verdict(m));
  CHECK(growth_verdict(m) == Verdict::Bounded);
  for (const auto& pp : m) {
    CHECK(pp.value.back() > 0);
    CHECK(pp.value.back() / pp.value.front() == doctest::Approx(1).epsilon(0.05));
  }
}

TEST_CASE("profile predicates") {
  CHECK(profile_unbounded({1, 2, 5, 20, 40}));
  CHECK_FALSE(profile_unbounded({1, 2, 5, 20, 8}));
  CHECK_FALSE(profile_unbounded({1, 1, 1, 1}));
  CHECK(profile_vanishing({1, 0.1, 1e-4, 1e-5, 1e-6}));
  CHECK(profile_vanishing({0, 0, 0}));
  CHECK_FALSE(profile_vanishing({1, 0.5, 0.4, 0.3}));
  CHECK_FALSE(profile_vanishing({1, 1e-5, 1e-6, 1e-4}));
  CHECK(std::string(to_string(Verdict::Bounded)) != to_string(Verdict::Unbounded));
}

TEST_CASE("berezin transform examples") {
  const SamplingPlan p = plan_of(1000);
  for (auto [alpha, s, t] : {std::tuple{0.0, 1.0, 2.0}, std::tuple{0.5, 2.0, 0.3}, std::tuple{-0.5, 0.7, 5.0}})
    CHECK(berezin_transform(atom_at(i1), alpha, s, t, i1, p) == doctest::Approx(1.0).epsilon(1e-14));
  // rho(2i)^2 / |rho(2i, i)|^4
  CHECK(berezin_transform(atom_at(i1), 0, 1, 2, i2, p) == doctest::Approx(4 / 5.0625).epsilon(1e-14));
  CHECK(berezin_transform(atom_at(i1), 0, 1, 2, i2, p) == doctest::Approx(0.790123).epsilon(1e-6));
  CHECK_THROWS_AS(berezin_transform(atom_at(i1), 0, 0, 2, i2, p), DomainError);
  CHECK_THROWS_AS(berezin_transform(atom_at(i1), 0, 1, 0, i2, p), DomainError);
  CHECK_THROWS_AS(berezin_transform(atom_at(i1), -1, 1, 1, i2, p), DomainError);
}

TEST_CASE("berezin transform is monotone in the measure") {
  CounterRng g(32, 0);
  const SamplingPlan p = plan_of(1000);
  for (int k = 0; k < 200; ++k) {
    std::vector<Atom> small, big;
    for (int j = 0; j < 5; ++j) {
      const TubePointd a = testing::random_point(g, 2, 1, 0.2, 5);
      const double w = 0.1 + g.uniform();
      small.push_back({a, w});
      big.push_back({a, w * (1 + g.uniform())});
    }
    big.push_back({testing::random_point(g, 2, 1, 0.2, 5), 0.5});
    const TubePointd z = testing::random_point(g, 2, 1, 0.2, 5);
    const double s = 0.5 + g.uniform(), t = 0.5 + 2 * g.uniform();
    REQUIRE(berezin_transform(Measure::discrete(2, small), 0.3, s, t, z, p) <=
            berezin_transform(Measure::discrete(2, big), 0.3, s, t, z, p));
  }
}

TEST_CASE("berezin bounded check on the matched density") {
  // B_{lambda,t}(V_{gamma'}) is constant in z for the matched exponent
  const Measure v = Measure::weighted_volume(1, 1, 4);
  const auto grid = std::vector<TubePointd>{i1, chart(1, 0.5), chart(-1, 3)};
  const BerezinCheck b = berezin_bounded_check(v, 0, 1.5, 2, grid, standard_paths(1), plan_of(40000));
  REQUIRE(b.trend.size() == 3);
  for (const auto& pp : b.trend) CHECK(pp.value.back() / pp.value.front() == doctest::Approx(1).epsilon(0.1));
  CHECK(std::isfinite(b.sup));
  CHECK_THROWS_AS(berezin_bounded_check(v, 0, 0.5, 2, grid, {}, plan_of(1000)), DomainError);
}

TEST_CASE("carleson_constant on atoms") {
  const SamplingPlan p = plan_of(1000);
  std::vector<TubePointd> anchors;
  for (double x : {-1.0, 0.0, 1.0})
    for (double h : {0.25, 0.5, 1.0, 2.0, 4.0}) anchors.push_back(chart(x, h));
  const double pp = 2, q = 3, alpha = 0;
  const CarlesonConstant c = carleson_constant(atom_at(i1), pp, q, alpha, anchors, p);
  REQUIRE(c.values.size() == anchors.size());
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    const CarlesonTestFunction g{1, pp, alpha, anchors[k]};
    CHECK(c.values[k] == doctest::Approx(std::pow(std::abs(g(i1)), q)).epsilon(1e-13));
  }
  CHECK(c.argmax == i1);
  CHECK(c.lower == *std::max_element(c.values.begin(), c.values.end()));

  const Measure cloud = Measure::discrete(1, {{i1, 1.0}, {chart(0.5, 0.5), 2.0}});
  CHECK(carleson_constant(cloud.scaled(3), pp, q, alpha, anchors, p).lower ==
        doctest::Approx(3 * carleson_constant(cloud, pp, q, alpha, anchors, p).lower).epsilon(1e-14));
  CHECK(carleson_constant(Measure::zero(1), pp, q, alpha, anchors, p).lower == 0.0);
  CHECK_THROWS_AS(carleson_constant(cloud, pp, q, alpha, {}, p), DomainError);
  CHECK_THROWS_AS(carleson_constant(cloud, 3, 2, alpha, anchors, p), DomainError);
}

TEST_CASE("carleson test functions have unit norm") {
  for (const TubePointd& a : {i1, i2, chart(1, 1.5)}) {
    const CarlesonTestFunction g{1, 2.5, 0.5, a};
    const NormEstimate e =
        norm_p_alpha(SpaceIndex(2.5, 0.5), [&](const TubePointd& w) { return g(w); }, 1,
                     plan_of(200000).centered({a}, safe_h_tail(1, 2 * 2.5, 0.5)));
    CHECK(e.value == doctest::Approx(1).epsilon(0.03));
  }
}

TEST_CASE("domination of integrals against a Carleson measure") {
  // mu = atom cloud, lambda = 1, alpha = 0: int |f|^p d mu <= C int |f|^p dV over kernel-type f
  const Measure cloud = Measure::discrete(1, {{i1, 1.0}, {chart(0.5, 0.5), 2.0}, {chart(-1, 2), 0.5}});
  const double p = 2;
  std::vector<double> ratios;
  for (const TubePointd& a : {i1, chart(0.5, 0.4), chart(3, 1), chart(0, 0.05), chart(0, 20)}) {
    const TubeFunction f = [a](const TubePointd& w) { return rho_pow(rho(w, a), -2.0); };
    const double lhs =
        cloud.integrate([&](const TubePointd& w) { return cplx(std::pow(std::abs(f(w)), p), 0); }, {}, 0,
                        plan_of(1000))
            .value.real();
    const double rhs = std::pow(norm_p_alpha(SpaceIndex(p, 0), f, 1, plan_of(200000).centered({a}, 1)).value, p);
    ratios.push_back(lhs / rhs);
  }
  const double c = *std::max_element(ratios.begin(), ratios.end());
  for (double r : ratios) CHECK(r > 0);
  // the sup Carleson ratio over D(., 1) caps the constant up to the ball geometry
  const double sup = carleson_test(cloud, CarlesonParams(1, 0), 1.0, default_probe_design(1, 1.0, 3), plan_of(1000))
                         .sup_ratio;
  CHECK(c < sup);

  // matched density: both sides are the same integral
  const Measure v = Measure::weighted_volume(1, 1, 4);
  const TubeFunction f = [](const TubePointd& w) { return rho_pow(rho(w, TubePointd::axis(1, 1.0)), -2.0); };
  const SamplingPlan pl = plan_of(100000).centered({i1}, 1);
  const double lhs =
      v.integrate([&](const TubePointd& w) { return cplx(std::norm(f(w)), 0); }, {i1}, 4, pl).value.real();
  const double rhs = integrate_tube(WeightParams(1, 1), [&](const TubePointd& w) { return cplx(std::norm(f(w)), 0); },
                                    pl)
                         .value.real();
  CHECK(lhs == doctest::Approx(rhs).epsilon(0.03));
}

TEST_CASE("zoo verdicts agree across the three indicators") {
  for (auto [n, lambda, gamma] : {std::tuple{1, 1.5, 0.0}, std::tuple{1, 1.0, 0.5}}) {
    const CarlesonParams cp(lambda, gamma);
    const auto zoo = measure_zoo(n, cp);
    REQUIRE(zoo.size() == 4);
    for (const auto& e : zoo) {
      const CarlesonIndicators ind = carleson_indicators(e.mu, cp, 0.5, plan_of(20000));
      INFO(e.name, " lambda=", lambda);
      CHECK(ind.carleson_agree());
      CHECK(ind.vanishing_agree());
      CHECK((ind.ratio == Verdict::Bounded) == e.carleson);
      CHECK(ind.ratio_vanishes == e.vanishing);
    }
  }
}
