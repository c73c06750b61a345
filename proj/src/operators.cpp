#include <tube/operators.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace tube {

SpacePair::SpacePair(Index n_, double p1_, double p2_, double alpha1_, double alpha2_, double xi_)
    : n(n_), p1(p1_), p2(p2_), alpha1(alpha1_), alpha2(alpha2_), xi(xi_) {
  if (n < 1) throw DomainError("SpacePair: n must be >= 1");
  if (!(p1 > 0) || !(p2 > 0)) throw DomainError("SpacePair: requires p1, p2 > 0");
  if (!(alpha1 > -1) || !(alpha2 > -1)) throw DomainError("SpacePair: requires alpha1, alpha2 > -1");
  if (!(xi > -1)) throw DomainError("SpacePair: requires xi > -1");
  const double m = kernel_exponent();
  for (auto [p, a] : {std::pair{p1, alpha1}, std::pair{p2, alpha2}})
    if (!(m > double(n) * std::max(1.0, 1 / p) + (1 + a) / p))
      throw DomainError("SpacePair: requires n + 1 + xi > n max(1, 1/p_i) + (1 + alpha_i)/p_i");
}

namespace {

double kernel_power(const Measure& mu, double xi) { return double(mu.dim()) + 1 + xi; }

std::uint64_t point_seed(std::uint64_t seed, const TubePointd& z) {
  std::uint64_t h = seed;
  for (Index j = 0; j < z.dim(); ++j) {
    h = mix64(h ^ std::bit_cast<std::uint64_t>(z.x(j)));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(z.y(j)));
  }
  return h;
}

IntegralEstimate toeplitz_estimate(const Measure& mu, double xi, const TubeFunction& f, const TubePointd& z,
                                   const std::vector<TubePointd>& centers, const SamplingPlan& plan) {
  const double m = kernel_power(mu, xi);
  const auto g = [&](const TubePointd& w) {
    const cplx fw = f(w);
    return fw == cplx(0, 0) ? fw : fw * rho_pow(rho(z, w), -m);
  };
  return mu.integrate(g, centers, m, plan);
}

bool is_plain_weighted_volume(const Measure& mu) {
  const Density& d = mu.density_part();
  return d.name == "weighted-volume" && !d.factor;
}

}  // namespace

cplx toeplitz_apply(const Measure& mu, double xi, const TubeFunction& f, const TubePointd& z,
                    const SamplingPlan& plan) {
  if (!(xi > -1)) throw DomainError("toeplitz_apply: requires xi > -1");
  detail::require_interior(z, "toeplitz_apply");
  const IntegralEstimate e = toeplitz_estimate(mu, xi, f, z, {z}, plan);
  if (!mu.is_discrete() && std::abs(e.value) > 0 && e.std_error > 0.5 * std::abs(e.value))
    throw DivergenceError("toeplitz_apply: estimate dominated by noise (likely non-integrable)");
  return e.value;
}

double berezin_op_apply(const Measure& mu, double xi, const TubeFunction& f, const TubePointd& z,
                        const SamplingPlan& plan) {
  if (!(xi > -1)) throw DomainError("berezin_op_apply: requires xi > -1");
  detail::require_interior(z, "berezin_op_apply");
  const double m = kernel_power(mu, xi);
  const auto g = [&](const TubePointd& w) {
    const double fw = std::abs(f(w));
    return fw == 0 ? 0.0 : fw * std::pow(std::abs(rho(z, w)), -m);
  };
  return std::max(0.0, mu.integrate_positive(g, {z}, m, plan, "berezin_op_apply").value.real());
}

TestFunction TestFunction::kernel_type(const TubePointd& a, double xi, double p, double alpha) {
  detail::require_interior(a, "TestFunction");
  const double n = double(a.dim());
  if (!(xi > -1) || !(p > 0) || !(alpha > -1))
    throw DomainError("TestFunction: requires xi > -1, p > 0, alpha > -1");
  if (!((n + 1 + xi) * p > n + 1 + alpha))
    throw DomainError("TestFunction: kernel type requires (n+1+xi) p > n + 1 + alpha");
  TestFunction tf;
  tf.kind = Kind::KernelType;
  tf.n = a.dim();
  tf.a = a;
  tf.xi = xi;
  tf.p = p;
  tf.alpha = alpha;
  return tf;
}

TestFunction TestFunction::weighted(const TubePointd& a, double p, double q, double t, double alpha) {
  detail::require_interior(a, "TestFunction");
  if (!(p > 0) || !(q > 0) || !(t > 0) || !(alpha > -1))
    throw DomainError("TestFunction: weighted requires p, q, t > 0 and alpha > -1");
  TestFunction tf;
  tf.kind = Kind::Weighted;
  tf.n = a.dim();
  tf.a = a;
  tf.p = p;
  tf.q = q;
  tf.t = t;
  tf.alpha = alpha;
  return tf;
}

TestFunction TestFunction::superposition(std::vector<TubePointd> anchors, std::vector<double> coefficients,
                                         double s, double xi, double p, double alpha) {
  if (anchors.empty() || anchors.size() != coefficients.size())
    throw DomainError("TestFunction: superposition needs matching nonempty anchors and coefficients");
  for (const auto& a : anchors) detail::require_interior(a, "TestFunction");
  const double n = double(anchors.front().dim());
  if (!(xi > -1) || !(p > 0) || !(alpha > -1) || !((n + 1 + xi) * p > n + 1 + alpha))
    throw DomainError("TestFunction: superposition requires (n+1+xi) p > n + 1 + alpha");
  if (!(s >= 0 && s < 1)) throw DomainError("TestFunction: Rademacher parameter must lie in [0, 1)");
  TestFunction tf;
  tf.kind = Kind::LatticeSuperposition;
  tf.n = anchors.front().dim();
  tf.anchors = std::move(anchors);
  tf.coefficients = std::move(coefficients);
  tf.s = s;
  tf.xi = xi;
  tf.p = p;
  tf.alpha = alpha;
  return tf;
}

cplx TestFunction::operator()(const TubePointd& z) const {
  const double nn = double(n);
  switch (kind) {
    case Kind::KernelType:
      return rho_pow(rho(z, a), -(nn + 1 + xi));
    case Kind::Weighted:
      return std::pow(rho(a), t / q) * rho_pow(rho(z, a), -((nn + 1 + alpha) / p + t / q));
    case Kind::LatticeSuperposition: {
      const double m = nn + 1 + xi;
      const double e = m - (nn + 1 + alpha) / p;
      cplx sum(0, 0);
      for (std::size_t k = 0; k < anchors.size(); ++k)
        sum += coefficients[k] * double(rademacher(unsigned(k), s)) * std::pow(rho(anchors[k]), e) *
               rho_pow(rho(z, anchors[k]), -m);
      return sum;
    }
  }
  return {};
}

std::vector<TubePointd> TestFunction::centers() const {
  if (kind == Kind::LatticeSuperposition) return anchors;
  return {a};
}

cplx test_function_eval(const TestFunction& tf, const TubePointd& z) { return tf(z); }

OperatorNormEstimate operator_norm_estimate(const Measure& mu, const SpacePair& sp,
                                            const std::vector<TubePointd>& probes, const SamplingPlan& plan,
                                            const OperatorNormOptions& opts) {
  if (!(sp.p1 <= sp.p2))
    throw DomainError("operator_norm_estimate: requires p1 <= p2 (bounded-operator regime, lambda >= 1)");
  if (sp.n != mu.dim()) throw DomainError("operator_norm_estimate: dimension mismatch");
  if (probes.empty()) throw DomainError("operator_norm_estimate: empty probe set");
  const CarlesonParams cp(sp.lambda(), sp.gamma());
  OperatorNormEstimate out;
  out.argmax = probes.front();
  if (mu.is_zero()) {
    out.per_probe.assign(probes.size(), 0.0);
    return out;
  }

  const Index n = sp.n;
  const double m = sp.kernel_exponent();
  const SpaceIndex in_space(sp.p1, sp.alpha1), out_space(sp.p2, sp.alpha2);
  const std::uint64_t inner_samples =
      std::max<std::uint64_t>(64, std::uint64_t(std::sqrt(double(plan.samples))));

  out.lower = -1;
  for (const TubePointd& a : probes) {
    const TestFunction f = TestFunction::kernel_type(a, sp.xi, sp.p1, sp.alpha1);
    const double fn =
        norm_p_alpha(in_space, f, n, plan.centered({a}, safe_h_tail(n, m * sp.p1, sp.alpha1))).value;

    TubeFunction Tf;
    std::vector<TubePointd> centers;
    if (mu.is_discrete()) {
      // T f(z) = sum_k w_k f(b_k) rho(z, b_k)^{-m}
      struct Term {
        TubePointd b;
        cplx c;
      };
      std::vector<Term> terms;
      for (const auto& atom : mu.atoms()) terms.push_back({atom.z, atom.weight * f(atom.z)});
      Tf = [terms, m](const TubePointd& z) {
        cplx s(0, 0);
        for (const auto& t : terms) s += t.c * rho_pow(rho(z, t.b), -m);
        return s;
      };
      // proposal centred at the atoms carrying most of the norm
      std::vector<std::pair<double, std::size_t>> mass;
      for (std::size_t k = 0; k < terms.size(); ++k)
        mass.push_back({std::abs(terms[k].c) * std::pow(rho(terms[k].b), (double(n) + 1 + sp.alpha2) / sp.p2 - m), k});
      std::sort(mass.begin(), mass.end(), [](auto& x, auto& y) { return x.first > y.first; });
      for (std::size_t k = 0; k < std::min<std::size_t>(16, mass.size()); ++k) centers.push_back(terms[mass[k].second].b);
    } else if (is_plain_weighted_volume(mu)) {
      // int rho(w,a)^{-m} rho(z,w)^{-m} rho(w)^beta dV(w) is the two-kernel identity
      const double beta = mu.density_part().alpha;
      const double e = 2 * m - beta - double(n) - 1;
      if (!(e > 0)) throw DivergenceError("operator_norm_estimate: T f_a diverges for this weighted volume");
      const cplx c = mu.density_part().scale * c1_constant(n, m, m, beta);
      Tf = [c, a, e](const TubePointd& z) { return c * rho_pow(rho(z, a), -e); };
      centers = {a};
    } else {
      // nested estimate, independent seed per outer node
      Tf = [&mu, &sp, f, plan, inner_samples, a](const TubePointd& z) {
        const SamplingPlan inner = plan.with_samples(inner_samples).with_seed(point_seed(plan.seed, z));
        return toeplitz_estimate(mu, sp.xi, f, z, {z, a}, inner).value;
      };
      centers = {a};
    }
    const double Tn =
        norm_p_alpha(out_space, Tf, n, plan.centered(centers, safe_h_tail(n, m * sp.p2, sp.alpha2))).value;
    const double v = fn > 0 ? Tn / fn : 0.0;
    out.per_probe.push_back(v);
    if (v > out.lower) {
      out.lower = v;
      out.argmax = a;
    }
  }

  const std::vector<TubePointd> sprobes =
      opts.surrogate_probes.empty() ? default_probe_design(n, 0.5, plan.seed) : opts.surrogate_probes;
  out.carleson_surrogate =
      carleson_test(mu, cp, opts.ball_radius, sprobes, plan.with_samples(opts.surrogate_samples)).sup_ratio;
  out.ratio = out.carleson_surrogate > 0 ? out.lower / out.carleson_surrogate : 0.0;
  return out;
}

SequenceCriterion sequence_criterion(const Measure& mu, const SpacePair& sp, const Lattice& lat,
                                     const SamplingPlan& plan) {
  if (!(sp.p2 < sp.p1)) throw DomainError("sequence_criterion: requires p2 < p1 (lambda < 1)");
  if (sp.n != mu.dim() || lat.region.n != mu.dim()) throw DomainError("sequence_criterion: dimension mismatch");
  SequenceCriterion out;
  const double lambda = sp.lambda();
  out.exponent = 1 / (1 - lambda);
  const double e = (double(sp.n) + 1 + sp.gamma()) * lambda;
  double acc = 0;
  for (std::size_t k = 0; k < lat.points.size(); ++k) {
    const TubePointd& a = lat.points[k];
    SequenceRow row;
    row.k = k;
    row.rho = rho(a);
    row.ball_mass = mu.is_zero() ? 0.0 : ball_mass(mu, BergmanBall<double>(a, lat.r), plan);
    row.summand = row.ball_mass / std::pow(row.rho, e);
    acc += std::pow(row.summand, out.exponent);
    out.summand_profile.push_back(row);
  }
  out.norm = std::pow(acc, 1 / out.exponent);
  return out;
}

CrossoverScan sequence_crossover(const SpacePair& sp, const Region& region, double r,
                                 const std::vector<double>& betas, const SamplingPlan& plan) {
  if (!(sp.p2 < sp.p1)) throw DomainError("sequence_crossover: requires p2 < p1 (lambda < 1)");
  if (betas.size() < 2 || !std::is_sorted(betas.begin(), betas.end()))
    throw DomainError("sequence_crossover: needs at least two increasing exponents");
  constexpr int kSteps = 4;
  const double step = 4.0;
  const Region big(region.n, region.x_bound, region.yprime_bound, region.h_min,
                   region.h_max * std::pow(step, kSteps - 1));
  const Lattice lat = generate_lattice(big, r, 500, plan.seed);
  std::vector<TubePointd> inside;
  for (const auto& a : lat.points)
    if (big.contains(a)) inside.push_back(a);
  const double lambda = sp.lambda();
  const double q = 1 / (1 - lambda);
  const double e = (double(sp.n) + 1 + sp.gamma()) * lambda;

  CrossoverScan out;
  out.betas = betas;
  out.crossover = std::numeric_limits<double>::quiet_NaN();
  for (double beta : betas) {
    const Measure mu = Measure::weighted_volume(sp.n, beta, double(sp.n) + 2 + beta);
    // increments of the q-th power sums truncated at rho <= h_max * step^j,
    // accumulated per band: differencing the cumulative sums cancels badly
    // once the tail is small against the bulk
    std::vector<double> band(kSteps, 0.0);
    for (const auto& a : inside) {
      const double h = rho(a);
      int j = 0;
      while (j < kSteps - 1 && h > region.h_max * std::pow(step, j)) ++j;
      band[j] += std::pow(ball_mass(mu, BergmanBall<double>(a, r), plan) / std::pow(h, e), q);
    }
    const double d1 = band[kSteps - 2];
    const double d2 = band[kSteps - 1];
    out.growth.push_back(d1 > 0 && d2 > 0 ? std::log(d2 / d1) : std::numeric_limits<double>::quiet_NaN());
  }
  for (std::size_t i = 0; i + 1 < betas.size(); ++i) {
    const double g0 = out.growth[i], g1 = out.growth[i + 1];
    if (std::isfinite(g0) && std::isfinite(g1) && g0 < 0 && g1 >= 0) {
      out.crossover = betas[i] + (betas[i + 1] - betas[i]) * (-g0) / (g1 - g0);
      break;
    }
  }
  return out;
}

int rademacher(unsigned k, double t) {
  double u = std::ldexp(t, int(k));
  u -= std::floor(u);
  return u < 0.5 ? 1 : -1;
}

std::pair<double, double> khinchine_band(double p) {
  if (!(p > 0)) throw DomainError("khinchine_band: requires p > 0");
  // Gaussian moment constant B_p^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi), valid
  // for complex coefficients when p >= 2; below 2 the lower bound follows from
  // Hoelder between L^p and L^4 with B_4^4 = 3.
  if (p >= 2) {
    const double bp = std::exp(0.5 * p * std::log(2.0) + std::lgamma((p + 1) / 2)) / std::sqrt(std::numbers::pi);
    return {1.0, bp};
  }
  const double theta = (1.0 / 2 - 1.0 / 4) / (1 / p - 1.0 / 4);
  const double lower = std::pow(3.0, -0.25 * p * (1 - theta) / theta);
  return {lower, 1.0};
}

KhinchineReport khinchine_check(const std::vector<cplx>& c, double p, std::uint64_t samples,
                                std::uint64_t seed) {
  if (c.empty()) throw DomainError("khinchine_check: empty coefficient list");
  if (!(p > 0)) throw DomainError("khinchine_check: requires p > 0");
  if (samples == 0) throw DomainError("khinchine_check: samples must be >= 1");
  KhinchineReport rep;
  double l2 = 0;
  for (const auto& x : c) l2 += std::norm(x);
  rep.l2_power = std::pow(l2, p / 2);
  CounterRng rng(seed, 0x4b48'494eULL);
  std::vector<double> vals(samples);
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double t = (double(i) + rng.uniform()) / double(samples);
    cplx s(0, 0);
    for (std::size_t j = 0; j < c.size(); ++j) s += double(rademacher(unsigned(j), t)) * c[j];
    vals[i] = std::pow(std::abs(s), p);
  }
  // pairwise summation keeps the average reproducible to the last bit
  auto sum = [&](auto&& self, std::size_t lo, std::size_t hi) -> double {
    if (hi - lo <= 8) {
      double s = 0;
      for (std::size_t i = lo; i < hi; ++i) s += vals[i];
      return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return self(self, lo, mid) + self(self, mid, hi);
  };
  rep.mid = sum(sum, 0, samples) / double(samples);
  rep.ratio = rep.l2_power > 0 ? rep.mid / rep.l2_power : 0.0;
  rep.band = khinchine_band(p);
  rep.in_band = rep.l2_power > 0 && rep.ratio >= rep.band.first * (1 - 1e-9) &&
                rep.ratio <= rep.band.second * (1 + 1e-9);
  return rep;
}

}  // namespace tube
