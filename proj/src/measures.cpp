#include <tube/lattice.hpp>
#include <tube/measures.hpp>

#include <algorithm>
#include <mutex>

namespace tube {

namespace {

std::map<std::string, DensityFactory>& registry() {
  static std::map<std::string, DensityFactory> r = [] {
    std::map<std::string, DensityFactory> m;
    m["weighted-volume"] = [](const std::map<std::string, double>& params) {
      auto it = params.find("beta");
      if (it == params.end()) throw DomainError("weighted-volume: missing parameter \"beta\"");
      if (params.size() != 1) throw DomainError("weighted-volume: only parameter \"beta\" is accepted");
      if (!(it->second > -1)) throw DomainError("weighted-volume: beta must be > -1");
      Density d;
      d.alpha = it->second;
      return d;
    };
    return m;
  }();
  return r;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

TubePointd base_point(Index n) { return TubePointd::axis(n, 1.0); }

}  // namespace

void register_density(const std::string& name, DensityFactory factory) {
  if (name.empty() || !factory) throw DomainError("register_density: empty name or factory");
  std::lock_guard lock(registry_mutex());
  registry()[name] = std::move(factory);
}

std::vector<std::string> density_names() {
  std::lock_guard lock(registry_mutex());
  std::vector<std::string> out;
  for (const auto& [name, f] : registry()) out.push_back(name);
  return out;
}

Measure Measure::zero(Index n) { return discrete(n, {}); }

Measure Measure::discrete(Index n, std::vector<Atom> atoms) {
  if (n < 1) throw DomainError("Measure: n must be >= 1");
  for (const auto& a : atoms) {
    if (a.z.dim() != n) throw DomainError("Measure: atom dimension mismatch");
    detail::require_interior(a.z, "Measure atom");
    if (!(a.weight > 0) || !std::isfinite(a.weight))
      throw DomainError("Measure: atom weights must be finite and > 0");
  }
  Measure m;
  m.n_ = n;
  m.atoms_ = std::move(atoms);
  return m;
}

Measure Measure::density(Index n, const std::string& name, const std::map<std::string, double>& params,
                         double mplus_t) {
  if (n < 1) throw DomainError("Measure: n must be >= 1");
  if (!(mplus_t > 0)) throw DomainError("Measure: declared M_+ exponent must be > 0");
  DensityFactory factory;
  {
    std::lock_guard lock(registry_mutex());
    auto it = registry().find(name);
    if (it == registry().end()) throw DomainError("Measure: unknown density \"" + name + "\"");
    factory = it->second;
  }
  Density d = factory(params);
  if (!(d.alpha > -1)) throw DomainError("Measure: density weight exponent must be > -1");
  d.name = name;
  d.params = params;
  d.mplus_t = mplus_t;
  Measure m;
  m.n_ = n;
  m.density_ = std::move(d);
  return m;
}

Measure Measure::weighted_volume(Index n, double beta, double mplus_t) {
  return density(n, "weighted-volume", {{"beta", beta}}, mplus_t);
}

const Density& Measure::density_part() const {
  if (!density_) throw DomainError("Measure: not a density");
  return *density_;
}

Measure Measure::scaled(double c) const {
  if (!(c >= 0) || !std::isfinite(c)) throw DomainError("Measure::scaled: factor must be finite and >= 0");
  Measure m = *this;
  if (c == 0) return zero(n_);
  if (density_) {
    m.density_->scale *= c;
  } else {
    for (auto& a : m.atoms_) a.weight *= c;
  }
  return m;
}

IntegralEstimate Measure::integrate(const TubeFunction& g, const std::vector<TubePointd>& centers,
                                    double decay, const SamplingPlan& plan) const {
  IntegralEstimate est;
  if (!density_) {
    for (const auto& a : atoms_) est.value += a.weight * g(a.z);
    return est;
  }
  const Density& d = *density_;
  SamplingPlan pl = plan.centered(centers, safe_h_tail(n_, decay, d.alpha));
  est = integrate_tube(
      WeightParams(n_, d.alpha), TubeFunction([&](const TubePointd& w) { return d.factor_at(w) * g(w); }), pl);
  est.value *= d.scale;
  est.std_error *= d.scale;
  return est;
}

IntegralEstimate Measure::integrate_positive(const RealTubeFunction& g, const std::vector<TubePointd>& centers,
                                             double decay, const SamplingPlan& plan, const char* what) const {
  IntegralEstimate est;
  if (!density_) {
    double s = 0;
    for (const auto& a : atoms_) s += a.weight * g(a.z);
    est.value = s;
    return est;
  }
  const Density& d = *density_;
  SamplingPlan pl = plan.centered(centers, safe_h_tail(n_, decay, d.alpha));
  est = integrate_tube_checked(
      WeightParams(n_, d.alpha), RealTubeFunction([&](const TubePointd& w) { return d.factor_at(w) * g(w); }),
      pl, what);
  est.value *= d.scale;
  est.std_error *= d.scale;
  return est;
}

MplusCheck check_mplus(const Measure& mu, const SamplingPlan& plan) {
  MplusCheck out;
  const TubePointd i = base_point(mu.dim());
  if (mu.is_discrete()) {
    out.t = 1.0;
    for (const auto& a : mu.atoms()) out.value += a.weight / std::abs(rho(a.z, i));
    return out;
  }
  out.t = mu.density_part().mplus_t;
  const double t = out.t;
  try {
    const IntegralEstimate e = mu.integrate_positive(
        [&](const TubePointd& w) { return std::pow(std::abs(rho(w, i)), -t); }, {i}, t, plan, "check_mplus");
    out.value = e.value.real();
    out.std_error = e.std_error;
  } catch (const DivergenceError& err) {
    out.finite = false;
    out.warning = err.what();
  }
  return out;
}

CarlesonParams::CarlesonParams(double lambda_, double gamma_) : lambda(lambda_), gamma(gamma_) {
  if (!(lambda >= 1)) throw DomainError("CarlesonParams: requires lambda >= 1");
  if (!(gamma > -1)) throw DomainError("CarlesonParams: requires gamma > -1");
}

IntegralEstimate ball_mass_estimate(const Measure& mu, const BergmanBall<double>& ball,
                                    const SamplingPlan& plan) {
  if (ball.center.dim() != mu.dim()) throw DomainError("ball_mass: dimension mismatch");
  IntegralEstimate est;
  if (mu.is_discrete()) {
    double s = 0;
    for (const auto& a : mu.atoms())
      if (ball.contains(a.z)) s += a.weight;
    est.value = s;
    return est;
  }
  const Density& d = mu.density_part();
  est = integrate_ball(WeightParams(mu.dim(), d.alpha),
                       RealTubeFunction([&](const TubePointd& w) { return d.factor_at(w); }), ball, plan);
  est.value *= d.scale;
  est.std_error *= d.scale;
  return est;
}

double ball_mass(const Measure& mu, const BergmanBall<double>& ball, const SamplingPlan& plan) {
  return std::max(0.0, ball_mass_estimate(mu, ball, plan).value.real());
}

double carleson_ratio(const Measure& mu, const CarlesonParams& cp, const TubePointd& a, double r,
                      const SamplingPlan& plan) {
  detail::require_interior(a, "carleson_ratio");
  return ball_mass(mu, BergmanBall<double>(a, r), plan) / std::pow(rho(a), cp.exponent(mu.dim()));
}

CarlesonReport carleson_test(const Measure& mu, const CarlesonParams& cp, double r,
                             const std::vector<TubePointd>& probes, const SamplingPlan& plan) {
  if (probes.empty()) throw DomainError("carleson_test: empty probe set");
  CarlesonReport rep;
  rep.probe_count = probes.size();
  rep.argmax_center = probes.front();
  rep.sup_ratio = -1;
  for (const auto& a : probes) {
    const double v = carleson_ratio(mu, cp, a, r, plan);
    if (v > rep.sup_ratio) {
      rep.sup_ratio = v;
      rep.argmax_center = a;
    }
  }
  return rep;
}

std::vector<TubePointd> default_probe_design(Index n, double r, std::uint64_t seed) {
  const Lattice lat = generate_lattice(Region::default_region(n), r, n == 1 ? 2000 : 4000, seed);
  std::vector<TubePointd> out = lat.points;
  for (const auto& path : standard_paths(n))
    for (std::size_t i = 0; i < path.size(); ++i) out.push_back(path.at(i));
  return out;
}

double berezin_transform(const Measure& mu, double alpha, double s, double t, const TubePointd& z,
                         const SamplingPlan& plan) {
  if (!(s > 0) || !(t > 0)) throw DomainError("berezin_transform: requires s, t > 0");
  if (!(alpha > -1)) throw DomainError("berezin_transform: requires alpha > -1");
  detail::require_interior(z, "berezin_transform");
  const double S = (double(mu.dim()) + 1 + alpha) * s + t;
  const IntegralEstimate e = mu.integrate_positive(
      [&](const TubePointd& w) { return std::pow(std::abs(rho(z, w)), -S); }, {z}, S, plan, "berezin_transform");
  return std::pow(rho(z), t) * std::max(0.0, e.value.real());
}

BerezinCheck berezin_bounded_check(const Measure& mu, double alpha, double lambda, double t,
                                   const std::vector<TubePointd>& grid,
                                   const std::vector<BoundaryPath>& paths, const SamplingPlan& plan) {
  if (!(lambda >= 1)) throw DomainError("berezin_bounded_check: requires lambda >= 1");
  if (!(t > 0)) throw DomainError("berezin_bounded_check: requires t > 0");
  BerezinCheck out;
  out.sup = -1;
  auto visit = [&](const TubePointd& z) {
    const double v = berezin_transform(mu, alpha, lambda, t, z, plan);
    if (v > out.sup) {
      out.sup = v;
      out.argmax = z;
    }
    return v;
  };
  for (const auto& z : grid) visit(z);
  for (const auto& path : paths) {
    PathProfile prof{path.kind, path.parameters, {}};
    for (std::size_t i = 0; i < path.size(); ++i) prof.value.push_back(visit(path.at(i)));
    out.trend.push_back(std::move(prof));
  }
  out.sup = std::max(out.sup, 0.0);
  return out;
}

std::vector<PathProfile> vanishing_test(const Measure& mu, const CarlesonParams& cp, double r,
                                        const std::vector<BoundaryPath>& paths, const SamplingPlan& plan) {
  std::vector<PathProfile> out;
  for (const auto& path : paths) {
    PathProfile prof{path.kind, path.parameters, {}};
    for (std::size_t i = 0; i < path.size(); ++i) prof.value.push_back(carleson_ratio(mu, cp, path.at(i), r, plan));
    out.push_back(std::move(prof));
  }
  return out;
}

cplx CarlesonTestFunction::operator()(const TubePointd& w) const {
  const double m = double(n) + 1 + alpha;
  return std::pow(rho(a), m / p) * rho_pow(rho(w, a), -2 * m / p) / raw_norm();
}

double CarlesonTestFunction::raw_norm() const {
  // ||.||^p = rho(a)^m int rho^alpha |rho(., a)|^{-2m} dV = C1(n, m, m, alpha)
  const double m = double(n) + 1 + alpha;
  return std::pow(c1_constant(n, m, m, alpha), 1 / p);
}

CarlesonConstant carleson_constant(const Measure& mu, double p, double q, double alpha,
                                   const std::vector<TubePointd>& anchors, const SamplingPlan& plan) {
  if (anchors.empty()) throw DomainError("carleson_constant: empty test family");
  if (!(p > 0) || !(q > 0)) throw DomainError("carleson_constant: requires p, q > 0");
  if (!(q / p >= 1)) throw DomainError("carleson_constant: requires lambda = q/p >= 1");
  if (!(alpha > -1)) throw DomainError("carleson_constant: requires alpha > -1");
  CarlesonConstant out;
  out.argmax = anchors.front();
  out.lower = -1;
  const double decay = 2 * (double(mu.dim()) + 1 + alpha) * q / p;
  for (const auto& a : anchors) {
    const CarlesonTestFunction g{mu.dim(), p, alpha, a};
    const IntegralEstimate e = mu.integrate_positive(
        [&](const TubePointd& w) { return std::pow(std::abs(g(w)), q); }, {a}, decay, plan, "carleson_constant");
    const double v = std::max(0.0, e.value.real());
    out.values.push_back(v);
    if (v > out.lower) {
      out.lower = v;
      out.argmax = a;
    }
  }
  return out;
}

bool profile_unbounded(const std::vector<double>& v, double factor) {
  if (v.size() < 3) return false;
  const std::size_t k = v.size();
  const bool rising = v[k - 3] <= v[k - 2] && v[k - 2] <= v[k - 1];
  return rising && v[k - 1] > factor * v.front() && v[k - 1] > 0;
}

bool profile_vanishing(const std::vector<double>& v, double eps_rel) {
  if (v.size() < 3) return false;
  const double mx = *std::max_element(v.begin(), v.end());
  if (mx <= 0) return true;
  const std::size_t k = v.size();
  const bool falling = v[k - 3] >= v[k - 2] && v[k - 2] >= v[k - 1];
  return falling && v[k - 1] < eps_rel * mx;
}

const char* to_string(Verdict v) { return v == Verdict::Bounded ? "bounded" : "unbounded"; }

Verdict growth_verdict(const std::vector<PathProfile>& profiles, double factor) {
  for (const auto& p : profiles)
    if (profile_unbounded(p.value, factor)) return Verdict::Unbounded;
  return Verdict::Bounded;
}

bool vanishing_verdict(const std::vector<PathProfile>& profiles, double eps_rel) {
  return std::all_of(profiles.begin(), profiles.end(),
                     [&](const PathProfile& p) { return profile_vanishing(p.value, eps_rel); });
}

std::vector<ZooEntry> measure_zoo(Index n, const CarlesonParams& cp) {
  const double matched = cp.exponent(n) - (double(n) + 1);
  const double mismatched = (matched - 1) / 2;
  std::vector<Atom> cloud;
  const double xs[] = {-0.5, 0.0, 0.5, 0.0, 0.25};
  const double hs[] = {1.0, 0.5, 1.0, 2.0, 1.5};
  for (int k = 0; k < 5; ++k) {
    Vecd x = Vecd::Zero(n);
    x(n - 1) = xs[k];
    cloud.push_back({TubePointd::from_chart(x, Vecd::Zero(n - 1), hs[k]), 0.5 + 0.25 * k});
  }
  return {
      {"atom", Measure::discrete(n, {{base_point(n), 1.0}}), true, true},
      {"atom-cloud", Measure::discrete(n, std::move(cloud)), true, true},
      {"matched-density", Measure::weighted_volume(n, matched, double(n) + 2 + matched), true, false},
      {"mismatched-density", Measure::weighted_volume(n, mismatched, double(n) + 2 + mismatched), false, false},
  };
}

}  // namespace tube
