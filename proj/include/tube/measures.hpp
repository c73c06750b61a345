#pragma once

// Positive measures on T_B, ball masses, Carleson and vanishing-Carleson
// indicators, and Berezin-type transforms.

#include <tube/geometry.hpp>
#include <tube/params.hpp>
#include <tube/quadrature.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tube {

struct Atom {
  TubePointd z;
  double weight = 1.0;
};

/// d mu = scale * factor(z) * rho(z)^alpha dV for a registered density.
struct Density {
  std::string name;
  std::map<std::string, double> params;
  double alpha = 0.0;                             // > -1, drives the importance proposal
  std::function<double(const TubePointd&)> factor;  // empty means 1
  double scale = 1.0;
  double mplus_t = 0.0;  // declared exponent with int |rho(., i)|^{-t} d mu < infinity

  double factor_at(const TubePointd& z) const { return factor ? factor(z) : 1.0; }
};

/// Builds the (alpha, factor) part of a density from its parameters.
using DensityFactory = std::function<Density(const std::map<std::string, double>& params)>;

/// Registers a named density. "weighted-volume" (parameter "beta": the measure
/// V_beta) is built in.
void register_density(const std::string& name, DensityFactory factory);
std::vector<std::string> density_names();

class Measure {
 public:
  /// The zero measure on T_B subset C^n.
  static Measure zero(Index n);
  static Measure discrete(Index n, std::vector<Atom> atoms);
  /// Registered density; throws DomainError for unknown names or bad parameters.
  static Measure density(Index n, const std::string& name, const std::map<std::string, double>& params,
                         double mplus_t);
  /// V_beta = rho^beta dV.
  static Measure weighted_volume(Index n, double beta, double mplus_t);

  Index dim() const { return n_; }
  bool is_discrete() const { return !density_.has_value(); }
  bool is_zero() const { return is_discrete() && atoms_.empty(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Density& density_part() const;

  /// c * mu for c >= 0.
  Measure scaled(double c) const;

  /// int g d mu. Exact sum for atoms. For densities a Monte-Carlo estimate
  /// against dV_alpha, with the proposal centred at `centers` and its h-tail
  /// chosen for integrands decaying like |rho(., center)|^{-decay}.
  IntegralEstimate integrate(const TubeFunction& g, const std::vector<TubePointd>& centers, double decay,
                             const SamplingPlan& plan) const;

  /// Nonnegative integrand version; densities go through the divergence
  /// screen and throw DivergenceError on a heavy tail.
  IntegralEstimate integrate_positive(const RealTubeFunction& g, const std::vector<TubePointd>& centers,
                                      double decay, const SamplingPlan& plan, const char* what) const;

 private:
  Index n_ = 1;
  std::vector<Atom> atoms_;
  std::optional<Density> density_;
};

struct MplusCheck {
  double t = 0.0;
  double value = 0.0;       // int |rho(z, i)|^{-t} d mu
  double std_error = 0.0;
  bool finite = true;
  std::string warning;      // set when the density's running estimate diverges
};

/// Spot check of M_+ membership at the declared exponent (atoms: t = 1, exact).
MplusCheck check_mplus(const Measure& mu, const SamplingPlan& plan);

/// lambda >= 1, gamma > -1.
struct CarlesonParams {
  double lambda = 1.0;
  double gamma = 0.0;

  CarlesonParams() = default;
  CarlesonParams(double lambda_, double gamma_);

  /// (n + 1 + gamma) * lambda, the exponent of rho(a) in the ratio.
  double exponent(Index n) const { return (double(n) + 1.0 + gamma) * lambda; }
};

/// mu(D(ball)); exact for atoms, quadrature for densities.
IntegralEstimate ball_mass_estimate(const Measure& mu, const BergmanBall<double>& ball,
                                    const SamplingPlan& plan);
double ball_mass(const Measure& mu, const BergmanBall<double>& ball, const SamplingPlan& plan);

/// mu(D(a, r)) / rho(a)^{(n+1+gamma) lambda}.
double carleson_ratio(const Measure& mu, const CarlesonParams& cp, const TubePointd& a, double r,
                      const SamplingPlan& plan);

/// Values of a quantity at the points of one boundary path.
struct PathProfile {
  PathKind kind = PathKind::VerticalDown;
  std::vector<double> parameter;
  std::vector<double> value;
};

struct CarlesonReport {
  double sup_ratio = 0.0;
  TubePointd argmax_center;
  std::size_t probe_count = 0;
  std::optional<std::vector<PathProfile>> vanishing_profile;
};

/// Sup of carleson_ratio over the probe centres. Throws DomainError on an
/// empty probe set. The sup is relative to the probes only.
CarlesonReport carleson_test(const Measure& mu, const CarlesonParams& cp, double r,
                             const std::vector<TubePointd>& probes, const SamplingPlan& plan);

/// Lattice points of the default region plus the points of the standard
/// boundary paths: the probe design behind the Carleson verdicts.
std::vector<TubePointd> default_probe_design(Index n, double r, std::uint64_t seed);

/// B_{s,t}(mu)(z) = rho(z)^t int |rho(z, w)|^{-((n+1+alpha)s + t)} d mu(w). Requires s, t > 0.
double berezin_transform(const Measure& mu, double alpha, double s, double t, const TubePointd& z,
                         const SamplingPlan& plan);

struct BerezinCheck {
  double sup = 0.0;
  TubePointd argmax;
  std::vector<PathProfile> trend;
};

/// Sup of B_{lambda,t}(mu) over `grid` and the points of `paths`, with the
/// per-path trend.
BerezinCheck berezin_bounded_check(const Measure& mu, double alpha, double lambda, double t,
                                   const std::vector<TubePointd>& grid,
                                   const std::vector<BoundaryPath>& paths, const SamplingPlan& plan);

/// carleson_ratio along each path.
std::vector<PathProfile> vanishing_test(const Measure& mu, const CarlesonParams& cp, double r,
                                        const std::vector<BoundaryPath>& paths, const SamplingPlan& plan);

/// The normalised test function
///   g_a(w) = rho(a)^{(n+1+alpha)/p} rho(w, a)^{-2(n+1+alpha)/p} / ||.||_{p,alpha},
/// whose norm does not depend on a.
struct CarlesonTestFunction {
  Index n = 1;
  double p = 2.0;
  double alpha = 0.0;
  TubePointd a;

  cplx operator()(const TubePointd& w) const;
  /// ||rho(a)^{..} rho(., a)^{..}||_{p,alpha} in closed form.
  double raw_norm() const;
};

struct CarlesonConstant {
  double lower = 0.0;  // sup over the family of int |g_a|^q d mu
  TubePointd argmax;
  std::vector<double> values;  // one per anchor, in family order
};

/// Lower estimate of ||mu||_{lambda,alpha} = sup_{||f||_{p,alpha} <= 1} int |f|^q d mu
/// over the family {g_a : a in anchors}. Requires q / p >= 1 and a nonempty family.
CarlesonConstant carleson_constant(const Measure& mu, double p, double q, double alpha,
                                   const std::vector<TubePointd>& anchors, const SamplingPlan& plan);

/// A profile blows up when its last value exceeds `factor` times its first
/// and its last three values are non-decreasing.
bool profile_unbounded(const std::vector<double>& v, double factor = 10.0);

/// A profile vanishes when its last three values are non-increasing and the
/// last is below eps_rel times the profile maximum (an identically zero
/// profile vanishes).
bool profile_vanishing(const std::vector<double>& v, double eps_rel = 1e-3);

enum class Verdict { Bounded, Unbounded };
const char* to_string(Verdict v);

/// Unbounded when any path profile blows up.
Verdict growth_verdict(const std::vector<PathProfile>& profiles, double factor = 10.0);
/// True when every path profile vanishes.
bool vanishing_verdict(const std::vector<PathProfile>& profiles, double eps_rel = 1e-3);

struct ZooEntry {
  std::string name;
  Measure mu;
  bool carleson = false;   // expected verdicts
  bool vanishing = false;
};

/// Atom at (0', i), a compact cloud of atoms, V_{gamma'} with the matched
/// exponent n + 1 + gamma' = (n+1+gamma) lambda, and V_{gamma' - 1/2}.
std::vector<ZooEntry> measure_zoo(Index n, const CarlesonParams& cp);

}  // namespace tube
