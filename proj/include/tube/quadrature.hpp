#pragma once

// Integration over the unbounded tube against dV_alpha.
//
// Every routine works in the chart w = (x, y', |y'|^2 + h), h > 0, where
// dV_alpha = h^alpha dx dy' dh and rho(w) = h.

#include <tube/geometry.hpp>
#include <tube/params.hpp>
#include <tube/rng.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tube {

enum class Strategy {
  ImportanceCauchy,       // Cauchy in x, y'; log-logistic in h
  ImportanceExponential,  // Laplace in x, y'; exponential in h
  StratifiedGrid,         // Cauchy/log-logistic proposal driven by jittered strata
};

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

/// Shape of the importance density: an equal-weight mixture of components
/// centred at `centers` (default: the single point (0', i)). Each component
/// draws h = rho(center) * v with v log-logistic of exponent `h_tail`, then
/// x and y' with scales tied to h + rho(center).
struct Proposal {
  std::vector<TubePointd> centers;
  double h_tail = 0.5;
};

struct SamplingPlan {
  std::uint64_t samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  Strategy strategy = Strategy::ImportanceCauchy;
  Proposal proposal;

  SamplingPlan with_samples(std::uint64_t n) const {
    SamplingPlan p = *this;
    p.samples = n;
    return p;
  }
  SamplingPlan with_seed(std::uint64_t s) const {
    SamplingPlan p = *this;
    p.seed = s;
    return p;
  }
  SamplingPlan centered(std::vector<TubePointd> centers, double h_tail) const {
    SamplingPlan p = *this;
    p.proposal.centers = std::move(centers);
    p.proposal.h_tail = h_tail;
    return p;
  }
};

struct IntegralEstimate {
  cplx value{0.0, 0.0};
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  /// True when the imaginary part is not negligible against |value|; for
  /// real integrands this signals a problem.
  bool imaginary_flagged() const {
    return std::abs(value.imag()) > 1e-10 * std::abs(value);
  }
};

using TubeFunction = std::function<cplx(const TubePointd&)>;
using RealTubeFunction = std::function<double(const TubePointd&)>;

/// Worker threads used by the sampling loops (env TUBE_THREADS, default:
/// hardware concurrency). Results never depend on this value.
unsigned thread_count();

/// Unbiased Monte-Carlo estimate of the integral of f over T_B against
/// dV_alpha. Throws NumericalError on a non-finite integrand value or a
/// vanishing proposal density.
IntegralEstimate integrate_tube(const WeightParams& params, const TubeFunction& f,
                                const SamplingPlan& plan);

IntegralEstimate integrate_tube(const WeightParams& params, const RealTubeFunction& f,
                                const SamplingPlan& plan);

/// integrate_tube for a nonnegative integrand, screened for heavy tails:
/// throws DivergenceError (message prefixed by `what`) when the estimates
/// at N/4, N/2 and N samples keep growing or the relative error exceeds 1/2.
IntegralEstimate integrate_tube_checked(const WeightParams& params, const RealTubeFunction& f,
                                        const SamplingPlan& plan, const char* what);

/// Estimate of the integral of f over the Bergman ball D(center, radius)
/// against dV_alpha, sampling uniformly in (x, y', log h) over a box that
/// provably encloses the ball. StratifiedGrid jitters over a grid of the box.
IntegralEstimate integrate_ball(const WeightParams& params, const RealTubeFunction& f,
                                const BergmanBall<double>& ball, const SamplingPlan& plan);

/// V_alpha(D(center, radius)).
IntegralEstimate ball_volume(const WeightParams& params, const BergmanBall<double>& ball,
                             const SamplingPlan& plan);

/// Deterministic nested adaptive Gauss-Kronrod rule for n = 1 over the
/// rationally mapped square (x, h) in (0,1)^2, centred at `center`.
/// std_error carries the rule's error estimate, samples the number of
/// integrand evaluations.
IntegralEstimate integrate_tube_adaptive(const WeightParams& params, const TubeFunction& f,
                                         const TubePointd& center, double rel_tol = 1e-8);

/// 2^{n+1} pi^n Gamma(1+t) Gamma(r+s-t-n-1) / (Gamma(r) Gamma(s)).
double c1_constant(Index n, double r, double s, double t);

struct IdentityReport {
  IntegralEstimate measured;
  cplx predicted;
  double sigma_distance = 0.0;
};

/// Measures the two-kernel integral
///   I = int rho(w)^t / (rho(z,w)^r rho(w,u)^s) dV(w)
/// and compares it with C1(n,r,s,t) / rho(z,u)^{r+s-t-n-1}.
/// Throws DomainError outside r, s > 0, t > -1, r + s - t > n + 1, where the
/// integral is infinite.
IdentityReport verify_identity(Index n, double r, double s, double t, const TubePointd& z,
                               const TubePointd& u, const SamplingPlan& plan);

/// Log-logistic h-tail exponent giving finite variance for integrands that
/// behave like rho(w)^t |rho(z,w)|^{-s}.
double safe_h_tail(Index n, double s, double t);

struct NormEstimate {
  double value = 0.0;
  double std_error = 0.0;
  IntegralEstimate power;  // estimate of the p-th power integral
};

/// ||f||_{p,alpha} = (int |f|^p dV_alpha)^{1/p}. Throws DivergenceError when
/// the running estimate keeps growing across sample doublings.
NormEstimate norm_p_alpha(const SpaceIndex& space, const TubeFunction& f, Index n,
                          const SamplingPlan& plan);

}  // namespace tube
