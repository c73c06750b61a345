#pragma once

// Toeplitz and Berezin-type operators, their test functions and norm
// estimates, the lattice sequence criterion, and Rademacher/Khinchine tools.

#include <tube/lattice.hpp>
#include <tube/measures.hpp>

#include <utility>
#include <vector>

namespace tube {

/// A^{p1}_{alpha1} -> A^{p2}_{alpha2} with kernel exponent n + 1 + xi.
/// Construction checks n + 1 + xi > n max(1, 1/p_i) + (1 + alpha_i)/p_i for i = 1, 2.
struct SpacePair {
  Index n = 1;
  double p1 = 2, p2 = 2;
  double alpha1 = 0, alpha2 = 0;
  double xi = 0;

  SpacePair(Index n_, double p1_, double p2_, double alpha1_, double alpha2_, double xi_);

  double lambda() const { return 1 + 1 / p1 - 1 / p2; }
  double gamma() const { return (xi + alpha1 / p1 - alpha2 / p2) / lambda(); }
  /// n + 1 + xi.
  double kernel_exponent() const { return double(n) + 1 + xi; }
};

/// T_mu^xi f(z) = int f(w) / rho(z, w)^{n+1+xi} d mu(w).
/// Throws DivergenceError when a density estimate is dominated by noise.
cplx toeplitz_apply(const Measure& mu, double xi, const TubeFunction& f, const TubePointd& z,
                    const SamplingPlan& plan);

/// B_mu^xi f(z) = int |f(w)| / |rho(z, w)|^{n+1+xi} d mu(w) >= |T_mu^xi f(z)|.
double berezin_op_apply(const Measure& mu, double xi, const TubeFunction& f, const TubePointd& z,
                        const SamplingPlan& plan);

struct TestFunction {
  enum class Kind {
    KernelType,            // rho(z, a)^{-(n+1+xi)}
    Weighted,              // rho(a)^{t/q} / rho(z, a)^{(n+1+alpha)/p + t/q}
    LatticeSuperposition,  // sum_k c_k r_k(s) rho(a_k)^{n+1+xi-(n+1+alpha)/p} / rho(z, a_k)^{n+1+xi}
  };

  Kind kind = Kind::KernelType;
  Index n = 1;
  TubePointd a;
  double xi = 0;
  double p = 2, q = 2, t = 1, alpha = 0;
  std::vector<TubePointd> anchors;
  std::vector<double> coefficients;
  double s = 0;  // Rademacher parameter

  /// Requires (n+1+xi) p > n + 1 + alpha so that the function lies in A^p_alpha.
  static TestFunction kernel_type(const TubePointd& a, double xi, double p, double alpha);
  /// Requires p, q, t > 0 and alpha > -1; the A^p_alpha norm does not depend on a.
  static TestFunction weighted(const TubePointd& a, double p, double q, double t, double alpha);
  static TestFunction superposition(std::vector<TubePointd> anchors, std::vector<double> coefficients,
                                    double s, double xi, double p, double alpha);

  cplx operator()(const TubePointd& z) const;
  /// Proposal centres for quadrature of this function.
  std::vector<TubePointd> centers() const;
};

cplx test_function_eval(const TestFunction& tf, const TubePointd& z);

struct OperatorNormEstimate {
  double lower = 0;               // sup over probes of ||T f_a|| / ||f_a||
  double carleson_surrogate = 0;  // sup carleson_ratio over the surrogate probes
  double ratio = 0;               // lower / carleson_surrogate (0 when both vanish)
  std::vector<double> per_probe;  // ||T f_a|| / ||f_a|| in probe order
  TubePointd argmax;
};

struct OperatorNormOptions {
  double ball_radius = 0.5;
  std::vector<TubePointd> surrogate_probes;  // empty: default_probe_design(n, 0.5, seed)
  std::uint64_t surrogate_samples = 20000;
};

/// Two-sided estimate in the p1 <= p2 regime. f_a is kernel-type with
/// p = p1, alpha = alpha1; both norms are computed by quadrature. T f_a is
/// exact for atoms and for V_beta (two-kernel identity); other densities get a
/// nested estimate per node with sqrt(samples) samples.
OperatorNormEstimate operator_norm_estimate(const Measure& mu, const SpacePair& sp,
                                            const std::vector<TubePointd>& probes, const SamplingPlan& plan,
                                            const OperatorNormOptions& opts = {});

struct SequenceRow {
  std::size_t k = 0;
  double ball_mass = 0;
  double rho = 0;
  double summand = 0;  // ball_mass / rho^{(n+1+gamma) lambda}
};

struct SequenceCriterion {
  double exponent = 0;  // 1 / (1 - lambda)
  double norm = 0;      // l^{exponent} norm of the summands
  std::vector<SequenceRow> summand_profile;
};

/// {mu(D(a_k, r)) / rho(a_k)^{(n+1+gamma) lambda}} in l^{1/(1-lambda)} over the
/// lattice (r = lat.r). Requires p2 < p1.
SequenceCriterion sequence_criterion(const Measure& mu, const SpacePair& sp, const Lattice& lat,
                                     const SamplingPlan& plan);

struct CrossoverScan {
  std::vector<double> betas;
  std::vector<double> growth;  // log of the ratio of successive truncation increments, per beta
  double crossover = 0;        // beta where growth changes sign (interpolated)
};

/// For mu = V_beta, beta in `betas` (increasing), the truncated sequence norms
/// over lattice points with rho <= h_max * 4^j, j = 0..3, on the upward
/// extension of `region`. growth < 0 means the increments shrink and the
/// truncated norm stabilises.
CrossoverScan sequence_crossover(const SpacePair& sp, const Region& region, double r,
                                 const std::vector<double>& betas, const SamplingPlan& plan);

/// r_k(t) = r_0(2^k t), r_0 = +1 on [0, 1/2), -1 on [1/2, 1), period 1.
int rademacher(unsigned k, double t);

struct KhinchineReport {
  double l2_power = 0;  // (sum |c_j|^2)^{p/2}
  double mid = 0;       // int_0^1 |sum_j c_j r_j(t)|^p dt
  double ratio = 0;     // mid / l2_power
  std::pair<double, double> band;  // valid bounds for the ratio
  bool in_band = false;
};

/// Jittered-strata estimate of the Khinchine ratio with r_0, ..., r_{m-1}.
/// Exact when `samples` is a multiple of 2^m.
KhinchineReport khinchine_check(const std::vector<cplx>& c, double p, std::uint64_t samples,
                                std::uint64_t seed);

/// Bounds A, B with A <= E|sum c_j r_j|^p / (sum |c_j|^2)^{p/2} <= B for complex c.
std::pair<double, double> khinchine_band(double p);

}  // namespace tube
