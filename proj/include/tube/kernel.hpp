#pragma once

// Weighted Bergman kernel of T_B and the quantities built from it.

#include <tube/geometry.hpp>
#include <tube/params.hpp>
#include <tube/quadrature.hpp>

#include <cmath>
#include <numbers>

namespace tube {

/// Gamma(n+alpha+1) / (2^{n+1} pi^n Gamma(alpha+1)).
template <typename Scalar = double>
Scalar kernel_constant(Index n, Scalar alpha) {
  using std::lgamma, std::exp, std::log;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  return exp(lgamma(Scalar(n) + alpha + 1) - lgamma(alpha + 1) - Scalar(n + 1) * log(Scalar(2)) -
             Scalar(n) * log(pi));
}

/// K_alpha(z, w) = kernel_constant(n, alpha) * rho(z, w)^{-(n+alpha+1)}.
template <typename Scalar>
std::complex<Scalar> bergman_kernel(Index n, Scalar alpha, const TubePoint<Scalar>& z,
                                    const TubePoint<Scalar>& w) {
  if (z.dim() != n || w.dim() != n) throw DomainError("bergman_kernel: dimension mismatch");
  detail::require_interior(z, "bergman_kernel");
  detail::require_interior(w, "bergman_kernel");
  return kernel_constant<Scalar>(n, alpha) * rho_pow(rho(z, w), -(Scalar(n) + alpha + 1));
}

inline cplx bergman_kernel(const WeightParams& params, const TubePointd& z, const TubePointd& w) {
  return bergman_kernel<double>(params.n, params.alpha, z, w);
}

/// The kernel section K_{alpha,a} = K_alpha(., a) as a function on T_B.
TubeFunction kernel_section(const WeightParams& params, const TubePointd& a);

/// ||K_{alpha,z}||_{p,alpha} in closed form,
///   c * C1(n, s/2, s/2, alpha)^{1/p} * rho(z)^{-(n+alpha+1)/p'},  s = p(n+alpha+1),
/// using |rho(z,w)|^s = rho(z,w)^{s/2} rho(w,z)^{s/2}. Requires p > 1.
double kernel_norm(const WeightParams& params, double p, const TubePointd& z);

/// The same norm estimated by Monte-Carlo quadrature of |K_{alpha,z}|^p.
NormEstimate kernel_norm_quadrature(const WeightParams& params, double p, const TubePointd& z,
                                    const SamplingPlan& plan);

/// Monte-Carlo estimate of P_alpha f(z) = int K_alpha(z,w) f(w) dV_alpha(w).
/// If the plan has no proposal centres it is centred at z.
IntegralEstimate bergman_project(const WeightParams& params, const TubeFunction& f,
                                 const TubePointd& z, const SamplingPlan& plan);

/// Built-in holomorphic test family for point-evaluation checks.
struct EvaluationProbe {
  enum class Kind { Constant, KernelSection } kind = Kind::Constant;
  cplx constant{1.0, 0.0};
  TubePointd anchor;  // kernel section centre (KernelSection only)

  static EvaluationProbe constant_fn(cplx c) { return {Kind::Constant, c, {}}; }
  static EvaluationProbe kernel_at(const TubePointd& a) { return {Kind::KernelSection, {}, a}; }

  cplx operator()(const WeightParams& params, const TubePointd& z) const;
};

struct PointEvaluationRatio {
  double ratio = 0.0;       // |f(z)|^p rho(z)^{n+alpha+1} / int_{D(z,r)} |f|^p dV_alpha
  IntegralEstimate ball_integral;
};

/// Ratio whose boundedness across z certifies the sub-mean-value estimate
/// |f(z)|^p <= C rho(z)^{-(n+alpha+1)} int_{D(z,r)} |f|^p dV_alpha.
PointEvaluationRatio point_evaluation_bound_check(const WeightParams& params, double p,
                                                  const EvaluationProbe& f, const TubePointd& z,
                                                  double r, const SamplingPlan& plan);

}  // namespace tube
