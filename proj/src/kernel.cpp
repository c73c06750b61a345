#include <tube/kernel.hpp>

namespace tube {

TubeFunction kernel_section(const WeightParams& params, const TubePointd& a) {
  detail::require_interior(a, "kernel_section");
  const double c = kernel_constant(params.n, params.alpha);
  const double e = -(double(params.n) + params.alpha + 1.0);
  return [a, c, e](const TubePointd& z) { return c * rho_pow(rho(z, a), e); };
}

double kernel_norm(const WeightParams& params, double p, const TubePointd& z) {
  const SpaceIndex space(p, params.alpha);
  const double pc = space.conjugate();
  detail::require_interior(z, "kernel_norm");
  const double m = double(params.n) + params.alpha + 1.0;
  const double s = p * m;
  // the integral of rho^alpha |rho(z,.)|^{-s} converges iff s - alpha > n + 1
  if (!(s - params.alpha > double(params.n) + 1.0))
    throw DomainError("kernel_norm: requires p(n+1+alpha) - alpha > n + 1");
  const double c1 = c1_constant(params.n, s / 2, s / 2, params.alpha);
  return kernel_constant(params.n, params.alpha) * std::pow(c1, 1.0 / p) * std::pow(rho(z), -m / pc);
}

NormEstimate kernel_norm_quadrature(const WeightParams& params, double p, const TubePointd& z,
                                    const SamplingPlan& plan) {
  detail::require_interior(z, "kernel_norm_quadrature");
  const double m = double(params.n) + params.alpha + 1.0;
  SamplingPlan pl = plan;
  if (pl.proposal.centers.empty()) pl = pl.centered({z}, safe_h_tail(params.n, p * m, params.alpha));
  return norm_p_alpha(SpaceIndex(p, params.alpha), kernel_section(params, z), params.n, pl);
}

IntegralEstimate bergman_project(const WeightParams& params, const TubeFunction& f,
                                 const TubePointd& z, const SamplingPlan& plan) {
  detail::require_interior(z, "bergman_project");
  SamplingPlan pl = plan;
  if (pl.proposal.centers.empty()) pl.proposal.centers = {z};
  const TubeFunction kz = [&](const TubePointd& w) {
    const cplx fw = f(w);
    if (fw == cplx(0, 0)) return fw;
    return bergman_kernel(params, z, w) * fw;
  };
  return integrate_tube(params, kz, pl);
}

cplx EvaluationProbe::operator()(const WeightParams& params, const TubePointd& z) const {
  if (kind == Kind::Constant) return constant;
  return bergman_kernel(params, z, anchor);
}

PointEvaluationRatio point_evaluation_bound_check(const WeightParams& params, double p,
                                                  const EvaluationProbe& f, const TubePointd& z,
                                                  double r, const SamplingPlan& plan) {
  if (!(r > 0)) throw DomainError("point_evaluation_bound_check: radius must be > 0");
  if (!(p > 0)) throw DomainError("point_evaluation_bound_check: p must be > 0");
  const BergmanBall<double> ball(z, r);
  PointEvaluationRatio out;
  out.ball_integral = integrate_ball(
      params, [&](const TubePointd& w) { return std::pow(std::abs(f(params, w)), p); }, ball, plan);
  const double num = std::pow(std::abs(f(params, z)), p) *
                     std::pow(rho(z), double(params.n) + params.alpha + 1.0);
  const double den = out.ball_integral.value.real();
  out.ratio = den > 0 ? num / den : INFINITY;
  return out;
}

}  // namespace tube
