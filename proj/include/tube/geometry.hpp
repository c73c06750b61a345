#pragma once

// Pointwise geometry of the tube T_B = {x + iy : y_n > |y'|^2}.

#include <tube/types.hpp>

#include <cmath>
#include <vector>

namespace tube {

namespace detail {

template <typename Scalar>
void require_same_dim(const TubePoint<Scalar>& z, const TubePoint<Scalar>& w, const char* what) {
  if (z.dim() != w.dim()) throw DomainError(std::string(what) + ": dimension mismatch");
}

template <typename Scalar>
void require_interior(const TubePoint<Scalar>& z, const char* what) {
  if (!z.interior())
    throw DomainError(std::string(what) + ": point is not in the interior of T_B");
}

}  // namespace detail

/// Boundary defect rho(z) = y_n - |y'|^2. Positive exactly on the interior.
template <typename Scalar>
Scalar rho(const TubePoint<Scalar>& z) {
  return z.defect();
}

/// The sesquilinear quasi-distance
///   rho(z, w) = ((z' - conj(w'))^2 - 2i (z_n - conj(w_n))) / 4,
/// where the square is the bilinear dot product. rho(z, z) = rho(z).
template <typename Scalar>
std::complex<Scalar> rho(const TubePoint<Scalar>& z, const TubePoint<Scalar>& w) {
  detail::require_same_dim(z, w, "rho(z, w)");
  const Index n = z.dim();
  // z_j - conj(w_j) = (x_j - u_j) + i (y_j + v_j)
  Scalar re = 0, im = 0;
  for (Index j = 0; j + 1 < n; ++j) {
    const Scalar a = z.x(j) - w.x(j);
    const Scalar b = z.y(j) + w.y(j);
    re += a * a - b * b;
    im += 2 * a * b;
  }
  const Scalar an = z.x(n - 1) - w.x(n - 1);
  const Scalar bn = z.y(n - 1) + w.y(n - 1);
  // -2i (an + i bn) = 2 bn - 2i an
  re += 2 * bn;
  im -= 2 * an;
  return {re / 4, im / 4};
}

/// rho(z, w) raised to a real power on the principal branch. Re rho(z, w) > 0
/// on T_B x T_B; a non-positive real part means an out-of-domain input.
template <typename Scalar>
std::complex<Scalar> rho_pow(const std::complex<Scalar>& r, Scalar exponent) {
  if (!(r.real() > Scalar(0)))
    throw DomainError("rho(z, w) has non-positive real part; principal branch undefined");
  // exp(exponent * Log r) with Log r = log|r| + i arg r
  const Scalar mag = std::pow(std::abs(r), exponent);
  const Scalar ph = exponent * std::arg(r);
  return {mag * std::cos(ph), mag * std::sin(ph)};
}

/// Bergman metric beta(z, w) = atanh sqrt(1 - rho(z) rho(w) / |rho(z, w)|^2).
template <typename Scalar>
Scalar bergman_distance(const TubePoint<Scalar>& z, const TubePoint<Scalar>& w) {
  detail::require_same_dim(z, w, "bergman_distance");
  detail::require_interior(z, "bergman_distance");
  detail::require_interior(w, "bergman_distance");
  const Scalar q = rho(z) * rho(w) / std::norm(rho(z, w));
  const Scalar rad = Scalar(1) - q;
  if (rad < Scalar(-1e-12) || !(q > Scalar(0)))
    throw NumericalError("bergman_distance: radicand outside [0, 1)");
  if (rad <= Scalar(1e-15)) return Scalar(0);
  const Scalar s = std::sqrt(rad);
  if (rad < Scalar(0.5)) return std::atanh(s);
  // atanh(s) = log((1 + s) / sqrt(1 - s^2)), stable as s -> 1
  return std::log((Scalar(1) + s) / std::sqrt(q));
}

/// Bergman metric ball D(center, radius) with strict membership.
template <typename Scalar>
struct BergmanBall {
  TubePoint<Scalar> center;
  Scalar radius;

  BergmanBall(TubePoint<Scalar> c, Scalar r) : center(std::move(c)), radius(r) {
    detail::require_interior(center, "BergmanBall");
    if (!(radius > Scalar(0))) throw DomainError("BergmanBall: radius must be > 0");
  }

  bool contains(const TubePoint<Scalar>& z) const { return bergman_distance(z, center) < radius; }
};

template <typename Scalar>
bool in_ball(const TubePoint<Scalar>& z, const BergmanBall<Scalar>& ball) {
  return ball.contains(z);
}

/// Cayley-type biholomorphism from the unit ball onto T_B:
///   (b', b_n) -> ( sqrt2 b' / (1 + b_n),  i (1 - b_n)/(1 + b_n) - i b'.b' / (1 + b_n)^2 ).
template <typename Scalar>
TubePoint<Scalar> cayley(const BallPoint<Scalar>& b) {
  using C = std::complex<Scalar>;
  const Index n = b.dim();
  if (!(b.w.squaredNorm() < Scalar(1))) throw DomainError("cayley: |b| must be < 1");
  const C one(1), i(0, 1);
  const C denom = one + b.w(n - 1);
  C bb(0);
  for (Index j = 0; j + 1 < n; ++j) bb += b.w(j) * b.w(j);
  Vec<Scalar> x(n), y(n);
  for (Index j = 0; j + 1 < n; ++j) {
    const C wj = std::sqrt(Scalar(2)) * b.w(j) / denom;
    x(j) = wj.real();
    y(j) = wj.imag();
  }
  const C wn = i * (one - b.w(n - 1)) / denom - i * bb / (denom * denom);
  x(n - 1) = wn.real();
  y(n - 1) = wn.imag();
  return TubePoint<Scalar>(std::move(x), std::move(y));
}

/// Inverse of `cayley`. With D = i + w_n + (i/2) w'.w':
///   w -> ( sqrt2 i w' / D,  (i - w_n - (i/2) w'.w') / D ).
template <typename Scalar>
BallPoint<Scalar> inverse_cayley(const TubePoint<Scalar>& z) {
  using C = std::complex<Scalar>;
  detail::require_interior(z, "inverse_cayley");
  const Index n = z.dim();
  const C i(0, 1);
  C ww(0);
  for (Index j = 0; j + 1 < n; ++j) ww += z.coord(j) * z.coord(j);
  const C half_i_ww = i * ww / Scalar(2);
  const C denom = i + z.coord(n - 1) + half_i_ww;
  CVec<Scalar> b(n);
  for (Index j = 0; j + 1 < n; ++j) b(j) = std::sqrt(Scalar(2)) * i * z.coord(j) / denom;
  b(n - 1) = (i - z.coord(n - 1) - half_i_ww) / denom;
  // |b| < 1 holds mathematically; round-off at the very edge is clamped by
  // the BallPoint check, which we let fire.
  return BallPoint<Scalar>(std::move(b));
}

/// The involutive automorphism phi_a of the unit ball exchanging a and 0:
///   phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>),  s_a = sqrt(1 - |a|^2).
template <typename Scalar>
CVec<Scalar> ball_automorphism(const CVec<Scalar>& a, const CVec<Scalar>& z) {
  using C = std::complex<Scalar>;
  const Scalar aa = a.squaredNorm();
  if (aa == Scalar(0)) return -z;
  const C za = a.dot(z);  // <z, a> = sum z_j conj(a_j); Eigen's dot conjugates the left operand
  const CVec<Scalar> pz = (za / aa) * a;
  const CVec<Scalar> qz = z - pz;
  const Scalar s = std::sqrt(Scalar(1) - aa);
  return (a - pz - s * qz) / (C(1) - za);
}

/// Bergman metric of the unit ball, atanh |phi_a(b)|.
template <typename Scalar>
Scalar ball_metric_distance(const BallPoint<Scalar>& a, const BallPoint<Scalar>& b) {
  if (a.dim() != b.dim()) throw DomainError("ball_metric_distance: dimension mismatch");
  return std::atanh(ball_automorphism<Scalar>(a.w, b.w).norm());
}

// ---------------------------------------------------------------------------
// Boundary-approach sequences

enum class PathKind {
  VerticalDown,  // (0', i/k): rho -> 0
  VerticalUp,    // (0', i k): |z| -> infinity
  Horizontal,    // k e_1 + i (0', 1): |x| -> infinity
};

const char* to_string(PathKind kind);
PathKind path_kind_from_string(const std::string& s);

/// A boundary-approach path evaluated at a strictly increasing list of
/// positive parameters.
struct BoundaryPath {
  PathKind kind;
  Index n;
  std::vector<double> parameters;

  BoundaryPath(PathKind kind_, Index n_, std::vector<double> parameters_);

  /// `count` log-spaced parameters from 1 to `k_max` (inclusive).
  static BoundaryPath geometric(PathKind kind, Index n, double k_max, int count);

  TubePointd at(std::size_t i) const;
  std::size_t size() const { return parameters.size(); }
};

/// Point of the path of the given kind at parameter k >= 1.
template <typename Scalar>
TubePoint<Scalar> boundary_sequence(PathKind kind, Index n, Scalar k) {
  if (!(k > Scalar(0))) throw DomainError("boundary_sequence: parameter must be positive");
  switch (kind) {
    case PathKind::VerticalDown:
      return TubePoint<Scalar>::axis(n, Scalar(1) / k);
    case PathKind::VerticalUp:
      return TubePoint<Scalar>::axis(n, k);
    case PathKind::Horizontal: {
      TubePoint<Scalar> z = TubePoint<Scalar>::axis(n, Scalar(1));
      z.x(0) = k;
      return z;
    }
  }
  throw DomainError("boundary_sequence: unknown path kind");
}

/// The three standard paths, each with `count` parameters up to `k_max`.
std::vector<BoundaryPath> standard_paths(Index n, double k_max = 1e3, int count = 13);

}  // namespace tube
