#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tube {

using Index = Eigen::Index;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using CVec = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// A precondition or parameter-regime violation. The message names the
/// violated hypothesis.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An integral that the estimator judges to be infinite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal consistency failure (e.g. a metric radicand out of range).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point z = x + iy of the tube over the paraboloid {y_n > |y'|^2}.
///
/// Stored as the two real vectors (x, y) so that the boundary defect
/// y_n - |y'|^2 is evaluated directly. Boundary points (defect 0) and even
/// exterior points are representable; operations that need interior points
/// check `interior()` themselves.
template <typename Scalar>
struct TubePoint {
  Vec<Scalar> x;
  Vec<Scalar> y;

  TubePoint() = default;
  TubePoint(Vec<Scalar> x_, Vec<Scalar> y_) : x(std::move(x_)), y(std::move(y_)) {
    if (x.size() < 1 || x.size() != y.size())
      throw DomainError("TubePoint: x and y must have the same length n >= 1");
  }

  /// The point with coordinates (x, y', |y'|^2 + h) in the canonical chart.
  static TubePoint from_chart(const Vec<Scalar>& x, const Vec<Scalar>& yprime, Scalar h) {
    const Index n = x.size();
    if (yprime.size() != n - 1)
      throw DomainError("TubePoint::from_chart: y' must have length n-1");
    Vec<Scalar> y(n);
    y.head(n - 1) = yprime;
    y(n - 1) = yprime.squaredNorm() + h;
    return TubePoint(x, std::move(y));
  }

  /// (0', i h): the point on the vertical axis at height h.
  static TubePoint axis(Index n, Scalar h) {
    Vec<Scalar> x = Vec<Scalar>::Zero(n);
    Vec<Scalar> y = Vec<Scalar>::Zero(n);
    y(n - 1) = h;
    return TubePoint(std::move(x), std::move(y));
  }

  Index dim() const { return x.size(); }

  auto yprime() const { return y.head(dim() - 1); }

  /// y_n - |y'|^2.
  Scalar defect() const { return y(dim() - 1) - y.head(dim() - 1).squaredNorm(); }

  bool interior() const { return defect() > Scalar(0); }

  std::complex<Scalar> coord(Index j) const { return {x(j), y(j)}; }

  CVec<Scalar> complex_coords() const {
    CVec<Scalar> z(dim());
    for (Index j = 0; j < dim(); ++j) z(j) = coord(j);
    return z;
  }

  template <typename Other>
  TubePoint<Other> cast() const {
    return TubePoint<Other>(x.template cast<Other>(), y.template cast<Other>());
  }

  friend bool operator==(const TubePoint& a, const TubePoint& b) {
    return a.x == b.x && a.y == b.y;
  }
};

/// Point of the open unit ball in C^n.
template <typename Scalar>
struct BallPoint {
  CVec<Scalar> w;

  BallPoint() = default;
  explicit BallPoint(CVec<Scalar> w_) : w(std::move(w_)) {
    if (w.size() < 1) throw DomainError("BallPoint: dimension must be >= 1");
    if (!(w.squaredNorm() < Scalar(1))) throw DomainError("BallPoint: |w| must be < 1");
  }

  Index dim() const { return w.size(); }
};

using TubePointd = TubePoint<double>;
using BallPointd = BallPoint<double>;
using Vecd = Vec<double>;
using CVecd = CVec<double>;
using cplx = std::complex<double>;

}  // namespace tube
