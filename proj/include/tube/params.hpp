#pragma once

#include <tube/types.hpp>

namespace tube {

/// Complex dimension n and weight exponent alpha of dV_alpha = rho^alpha dV.
struct WeightParams {
  Index n = 1;
  double alpha = 0.0;

  WeightParams() = default;
  WeightParams(Index n_, double alpha_) : n(n_), alpha(alpha_) {
    if (n < 1) throw DomainError("WeightParams: n must be >= 1");
    if (!(alpha > -1.0)) throw DomainError("WeightParams: alpha must be > -1");
  }
};

/// Integrability exponent p and weight alpha of A^p_alpha.
struct SpaceIndex {
  double p = 2.0;
  double alpha = 0.0;

  SpaceIndex() = default;
  SpaceIndex(double p_, double alpha_) : p(p_), alpha(alpha_) {
    if (!(p > 0.0)) throw DomainError("SpaceIndex: p must be > 0");
    if (!(alpha > -1.0)) throw DomainError("SpaceIndex: alpha must be > -1");
  }

  /// p' = p / (p - 1); only defined for p > 1.
  double conjugate() const {
    if (!(p > 1.0)) throw DomainError("SpaceIndex: conjugate exponent needs p > 1");
    return p / (p - 1.0);
  }
};

}  // namespace tube
