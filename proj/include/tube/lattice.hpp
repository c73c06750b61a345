#pragma once

// r-lattices in the Bergman metric over truncated regions of T_B.

#include <tube/geometry.hpp>

#include <cstdint>
#include <vector>

namespace tube {

/// Compact box {|x_j| <= x_bound, |y'_j| <= yprime_bound, h_min <= rho <= h_max}.
struct Region {
  Index n = 1;
  double x_bound = 2.0;
  double yprime_bound = 1.0;
  double h_min = 0.1;
  double h_max = 10.0;

  Region() = default;
  Region(Index n_, double x_bound_, double yprime_bound_, double h_min_, double h_max_);

  /// {|x| <= 2, |y'| <= 1, h in [0.1, 10]}.
  static Region default_region(Index n = 1) { return Region(n, 2.0, 1.0, 0.1, 10.0); }

  /// Bounds scaled by `factor`: x and y' bounds multiplied, the h range
  /// widened to [h_min / factor, h_max * factor].
  Region enlarged(double factor) const;

  bool contains(const TubePointd& z) const;

  /// Point of the region at unit-cube coordinates u in [0,1]^{2n}, with
  /// coordinates ordered (x, y', log h).
  TubePointd at_unit(const double* u) const;
};

/// Halton point `index` in `dims` dimensions, rotated modulo 1 by a shift
/// derived from `seed`.
void halton_point(std::uint64_t index, int dims, std::uint64_t seed, double* out);

/// `count` low-discrepancy points of the region.
std::vector<TubePointd> region_probes(const Region& region, std::size_t count, std::uint64_t seed);

struct Lattice {
  double r = 0.5;
  Region region;
  std::vector<TubePointd> points;
  int overlap_stat = 0;        // max multiplicity of {D(a_k, 2r)} over the probe set
  double min_separation = 0.0; // min pairwise Bergman distance
  bool separation_ok = false;  // min_separation >= r/2
  std::size_t candidates = 0;
  std::size_t fill_points = 0; // points accepted from the Halton sweep
};

/// Greedy maximal r/2-separated set. Candidates are a self-similar grid over
/// the region and a collar of Bergman width 2r around it, followed by
/// `probe_density` Halton points of the region in (x, y', log h); the same
/// number of probes measures overlap_stat. Requires 0 < r <= 1.
Lattice generate_lattice(const Region& region, double r, std::size_t probe_density,
                         std::uint64_t seed);

/// Max over probes of the number of lattice points within Bergman distance 2r.
int overlap_multiplicity(const Lattice& lat, const std::vector<TubePointd>& probes);

struct CoveringReport {
  double covered_fraction = 0.0;
  double worst_gap = 0.0;
  std::size_t probes_used = 0;
  std::size_t excluded = 0;  // probes outside the generating region
};

CoveringReport check_covering(const Lattice& lat, const std::vector<TubePointd>& probes);

struct SeparatedSum {
  double sum = 0.0;
  double bound_ratio = 0.0;  // sum * rho(z)^{s - t}
};

/// sum_k rho(a_k)^t / |rho(z, a_k)|^s, for n < t < s.
SeparatedSum separated_sum_check(const Lattice& lat, double t, double s, const TubePointd& z);

/// Minimum Bergman distance from z to the lattice (infinity when empty).
double distance_to_lattice(const Lattice& lat, const TubePointd& z);

}  // namespace tube
