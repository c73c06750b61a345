#include <tube/lattice.hpp>
#include <tube/rng.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace tube {

Region::Region(Index n_, double x_bound_, double yprime_bound_, double h_min_, double h_max_)
    : n(n_), x_bound(x_bound_), yprime_bound(yprime_bound_), h_min(h_min_), h_max(h_max_) {
  if (n < 1) throw DomainError("Region: n must be >= 1");
  if (!(x_bound > 0) || !(yprime_bound > 0) || !(h_min > 0) || !(h_max > h_min) ||
      !std::isfinite(x_bound) || !std::isfinite(yprime_bound) || !std::isfinite(h_max))
    throw DomainError("Region: empty region (bounds must be finite, positive, h_min < h_max)");
}

Region Region::enlarged(double factor) const {
  return Region(n, x_bound * factor, yprime_bound * factor, h_min / factor, h_max * factor);
}

bool Region::contains(const TubePointd& z) const {
  if (z.dim() != n || !z.interior()) return false;
  for (Index j = 0; j < n; ++j)
    if (std::abs(z.x(j)) > x_bound) return false;
  for (Index j = 0; j + 1 < n; ++j)
    if (std::abs(z.y(j)) > yprime_bound) return false;
  const double h = z.defect();
  // tolerate the round-off of y_n - |y'|^2
  return h >= h_min * (1 - 1e-12) && h <= h_max * (1 + 1e-12);
}

TubePointd Region::at_unit(const double* u) const {
  Vecd x(n), yp(n - 1);
  for (Index j = 0; j < n; ++j) x(j) = x_bound * (2 * u[j] - 1);
  for (Index j = 0; j + 1 < n; ++j) yp(j) = yprime_bound * (2 * u[n + j] - 1);
  const double lh = std::log(h_min) + (std::log(h_max) - std::log(h_min)) * u[2 * n - 1];
  const double h = std::clamp(std::exp(lh), h_min, h_max);
  return TubePointd::from_chart(x, yp, h);
}

void halton_point(std::uint64_t index, int dims, std::uint64_t seed, double* out) {
  static constexpr std::array<unsigned, 16> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19,
                                                       23, 29, 31, 37, 41, 43, 47, 53};
  if (dims > int(kPrimes.size())) throw DomainError("halton_point: too many dimensions");
  CounterRng rng(seed, 0x4841'4c54'4f4eULL);
  for (int d = 0; d < dims; ++d) {
    const unsigned b = kPrimes[d];
    double f = 1.0, v = 0.0;
    for (std::uint64_t i = index + 1; i > 0; i /= b) {
      f /= b;
      v += f * double(i % b);
    }
    const double shift = rng.uniform();
    v += shift;
    out[d] = v - std::floor(v);
  }
}

std::vector<TubePointd> region_probes(const Region& region, std::size_t count, std::uint64_t seed) {
  std::vector<TubePointd> out;
  out.reserve(count);
  const int d = int(2 * region.n);
  std::array<double, 16> u{};
  for (std::size_t i = 0; i < count; ++i) {
    halton_point(i, d, seed, u.data());
    out.push_back(region.at_unit(u.data()));
  }
  return out;
}

namespace {

// Points bucketed by floor(log rho / width). Since beta(z, w) >= |log(rho(w)/rho(z))| / 2,
// a distance query below `radius` only needs buckets within 2 * radius in log rho.
// For n = 1 each bucket is also sorted by x, using |x_z - x_w| < 2 sqrt(rho(z) rho(w)) cosh(radius).
class LogHeightIndex {
 public:
  explicit LogHeightIndex(double width) : width_(width) {}

  void insert(std::size_t id, const TubePointd& z) {
    buckets_[key(z)].emplace(z.dim() == 1 ? z.x(0) : 0.0, id);
  }

  template <typename Fn>
  void for_each_near(const TubePointd& z, double radius, Fn&& fn) const {
    const double lh = std::log(z.defect());
    const long lo = long(std::floor((lh - 2 * radius) / width_));
    const long hi = long(std::floor((lh + 2 * radius) / width_));
    const bool planar = z.dim() == 1;
    for (auto it = buckets_.lower_bound(lo); it != buckets_.end() && it->first <= hi; ++it) {
      const auto& bucket = it->second;
      if (!planar) {
        for (const auto& e : bucket) fn(e.second);
        continue;
      }
      const double hmax = std::exp(double(it->first + 1) * width_);
      const double dx = 2 * std::sqrt(z.defect() * hmax) * std::cosh(radius) * (1 + 1e-12);
      const auto end = bucket.upper_bound(z.x(0) + dx);
      for (auto e = bucket.lower_bound(z.x(0) - dx); e != end; ++e) fn(e->second);
    }
  }

 private:
  long key(const TubePointd& z) const { return long(std::floor(std::log(z.defect()) / width_)); }
  double width_;
  std::map<long, std::multimap<double, std::size_t>> buckets_;
};

LogHeightIndex index_points(const std::vector<TubePointd>& pts, double width) {
  LogHeightIndex idx(width);
  for (std::size_t i = 0; i < pts.size(); ++i) idx.insert(i, pts[i]);
  return idx;
}

}  // namespace

int overlap_multiplicity(const Lattice& lat, const std::vector<TubePointd>& probes) {
  const LogHeightIndex idx = index_points(lat.points, std::max(lat.r, 0.05));
  int worst = 0;
  for (const auto& p : probes) {
    int count = 0;
    idx.for_each_near(p, 2 * lat.r, [&](std::size_t k) {
      if (bergman_distance(p, lat.points[k]) < 2 * lat.r) ++count;
    });
    worst = std::max(worst, count);
  }
  return worst;
}

namespace {

// Levels h_j = q^j anchored at h = 1, so enlarging a region only adds levels.
// Vertical Bergman distance between consecutive levels is log(q)/2 >= r/2.
double level_ratio(double r) {
  const double ln2 = std::log(2.0);
  if (r > ln2) return 4.0;
  return std::pow(2.0, 1.0 / std::floor(ln2 / r));
}

// n = 1 only: self-similar seed grid over the region plus a collar of Bergman
// width 2r, so every ball D(p, 2r) with p in the region sees the untruncated
// grid. Horizontal neighbours on a level sit at Bergman distance exactly r/2;
// odd levels are staggered by half a step.
std::vector<TubePointd> seed_grid(const Region& R, double r) {
  const double q = level_ratio(r);
  const double collar = 2 * r;
  const double lo = R.h_min * std::exp(-2 * collar), hi = R.h_max * std::exp(2 * collar);
  const long j0 = long(std::floor(std::log(lo) / std::log(q)));
  const long j1 = long(std::ceil(std::log(hi) / std::log(q)));
  const double step = 2 * std::sinh(r / 2) * (1 + 1e-9);
  std::vector<TubePointd> out;
  for (long j = j0; j <= j1; ++j) {
    const double h = std::pow(q, double(j));
    const double shift = (j & 1) ? 0.5 : 0.0;
    // |x_z - x_w| < 2 sqrt(h_z h_w) cosh(2r) whenever beta(z, w) < 2r
    const double hz = std::min(R.h_max, h * std::exp(2 * collar));
    const double xb = R.x_bound + 2 * std::sqrt(h * hz) * std::cosh(collar);
    const double sn = step * h;
    for (long k = long(std::ceil(-xb / sn - shift)); k <= long(std::floor(xb / sn - shift)); ++k)
      out.push_back(TubePointd::from_chart(Vecd::Constant(1, (double(k) + shift) * sn), Vecd(0), h));
  }
  return out;
}

// Exact maximum over the region of #{k : beta(p, a_k) < 2r} for n = 1. Bergman
// balls are then Euclidean discs (centre (x_a, h_a cosh 4r), radius h_a sinh 4r),
// so the maximum depth of the arrangement is attained next to a vertex where
// two boundary circles cross; at each vertex the depth of every sector is read
// off from the discs through it.
int arrangement_depth(const Lattice& lat) {
  const double R = 2 * lat.r;
  const double c4 = std::cosh(2 * R), s4 = std::sinh(2 * R);
  struct Disc {
    double x, cy, rad;
  };
  // discs grouped by level (grid points share exact heights), sorted by x
  std::map<double, std::vector<Disc>> levels;
  for (const auto& a : lat.points) {
    const double h = a.defect();
    levels[h].push_back({a.x(0), h * c4, h * s4});
  }
  for (auto& [h, v] : levels)
    std::sort(v.begin(), v.end(), [](const Disc& a, const Disc& b) { return a.x < b.x; });
  const double spread = std::exp(2 * R);

  // discs whose closure can reach height range [ylo, yhi] and abscissa range [xlo, xhi]
  auto for_each_disc = [&](double xlo, double xhi, double ylo, double yhi, auto&& fn) {
    for (auto it = levels.lower_bound(ylo / spread); it != levels.end() && it->first <= yhi * spread; ++it) {
      const auto& v = it->second;
      const double rad = it->first * s4;
      auto lo = std::lower_bound(v.begin(), v.end(), xlo - rad,
                                 [](const Disc& d, double x) { return d.x < x; });
      for (; lo != v.end() && lo->x <= xhi + rad; ++lo) fn(*lo);
    }
  };

  constexpr int kDirs = 72;
  auto depth_at = [&](double vx, double vy) {
    int inside = 0;
    std::array<int, kDirs> extra{};
    for_each_disc(vx, vx, vy, vy, [&](const Disc& d) {
      const double ux = d.x - vx, uy = d.cy - vy;
      const double e = (std::sqrt(ux * ux + uy * uy) - d.rad) / d.rad;
      if (e < -1e-10) {
        ++inside;
      } else if (e <= 1e-10) {
        // boundary circle: its disc lies on the side of the centre
        for (int k = 0; k < kDirs; ++k) {
          const double th = (k + 0.5) * 2 * std::numbers::pi / kDirs;
          if (std::cos(th) * ux + std::sin(th) * uy > 0) ++extra[k];
        }
      }
    });
    return inside + *std::max_element(extra.begin(), extra.end());
  };

  const Region& reg = lat.region;
  int best = 0;
  for (const auto& a : lat.points)
    if (reg.contains(a)) best = std::max(best, 1);
  for (const auto& [hi_, vi] : levels)
    for (const Disc& di : vi) {
      // only circles that meet the region's box can produce vertices inside it
      if (di.cy + di.rad < reg.h_min || di.cy - di.rad > reg.h_max ||
          di.x - di.rad > reg.x_bound || di.x + di.rad < -reg.x_bound)
        continue;
      for_each_disc(di.x - di.rad, di.x + di.rad, di.cy - di.rad, di.cy + di.rad, [&](const Disc& dj) {
        if (dj.cy < di.cy || (dj.cy == di.cy && dj.x <= di.x)) return;  // each pair once
        const double dx = dj.x - di.x, dy = dj.cy - di.cy;
        const double d2 = dx * dx + dy * dy, d = std::sqrt(d2);
        if (d >= di.rad + dj.rad || d <= std::abs(di.rad - dj.rad)) return;
        const double a = (di.rad * di.rad - dj.rad * dj.rad + d2) / (2 * d);
        const double hh = std::sqrt(std::max(0.0, di.rad * di.rad - a * a));
        const double mx = di.x + a * dx / d, my = di.cy + a * dy / d;
        for (double sgn : {-1.0, 1.0}) {
          const double vx = mx - sgn * hh * dy / d, vy = my + sgn * hh * dx / d;
          if (!(vy >= reg.h_min && vy <= reg.h_max && std::abs(vx) <= reg.x_bound)) continue;
          best = std::max(best, depth_at(vx, vy));
        }
      });
    }
  return best;
}

}  // namespace

Lattice generate_lattice(const Region& region, double r, std::size_t probe_density,
                         std::uint64_t seed) {
  if (!(r > 0) || r > 1) throw DomainError("generate_lattice: requires 0 < r <= 1");
  if (probe_density == 0) throw DomainError("generate_lattice: probe_density must be >= 1");
  Lattice lat;
  lat.r = r;
  lat.region = region;

  const double sep = r / 2;
  LogHeightIndex idx(std::max(r, 0.05));
  auto offer = [&](const TubePointd& c) {
    bool far = true;
    idx.for_each_near(c, sep, [&](std::size_t k) {
      if (far && bergman_distance(c, lat.points[k]) < sep) far = false;
    });
    if (far) {
      idx.insert(lat.points.size(), c);
      lat.points.push_back(c);
    }
  };
  // greedy pass: structured grid first, then a Halton sweep of the region
  if (region.n == 1)
    for (const auto& c : seed_grid(region, r)) offer(c);
  const std::size_t grid_points = lat.points.size();
  const int d = int(2 * region.n);
  std::array<double, 16> u{};
  for (std::size_t i = 0; i < probe_density; ++i) {
    halton_point(i, d, seed, u.data());
    offer(region.at_unit(u.data()));
  }
  lat.candidates = grid_points + probe_density;
  lat.fill_points = lat.points.size() - grid_points;

  double min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lat.points.size(); ++i)
    idx.for_each_near(lat.points[i], std::min(min_sep, 4.0), [&](std::size_t j) {
      if (j > i) min_sep = std::min(min_sep, bergman_distance(lat.points[i], lat.points[j]));
    });
  lat.min_separation = min_sep;
  lat.separation_ok = min_sep >= sep;
  lat.overlap_stat =
      overlap_multiplicity(lat, region_probes(region, probe_density, derive_seed(seed, 1)));
  if (region.n == 1) lat.overlap_stat = std::max(lat.overlap_stat, arrangement_depth(lat));
  return lat;
}

double distance_to_lattice(const Lattice& lat, const TubePointd& z) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : lat.points) {
    const double lh = std::abs(std::log(a.defect() / z.defect())) / 2;
    if (lh >= best) continue;
    best = std::min(best, bergman_distance(z, a));
  }
  return best;
}

CoveringReport check_covering(const Lattice& lat, const std::vector<TubePointd>& probes) {
  CoveringReport rep;
  const LogHeightIndex idx = index_points(lat.points, std::max(lat.r, 0.05));
  std::size_t covered = 0;
  for (const auto& p : probes) {
    if (!lat.region.contains(p)) {
      ++rep.excluded;
      continue;
    }
    ++rep.probes_used;
    // anything at distance < r lies in the log-height window of radius r
    double gap = std::numeric_limits<double>::infinity();
    idx.for_each_near(p, lat.r, [&](std::size_t k) { gap = std::min(gap, bergman_distance(p, lat.points[k])); });
    if (gap >= lat.r) gap = distance_to_lattice(lat, p);
    if (gap < lat.r) ++covered;
    rep.worst_gap = std::max(rep.worst_gap, gap);
  }
  rep.covered_fraction = rep.probes_used ? double(covered) / double(rep.probes_used) : 1.0;
  return rep;
}

SeparatedSum separated_sum_check(const Lattice& lat, double t, double s, const TubePointd& z) {
  const double n = double(lat.region.n);
  if (!(t > n)) throw DomainError("separated_sum_check: requires n < t");
  if (!(s > t)) throw DomainError("separated_sum_check: requires t < s");
  detail::require_interior(z, "separated_sum_check");
  SeparatedSum out;
  for (const auto& a : lat.points) out.sum += std::pow(rho(a), t) / std::pow(std::abs(rho(z, a)), s);
  out.bound_ratio = out.sum * std::pow(rho(z), s - t);
  return out;
}

}  // namespace tube
