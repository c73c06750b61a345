#include <tube/quadrature.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <queue>
#include <sstream>
#include <thread>

namespace tube {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::ImportanceCauchy: return "importance-cauchy";
    case Strategy::ImportanceExponential: return "importance-exponential";
    case Strategy::StratifiedGrid: return "stratified-grid";
  }
  return "unknown";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "importance-cauchy") return Strategy::ImportanceCauchy;
  if (s == "importance-exponential") return Strategy::ImportanceExponential;
  if (s == "stratified-grid") return Strategy::StratifiedGrid;
  throw DomainError("unknown sampling strategy '" + s + "'");
}

unsigned thread_count() {
  if (const char* env = std::getenv("TUBE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {

using std::numbers::pi;

constexpr std::uint64_t kBlock = 4096;

struct Moments {
  double count = 0;
  cplx mean{0, 0};
  double m2 = 0;  // sum |v - mean|^2
};

Moments merge(const Moments& a, const Moments& b) {
  if (a.count == 0) return b;
  if (b.count == 0) return a;
  const double total = a.count + b.count;
  const cplx delta = b.mean - a.mean;
  return {total, a.mean + delta * (b.count / total),
          a.m2 + b.m2 + std::norm(delta) * (a.count * b.count / total)};
}

template <typename T>
T pairwise_sum(const T* v, std::size_t len) {
  if (len <= 8) {
    T s{};
    for (std::size_t i = 0; i < len; ++i) s += v[i];
    return s;
  }
  const std::size_t half = len / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, len - half);
}

Moments tree_merge(const std::vector<Moments>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return blocks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return merge(tree_merge(blocks, lo, mid), tree_merge(blocks, mid, hi));
}

// Runs weight_of(i) for i in [0, samples) in fixed-size blocks; the block
// partition and the merge tree depend only on `samples`.
template <typename WeightFn>
IntegralEstimate run_sampler(std::uint64_t samples, std::uint64_t seed, const WeightFn& weight_of) {
  if (samples == 0) throw DomainError("SamplingPlan: samples must be >= 1");
  const std::size_t nblocks = (samples + kBlock - 1) / kBlock;
  std::vector<Moments> blocks(nblocks);

  auto do_block = [&](std::size_t b, std::vector<cplx>& buf, std::vector<double>& dev) {
    const std::uint64_t lo = b * kBlock;
    const std::uint64_t hi = std::min<std::uint64_t>(samples, lo + kBlock);
    const std::size_t len = hi - lo;
    buf.resize(len);
    dev.resize(len);
    for (std::uint64_t i = lo; i < hi; ++i) {
      const cplx v = weight_of(i);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::ostringstream os;
        os << "non-finite integrand value at sample " << i;
        throw NumericalError(os.str());
      }
      buf[i - lo] = v;
    }
    const cplx mean = pairwise_sum(buf.data(), len) / double(len);
    for (std::size_t k = 0; k < len; ++k) dev[k] = std::norm(buf[k] - mean);
    blocks[b] = {double(len), mean, pairwise_sum(dev.data(), len)};
  };

  const unsigned nthreads = std::min<std::size_t>(thread_count(), nblocks);
  if (nthreads <= 1) {
    std::vector<cplx> buf;
    std::vector<double> dev;
    for (std::size_t b = 0; b < nblocks; ++b) do_block(b, buf, dev);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        std::vector<cplx> buf;
        std::vector<double> dev;
        try {
          for (std::size_t b = t; b < nblocks; b += nthreads) do_block(b, buf, dev);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  const Moments m = tree_merge(blocks, 0, nblocks);
  IntegralEstimate est;
  est.value = m.mean;
  est.std_error = samples > 1 ? std::sqrt(m.m2 / double(samples - 1) / double(samples)) : 0.0;
  est.samples = samples;
  est.seed = seed;
  return est;
}

// ---------------------------------------------------------------------------
// Importance density over the chart (h, y', x', x_n)

struct Component {
  Vecd x0;
  Vecd yp0;
  double h0;
};

double cauchy_density(double d, double scale) {
  const double t = d / scale;
  return 1.0 / (pi * scale * (1.0 + t * t));
}
double cauchy_draw(double u, double scale) { return scale * std::tan(pi * (u - 0.5)); }

double laplace_density(double d, double scale) { return std::exp(-std::abs(d) / scale) / (2.0 * scale); }
double laplace_draw(double u, double scale) {
  return u < 0.5 ? scale * std::log(2.0 * u) : -scale * std::log(2.0 * (1.0 - u));
}

class TubeProposal {
 public:
  TubeProposal(Index n, const Proposal& proposal, Strategy strategy)
      : n_(n), a_(proposal.h_tail), exponential_(strategy == Strategy::ImportanceExponential) {
    if (!(a_ > 0)) throw DomainError("Proposal: h_tail must be > 0");
    std::vector<TubePointd> centers = proposal.centers;
    if (centers.empty()) centers.push_back(TubePointd::axis(n, 1.0));
    for (const auto& c : centers) {
      if (c.dim() != n) throw DomainError("Proposal: center dimension mismatch");
      if (!c.interior()) throw DomainError("Proposal: center must be interior");
      comps_.push_back({c.x, Vecd(c.y.head(n - 1)), c.defect()});
    }
  }

  int dims() const { return int(2 * n_) + (comps_.size() > 1 ? 1 : 0); }

  // Draws from uniforms u[0..dims()). Returns the chart coordinates.
  void draw(const double* u, Vecd& x, Vecd& yp, double& h) const {
    std::size_t c = 0;
    if (comps_.size() > 1) {
      c = std::min<std::size_t>(comps_.size() - 1, std::size_t(*u * double(comps_.size())));
      ++u;
    }
    const Component& k = comps_[c];
    if (exponential_) {
      h = -k.h0 * std::log(u[0]);
    } else {
      h = k.h0 * std::pow(u[0] / (1.0 - u[0]), 1.0 / a_);
    }
    const double s = h + k.h0;
    const double sq = std::sqrt(s);
    auto draw1 = [&](double uu, double scale) {
      return exponential_ ? laplace_draw(uu, scale) : cauchy_draw(uu, scale);
    };
    double shift = 0;
    for (Index j = 0; j + 1 < n_; ++j) {
      yp(j) = k.yp0(j) + draw1(u[1 + j], sq);
      x(j) = k.x0(j) + draw1(u[n_ + j], sq);
      shift += (x(j) - k.x0(j)) * (k.yp0(j) + yp(j));
    }
    x(n_ - 1) = k.x0(n_ - 1) + shift + draw1(u[2 * n_ - 1], s);
  }

  double density(const Vecd& x, const Vecd& yp, double h) const {
    double total = 0;
    for (const Component& k : comps_) {
      const double v = h / k.h0;
      double q;
      if (exponential_) {
        q = std::exp(-v) / k.h0;
      } else {
        const double va = std::pow(v, a_);
        q = a_ * va / v / ((1.0 + va) * (1.0 + va)) / k.h0;
      }
      const double s = h + k.h0;
      const double sq = std::sqrt(s);
      auto dens1 = [&](double d, double scale) {
        return exponential_ ? laplace_density(d, scale) : cauchy_density(d, scale);
      };
      double shift = 0;
      for (Index j = 0; j + 1 < n_; ++j) {
        q *= dens1(yp(j) - k.yp0(j), sq) * dens1(x(j) - k.x0(j), sq);
        shift += (x(j) - k.x0(j)) * (k.yp0(j) + yp(j));
      }
      q *= dens1(x(n_ - 1) - k.x0(n_ - 1) - shift, s);
      total += q;
    }
    return total / double(comps_.size());
  }

 private:
  Index n_;
  double a_;
  bool exponential_;
  std::vector<Component> comps_;
};

// Fills u[0..d) for sample i: jittered strata for the first m^d samples
// under StratifiedGrid, plain uniforms otherwise.
void fill_uniforms(CounterRng& rng, std::uint64_t i, std::uint64_t samples, int d, bool stratified,
                   double* u) {
  if (stratified) {
    std::uint64_t m = std::uint64_t(std::floor(std::pow(double(samples), 1.0 / d)));
    while (m > 1 && std::pow(double(m), d) > double(samples)) --m;
    std::uint64_t cells = 1;
    for (int j = 0; j < d; ++j) cells *= m;
    if (m >= 2 && i < cells) {
      std::uint64_t idx = i;
      for (int j = 0; j < d; ++j) {
        const std::uint64_t digit = idx % m;
        idx /= m;
        u[j] = (double(digit) + rng.uniform()) / double(m);
      }
      return;
    }
  }
  for (int j = 0; j < d; ++j) u[j] = rng.uniform();
}

}  // namespace

IntegralEstimate integrate_tube(const WeightParams& params, const TubeFunction& f,
                                const SamplingPlan& plan) {
  const Index n = params.n;
  const TubeProposal proposal(n, plan.proposal, plan.strategy);
  const int d = proposal.dims();
  const bool stratified = plan.strategy == Strategy::StratifiedGrid;
  const double alpha = params.alpha;
  return run_sampler(plan.samples, plan.seed, [&](std::uint64_t i) -> cplx {
    CounterRng rng(plan.seed, i);
    std::array<double, 64> u{};
    if (d > int(u.size())) throw DomainError("integrate_tube: dimension too large");
    fill_uniforms(rng, i, plan.samples, d, stratified, u.data());
    Vecd x(n), yp(n - 1);
    double h;
    proposal.draw(u.data(), x, yp, h);
    if (!(h > 0) || !std::isfinite(h)) return cplx(0, 0);  // measure-zero edge of the chart
    const double q = proposal.density(x, yp, h);
    if (!(q > 0)) {
      std::ostringstream os;
      os << "zero proposal density at sample " << i;
      throw NumericalError(os.str());
    }
    const TubePointd w = TubePointd::from_chart(x, yp, h);
    const cplx fv = f(w);
    if (fv == cplx(0, 0)) return fv;
    return fv * (std::pow(h, alpha) / q);
  });
}

IntegralEstimate integrate_tube(const WeightParams& params, const RealTubeFunction& f,
                                const SamplingPlan& plan) {
  IntegralEstimate est =
      integrate_tube(params, TubeFunction([&f](const TubePointd& w) { return cplx(f(w), 0.0); }), plan);
  est.value.imag(0.0);
  return est;
}

IntegralEstimate integrate_ball(const WeightParams& params, const RealTubeFunction& f,
                                const BergmanBall<double>& ball, const SamplingPlan& plan) {
  const Index n = params.n;
  const TubePointd& z = ball.center;
  if (z.dim() != n) throw DomainError("integrate_ball: dimension mismatch");
  const double r = ball.radius;
  const double h0 = z.defect();
  // |rho(z,w)| < rho(z) e^r cosh r on the ball, hence the box below.
  const double bound = h0 * std::exp(r) * std::cosh(r);
  const double half_t = 2.0 * std::sqrt(bound) * 1.01;  // x', y' half-widths
  const double half_n = 2.0 * bound * 1.01;              // x_n half-width about its shear
  const double log_lo = std::log(h0) - 2.0 * r * 1.001;
  const double log_w = 4.0 * r * 1.001;
  double volume = log_w * 2.0 * half_n;
  for (Index j = 0; j + 1 < n; ++j) volume *= (2.0 * half_t) * (2.0 * half_t);
  const Vecd yp0 = z.y.head(n - 1);
  const int d = int(2 * n);
  const bool stratified = plan.strategy == Strategy::StratifiedGrid;
  const double alpha = params.alpha;

  return run_sampler(plan.samples, plan.seed, [&](std::uint64_t i) -> cplx {
    CounterRng rng(plan.seed, i);
    std::array<double, 64> u{};
    fill_uniforms(rng, i, plan.samples, d, stratified, u.data());
    const double h = std::exp(log_lo + log_w * u[0]);
    Vecd x(n), yp(n - 1);
    double shift = 0;
    for (Index j = 0; j + 1 < n; ++j) {
      yp(j) = yp0(j) + half_t * (2.0 * u[1 + j] - 1.0);
      x(j) = z.x(j) + half_t * (2.0 * u[n + j] - 1.0);
      shift += (x(j) - z.x(j)) * (yp0(j) + yp(j));
    }
    x(n - 1) = z.x(n - 1) + shift + half_n * (2.0 * u[2 * n - 1] - 1.0);
    const TubePointd w = TubePointd::from_chart(x, yp, h);
    if (!ball.contains(w)) return cplx(0, 0);
    const double fv = f(w);
    if (fv == 0.0) return cplx(0, 0);
    return cplx(volume * fv * std::pow(h, alpha + 1.0), 0.0);
  });
}

IntegralEstimate ball_volume(const WeightParams& params, const BergmanBall<double>& ball,
                             const SamplingPlan& plan) {
  return integrate_ball(params, [](const TubePointd&) { return 1.0; }, ball, plan);
}

// ---------------------------------------------------------------------------
// Deterministic rule (n = 1)

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  cplx value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename F>
Panel gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx kron = fc * kWgk[7];
  cplx gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = hw * kXgk[j];
    const cplx s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  kron *= hw;
  gauss *= hw;
  return {a, b, kron, std::abs(kron - gauss)};
}

template <typename F>
cplx adaptive_gk(const F& f, double a, double b, double rel_tol, double& err_out) {
  std::priority_queue<Panel> heap;
  Panel first = gk15(f, a, b);
  cplx total = first.value;
  double err = first.error;
  heap.push(first);
  for (int iter = 0; iter < 4000 && err > rel_tol * std::abs(total) && err > 1e-300; ++iter) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = gk15(f, worst.a, mid), right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  err_out = err;
  return total;
}

}  // namespace

IntegralEstimate integrate_tube_adaptive(const WeightParams& params, const TubeFunction& f,
                                         const TubePointd& center, double rel_tol) {
  if (params.n != 1) throw DomainError("integrate_tube_adaptive: only n = 1 is supported");
  if (center.dim() != 1 || !center.interior())
    throw DomainError("integrate_tube_adaptive: center must be an interior point with n = 1");
  const double h0 = center.defect();
  const double x0 = center.x(0);
  std::uint64_t evals = 0;
  double inner_err_total = 0;
  auto outer = [&](double uh) -> cplx {
    const double h = h0 * uh / (1.0 - uh);
    const double dh = h0 / ((1.0 - uh) * (1.0 - uh));
    const double s = h + h0;
    auto inner = [&](double ux) -> cplx {
      const double den = ux * (1.0 - ux);
      const double x = x0 + s * (ux - 0.5) / den;
      const double dx = s * (ux * ux - ux + 0.5) / (den * den);
      ++evals;
      Vecd xv(1), yv(1);
      xv(0) = x;
      yv(0) = h;
      const cplx v = f(TubePointd(xv, yv));
      if (v == cplx(0, 0)) return v;
      return v * dx;
    };
    double e;
    const cplx val = adaptive_gk(inner, 0.0, 1.0, rel_tol * 0.1, e);
    inner_err_total += e * std::pow(h, params.alpha) * dh;
    return val * std::pow(h, params.alpha) * dh;
  };
  double err;
  IntegralEstimate est;
  est.value = adaptive_gk(outer, 0.0, 1.0, rel_tol, err);
  est.std_error = err;
  est.samples = evals;
  est.seed = 0;
  return est;
}

// ---------------------------------------------------------------------------

double c1_constant(Index n, double r, double s, double t) {
  const double e = r + s - t - double(n) - 1.0;
  const double logc = double(n + 1) * std::log(2.0) + double(n) * std::log(pi) + std::lgamma(1.0 + t) +
                      std::lgamma(e) - std::lgamma(r) - std::lgamma(s);
  return std::exp(logc);
}

double safe_h_tail(Index n, double s, double t) {
  const double m = s - t - double(n);
  return std::clamp(std::min({1.0, t + 1.0, m - 1.0}), 0.05, 1.0);
}

IdentityReport verify_identity(Index n, double r, double s, double t, const TubePointd& z,
                               const TubePointd& u, const SamplingPlan& plan) {
  if (!(r > 0) || !(s > 0))
    throw DomainError("divergent integral: requires r, s > 0");
  if (!(t > -1))
    throw DomainError("divergent integral: requires t > -1 (otherwise the integral is infinite)");
  if (!(r + s - t > double(n) + 1))
    throw DomainError("divergent integral: requires r + s - t > n + 1");
  detail::require_interior(z, "verify_identity");
  detail::require_interior(u, "verify_identity");
  if (z.dim() != n || u.dim() != n) throw DomainError("verify_identity: dimension mismatch");

  SamplingPlan p = plan;
  if (p.proposal.centers.empty()) p.proposal.centers = (z == u) ? std::vector{z} : std::vector{z, u};
  p.proposal.h_tail = safe_h_tail(n, r + s, t);
  const WeightParams wp(n, t);
  IdentityReport rep;
  rep.measured = integrate_tube(
      wp,
      TubeFunction([&](const TubePointd& w) {
        return 1.0 / (rho_pow(rho(z, w), r) * rho_pow(rho(w, u), s));
      }),
      p);
  rep.predicted = c1_constant(n, r, s, t) / rho_pow(rho(z, u), r + s - t - double(n) - 1.0);
  const double diff = std::abs(rep.measured.value - rep.predicted);
  rep.sigma_distance = rep.measured.std_error > 0 ? diff / rep.measured.std_error
                                                  : (diff == 0 ? 0.0 : INFINITY);
  return rep;
}

IntegralEstimate integrate_tube_checked(const WeightParams& params, const RealTubeFunction& f,
                                        const SamplingPlan& plan, const char* what) {
  const IntegralEstimate full = integrate_tube(params, f, plan);
  const double v = full.value.real();
  if (v <= 0 || plan.samples < 4096) return full;
  // Samples are index-addressed, so a shorter plan draws a prefix of the same
  // sequence; a sum that keeps growing across doublings has a heavy tail.
  const double e1 = integrate_tube(params, f, plan.with_samples(plan.samples / 4)).value.real();
  const double e2 = integrate_tube(params, f, plan.with_samples(plan.samples / 2)).value.real();
  const double rel = full.std_error / v;
  if ((e1 < e2 && e2 < v && v > 1.5 * e1) || rel > 0.5) {
    std::ostringstream os;
    os << what << ": likely non-integrable (prefix estimates " << e1 << ", " << e2 << ", " << v
       << "; relative error " << rel << ")";
    throw DivergenceError(os.str());
  }
  return full;
}

NormEstimate norm_p_alpha(const SpaceIndex& space, const TubeFunction& f, Index n,
                          const SamplingPlan& plan) {
  const double p = space.p;
  const RealTubeFunction g = [&](const TubePointd& w) {
    const double a = std::abs(f(w));
    return a == 0 ? 0.0 : std::pow(a, p);
  };
  NormEstimate out;
  out.power = integrate_tube_checked(WeightParams(n, space.alpha), g, plan, "norm_p_alpha");
  const double v = out.power.value.real();
  if (v <= 0) return out;
  out.value = std::pow(v, 1.0 / p);
  out.std_error = out.value * (out.power.std_error / v) / p;
  return out;
}

}  // namespace tube
