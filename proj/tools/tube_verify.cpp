// tube_verify: batch verifications on the tube domain over the paraboloid.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or parameter
// regime error. Reports go to stdout (or --output) in one write at the end.

#include <tube/io.hpp>
#include <tube/kernel.hpp>
#include <tube/lattice.hpp>
#include <tube/measures.hpp>
#include <tube/operators.hpp>
#include <tube/quadrature.hpp>
#include <tube/rng.hpp>
#include <tube/suite.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace tube;

namespace {

struct Common {
  long n = 1;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t samples = 100000;
  std::string output;
  std::string format = "json";
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* app, Common& c, std::uint64_t default_samples, const std::string& default_format) {
  c.samples = default_samples;
  c.format = default_format;
  app->add_option("--n", c.n, "complex dimension")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--seed", c.seed, "random seed")->capture_default_str();
  app->add_option("--samples", c.samples, "Monte-Carlo samples (>= 1000)")
      ->check(CLI::Range(std::uint64_t(1000), std::uint64_t(1) << 40))
      ->capture_default_str();
  app->add_option("-o,--output", c.output, "write the report here instead of stdout");
  app->add_option("--format", c.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

SamplingPlan plan_of(const Common& c) {
  SamplingPlan p;
  p.samples = c.samples;
  p.seed = c.seed;
  return p;
}

std::string region_text(const Region& R) {
  std::ostringstream os;
  os << "|x| <= " << R.x_bound << ", |y'| <= " << R.yprime_bound << ", rho in [" << R.h_min << ", " << R.h_max
     << "]";
  return os.str();
}

// Every report starts with the configuration, defaults included.
void header(std::ostream& os, const std::string& cmd, const Common& c, const std::string& alpha,
            const std::vector<std::pair<std::string, std::string>>& extra) {
  os << "# tube_verify " << cmd << "\n"
     << "# n: " << c.n << "\n"
     << "# alpha: " << alpha << "\n"
     << "# region: " << region_text(Region::default_region(c.n)) << " (default)\n"
     << "# seed: " << c.seed << "\n"
     << "# samples: " << c.samples << "\n"
     << "# threads: results do not depend on TUBE_THREADS\n";
  for (const auto& [k, v] : extra) os << "# " << k << ": " << v << "\n";
}

TubePointd parse_point(const std::string& text, Index n, const char* what) {
  if (text.empty()) return TubePointd::axis(n, 1.0);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string(what) + ": invalid JSON point: " + e.what());
  }
  try {
    const TubePointd z = tube_point_from_json(j);
    if (z.dim() != n) throw UsageError(std::string(what) + ": point dimension differs from --n");
    return z;
  } catch (const ParseError& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

Measure pick_measure(const std::string& file, const std::string& zoo, Index n, const CarlesonParams& cp) {
  if (!file.empty() && !zoo.empty()) throw UsageError("give either --measure or --zoo, not both");
  if (!file.empty()) {
    Measure mu = load_measure(file);
    if (mu.dim() != n) throw UsageError("measure dimension " + std::to_string(mu.dim()) + " differs from --n");
    return mu;
  }
  const std::string name = zoo.empty() ? "atom" : zoo;
  for (auto& e : measure_zoo(n, cp))
    if (e.name == name) return e.mu;
  throw UsageError("unknown zoo measure \"" + name + "\" (atom, atom-cloud, matched-density, mismatched-density)");
}

std::string measure_label(const std::string& file, const std::string& zoo) {
  if (!file.empty()) return file;
  return "zoo:" + (zoo.empty() ? std::string("atom") : zoo);
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw UsageError("cannot write " + c.output);
  out << text;
}

void profiles_csv(std::ostream& os, const char* quantity, const std::vector<PathProfile>& ps) {
  for (const auto& p : ps)
    for (std::size_t i = 0; i < p.value.size(); ++i)
      os << quantity << "," << to_string(p.kind) << "," << format_real(p.parameter[i]) << ","
         << format_real(p.value[i]) << "\n";
}

json profiles_json(const std::vector<PathProfile>& ps) {
  json out = json::object();
  for (const auto& p : ps) out[to_string(p.kind)] = json{{"parameter", p.parameter}, {"value", p.value}};
  return out;
}

// ---------------------------------------------------------------------------

struct IdentityArgs {
  Common c;
  double r = 2, s = 2, t = 0;
  std::string z, u;
};

int cmd_verify_identity(const IdentityArgs& a) {
  const Index n = a.c.n;
  const TubePointd z = parse_point(a.z, n, "--z"), u = parse_point(a.u, n, "--u");
  const IdentityReport rep = verify_identity(n, a.r, a.s, a.t, z, u, plan_of(a.c));
  const bool pass = rep.sigma_distance < 4;
  std::ostringstream os;
  header(os, "verify-identity", a.c, "t = " + format_real(a.t) + " (weight of the integral)",
         {{"r", format_real(a.r)}, {"s", format_real(a.s)}, {"t", format_real(a.t)},
          {"z", to_json(z).dump()}, {"u", to_json(u).dump()}, {"pass_rule", "sigma_distance < 4"}});
  json j = to_json(rep);
  if (a.c.format == "csv") {
    bool first = true;
    for (const auto& [k, v] : j.items()) os << (first ? "" : ",") << k, first = false;
    os << ",pass\n";
    first = true;
    for (const auto& [k, v] : j.items()) {
      os << (first ? "" : ",") << (v.is_number_float() ? format_real(v.get<double>()) : v.dump());
      first = false;
    }
    os << "," << (pass ? "true" : "false") << "\n";
  } else {
    j["pass"] = pass;
    os << j.dump(2) << "\n";
  }
  emit(a.c, os.str());
  return pass ? 0 : 1;
}

struct SuiteArgs {
  Common c;
  bool quick = false;
  std::string measure;
};

int cmd_suite(const SuiteArgs& a) {
  SuiteOptions opt;
  opt.quick = a.quick;
  opt.seed = a.c.seed;
  if (!a.measure.empty()) opt.measure = load_measure(a.measure);
  const auto rows = run_suite(opt);
  std::ostringstream os;
  header(os, "suite", a.c, "0 unless a check names another",
         {{"quick", a.quick ? "true (samples / 10, tolerances x 3)" : "false"},
          {"measure", a.measure.empty() ? "none" : a.measure},
          {"samples_note", "per-check sample counts are fixed by the battery"}});
  if (a.c.format == "json") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"name", r.name}, {"measured", r.measured}, {"expected", r.expected}, {"tolerance", r.tolerance},
                     {"pass", r.pass}});
    os << arr.dump(2) << "\n";
  } else {
    write_suite_csv(os, rows);
  }
  emit(a.c, os.str());
  bool pass = true;
  for (const auto& r : rows)
    if (!r.pass) {
      std::cerr << "FAILED " << r.name << ": measured " << format_real(r.measured) << ", expected "
                << format_real(r.expected) << ", tolerance " << format_real(r.tolerance) << "\n";
      pass = false;
    }
  return pass ? 0 : 1;
}

struct CarlesonArgs {
  Common c;
  double lambda = 1, gamma = 0, r = 1;
  std::string measure, zoo;
};

int cmd_carleson(const CarlesonArgs& a) {
  const CarlesonParams cp(a.lambda, a.gamma);
  const Measure mu = pick_measure(a.measure, a.zoo, a.c.n, cp);
  const CarlesonIndicators ind = carleson_indicators(mu, cp, a.r, plan_of(a.c));
  const bool agree = ind.carleson_agree() && ind.vanishing_agree();
  const char* verdict = !ind.carleson_agree() ? "inconclusive"
                        : ind.ratio == Verdict::Bounded ? "Carleson-consistent"
                                                        : "not Carleson";
  const char* vanishing = !ind.vanishing_agree() ? "inconclusive" : ind.ratio_vanishes ? "vanishing" : "not vanishing";
  std::ostringstream os;
  header(os, "carleson", a.c, "gamma = " + format_real(a.gamma),
         {{"measure", measure_label(a.measure, a.zoo)}, {"lambda", format_real(a.lambda)},
          {"gamma", format_real(a.gamma)}, {"r", format_real(a.r)}, {"berezin_t", "2"},
          {"paths", "vertical-down, vertical-up, horizontal; k = 1..1000, 13 points"}});
  if (a.c.format == "csv") {
    os << "# verdict: " << verdict << "\n# vanishing: " << vanishing << "\n";
    os << "quantity,path,k,value\n";
    profiles_csv(os, "ratio", ind.ratio_profiles);
    profiles_csv(os, "berezin", ind.berezin_profiles);
    profiles_csv(os, "test_function", ind.constant_profiles);
  } else {
    json j{{"verdict", verdict},
           {"vanishing", vanishing},
           {"indicators",
            {{"ratio", to_string(ind.ratio)},
             {"berezin", to_string(ind.berezin)},
             {"test_function", to_string(ind.test_functions)},
             {"ratio_vanishes", ind.ratio_vanishes},
             {"berezin_vanishes", ind.berezin_vanishes}}},
           {"ratio", profiles_json(ind.ratio_profiles)},
           {"berezin", profiles_json(ind.berezin_profiles)},
           {"test_function", profiles_json(ind.constant_profiles)}};
    os << j.dump(2) << "\n";
  }
  emit(a.c, os.str());
  return agree ? 0 : 1;
}

struct BerezinArgs {
  Common c;
  double alpha = 0, s = 1, t = 2, r = 0.5;
  std::string measure, zoo;
};

int cmd_berezin(const BerezinArgs& a) {
  const Measure mu = pick_measure(a.measure, a.zoo, a.c.n, CarlesonParams(a.s >= 1 ? a.s : 1, a.alpha));
  const auto grid = default_probe_design(a.c.n, a.r, a.c.seed);
  const BerezinCheck bc =
      berezin_bounded_check(mu, a.alpha, a.s, a.t, grid, standard_paths(a.c.n), plan_of(a.c));
  const Verdict v = growth_verdict(bc.trend);
  std::ostringstream os;
  header(os, "berezin", a.c, format_real(a.alpha),
         {{"measure", measure_label(a.measure, a.zoo)}, {"alpha", format_real(a.alpha)}, {"s", format_real(a.s)},
          {"t", format_real(a.t)}, {"grid", "lattice r = " + format_real(a.r) + " on " +
                                                 region_text(Region::default_region(a.c.n)) + " plus path points"}});
  if (a.c.format == "csv") {
    os << "# sup: " << format_real(bc.sup) << "\n# trend: " << to_string(v) << "\n";
    os << "quantity,path,k,value\n";
    profiles_csv(os, "berezin", bc.trend);
  } else {
    json j{{"sup", bc.sup}, {"argmax", to_json(bc.argmax)}, {"trend", to_string(v)}, {"paths", profiles_json(bc.trend)}};
    os << j.dump(2) << "\n";
  }
  emit(a.c, os.str());
  return 0;
}

struct OpnormArgs {
  Common c;
  double p1 = 2, p2 = 2, alpha1 = 0, alpha2 = 0, xi = 2;
  std::size_t probes = 16;
  std::string measure, zoo;
};

int cmd_opnorm(const OpnormArgs& a) {
  if (!(a.p1 <= a.p2))
    throw DomainError("opnorm requires p1 <= p2 (lambda = 1 + 1/p1 - 1/p2 >= 1, the bounded-operator regime); "
                      "for p2 < p1 use the sequence subcommand");
  const SpacePair sp(a.c.n, a.p1, a.p2, a.alpha1, a.alpha2, a.xi);
  const CarlesonParams cp(sp.lambda(), sp.gamma());
  const Measure mu = pick_measure(a.measure, a.zoo, a.c.n, cp);
  const Region R = Region::default_region(a.c.n);
  const OperatorNormEstimate est =
      operator_norm_estimate(mu, sp, region_probes(R, a.probes, derive_seed(a.c.seed, 1)), plan_of(a.c));
  std::ostringstream os;
  header(os, "opnorm", a.c, "alpha1 = " + format_real(a.alpha1) + ", alpha2 = " + format_real(a.alpha2),
         {{"measure", measure_label(a.measure, a.zoo)}, {"p1", format_real(a.p1)}, {"p2", format_real(a.p2)},
          {"alpha1", format_real(a.alpha1)}, {"alpha2", format_real(a.alpha2)}, {"xi", format_real(a.xi)},
          {"lambda", format_real(sp.lambda())}, {"gamma", format_real(sp.gamma())},
          {"probes", std::to_string(a.probes) + " Halton points of " + region_text(R)},
          {"surrogate", "sup carleson_ratio, r = 0.5 balls over the r = 0.5 lattice design"}});
  if (a.c.format == "csv") {
    os << "lower,carleson_surrogate,ratio\n"
       << format_real(est.lower) << "," << format_real(est.carleson_surrogate) << "," << format_real(est.ratio)
       << "\n";
  } else {
    os << to_json(est).dump(2) << "\n";
  }
  emit(a.c, os.str());
  return 0;
}

struct SequenceArgs {
  Common c;
  double p1 = 2, p2 = 1.5, alpha1 = 0, alpha2 = 0, xi = 1, r = 0.5, enlarge = 1;
  std::string measure, zoo;
};

int cmd_sequence(const SequenceArgs& a) {
  if (!(a.p2 < a.p1)) throw DomainError("sequence requires p2 < p1 (lambda < 1); for p1 <= p2 use opnorm");
  const SpacePair sp(a.c.n, a.p1, a.p2, a.alpha1, a.alpha2, a.xi);
  const Measure mu = pick_measure(a.measure, a.zoo.empty() && a.measure.empty() ? "atom-cloud" : a.zoo, a.c.n,
                                  CarlesonParams(1, 0));
  const Region R = Region::default_region(a.c.n).enlarged(a.enlarge);
  const Lattice lat = generate_lattice(R, a.r, 1000, a.c.seed);
  const SequenceCriterion seq = sequence_criterion(mu, sp, lat, plan_of(a.c));
  std::ostringstream os;
  header(os, "sequence", a.c, "alpha1 = " + format_real(a.alpha1) + ", alpha2 = " + format_real(a.alpha2),
         {{"measure", measure_label(a.measure, a.zoo.empty() && a.measure.empty() ? "atom-cloud" : a.zoo)},
          {"p1", format_real(a.p1)}, {"p2", format_real(a.p2)}, {"alpha1", format_real(a.alpha1)},
          {"alpha2", format_real(a.alpha2)}, {"xi", format_real(a.xi)}, {"lambda", format_real(sp.lambda())},
          {"gamma", format_real(sp.gamma())}, {"r", format_real(a.r)}, {"region", region_text(R)},
          {"exponent", format_real(seq.exponent)}, {"norm", format_real(seq.norm)}});
  write_sequence_csv(os, seq);
  emit(a.c, os.str());
  return 0;
}

struct LatticeArgs {
  Common c;
  double r = 0.5, enlarge = 1;
  std::size_t density = 20000;
};

int cmd_lattice(const LatticeArgs& a) {
  const Region R = Region::default_region(a.c.n).enlarged(a.enlarge);
  const Lattice lat = generate_lattice(R, a.r, a.density, a.c.seed);
  std::ostringstream os;
  header(os, "lattice", a.c, "not used",
         {{"region", region_text(R)}, {"probe_density", std::to_string(a.density)},
          {"points", std::to_string(lat.points.size())}, {"overlap_stat", std::to_string(lat.overlap_stat)},
          {"min_separation", format_real(lat.min_separation)},
          {"separation_ok", lat.separation_ok ? "true" : "false"}});
  write_lattice_csv(os, lat);
  emit(a.c, os.str());
  return lat.separation_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification on the tube domain over the paraboloid"};
  app.require_subcommand(1);

  IdentityArgs ia;
  auto* vi = app.add_subcommand("verify-identity", "Monte-Carlo check of the two-kernel integral identity");
  add_common(vi, ia.c, 1'000'000, "json");
  vi->add_option("--r", ia.r)->capture_default_str();
  vi->add_option("--s", ia.s)->capture_default_str();
  vi->add_option("--t", ia.t)->capture_default_str();
  vi->add_option("--z", ia.z, "point as JSON {\"x\":[..],\"y\":[..]} (default (0', i))");
  vi->add_option("--u", ia.u, "point as JSON (default (0', i))");

  SuiteArgs sa;
  auto* su = app.add_subcommand("suite", "Run the full verification battery");
  add_common(su, sa.c, 100000, "csv");
  su->add_flag("--quick", sa.quick, "reduced samples, tolerances x 3");
  su->add_option("--measure", sa.measure, "extra rows for a measure JSON file");

  CarlesonArgs ca;
  auto* cs = app.add_subcommand("carleson", "Carleson and vanishing-Carleson indicators of a measure");
  add_common(cs, ca.c, 20000, "json");
  cs->add_option("--lambda", ca.lambda)->capture_default_str();
  cs->add_option("--gamma", ca.gamma)->capture_default_str();
  cs->add_option("--r", ca.r, "ball radius")->capture_default_str();
  cs->add_option("--measure", ca.measure, "measure JSON file");
  cs->add_option("--zoo", ca.zoo, "built-in measure (default atom)");

  BerezinArgs ba;
  auto* bz = app.add_subcommand("berezin", "Sup and boundary trend of the Berezin-type transform B_{s,t}");
  add_common(bz, ba.c, 20000, "json");
  bz->add_option("--alpha", ba.alpha)->capture_default_str();
  bz->add_option("--s", ba.s)->capture_default_str();
  bz->add_option("--t", ba.t)->capture_default_str();
  bz->add_option("--r", ba.r, "lattice radius of the grid")->capture_default_str();
  bz->add_option("--measure", ba.measure, "measure JSON file");
  bz->add_option("--zoo", ba.zoo, "built-in measure (default atom)");

  OpnormArgs oa;
  auto* on = app.add_subcommand("opnorm", "Toeplitz operator norm estimate against the Carleson surrogate");
  add_common(on, oa.c, 100000, "json");
  on->add_option("--p1", oa.p1)->capture_default_str();
  on->add_option("--p2", oa.p2)->capture_default_str();
  on->add_option("--alpha1", oa.alpha1)->capture_default_str();
  on->add_option("--alpha2", oa.alpha2)->capture_default_str();
  on->add_option("--xi", oa.xi)->capture_default_str();
  on->add_option("--probes", oa.probes, "number of test-function anchors")->check(CLI::PositiveNumber)->capture_default_str();
  on->add_option("--measure", oa.measure, "measure JSON file");
  on->add_option("--zoo", oa.zoo, "built-in measure (default atom)");

  SequenceArgs qa;
  auto* sq = app.add_subcommand("sequence", "Lattice sequence norm in the p2 < p1 regime (CSV)");
  add_common(sq, qa.c, 20000, "csv");
  sq->add_option("--p1", qa.p1)->capture_default_str();
  sq->add_option("--p2", qa.p2)->capture_default_str();
  sq->add_option("--alpha1", qa.alpha1)->capture_default_str();
  sq->add_option("--alpha2", qa.alpha2)->capture_default_str();
  sq->add_option("--xi", qa.xi)->capture_default_str();
  sq->add_option("--r", qa.r)->capture_default_str();
  sq->add_option("--enlarge", qa.enlarge, "region enlargement factor")->check(CLI::Range(1.0, 64.0))->capture_default_str();
  sq->add_option("--measure", qa.measure, "measure JSON file");
  sq->add_option("--zoo", qa.zoo, "built-in measure (default atom-cloud)");

  LatticeArgs la;
  auto* lt = app.add_subcommand("lattice", "Generate an r-lattice of the default region (CSV)");
  add_common(lt, la.c, 100000, "csv");
  lt->add_option("--r", la.r)->capture_default_str();
  lt->add_option("--enlarge", la.enlarge, "region enlargement factor")->check(CLI::Range(1.0, 64.0))->capture_default_str();
  lt->add_option("--density", la.density, "Halton candidates and overlap probes")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*vi) return cmd_verify_identity(ia);
    if (*su) return cmd_suite(sa);
    if (*cs) return cmd_carleson(ca);
    if (*bz) return cmd_berezin(ba);
    if (*on) return cmd_opnorm(oa);
    if (*sq) return cmd_sequence(qa);
    if (*lt) return cmd_lattice(la);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "regime error: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "divergent: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
