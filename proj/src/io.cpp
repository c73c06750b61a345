#include <tube/io.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace tube {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

Vecd real_array(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of numbers");
  Vecd v(Index(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(Index(k)) = number_at(j[k], where + "[" + std::to_string(k) + "]");
  return v;
}

json real_list(const auto& v) {
  json a = json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(double(v(k)));
  return a;
}

TubePointd point_at(const json& j, const std::string& where) {
  const Vecd x = real_array(field(j, "x", where), where + ".x");
  const Vecd y = real_array(field(j, "y", where), where + ".y");
  if (x.size() != y.size()) fail(where, "x and y lengths differ");
  return TubePointd(x, y);
}

}  // namespace

json to_json(const TubePointd& z) { return json{{"x", real_list(z.x)}, {"y", real_list(z.y)}}; }

TubePointd tube_point_from_json(const json& j) { return point_at(j, "point"); }

json to_json(const BallPointd& b) {
  return json{{"re", real_list(b.w.real().eval())}, {"im", real_list(b.w.imag().eval())}};
}

BallPointd ball_point_from_json(const json& j) {
  const Vecd re = real_array(field(j, "re", "ball point"), "ball point.re");
  const Vecd im = real_array(field(j, "im", "ball point"), "ball point.im");
  if (re.size() != im.size()) fail("ball point", "re and im lengths differ");
  CVecd w(re.size());
  for (Index k = 0; k < re.size(); ++k) w(k) = cplx(re(k), im(k));
  try {
    return BallPointd(w);
  } catch (const DomainError& e) {
    fail("ball point", e.what());
  }
}

json to_json(const Measure& mu) {
  if (mu.is_discrete()) {
    json atoms = json::array();
    for (const auto& a : mu.atoms()) {
      json e = to_json(a.z);
      e["w"] = a.weight;
      atoms.push_back(std::move(e));
    }
    return json{{"type", "discrete"}, {"n", mu.dim()}, {"atoms", std::move(atoms)}};
  }
  const Density& d = mu.density_part();
  json params = json::object();
  for (const auto& [k, v] : d.params) params[k] = v;
  json out{{"type", "density"}, {"n", mu.dim()}, {"name", d.name}, {"params", std::move(params)},
           {"mplus_t", d.mplus_t}};
  if (d.scale != 1.0) out["scale"] = d.scale;
  return out;
}

Measure measure_from_json(const json& j) {
  if (!j.is_object()) fail("measure", "expected an object");
  const json& type = field(j, "type", "measure");
  if (!type.is_string()) fail("measure.type", "expected a string");
  Index n = 0;
  if (auto it = j.find("n"); it != j.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) fail("measure.n", "expected an integer >= 1");
    n = Index(it->get<long long>());
  }
  const std::string t = type.get<std::string>();
  Measure mu;
  try {
    if (t == "discrete") {
      const json& atoms = field(j, "atoms", "measure");
      if (!atoms.is_array()) fail("measure.atoms", "expected an array");
      std::vector<Atom> list;
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        const std::string where = "measure.atoms[" + std::to_string(k) + "]";
        Atom a{point_at(atoms[k], where), number_at(field(atoms[k], "w", where), where + ".w")};
        if (n == 0) n = a.z.dim();
        if (a.z.dim() != n) fail(where, "dimension differs from the measure's");
        list.push_back(std::move(a));
      }
      mu = Measure::discrete(n == 0 ? 1 : n, std::move(list));
    } else if (t == "density") {
      const json& name = field(j, "name", "measure");
      if (!name.is_string()) fail("measure.name", "expected a string");
      std::map<std::string, double> params;
      if (auto it = j.find("params"); it != j.end()) {
        if (!it->is_object()) fail("measure.params", "expected an object");
        for (const auto& [k, v] : it->items()) params[k] = number_at(v, "measure.params." + k);
      }
      const double mplus_t = number_at(field(j, "mplus_t", "measure"), "measure.mplus_t");
      mu = Measure::density(n == 0 ? 1 : n, name.get<std::string>(), params, mplus_t);
      if (auto it = j.find("scale"); it != j.end()) mu = mu.scaled(number_at(*it, "measure.scale"));
    } else {
      fail("measure.type", "unknown type \"" + t + "\" (expected \"discrete\" or \"density\")");
    }
  } catch (const DomainError& e) {
    throw ParseError(std::string("measure: ") + e.what());
  }
  return mu;
}

Measure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return measure_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

json to_json(const IdentityReport& rep) {
  return json{{"value_re", rep.measured.value.real()},
              {"value_im", rep.measured.value.imag()},
              {"std_error", rep.measured.std_error},
              {"samples", rep.measured.samples},
              {"seed", rep.measured.seed},
              {"predicted_re", rep.predicted.real()},
              {"predicted_im", rep.predicted.imag()},
              {"sigma_distance", rep.sigma_distance}};
}

json to_json(const OperatorNormEstimate& est) {
  json per = json::array();
  for (double v : est.per_probe) per.push_back(v);
  return json{{"lower", est.lower},
              {"carleson_surrogate", est.carleson_surrogate},
              {"ratio", est.ratio},
              {"argmax", to_json(est.argmax)},
              {"per_probe", std::move(per)}};
}

void write_lattice_csv(std::ostream& os, const Lattice& lat) {
  const Region& R = lat.region;
  os << "# r=" << format_real(lat.r) << "\n"
     << "# n=" << R.n << "\n"
     << "# x_bound=" << format_real(R.x_bound) << "\n"
     << "# yprime_bound=" << format_real(R.yprime_bound) << "\n"
     << "# h_min=" << format_real(R.h_min) << "\n"
     << "# h_max=" << format_real(R.h_max) << "\n";
  for (Index j = 0; j < R.n; ++j) os << (j ? "," : "") << "x_" << j + 1;
  for (Index j = 0; j < R.n; ++j) os << ",y_" << j + 1;
  os << "\n";
  for (const auto& z : lat.points) {
    for (Index j = 0; j < R.n; ++j) os << (j ? "," : "") << format_real(z.x(j));
    for (Index j = 0; j < R.n; ++j) os << "," << format_real(z.y(j));
    os << "\n";
  }
}

Lattice read_lattice_csv(std::istream& is) {
  std::map<std::string, double> meta;
  std::string line;
  bool header = false;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string where = "lattice csv line " + std::to_string(lineno);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      try {
        meta[key] = std::stod(line.substr(eq + 1));
      } catch (const std::exception&) {
        fail(where, "bad value for " + key);
      }
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        fail(where, "bad number \"" + cell + "\"");
      }
    }
    rows.push_back(std::move(row));
  }
  for (const char* key : {"r", "n", "x_bound", "yprime_bound", "h_min", "h_max"})
    if (!meta.count(key)) fail("lattice csv", std::string("missing comment line \"# ") + key + "=\"");
  Lattice lat;
  lat.r = meta["r"];
  const Index n = Index(meta["n"]);
  try {
    lat.region = Region(n, meta["x_bound"], meta["yprime_bound"], meta["h_min"], meta["h_max"]);
  } catch (const DomainError& e) {
    fail("lattice csv", e.what());
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != std::size_t(2 * n)) fail("lattice csv row " + std::to_string(k + 1), "expected 2n columns");
    Vecd x(n), y(n);
    for (Index j = 0; j < n; ++j) {
      x(j) = rows[k][std::size_t(j)];
      y(j) = rows[k][std::size_t(n + j)];
    }
    lat.points.emplace_back(std::move(x), std::move(y));
  }
  return lat;
}

void write_sequence_csv(std::ostream& os, const SequenceCriterion& seq) {
  os << "k,ball_mass,rho,summand\n";
  for (const auto& r : seq.summand_profile)
    os << r.k << "," << format_real(r.ball_mass) << "," << format_real(r.rho) << "," << format_real(r.summand) << "\n";
}

}  // namespace tube
