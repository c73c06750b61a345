#pragma once

// JSON and CSV exchange formats. Reals are written with 17 significant
// digits so that every value round-trips exactly.

#include <tube/lattice.hpp>
#include <tube/measures.hpp>
#include <tube/operators.hpp>
#include <tube/quadrature.hpp>

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace tube {

using json = nlohmann::ordered_json;

/// Malformed input file or document; the message locates the problem.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "%.17g".
std::string format_real(double v);

// {"x":[...], "y":[...]}
json to_json(const TubePointd& z);
TubePointd tube_point_from_json(const json& j);

// {"re":[...], "im":[...]}
json to_json(const BallPointd& b);
BallPointd ball_point_from_json(const json& j);

// {"type":"discrete","atoms":[{"x":[..],"y":[..],"w":..}]}
// {"type":"density","name":..,"params":{..},"mplus_t":..}  (optional "n", "scale")
json to_json(const Measure& mu);
Measure measure_from_json(const json& j);
/// Reads a measure file; throws ParseError with the path and the reason.
Measure load_measure(const std::string& path);

json to_json(const IdentityReport& rep);
json to_json(const OperatorNormEstimate& est);

/// Comment lines "# r=..", "# n=..", "# x_bound=.." ... then the header
/// x_1..x_n,y_1..y_n and one row per point.
void write_lattice_csv(std::ostream& os, const Lattice& lat);
/// Reads points, r and region back; derived statistics are left at defaults.
Lattice read_lattice_csv(std::istream& is);

/// Columns k,ball_mass,rho,summand.
void write_sequence_csv(std::ostream& os, const SequenceCriterion& seq);

}  // namespace tube
