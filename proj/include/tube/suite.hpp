#pragma once

// The verification battery shared by `tube_verify suite` and the acceptance
// test: one row per check, grouped by acceptance criterion.

#include <tube/measures.hpp>
#include <tube/rng.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tube {

enum class Relation {
  Abs,    // |measured - expected| <= tolerance
  Rel,    // |measured - expected| <= tolerance * |expected|
  AtLeast,  // measured >= expected - tolerance
  AtMost,   // measured <= expected + tolerance
};

struct CheckRow {
  int criterion = 0;
  std::string name;
  double measured = 0;
  double expected = 0;
  double tolerance = 0;
  Relation relation = Relation::Abs;
  bool pass = false;
};

CheckRow make_row(int criterion, std::string name, double measured, double expected, double tolerance,
                  Relation relation = Relation::Abs);

struct SuiteOptions {
  bool quick = false;  // samples / 10, tolerances x 3
  std::uint64_t seed = kDefaultSeed;
  std::optional<Measure> measure;  // extra rows for a user measure
};

constexpr int kSuiteCriteria = 9;

/// Rows of criterion k in 1..9.
std::vector<CheckRow> criterion_rows(int k, const SuiteOptions& opt);

/// All criteria, then the user-measure rows if a measure is given.
std::vector<CheckRow> run_suite(const SuiteOptions& opt);

/// The three Carleson indicators (ratio along paths, B_{lambda,t} with
/// t = 2, normalised test-function integrals along paths) and the two
/// vanishing indicators (ratio and B_{lambda,t} decay).
struct CarlesonIndicators {
  Verdict ratio = Verdict::Bounded;
  Verdict berezin = Verdict::Bounded;
  Verdict test_functions = Verdict::Bounded;
  bool ratio_vanishes = false;
  bool berezin_vanishes = false;
  std::vector<PathProfile> ratio_profiles;
  std::vector<PathProfile> berezin_profiles;
  std::vector<PathProfile> constant_profiles;

  bool carleson_agree() const { return ratio == berezin && berezin == test_functions; }
  bool vanishing_agree() const { return ratio_vanishes == berezin_vanishes; }
};

CarlesonIndicators carleson_indicators(const Measure& mu, const CarlesonParams& cp, double r,
                                       const SamplingPlan& plan);

/// Columns name,measured,expected,tolerance,pass.
void write_suite_csv(std::ostream& os, const std::vector<CheckRow>& rows);

}  // namespace tube
