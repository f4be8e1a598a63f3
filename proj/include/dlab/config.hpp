#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dlab/linalg.hpp"

namespace dlab {

enum class ExperimentKind {
  kRunGd,
  kRunFlow,
  kVerify,
  kClassifySchedule,
  kDivergenceDemo,
  kPdmDemo,
};

const char* to_string(ExperimentKind k);

// Validated experiment description. Defaults are documented in the README;
// unknown keys in the config file are a hard error.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kRunGd;
  std::uint64_t seed = 0;

  // [objective]
  std::string objective;
  std::size_t dim = 1;            // quadratic_bowl only
  std::size_t max_segments = 10'000'000;  // staircase

  // [schedule]
  std::string schedule;
  double exponent = 0.5;          // power, diagonal_power
  double scale = 1.0;             // power
  double constant_value = 0.1;    // constant
  std::vector<double> weights;    // diagonal_power

  // [experiment]
  Point x0;
  long budget = 10'000;
  long horizon = 100'000;         // classify-schedule
  std::vector<double> q_grid = {2.0, 4.0, 8.0};
  double T = 1.0;                 // run-flow
  int bisect_iters = 40;          // pdm-demo
  double bisect_T = 100.0;
  double contrast_T = 200.0;
  double bisect_margin = 1e-4;

  // [tolerances]
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double tol_x = 0.0;             // 0 = auto: 1e-6 * (1 + |x0|)
  double tol_g = 1e-6;
  double escape_radius = 0.0;     // 0 = auto: 1e3 * (1 + |x0|)
  double tail_fraction = 0.1;
  double chi_radius = 1e300;
  double verify_radius = 2.0;
  double settle_tol = 0.9;
  long constants_samples = 10'000;

  // [output]
  std::string out_dir = "out";
  bool write_svg = true;
};

// One key = value entry of a sectioned config file.
struct RawEntry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line = 0;
};

using RawConfig = std::vector<RawEntry>;

// Line-oriented "key = value" under [section] headers; '#' and ';' start
// comments. Throws ParseError with the offending line.
RawConfig parse_raw_config(const std::string& text);

// "section.key=value" override (the --set flag). Replaces an existing entry
// or appends a new one.
void apply_override(RawConfig& raw, const std::string& assignment);

// Validates keys and values and fills defaults. Throws UnknownKeyError /
// InvalidValueError (both carry line numbers).
ExperimentConfig validate_config(const RawConfig& raw);

ExperimentConfig parse_config(const std::string& text);

}  // namespace dlab
