#include "dlab/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace dlab {

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kRunGd:
      return "run-gd";
    case ExperimentKind::kRunFlow:
      return "run-flow";
    case ExperimentKind::kVerify:
      return "verify";
    case ExperimentKind::kClassifySchedule:
      return "classify-schedule";
    case ExperimentKind::kDivergenceDemo:
      return "divergence-demo";
    case ExperimentKind::kPdmDemo:
      return "pdm-demo";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_double_value(const RawEntry& e) {
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (end == e.value.c_str() || *trim(end).c_str() != '\0')
    throw InvalidValueError("line " + std::to_string(e.line) + ": '" + e.key +
                            "' expects a number, got '" + e.value + "'");
  return v;
}

long parse_long_value(const RawEntry& e) {
  const double v = parse_double_value(e);
  const long l = long(v);
  if (double(l) != v)
    throw InvalidValueError("line " + std::to_string(e.line) + ": '" + e.key +
                            "' expects an integer, got '" + e.value + "'");
  return l;
}

bool parse_bool_value(const RawEntry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw InvalidValueError("line " + std::to_string(e.line) + ": '" + e.key +
                          "' expects true/false, got '" + e.value + "'");
}

std::vector<double> parse_list_value(const RawEntry& e) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw InvalidValueError("line " + std::to_string(e.line) + ": '" + e.key +
                              "' has an empty list item");
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *trim(end).c_str() != '\0')
      throw InvalidValueError("line " + std::to_string(e.line) + ": '" + e.key +
                              "' expects numbers, got '" + item + "'");
    out.push_back(v);
  }
  if (out.empty())
    throw InvalidValueError("line " + std::to_string(e.line) + ": '" + e.key + "' is empty");
  return out;
}

void require_positive(double v, const RawEntry& e) {
  if (!(v > 0.0))
    throw InvalidValueError("line " + std::to_string(e.line) + ": '" + e.key +
                            "' must be > 0, got '" + e.value + "'");
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment",
       {"kind", "seed", "x0", "budget", "horizon", "q_grid", "T", "bisect_iters", "bisect_T",
        "contrast_T", "bisect_margin"}},
      {"objective", {"name", "dim", "max_segments"}},
      {"schedule", {"name", "exponent", "scale", "value", "weights"}},
      {"tolerances",
       {"rel_tol", "abs_tol", "tol_x", "tol_g", "escape_radius", "tail_fraction", "chi_radius",
        "verify_radius", "settle_tol", "constants_samples"}},
      {"output", {"dir", "svg"}},
  };
  return keys;
}

}  // namespace

RawConfig parse_raw_config(const std::string& text) {
  RawConfig raw;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(section)) throw ParseError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    if (section.empty()) throw ParseError(line_no, "key before any [section] header");
    RawEntry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = line_no;
    if (e.key.empty()) throw ParseError(line_no, "empty key");
    if (e.value.empty()) throw ParseError(line_no, "empty value for '" + e.key + "'");
    raw.push_back(std::move(e));
  }
  return raw;
}

void apply_override(RawConfig& raw, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  const std::size_t dotpos = assignment.find('.');
  if (eq == std::string::npos || dotpos == std::string::npos || dotpos > eq)
    throw InvalidValueError("--set expects section.key=value, got '" + assignment + "'");
  RawEntry e;
  e.section = trim(assignment.substr(0, dotpos));
  e.key = trim(assignment.substr(dotpos + 1, eq - dotpos - 1));
  e.value = trim(assignment.substr(eq + 1));
  e.line = 0;
  for (RawEntry& existing : raw) {
    if (existing.section == e.section && existing.key == e.key) {
      existing.value = e.value;
      return;
    }
  }
  raw.push_back(std::move(e));
}

ExperimentConfig validate_config(const RawConfig& raw) {
  ExperimentConfig cfg;
  bool have_kind = false;
  bool have_objective = false;
  bool have_schedule = false;
  bool have_x0 = false;

  for (const RawEntry& e : raw) {
    const auto sec = known_keys().find(e.section);
    if (sec == known_keys().end())
      throw UnknownKeyError(e.line, "unknown section [" + e.section + "]");
    if (!sec->second.count(e.key))
      throw UnknownKeyError(e.line, "unknown key '" + e.key + "' in [" + e.section + "]");

    if (e.section == "experiment") {
      if (e.key == "kind") {
        have_kind = true;
        if (e.value == "run-gd")
          cfg.kind = ExperimentKind::kRunGd;
        else if (e.value == "run-flow")
          cfg.kind = ExperimentKind::kRunFlow;
        else if (e.value == "verify")
          cfg.kind = ExperimentKind::kVerify;
        else if (e.value == "classify-schedule")
          cfg.kind = ExperimentKind::kClassifySchedule;
        else if (e.value == "divergence-demo")
          cfg.kind = ExperimentKind::kDivergenceDemo;
        else if (e.value == "pdm-demo")
          cfg.kind = ExperimentKind::kPdmDemo;
        else
          throw InvalidValueError("line " + std::to_string(e.line) + ": unknown kind '" +
                                  e.value + "'");
      } else if (e.key == "seed") {
        cfg.seed = std::uint64_t(parse_long_value(e));
      } else if (e.key == "x0") {
        cfg.x0 = parse_list_value(e);
        have_x0 = true;
      } else if (e.key == "budget") {
        cfg.budget = parse_long_value(e);
        if (cfg.budget < 1)
          throw InvalidValueError("line " + std::to_string(e.line) + ": budget must be >= 1");
      } else if (e.key == "horizon") {
        cfg.horizon = parse_long_value(e);
        if (cfg.horizon < 2)
          throw InvalidValueError("line " + std::to_string(e.line) + ": horizon must be >= 2");
      } else if (e.key == "q_grid") {
        cfg.q_grid = parse_list_value(e);
        for (double q : cfg.q_grid)
          if (!(q > 1.0))
            throw InvalidValueError("line " + std::to_string(e.line) +
                                    ": every q in q_grid must be > 1");
      } else if (e.key == "T") {
        cfg.T = parse_double_value(e);
        require_positive(cfg.T, e);
      } else if (e.key == "bisect_iters") {
        cfg.bisect_iters = int(parse_long_value(e));
        if (cfg.bisect_iters < 0)
          throw InvalidValueError("line " + std::to_string(e.line) + ": bisect_iters must be >= 0");
      } else if (e.key == "bisect_T") {
        cfg.bisect_T = parse_double_value(e);
        require_positive(cfg.bisect_T, e);
      } else if (e.key == "contrast_T") {
        cfg.contrast_T = parse_double_value(e);
        require_positive(cfg.contrast_T, e);
      } else if (e.key == "bisect_margin") {
        cfg.bisect_margin = parse_double_value(e);
        require_positive(cfg.bisect_margin, e);
      }
    } else if (e.section == "objective") {
      if (e.key == "name") {
        static const std::set<std::string> names = {"quadratic_bowl", "exp_neg_square",
                                                    "staircase", "palis_de_melo"};
        if (!names.count(e.value))
          throw InvalidValueError("line " + std::to_string(e.line) + ": unknown objective '" +
                                  e.value + "'");
        cfg.objective = e.value;
        have_objective = true;
      } else if (e.key == "dim") {
        const long d = parse_long_value(e);
        if (d < 1)
          throw InvalidValueError("line " + std::to_string(e.line) + ": dim must be >= 1");
        cfg.dim = std::size_t(d);
      } else if (e.key == "max_segments") {
        const long m = parse_long_value(e);
        if (m < 1)
          throw InvalidValueError("line " + std::to_string(e.line) + ": max_segments must be >= 1");
        cfg.max_segments = std::size_t(m);
      }
    } else if (e.section == "schedule") {
      if (e.key == "name") {
        static const std::set<std::string> names = {"power", "log", "constant", "diagonal_power"};
        if (!names.count(e.value))
          throw InvalidValueError("line " + std::to_string(e.line) + ": unknown schedule '" +
                                  e.value + "'");
        cfg.schedule = e.value;
        have_schedule = true;
      } else if (e.key == "exponent") {
        cfg.exponent = parse_double_value(e);
        require_positive(cfg.exponent, e);
      } else if (e.key == "scale") {
        cfg.scale = parse_double_value(e);
        require_positive(cfg.scale, e);
      } else if (e.key == "value") {
        cfg.constant_value = parse_double_value(e);
        require_positive(cfg.constant_value, e);
      } else if (e.key == "weights") {
        cfg.weights = parse_list_value(e);
        for (double w : cfg.weights)
          if (!(w > 0.0))
            throw InvalidValueError("line " + std::to_string(e.line) + ": weights must be > 0");
      }
    } else if (e.section == "tolerances") {
      const double v = e.key == "constants_samples" ? double(parse_long_value(e))
                                                    : parse_double_value(e);
      if (e.key == "rel_tol") {
        require_positive(v, e);
        cfg.rel_tol = v;
      } else if (e.key == "abs_tol") {
        require_positive(v, e);
        cfg.abs_tol = v;
      } else if (e.key == "tol_x") {
        require_positive(v, e);
        cfg.tol_x = v;
      } else if (e.key == "tol_g") {
        require_positive(v, e);
        cfg.tol_g = v;
      } else if (e.key == "escape_radius") {
        require_positive(v, e);
        cfg.escape_radius = v;
      } else if (e.key == "tail_fraction") {
        if (!(v > 0.0 && v <= 0.5))
          throw InvalidValueError("line " + std::to_string(e.line) +
                                  ": tail_fraction must be in (0, 1/2]");
        cfg.tail_fraction = v;
      } else if (e.key == "chi_radius") {
        require_positive(v, e);
        cfg.chi_radius = v;
      } else if (e.key == "verify_radius") {
        require_positive(v, e);
        cfg.verify_radius = v;
      } else if (e.key == "settle_tol") {
        require_positive(v, e);
        cfg.settle_tol = v;
      } else if (e.key == "constants_samples") {
        if (v < 2)
          throw InvalidValueError("line " + std::to_string(e.line) +
                                  ": constants_samples must be >= 2");
        cfg.constants_samples = long(v);
      }
    } else if (e.section == "output") {
      if (e.key == "dir")
        cfg.out_dir = e.value;
      else if (e.key == "svg")
        cfg.write_svg = parse_bool_value(e);
    }
  }

  if (!have_kind) throw InvalidValueError("missing required key: [experiment] kind");

  // Per-kind requirements and cross-field checks.
  const bool needs_objective = cfg.kind == ExperimentKind::kRunGd ||
                               cfg.kind == ExperimentKind::kRunFlow ||
                               cfg.kind == ExperimentKind::kVerify;
  if (needs_objective && !have_objective)
    throw InvalidValueError("missing required key: [objective] name");

  const bool needs_schedule =
      cfg.kind == ExperimentKind::kRunGd || cfg.kind == ExperimentKind::kVerify ||
      cfg.kind == ExperimentKind::kClassifySchedule || (have_objective && cfg.objective == "staircase");
  if (needs_schedule && !have_schedule)
    throw InvalidValueError("missing required key: [schedule] name");
  if (cfg.kind == ExperimentKind::kDivergenceDemo && !have_schedule) {
    // Default widths m_k = 1/(k+1).
    cfg.schedule = "power";
    cfg.exponent = 1.0;
    cfg.scale = 1.0;
  }
  if (cfg.kind == ExperimentKind::kPdmDemo && !have_schedule) {
    cfg.schedule = "power";
    cfg.exponent = 0.75;
    cfg.scale = 0.1;
  }
  if (cfg.schedule == "diagonal_power" && cfg.weights.empty())
    throw InvalidValueError("schedule diagonal_power requires weights");

  // Objective dimensionality is known at parse time.
  std::size_t obj_dim = cfg.dim;
  if (cfg.objective == "exp_neg_square" || cfg.objective == "staircase") obj_dim = 1;
  if (cfg.objective == "palis_de_melo") obj_dim = 2;
  cfg.dim = have_objective ? obj_dim : cfg.dim;

  if (needs_objective) {
    if (!have_x0) {
      if (cfg.kind == ExperimentKind::kRunGd || cfg.kind == ExperimentKind::kRunFlow ||
          cfg.kind == ExperimentKind::kVerify)
        throw InvalidValueError("missing required key: [experiment] x0");
    } else if (cfg.x0.size() != obj_dim) {
      throw InvalidValueError("x0 has dimension " + std::to_string(cfg.x0.size()) +
                              " but objective '" + cfg.objective + "' expects " +
                              std::to_string(obj_dim));
    }
    if (!all_finite(cfg.x0)) throw InvalidValueError("x0 must be finite");
  }
  if (cfg.kind == ExperimentKind::kDivergenceDemo) {
    if (!have_x0) cfg.x0 = {0.0};
    if (cfg.x0.size() != 1) throw InvalidValueError("divergence-demo is one-dimensional");
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  return validate_config(parse_raw_config(text));
}

}  // namespace dlab
