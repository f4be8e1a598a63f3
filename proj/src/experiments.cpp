#include "dlab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dlab/csv.hpp"
#include "dlab/descent.hpp"
#include "dlab/flow.hpp"
#include "dlab/palis_de_melo.hpp"
#include "dlab/staircase.hpp"
#include "dlab/svg.hpp"

namespace dlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

bool RunReport::ok() const {
  for (const Assertion& a : assertions)
    if (!a.pass) return false;
  return true;
}

void RunReport::assert_that(const std::string& name, bool pass, const std::string& details) {
  assertions.push_back({name, pass, details});
}

void RunReport::metric(const std::string& name, const std::string& value) {
  metrics.emplace_back(name, value);
}

void RunReport::metric(const std::string& name, double value) {
  metrics.emplace_back(name, format_double(value));
}

std::unique_ptr<Objective> make_objective(const ExperimentConfig& cfg) {
  if (cfg.objective == "quadratic_bowl") return std::make_unique<QuadraticBowl>(cfg.dim);
  if (cfg.objective == "exp_neg_square") return std::make_unique<ExpNegSquare>();
  if (cfg.objective == "palis_de_melo") return std::make_unique<PalisDeMelo>();
  if (cfg.objective == "staircase")
    return std::make_unique<Staircase>(make_schedule(cfg), cfg.max_segments);
  throw InvalidValueError("unknown objective '" + cfg.objective + "'");
}

Schedule make_schedule(const ExperimentConfig& cfg) {
  if (cfg.schedule == "power") return power_scalar(cfg.exponent, cfg.scale);
  if (cfg.schedule == "log") return log_scalar();
  if (cfg.schedule == "constant") return constant_scalar(cfg.constant_value);
  if (cfg.schedule == "diagonal_power") return diagonal_power(cfg.exponent, cfg.weights);
  throw InvalidValueError("unknown schedule '" + cfg.schedule + "'");
}

namespace {

OutcomeTolerances outcome_tolerances(const ExperimentConfig& cfg) {
  OutcomeTolerances tol;
  tol.tol_x = cfg.tol_x;
  tol.tol_g = cfg.tol_g;
  tol.escape_radius = cfg.escape_radius;
  tol.tail_fraction = cfg.tail_fraction;
  return tol;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void add_file(RunReport& rep, const std::string& path) {
  rep.files.push_back({path, csv_row_count(path)});
}

std::vector<Point> trace_points(const Trace& t) {
  std::vector<Point> out;
  out.reserve(t.size());
  for (const TraceRecord& r : t.records) out.push_back(r.x);
  return out;
}

std::vector<Point> flow_points(const FlowTrace& t) {
  std::vector<Point> out;
  out.reserve(t.size());
  for (const FlowRecord& r : t.records) out.push_back(r.y);
  return out;
}

void write_trace_plots(const ExperimentConfig& cfg, RunReport& rep, const Trace& trace) {
  if (!cfg.write_svg) return;
  const std::string path = join(cfg.out_dir, "trace.svg");
  if (trace.dim() == 2) {
    write_plane_svg(path, trace.objective_name + " iterates",
                    {{"iterates", "blue", trace_points(trace)}},
                    trace.objective_name == "palis_de_melo");
  } else {
    SvgSeries f{"F(x_k)", "blue", {}};
    SvgSeries g{"|grad F(x_k)|", "red", {}};
    for (const TraceRecord& r : trace.records) {
      f.values.push_back(r.value);
      g.values.push_back(r.grad_norm);
    }
    write_series_svg(path, trace.objective_name + " descent", {f, g}, true);
  }
  rep.files.push_back({path, 0});
}

void run_gd_experiment(const ExperimentConfig& cfg, RunReport& rep) {
  const auto obj = make_objective(cfg);
  const Schedule sched = make_schedule(cfg);
  const Trace trace = run(*obj, sched, cfg.x0, cfg.budget);

  const std::string csv = join(cfg.out_dir, "trace.csv");
  write_trace_csv(csv, trace, cfg.chi_radius);
  add_file(rep, csv);
  write_trace_plots(cfg, rep, trace);

  const Outcome outcome = detect_outcome(trace, outcome_tolerances(cfg));
  rep.metric("outcome", to_string(outcome.kind));
  rep.metric("final_grad_norm", outcome.grad_at_star);
  rep.metric("final_radius", outcome.final_radius);
  rep.metric("tail_diameter", outcome.tail_diameter);
  rep.assert_that("trace_complete", !trace.nonfinite_at,
                  trace.nonfinite_at ? "iterate went non-finite at k=" +
                                           std::to_string(*trace.nonfinite_at)
                                     : "all iterates finite");
}

void run_flow_experiment(const ExperimentConfig& cfg, RunReport& rep) {
  const auto obj = make_objective(cfg);
  FlowOptions opts;
  opts.rel_tol = cfg.rel_tol;
  opts.abs_tol = cfg.abs_tol;
  const FlowTrace trace = integrate(*obj, cfg.x0, cfg.T, opts);

  const std::string csv = join(cfg.out_dir, "flow.csv");
  write_flow_csv(csv, trace);
  add_file(rep, csv);
  if (cfg.write_svg) {
    const std::string path = join(cfg.out_dir, "flow.svg");
    if (trace.dim() == 2) {
      write_plane_svg(path, obj->name() + " flow", {{"y(t)", "blue", flow_points(trace)}},
                      obj->name() == "palis_de_melo");
    } else {
      SvgSeries f{"F(y)", "blue", {}};
      SvgSeries g{"|grad F(y)|", "red", {}};
      for (const FlowRecord& r : trace.records) {
        f.values.push_back(r.value);
        g.values.push_back(r.grad_norm);
      }
      write_series_svg(path, obj->name() + " flow", {f, g}, true);
    }
    rep.files.push_back({path, 0});
  }

  const FlowRecord& last = trace.back();
  const double f0 = trace.records.front().value;
  const double residual = std::abs(last.value - f0 + last.dissipation);
  const double budget = 10.0 * cfg.rel_tol * (1.0 + std::abs(f0));
  rep.metric("dissipation", last.dissipation);
  rep.metric("energy_residual", residual);
  rep.metric("accepted_steps", double(trace.accepted_steps));
  rep.metric("rejected_steps", double(trace.rejected_steps));
  rep.assert_that("dissipation_identity", residual < budget,
                  format_double(residual) + " < " + format_double(budget));

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const double allowed = 5.0 * (cfg.abs_tol + cfg.rel_tol * std::abs(trace.records[i].value));
    if (trace.records[i + 1].value > trace.records[i].value + allowed) {
      monotone = false;
      break;
    }
  }
  rep.assert_that("energy_monotone", monotone, "F(y(t)) nonincreasing within 5x local tolerance");
}

void verify_experiment(const ExperimentConfig& cfg, RunReport& rep) {
  const auto obj = make_objective(cfg);
  const Schedule sched = make_schedule(cfg);
  const Trace trace = run(*obj, sched, cfg.x0, cfg.budget);

  const std::string csv = join(cfg.out_dir, "trace.csv");
  write_trace_csv(csv, trace, cfg.verify_radius);
  add_file(rep, csv);
  write_trace_plots(cfg, rep, trace);

  const Point z(obj->dim(), 0.0);
  const double radius = cfg.verify_radius;

  auto constants_at = [&](std::size_t n) {
    LocalConstants c;
    const auto exact_l = obj->analytic_constants(z, radius + 1.0);
    const auto exact_g = obj->analytic_constants(z, radius);
    if (exact_l && exact_g) {
      c.lipschitz = exact_l->lipschitz;
      c.grad_max = exact_g->grad_max;
      c.lower_estimate = false;
    } else {
      const LocalConstants lc = estimate_local_constants(*obj, z, radius + 1.0, n, cfg.seed);
      const LocalConstants gc = estimate_local_constants(*obj, z, radius, n, cfg.seed + 1);
      c.lipschitz = lc.lipschitz;
      c.grad_max = gc.grad_max;
      c.lower_estimate = true;
    }
    return c;
  };

  LocalConstants constants = constants_at(std::size_t(cfg.constants_samples));
  TelescopingReport ver = verify_descent_inequalities(trace, *obj, z, radius, constants);
  if (!ver.violations.empty() && constants.lower_estimate) {
    // Sampled constants are lower estimates; re-estimate before flagging.
    rep.metric("reestimated_constants", "true");
    constants = constants_at(std::size_t(cfg.constants_samples) * 10);
    ver = verify_descent_inequalities(trace, *obj, z, radius, constants);
  }

  rep.metric("L_hat", constants.lipschitz);
  rep.metric("G_hat", constants.grad_max);
  rep.metric("C_hat", ver.c_hat);
  rep.metric("step_threshold", ver.step_threshold);
  if (ver.first_verified) {
    rep.metric("K", double(*ver.first_verified));
    rep.metric("rhs_bound", ver.rhs_bound);
    if (!ver.lhs_partial_sums.empty()) rep.metric("lhs_total", ver.lhs_partial_sums.back());
    rep.assert_that("per_step_inequality", ver.violations.empty(),
                    ver.violations.empty()
                        ? "all residuals >= -slack"
                        : std::to_string(ver.violations.size()) + " violations, first at k=" +
                              std::to_string(ver.violations.front()) +
                              (ver.constants_are_estimates ? " (constants insufficient?)" : ""));
    rep.assert_that("telescoped_bound", ver.cumulative_bound_holds,
                    "sum of (1/2) lambda_min |grad|^2 chi bounded by optimality gap at K");
  } else {
    rep.metric("K", "beyond trace end");
    rep.assert_that("verified_range", true, "empty verified range reported, nothing to check");
  }
}

void classify_experiment(const ExperimentConfig& cfg, RunReport& rep) {
  const Schedule sched = make_schedule(cfg);
  const PropertyReport pr = classify(sched, cfg.horizon, cfg.q_grid);

  const std::string path = join(cfg.out_dir, "classify.txt");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "schedule: " << sched.name() << "\n";
  out << "horizon: " << pr.horizon << "\n";
  out << "partial_min_sum: " << format_double(pr.partial_min_sum) << "\n";
  out << "lambda_max_at_horizon: " << format_double(pr.max_lambda_at_horizon) << "\n";
  out << "verdict spd: " << to_string(pr.spd) << "\n";
  out << "verdict divergent_min_sum: " << to_string(pr.divergent_min_sum) << "\n";
  out << "verdict diminishing: " << to_string(pr.diminishing) << "\n";
  for (const auto& [q, v] : pr.q_verdicts) {
    out << "verdict q_summable q=" << format_double(q) << ": " << to_string(v)
        << " (partial_sum=" << format_double(pr.q_partial_sums.at(q))
        << ", tail_share=" << format_double(pr.q_tail_ratio.at(q))
        << ", decay_exponent=" << format_double(pr.q_decay_exponent.at(q)) << ")\n";
  }
  out << "note: verdicts compare finite evidence against declared tags; they never prove "
         "asymptotic properties\n";
  out.close();
  rep.files.push_back({path, 0});

  rep.metric("partial_min_sum", pr.partial_min_sum);
  rep.metric("diminishing", to_string(pr.diminishing));
  for (const auto& [q, v] : pr.q_verdicts) rep.metric("q=" + format_double(q), to_string(v));

  const PropertyTags& tags = sched.tags();
  rep.assert_that("spd_tag", !tags.spd || pr.spd != Verdict::kInconsistentWithTag,
                  to_string(pr.spd));
  rep.assert_that("diminishing_tag",
                  !tags.diminishing || pr.diminishing != Verdict::kInconsistentWithTag,
                  to_string(pr.diminishing));
  if (tags.q_summable) {
    const Verdict v = pr.q_verdicts.at(*tags.q_summable);
    rep.assert_that("q_summable_tag", v != Verdict::kInconsistentWithTag,
                    "declared q=" + format_double(*tags.q_summable) + ": " + to_string(v));
  }
}

void divergence_demo(const ExperimentConfig& cfg, RunReport& rep) {
  const Schedule widths = make_schedule(cfg);
  Staircase stair(widths, cfg.max_segments);
  const Trace trace = run(stair, widths, cfg.x0, cfg.budget);

  const std::string csv = join(cfg.out_dir, "trace.csv");
  write_trace_csv(csv, trace, cfg.chi_radius);
  add_file(rep, csv);
  write_trace_plots(cfg, rep, trace);

  // The three conclusions checked on the produced trace: iterates march the
  // grid exactly, the objective is half the iterate, the slope stays at -1.
  bool grid_exact = true;
  bool value_ok = true;
  bool grad_exact = true;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double sk = stair.prefix(k);
    if (trace.records[k].x[0] != sk) grid_exact = false;
    const double expect = 0.5 * sk;
    const double err = std::abs(trace.records[k].value - expect);
    if (err > 1e-12 * std::max(1.0, std::abs(expect))) value_ok = false;
    if (trace.records[k].grad_norm != 1.0) grad_exact = false;
  }
  rep.assert_that("iterates_equal_prefix_sums", grid_exact, "x_k == S_k bitwise");
  rep.assert_that("objective_is_half_iterate", value_ok, "F(x_k) == S_k/2 within 1e-12 relative");
  rep.assert_that("gradient_stays_at_minus_one", grad_exact, "|grad F(x_k)| == 1 exactly");

  OutcomeTolerances tol = outcome_tolerances(cfg);
  if (cfg.escape_radius <= 0.0) tol.escape_radius = 5.0;
  const Outcome outcome = detect_outcome(trace, tol);
  rep.metric("final_x", trace.records.back().x[0]);
  rep.metric("final_F", trace.records.back().value);
  rep.metric("outcome", to_string(outcome.kind));
  rep.assert_that("diverging", outcome.kind == OutcomeKind::kDiverging,
                  "outcome " + std::string(to_string(outcome.kind)) + ", final x=" +
                      format_double(trace.records.back().x[0]));
}

void pdm_demo(const ExperimentConfig& cfg, RunReport& rep) {
  PalisDeMelo pdm;
  const double lo = 1.0 + 1.0 / (2.0 * kPi) + cfg.bisect_margin;
  const double hi = 1.0 + 1.0 / kPi - cfg.bisect_margin;

  SeparatrixOptions sopts;
  sopts.settle_tol = cfg.settle_tol;
  sopts.flow.rel_tol = cfg.rel_tol;
  sopts.flow.abs_tol = cfg.abs_tol;

  const SeparatrixResult sep = bisect_separatrix(pdm, lo, hi, cfg.bisect_T, cfg.bisect_iters, sopts);
  rep.metric("r_star", sep.r_star);
  rep.metric("bracket_lo", sep.lo);
  rep.metric("bracket_hi", sep.hi);
  rep.metric("lo_class", to_string(sep.lo_class));
  rep.metric("hi_class", to_string(sep.hi_class));
  rep.assert_that("r_star_in_interval",
                  sep.r_star > 1.0 + 1.0 / (2.0 * kPi) && sep.r_star < 1.0 + 1.0 / kPi,
                  "r_star = " + format_double(sep.r_star));
  rep.assert_that("endpoint_classes_differ", sep.lo_class != sep.hi_class,
                  std::string(to_string(sep.lo_class)) + " vs " + to_string(sep.hi_class));

  ContrastOptions copts;
  copts.continuous_T = cfg.contrast_T;
  copts.flow = sopts.flow;
  copts.outcome = outcome_tolerances(cfg);
  const Schedule sched = make_schedule(cfg);
  const ContrastReport contrast = contrast_discrete(pdm, sep.r_star, sched, cfg.budget, copts);

  const std::string tcsv = join(cfg.out_dir, "trace.csv");
  write_trace_csv(tcsv, contrast.discrete_trace, cfg.chi_radius);
  add_file(rep, tcsv);
  const std::string fcsv = join(cfg.out_dir, "flow.csv");
  write_flow_csv(fcsv, contrast.continuous_trace);
  add_file(rep, fcsv);
  if (cfg.write_svg) {
    const std::string path = join(cfg.out_dir, "pdm.svg");
    write_plane_svg(path, "separatrix contrast",
                    {{"continuous", "blue", flow_points(contrast.continuous_trace)},
                     {"discrete", "red", trace_points(contrast.discrete_trace)}},
                    true);
    rep.files.push_back({path, 0});
  }

  rep.metric("discrete_outcome", to_string(contrast.discrete_outcome.kind));
  rep.metric("discrete_final_grad", contrast.discrete_final_grad);
  rep.metric("discrete_total_winding", contrast.discrete_total_winding);
  rep.metric("discrete_tail_winding", contrast.discrete_tail_winding);
  rep.metric("continuous_winding", contrast.continuous_winding);
  rep.metric("continuous_winding_in_annulus", contrast.continuous_annulus.winding_inside);
  if (contrast.continuous_annulus.first_exit_time)
    rep.metric("annulus_first_exit_t", *contrast.continuous_annulus.first_exit_time);
  else
    rep.metric("annulus_first_exit_t", "never");

  // The spuriousness contrast: the discrete iterates stop turning while the
  // continuous trajectory's winding (until numerical ejection) is positive.
  rep.assert_that("discrete_angle_settles", contrast.discrete_tail_winding < 0.05,
                  "tail winding " + format_double(contrast.discrete_tail_winding) + " rad");
  rep.assert_that("continuous_winds_forward", contrast.continuous_annulus.winding_inside > 0.0,
                  format_double(contrast.continuous_annulus.winding_inside) + " rad before exit");
}

}  // namespace

RunReport execute(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);

  RunReport rep;
  rep.experiment = to_string(cfg.kind);
  switch (cfg.kind) {
    case ExperimentKind::kRunGd:
      run_gd_experiment(cfg, rep);
      break;
    case ExperimentKind::kRunFlow:
      run_flow_experiment(cfg, rep);
      break;
    case ExperimentKind::kVerify:
      verify_experiment(cfg, rep);
      break;
    case ExperimentKind::kClassifySchedule:
      classify_experiment(cfg, rep);
      break;
    case ExperimentKind::kDivergenceDemo:
      divergence_demo(cfg, rep);
      break;
    case ExperimentKind::kPdmDemo:
      pdm_demo(cfg, rep);
      break;
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_report(join(cfg.out_dir, "report.txt"), rep);
  return rep;
}

void write_report(const std::string& path, const RunReport& rep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "experiment: " << rep.experiment << "\n";
  for (const auto& [k, v] : rep.metrics) out << "metric " << k << ": " << v << "\n";
  for (const FileEntry& f : rep.files)
    out << "file " << f.path << (f.rows ? " rows=" + std::to_string(f.rows) : "") << "\n";
  for (const Assertion& a : rep.assertions)
    out << "assert " << a.name << ": " << (a.pass ? "PASS" : "FAIL")
        << (a.details.empty() ? "" : " (" + a.details + ")") << "\n";
  out << "wall_seconds: " << rep.wall_seconds << "\n";
  out << "status: " << (rep.ok() ? "ok" : "assert-failed") << "\n";
}

int run_cli(int argc, const char* const* argv) {
  std::string config_path;
  std::string out_override;
  std::vector<std::string> sets;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--set") {
      if (i + 1 >= argc) {
        std::cerr << "error: --set needs an argument\n";
        return 2;
      }
      sets.push_back(argv[++i]);
    } else if (arg.rfind("--set=", 0) == 0) {
      sets.push_back(arg.substr(6));
    } else if (arg == "--out") {
      if (i + 1 >= argc) {
        std::cerr << "error: --out needs an argument\n";
        return 2;
      }
      out_override = argv[++i];
    } else if (arg.rfind("--out=", 0) == 0) {
      out_override = arg.substr(6);
    } else if (arg == "--help" || arg == "-h") {
      std::cout << "usage: descent-lab <config-path> [--set section.key=value]... [--out DIR]\n";
      return 0;
    } else if (config_path.empty()) {
      config_path = arg;
    } else {
      std::cerr << "error: unexpected argument '" << arg << "'\n";
      return 2;
    }
  }
  if (config_path.empty()) {
    std::cerr << "usage: descent-lab <config-path> [--set section.key=value]... [--out DIR]\n";
    return 2;
  }

  ExperimentConfig cfg;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot read config " << config_path << "\n";
      return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    RawConfig raw = parse_raw_config(buf.str());
    for (const std::string& s : sets) apply_override(raw, s);
    cfg = validate_config(raw);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  // Output dir priority: --out, then DESCENT_LAB_OUT, then [output] dir.
  if (const char* env = std::getenv("DESCENT_LAB_OUT"); env && *env && out_override.empty())
    out_override = env;
  if (!out_override.empty()) cfg.out_dir = out_override;

  try {
    const RunReport rep = execute(cfg);
    for (const Assertion& a : rep.assertions)
      std::cout << "assert " << a.name << ": " << (a.pass ? "PASS" : "FAIL") << "\n";
    std::cout << "report: " << (std::filesystem::path(cfg.out_dir) / "report.txt").string()
              << "\n";
    return rep.ok() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dlab
