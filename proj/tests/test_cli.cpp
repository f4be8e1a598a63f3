#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dlab/config.hpp"
#include "dlab/csv.hpp"
#include "dlab/experiments.hpp"

using namespace dlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dlab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kMinimalConfig =
    "[experiment]\n"
    "kind = run-gd\n"
    "x0 = 1.0\n"
    "budget = 100\n"
    "[objective]\n"
    "name = quadratic_bowl\n"
    "dim = 1\n"
    "[schedule]\n"
    "name = power\n"
    "exponent = 0.5\n";

}  // namespace

TEST_CASE("parse_config: minimal file with defaults applied") {
  const ExperimentConfig cfg = parse_config(kMinimalConfig);
  CHECK(cfg.kind == ExperimentKind::kRunGd);
  CHECK(cfg.objective == "quadratic_bowl");
  CHECK(cfg.schedule == "power");
  CHECK(cfg.exponent == 0.5);
  CHECK(cfg.budget == 100);
  CHECK(cfg.x0 == Point{1.0});
  CHECK(cfg.tol_g == 1e-6);       // default
  CHECK(cfg.out_dir == "out");    // default
  CHECK(cfg.tail_fraction == 0.1);
}

TEST_CASE("parse_config: unknown key is a hard error with its line") {
  const std::string text = std::string(kMinimalConfig) + "exponnent = 0.5\n";
  CHECK_THROWS_AS(parse_config(text), UnknownKeyError);
  try {
    parse_config(text);
  } catch (const UnknownKeyError& e) {
    CHECK(e.line == 11);
  }
}

TEST_CASE("parse_config: invalid values are rejected") {
  std::string text(kMinimalConfig);
  text.replace(text.find("exponent = 0.5"), 14, "exponent = -1.");
  CHECK_THROWS_AS(parse_config(text), InvalidValueError);

  CHECK_THROWS_AS(parse_config("[experiment]\nkind = run-gd\nbudget = 0\n"), InvalidValueError);
  CHECK_THROWS_AS(parse_config("[experiment]\nkind = what\n"), InvalidValueError);
  CHECK_THROWS_AS(parse_config("[bogus]\nx = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_config("x = 1\n"), ParseError);  // key before section
  CHECK_THROWS_AS(parse_config("[experiment]\nkind run-gd\n"), ParseError);
}

TEST_CASE("parse_config: x0 dimension is validated against the objective") {
  std::string text(kMinimalConfig);
  text.replace(text.find("x0 = 1.0"), 8, "x0 = 1,2");
  CHECK_THROWS_AS(parse_config(text), InvalidValueError);
}

TEST_CASE("apply_override replaces and appends") {
  RawConfig raw = parse_raw_config(kMinimalConfig);
  apply_override(raw, "schedule.exponent=0.25");
  apply_override(raw, "tolerances.tol_g=1e-9");
  const ExperimentConfig cfg = validate_config(raw);
  CHECK(cfg.exponent == 0.25);
  CHECK(cfg.tol_g == 1e-9);
  CHECK_THROWS_AS(apply_override(raw, "no-dot-or-equals"), InvalidValueError);
}

TEST_CASE("trace CSV round-trips bitwise") {
  QuadraticBowl q(2);
  const Trace trace = run(q, power_scalar(0.5, 0.7), {0.3333333333333333, -1e-17}, 200);
  const fs::path dir = fresh_dir("roundtrip");
  const std::string path = (dir / "trace.csv").string();
  write_trace_csv(path, trace, 1e300);
  const Trace back = read_trace_csv(path);
  REQUIRE(back.size() == trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    CHECK(back.records[k].x == trace.records[k].x);
    CHECK(back.records[k].value == trace.records[k].value);
    CHECK(back.records[k].grad_norm == trace.records[k].grad_norm);
    CHECK(back.records[k].lambda_min == trace.records[k].lambda_min);
    CHECK(back.records[k].lambda_max == trace.records[k].lambda_max);
  }
}

TEST_CASE("flow CSV round-trips bitwise") {
  QuadraticBowl q(2);
  const FlowTrace trace = integrate(q, {1.0, -0.5}, 1.0, 1e-8, 1e-10);
  const fs::path dir = fresh_dir("flow_roundtrip");
  const std::string path = (dir / "flow.csv").string();
  write_flow_csv(path, trace);
  const FlowTrace back = read_flow_csv(path);
  REQUIRE(back.size() == trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    CHECK(back.records[k].t == trace.records[k].t);
    CHECK(back.records[k].y == trace.records[k].y);
    CHECK(back.records[k].dissipation == trace.records[k].dissipation);
    CHECK(back.records[k].winding == trace.records[k].winding);
  }
}

TEST_CASE("identical config and seed produce byte-identical CSVs") {
  ExperimentConfig cfg = parse_config(kMinimalConfig);
  const fs::path dir_a = fresh_dir("det_a");
  const fs::path dir_b = fresh_dir("det_b");
  cfg.out_dir = dir_a.string();
  execute(cfg);
  cfg.out_dir = dir_b.string();
  execute(cfg);
  CHECK(slurp((dir_a / "trace.csv").string()) == slurp((dir_b / "trace.csv").string()));
}

TEST_CASE("execute run-gd writes the manifest files") {
  ExperimentConfig cfg = parse_config(kMinimalConfig);
  const fs::path dir = fresh_dir("run_gd");
  cfg.out_dir = dir.string();
  const RunReport rep = execute(cfg);
  CHECK(rep.ok());
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "trace.svg"));
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(csv_row_count((dir / "trace.csv").string()) == 101);
  // every listed file exists and is non-empty
  for (const FileEntry& f : rep.files) {
    CHECK(fs::exists(f.path));
    CHECK(fs::file_size(f.path) > 0);
  }
  const std::string report = slurp((dir / "report.txt").string());
  CHECK(report.find("status: ok") != std::string::npos);
}

TEST_CASE("execute run-flow checks the dissipation identity") {
  const std::string text =
      "[experiment]\nkind = run-flow\nx0 = 1.0, 0.0\nT = 1.0\n"
      "[objective]\nname = quadratic_bowl\ndim = 2\n";
  ExperimentConfig cfg = parse_config(text);
  const fs::path dir = fresh_dir("run_flow");
  cfg.out_dir = dir.string();
  const RunReport rep = execute(cfg);
  CHECK(rep.ok());
  CHECK(fs::exists(dir / "flow.csv"));
}

TEST_CASE("execute verify on the quadratic passes the inequalities") {
  const std::string text =
      "[experiment]\nkind = verify\nx0 = 1.0\nbudget = 1000\n"
      "[objective]\nname = quadratic_bowl\ndim = 1\n"
      "[schedule]\nname = power\nexponent = 0.5\n";
  ExperimentConfig cfg = parse_config(text);
  const fs::path dir = fresh_dir("verify");
  cfg.out_dir = dir.string();
  const RunReport rep = execute(cfg);
  CHECK(rep.ok());
}

TEST_CASE("execute classify-schedule asserts declared tags are uncontradicted") {
  const std::string text =
      "[experiment]\nkind = classify-schedule\nhorizon = 20000\nq_grid = 2, 5\n"
      "[schedule]\nname = power\nexponent = 0.25\n";
  ExperimentConfig cfg = parse_config(text);
  const fs::path dir = fresh_dir("classify");
  cfg.out_dir = dir.string();
  const RunReport rep = execute(cfg);
  CHECK(rep.ok());
  CHECK(fs::exists(dir / "classify.txt"));
}

TEST_CASE("run_cli: exit codes 0, 1 and 2") {
  const fs::path dir = fresh_dir("cli");
  const fs::path good = dir / "good.ini";
  {
    std::ofstream out(good);
    out << "[experiment]\nkind = divergence-demo\nbudget = 10000\n";
  }
  const fs::path short_demo = dir / "short.ini";
  {
    // Too few steps for the harmonic sums to escape: the divergence
    // assertion fails and the exit code is 1.
    std::ofstream out(short_demo);
    out << "[experiment]\nkind = divergence-demo\nbudget = 20\n";
  }
  const fs::path bad = dir / "bad.ini";
  {
    std::ofstream out(bad);
    out << "[experiment]\nkind = run-gd\nbudget = 0\n";
  }

  const std::string out_a = (dir / "out_a").string();
  const char* argv_good[] = {"descent-lab", good.c_str(), "--out", out_a.c_str()};
  CHECK(run_cli(4, argv_good) == 0);
  CHECK(fs::exists(fs::path(out_a) / "report.txt"));

  const std::string out_b = (dir / "out_b").string();
  const char* argv_short[] = {"descent-lab", short_demo.c_str(), "--out", out_b.c_str()};
  CHECK(run_cli(4, argv_short) == 1);
  CHECK(fs::exists(fs::path(out_b) / "report.txt"));  // report still written

  const char* argv_bad[] = {"descent-lab", bad.c_str()};
  CHECK(run_cli(2, argv_bad) == 2);

  const char* argv_missing[] = {"descent-lab", "/nonexistent/nope.ini"};
  CHECK(run_cli(2, argv_missing) == 2);

  // --set override: budget back to a passing size.
  const std::string out_c = (dir / "out_c").string();
  const char* argv_set[] = {"descent-lab", short_demo.c_str(), "--set",
                            "experiment.budget=10000", "--out", out_c.c_str()};
  CHECK(run_cli(6, argv_set) == 0);
}

TEST_CASE("divergence-demo asserts the three conclusions") {
  const std::string text = "[experiment]\nkind = divergence-demo\nbudget = 10000\n";
  ExperimentConfig cfg = parse_config(text);
  const fs::path dir = fresh_dir("divdemo");
  cfg.out_dir = dir.string();
  const RunReport rep = execute(cfg);
  CHECK(rep.ok());
  bool found = false;
  for (const auto& a : rep.assertions) {
    if (a.name == "iterates_equal_prefix_sums") {
      found = true;
      CHECK(a.pass);
    }
  }
  CHECK(found);
}

TEST_CASE("pdm-demo end to end with reduced effort") {
  const std::string text =
      "[experiment]\nkind = pdm-demo\nbudget = 20000\nbisect_iters = 10\n"
      "bisect_T = 80\ncontrast_T = 60\n";
  ExperimentConfig cfg = parse_config(text);
  const fs::path dir = fresh_dir("pdm_demo");
  cfg.out_dir = dir.string();
  const RunReport rep = execute(cfg);
  CHECK(rep.ok());
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(fs::exists(dir / "flow.csv"));
  CHECK(fs::exists(dir / "pdm.svg"));
  bool found_r_star = false;
  for (const auto& [k, v] : rep.metrics) {
    if (k == "r_star") {
      found_r_star = true;
      const double r = std::strtod(v.c_str(), nullptr);
      CHECK(r > 1.15);
      CHECK(r < 1.32);
    }
  }
  CHECK(found_r_star);
}

TEST_CASE("DESCENT_LAB_OUT overrides the configured output dir") {
  const fs::path dir = fresh_dir("env_out");
  const fs::path cfg_path = dir / "cfg.ini";
  {
    std::ofstream out(cfg_path);
    out << kMinimalConfig;
  }
  const std::string env_dir = (dir / "from_env").string();
  setenv("DESCENT_LAB_OUT", env_dir.c_str(), 1);
  const char* argv[] = {"descent-lab", cfg_path.c_str()};
  CHECK(run_cli(2, argv) == 0);
  unsetenv("DESCENT_LAB_OUT");
  CHECK(fs::exists(fs::path(env_dir) / "trace.csv"));

  // --out wins over the environment.
  setenv("DESCENT_LAB_OUT", (dir / "ignored").c_str(), 1);
  const std::string flag_dir = (dir / "from_flag").string();
  const char* argv2[] = {"descent-lab", cfg_path.c_str(), "--out", flag_dir.c_str()};
  CHECK(run_cli(4, argv2) == 0);
  unsetenv("DESCENT_LAB_OUT");
  CHECK(fs::exists(fs::path(flag_dir) / "trace.csv"));
  CHECK_FALSE(fs::exists(dir / "ignored"));
}

TEST_CASE("every shipped sample config parses") {
  const fs::path dir = fs::path(__FILE__).parent_path().parent_path() / "configs";
  REQUIRE(fs::exists(dir));
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".ini") continue;
    CHECK_NOTHROW(parse_config(slurp(entry.path().string())));
    ++n;
  }
  CHECK(n >= 7);
}

TEST_CASE("svg output is well-formed enough") {
  ExperimentConfig cfg = parse_config(kMinimalConfig);
  const fs::path dir = fresh_dir("svg");
  cfg.out_dir = dir.string();
  execute(cfg);
  const std::string svg = slurp((dir / "trace.svg").string());
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
