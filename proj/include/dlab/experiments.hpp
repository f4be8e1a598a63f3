#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dlab/config.hpp"
#include "dlab/objectives.hpp"
#include "dlab/schedules.hpp"

namespace dlab {

struct Assertion {
  std::string name;
  bool pass = false;
  std::string details;
};

struct FileEntry {
  std::string path;
  std::size_t rows = 0;
};

struct RunReport {
  std::string experiment;
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, std::string>> metrics;
  std::vector<FileEntry> files;
  double wall_seconds = 0.0;

  bool ok() const;
  void assert_that(const std::string& name, bool pass, const std::string& details = "");
  void metric(const std::string& name, const std::string& value);
  void metric(const std::string& name, double value);
};

// Instantiate the configured objective / schedule.
std::unique_ptr<Objective> make_objective(const ExperimentConfig& cfg);
Schedule make_schedule(const ExperimentConfig& cfg);

// Runs the experiment, writes its files under cfg.out_dir, and returns the
// report (also written to <out_dir>/report.txt).
RunReport execute(const ExperimentConfig& cfg);

void write_report(const std::string& path, const RunReport& report);

// Command-line entry: descent-lab <config> [--set section.key=value]... [--out DIR]
// Exit codes: 0 all assertions pass, 1 assertion failure, 2 config error.
int run_cli(int argc, const char* const* argv);

}  // namespace dlab
