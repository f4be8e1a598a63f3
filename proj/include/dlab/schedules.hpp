#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dlab/linalg.hpp"

namespace dlab {

// Declared analytic properties of a schedule. These are claims about the
// asymptotics, not facts a finite run can prove.
struct PropertyTags {
  bool spd = false;
  bool divergent_min_sum = false;  // sum of lambda_min diverges
  bool diminishing = false;        // lambda_max -> 0
  std::optional<double> q_summable;  // q > 1 with sum lambda_max^q finite
};

enum class Verdict { kConsistentWithTag, kInconsistentWithTag, kInconclusive };

const char* to_string(Verdict v);

// Finite-horizon evidence about a schedule, compared against its tags.
// Verdicts are heuristic by construction and never claim asymptotic truth.
struct PropertyReport {
  long horizon = 0;
  double partial_min_sum = 0.0;
  double lambda_max_first = 0.0;
  double max_lambda_at_horizon = 0.0;  // lambda_max(M_{horizon-1})
  Verdict spd = Verdict::kInconclusive;
  Verdict divergent_min_sum = Verdict::kInconclusive;
  Verdict diminishing = Verdict::kInconclusive;
  // Per q: partial sum of lambda_max^q, the tail share contributed by the
  // second half of the horizon, the fitted decay exponent of the terms over
  // the last decade, and the verdict on q-summability.
  std::map<double, double> q_partial_sums;
  std::map<double, double> q_tail_ratio;
  std::map<double, double> q_decay_exponent;
  std::map<double, Verdict> q_verdicts;
};

// A deterministic rule k -> M_k with declared property tags.
class Schedule {
 public:
  Schedule(std::string name, PropertyTags tags, std::function<StepMatrix(long)> rule);

  const std::string& name() const { return name_; }
  const PropertyTags& tags() const { return tags_; }

  // The k-th step matrix; throws TagViolationError if a tagged-SPD schedule
  // emits a non-SPD matrix.
  StepMatrix step_at(long k) const;

 private:
  std::string name_;
  PropertyTags tags_;
  std::function<StepMatrix(long)> rule_;
};

// Built-in constructors. power_scalar: M_k = c (k+1)^{-a} I.
Schedule power_scalar(double exponent, double scale = 1.0);
// log_scalar: M_k = (1 / log(k+2)) I. The +2 offset keeps every step finite
// (log 1 = 0) while preserving the asymptotics.
Schedule log_scalar();
Schedule constant_scalar(double c);
// diagonal_power: M_k = (k+1)^{-a} Diag(weights).
Schedule diagonal_power(double exponent, std::vector<double> weights);

// Thresholds for the classify verdicts. Heuristics with stated defaults.
struct ClassifyThresholds {
  // divergent_min_sum consistent when partial sum >= this factor * log(horizon)
  double divergent_sum_log_factor = 0.5;
  // diminishing: consistent if lambda_max(end)/lambda_max(0) < low, inconsistent if > high
  double diminishing_ratio_low = 0.1;
  double diminishing_ratio_high = 0.9;
  // q-summable: consistent needs tail share < this
  double summable_tail_share = 0.01;
  // ... and the terms' log-log decay exponent above 1 (else the partial sums
  // still grow like a divergent series)
  double summable_min_exponent = 1.0 + 1e-6;
};

PropertyReport classify(const Schedule& s, long horizon, const std::vector<double>& q_grid,
                        const ClassifyThresholds& thresholds = {});

}  // namespace dlab
