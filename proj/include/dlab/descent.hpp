#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dlab/linalg.hpp"
#include "dlab/objectives.hpp"
#include "dlab/schedules.hpp"

namespace dlab {

struct TraceRecord {
  Point x;
  double value = 0.0;
  double grad_norm = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

// Full record of a discrete gradient-descent run, densely indexed 0..N.
struct Trace {
  std::vector<TraceRecord> records;
  std::string objective_name;
  std::string schedule_name;
  Point x0;
  long budget = 0;
  // Set when an iterate went non-finite; the trace ends at the last finite
  // iterate.
  std::optional<std::size_t> nonfinite_at;

  std::size_t size() const { return records.size(); }
  std::size_t dim() const { return x0.size(); }
};

// x_{k+1} = x_k - M_k grad F(x_k), recorded for k = 0..budget. Deterministic;
// requires an SPD-tagged schedule.
Trace run(const Objective& obj, const Schedule& s, const Point& x0, long budget);

// chi_k^z(R) sweeps in O(1) via the running maximum of |x_j - z|.
class StoppingTime {
 public:
  StoppingTime(const Trace& trace, Point z);
  // 1 iff every iterate up to and including k lies in the closed ball B(z,R).
  int chi(double radius, std::size_t k) const;
  const std::vector<double>& running_radius() const { return running_max_; }

 private:
  std::vector<double> running_max_;
};

// One-off chi evaluation (builds the running maximum up to k).
int chi(const Trace& trace, const Point& z, double radius, std::size_t k);

// Elementwise running minimum of |grad F(x_k)| chi_k^z(R).
std::vector<double> running_grad_min(const Trace& trace, const Point& z, double radius);

// Numerical check of the per-step descent inequality and its telescoped sum.
struct TelescopingReport {
  double radius = 0.0;
  double c_hat = 0.0;            // L_{R+1}/2 + G_R from the supplied constants
  double step_threshold = 0.0;   // 2 / c_hat
  // First index K with lambda_max(M_j) < step_threshold for all j >= K within
  // the trace; nullopt when no such index exists before the trace end.
  std::optional<std::size_t> first_verified;
  double rhs_bound = 0.0;        // [F(x_K) - F_lb] chi_K
  std::vector<double> lhs_partial_sums;  // over k = K..j of (1/2) lambda_min |grad|^2 chi_k
  std::vector<double> per_step_residuals;  // rhs_k - lhs_k for k >= K
  std::vector<std::size_t> violations;     // indices with residual < -slack
  double slack = 0.0;
  bool cumulative_bound_holds = true;
  bool constants_are_estimates = false;
};

// constants must hold L over B(z, R+1) and G over B(z, R). Throws
// MissingLowerBoundError when the objective has no lower bound.
TelescopingReport verify_descent_inequalities(const Trace& trace, const Objective& obj,
                                              const Point& z, double radius,
                                              const LocalConstants& constants);

enum class OutcomeKind { kConverged, kDiverging, kUndecided };

const char* to_string(OutcomeKind k);

struct Outcome {
  OutcomeKind kind = OutcomeKind::kUndecided;
  Point x_star;             // final iterate
  double grad_at_star = 0.0;
  double tail_diameter = 0.0;   // bounding-box diagonal of the tail window
  double tail_radial_gain = 0.0;
  double final_radius = 0.0;
  double max_radius = 0.0;
  double escape_radius = 0.0;   // the resolved threshold the verdict used
};

struct OutcomeTolerances {
  double tol_x = 0.0;           // 0 = auto: 1e-6 * (1 + |x0|)
  double tol_g = 1e-6;
  double escape_radius = 0.0;   // 0 = auto: 1e3 * (1 + |x0|)
  double tail_fraction = 0.1;
};

// Converged: tail bounding-box diameter < tol_x and final gradient < tol_g.
// Diverging: some |x_k| exceeded the escape radius, |x_k| is nondecreasing
// over the last quarter, and the radius gained over the tail window is at
// least tol_x (which makes the two verdicts mutually exclusive). Anything
// else, including traces shorter than 8 records, is Undecided.
Outcome detect_outcome(const Trace& trace, const OutcomeTolerances& tol);
Outcome detect_outcome(const Trace& trace, double tol_x, double tol_g, double escape_radius,
                       double tail_fraction);

}  // namespace dlab
