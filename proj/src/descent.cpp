#include "dlab/descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dlab {

const char* to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::kConverged:
      return "Converged";
    case OutcomeKind::kDiverging:
      return "Diverging";
    case OutcomeKind::kUndecided:
      return "Undecided";
  }
  return "?";
}

Trace run(const Objective& obj, const Schedule& s, const Point& x0, long budget) {
  if (budget < 1) throw InvalidValueError("run: budget must be >= 1");
  if (x0.size() != obj.dim()) throw DimensionMismatchError("run: x0 dimension mismatch");
  if (!all_finite(x0)) throw NonFiniteError("run: non-finite x0");
  if (!s.tags().spd) throw TagViolationError("run: schedule must be tagged SPD");

  Trace trace;
  trace.objective_name = obj.name();
  trace.schedule_name = s.name();
  trace.x0 = x0;
  trace.budget = budget;
  trace.records.reserve(std::size_t(budget) + 1);

  const auto lb = obj.lower_bound();

  Point x = x0;
  for (long k = 0; k <= budget; ++k) {
    const StepMatrix m = s.step_at(k);
    TraceRecord rec;
    rec.x = x;
    rec.value = obj.value(x);
    if (lb && rec.value < *lb - 1e-12 * (1.0 + std::abs(*lb)))
      throw Error(obj.name() + ": value " + std::to_string(rec.value) +
                  " below the declared lower bound at k=" + std::to_string(k));
    Point g = obj.gradient(x);
    rec.grad_norm = norm2(g);
    rec.lambda_min = m.lambda_min();
    rec.lambda_max = m.lambda_max();
    trace.records.push_back(std::move(rec));
    if (k == budget) break;

    const Point step = m.apply(g);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step[i];
    if (!all_finite(x)) {
      trace.nonfinite_at = std::size_t(k) + 1;
      break;
    }
  }
  return trace;
}

StoppingTime::StoppingTime(const Trace& trace, Point z) {
  if (z.size() != trace.dim()) throw DimensionMismatchError("StoppingTime: center dimension");
  running_max_.reserve(trace.size());
  double m = 0.0;
  for (const TraceRecord& r : trace.records) {
    m = std::max(m, distance2(r.x, z));
    running_max_.push_back(m);
  }
}

int StoppingTime::chi(double radius, std::size_t k) const {
  if (k >= running_max_.size()) throw IndexOutOfRangeError("chi: index past trace end");
  return running_max_[k] <= radius ? 1 : 0;
}

int chi(const Trace& trace, const Point& z, double radius, std::size_t k) {
  if (k >= trace.size()) throw IndexOutOfRangeError("chi: index past trace end");
  double m = 0.0;
  for (std::size_t j = 0; j <= k; ++j) m = std::max(m, distance2(trace.records[j].x, z));
  return m <= radius ? 1 : 0;
}

std::vector<double> running_grad_min(const Trace& trace, const Point& z, double radius) {
  if (trace.size() == 0) throw InvalidValueError("running_grad_min: empty trace");
  StoppingTime st(trace, z);
  std::vector<double> out;
  out.reserve(trace.size());
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    m = std::min(m, trace.records[k].grad_norm * st.chi(radius, k));
    out.push_back(m);
  }
  return out;
}

TelescopingReport verify_descent_inequalities(const Trace& trace, const Objective& obj,
                                              const Point& z, double radius,
                                              const LocalConstants& constants) {
  const auto flb = obj.lower_bound();
  if (!flb) throw MissingLowerBoundError("verify: objective has no lower bound");
  if (trace.size() == 0) throw InvalidValueError("verify: empty trace");

  TelescopingReport rep;
  rep.radius = radius;
  rep.c_hat = 0.5 * constants.lipschitz + constants.grad_max;
  rep.step_threshold = 2.0 / rep.c_hat;
  rep.constants_are_estimates = constants.lower_estimate;

  // K = first index after which every observed lambda_max is below 2/C_hat
  // (backward sweep; schedules need not be monotone).
  const std::size_t n = trace.size();
  std::size_t k_start = n;  // sentinel: no verified range
  for (std::size_t k = n; k-- > 0;) {
    if (trace.records[k].lambda_max >= rep.step_threshold) break;
    k_start = k;
  }
  if (k_start == n) {
    rep.first_verified = std::nullopt;  // EmptyVerifiedRange: reported, not fatal
    return rep;
  }
  rep.first_verified = k_start;

  StoppingTime st(trace, z);
  const double lb = *flb;
  const double chi_k0 = st.chi(radius, k_start);
  rep.rhs_bound = (trace.records[k_start].value - lb) * chi_k0;
  const double scale = std::max(1.0, std::abs(rep.rhs_bound));
  rep.slack = 1e-9 * scale;

  double lhs = 0.0;
  for (std::size_t k = k_start; k + 1 < n; ++k) {
    const TraceRecord& cur = trace.records[k];
    const TraceRecord& nxt = trace.records[k + 1];
    const double chi_k = st.chi(radius, k);
    const double chi_k1 = st.chi(radius, k + 1);
    const double decrement = 0.5 * cur.lambda_min * cur.grad_norm * cur.grad_norm * chi_k;
    const double rhs_k = (cur.value - lb) * chi_k - decrement;
    const double lhs_k = (nxt.value - lb) * chi_k1;
    const double residual = rhs_k - lhs_k;
    rep.per_step_residuals.push_back(residual);
    if (residual < -rep.slack) rep.violations.push_back(k);
    lhs += decrement;
    rep.lhs_partial_sums.push_back(lhs);
    if (lhs > rep.rhs_bound + rep.slack) rep.cumulative_bound_holds = false;
  }
  return rep;
}

Outcome detect_outcome(const Trace& trace, const OutcomeTolerances& tol) {
  if (trace.size() == 0) throw InvalidValueError("detect_outcome: empty trace");
  if (!(tol.tail_fraction > 0.0 && tol.tail_fraction <= 0.5))
    throw InvalidValueError("detect_outcome: tail_fraction must be in (0, 1/2]");

  const double x0_norm = norm2(trace.x0);
  const double tol_x = tol.tol_x > 0.0 ? tol.tol_x : 1e-6 * (1.0 + x0_norm);
  const double escape = tol.escape_radius > 0.0 ? tol.escape_radius : 1e3 * (1.0 + x0_norm);

  const std::size_t n = trace.size();
  const std::size_t p = trace.dim();
  Outcome out;
  out.x_star = trace.records.back().x;
  out.grad_at_star = trace.records.back().grad_norm;
  out.final_radius = norm2(out.x_star);

  double max_radius = 0.0;
  for (const TraceRecord& r : trace.records) max_radius = std::max(max_radius, norm2(r.x));
  out.max_radius = max_radius;
  out.escape_radius = escape;

  // Tail window: last ceil(tail_fraction * n) records, at least two.
  const std::size_t tail_len = std::max<std::size_t>(2, std::size_t(std::ceil(tol.tail_fraction * double(n))));
  const std::size_t tail_from = n > tail_len ? n - tail_len : 0;

  // Bounding-box diagonal upper-bounds the true tail diameter.
  Point lo = trace.records[tail_from].x;
  Point hi = lo;
  for (std::size_t k = tail_from; k < n; ++k) {
    const Point& x = trace.records[k].x;
    for (std::size_t i = 0; i < p; ++i) {
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
  }
  double diag2 = 0.0;
  for (std::size_t i = 0; i < p; ++i) diag2 += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  out.tail_diameter = std::sqrt(diag2);
  out.tail_radial_gain =
      norm2(trace.records[n - 1].x) - norm2(trace.records[tail_from].x);

  // Short or escaped traces carry no verdict; the evidence fields still hold.
  constexpr std::size_t kMinRecordsForVerdict = 8;
  if (n < kMinRecordsForVerdict || trace.nonfinite_at) return out;

  const bool converged = out.tail_diameter < tol_x && out.grad_at_star < tol.tol_g;

  // Diverging: escaped, monotone radius over the last quarter, and still
  // gaining at least tol_x of radius over the tail window. The last condition
  // is what makes Converged and Diverging mutually exclusive: a tail that
  // gains tol_x of radius has diameter at least tol_x.
  bool diverging = max_radius > escape && out.tail_radial_gain >= tol_x;
  if (diverging) {
    const std::size_t quarter_from = n - std::max<std::size_t>(2, n / 4);
    double prev = norm2(trace.records[quarter_from].x);
    for (std::size_t k = quarter_from + 1; k < n && diverging; ++k) {
      const double cur = norm2(trace.records[k].x);
      if (cur < prev) diverging = false;
      prev = cur;
    }
  }

  if (converged)
    out.kind = OutcomeKind::kConverged;
  else if (diverging)
    out.kind = OutcomeKind::kDiverging;
  return out;
}

Outcome detect_outcome(const Trace& trace, double tol_x, double tol_g, double escape_radius,
                       double tail_fraction) {
  OutcomeTolerances tol;
  tol.tol_x = tol_x;
  tol.tol_g = tol_g;
  tol.escape_radius = escape_radius;
  tol.tail_fraction = tail_fraction;
  return detect_outcome(trace, tol);
}

}  // namespace dlab
