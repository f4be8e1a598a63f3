#include "dlab/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace dlab {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kConsistentWithTag:
      return "consistent";
    case Verdict::kInconsistentWithTag:
      return "inconsistent";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

Schedule::Schedule(std::string name, PropertyTags tags, std::function<StepMatrix(long)> rule)
    : name_(std::move(name)), tags_(tags), rule_(std::move(rule)) {
  if (tags_.q_summable) {
    if (*tags_.q_summable <= 1.0)
      throw InvalidValueError("schedule '" + name_ + "': q_summable requires q > 1");
    // Summability forces vanishing terms.
    if (!tags_.diminishing)
      throw TagViolationError("schedule '" + name_ +
                              "': q_summable tag requires the diminishing tag");
  }
}

StepMatrix Schedule::step_at(long k) const {
  if (k < 0) throw InvalidValueError("step_at: k must be nonnegative");
  StepMatrix m = rule_(k);
  if (tags_.spd && !m.is_spd(0.0))
    throw TagViolationError("schedule '" + name_ + "' tagged SPD emitted a non-SPD matrix at k=" +
                            std::to_string(k));
  return m;
}

Schedule power_scalar(double exponent, double scale) {
  if (!(exponent > 0.0)) throw InvalidValueError("power_scalar: exponent must be > 0");
  if (!(scale > 0.0)) throw InvalidValueError("power_scalar: scale must be > 0");
  PropertyTags tags;
  tags.spd = true;
  tags.divergent_min_sum = exponent <= 1.0;
  tags.diminishing = true;
  if (exponent < 1.0) tags.q_summable = std::max(2.0, 2.0 / exponent);
  if (exponent >= 1.0) tags.q_summable = 2.0;
  return Schedule("power(" + std::to_string(exponent) + "," + std::to_string(scale) + ")", tags,
                  [exponent, scale](long k) {
                    return StepMatrix::scalar(scale * std::pow(double(k + 1), -exponent));
                  });
}

Schedule log_scalar() {
  PropertyTags tags;
  tags.spd = true;
  tags.divergent_min_sum = true;
  tags.diminishing = true;
  // Deliberately no q_summable tag: the log schedule fails summability for
  // every q.
  return Schedule("log", tags,
                  [](long k) { return StepMatrix::scalar(1.0 / std::log(double(k + 2))); });
}

Schedule constant_scalar(double c) {
  if (!(c > 0.0)) throw InvalidValueError("constant_scalar: value must be > 0");
  PropertyTags tags;
  tags.spd = true;
  tags.divergent_min_sum = true;
  tags.diminishing = false;
  return Schedule("constant(" + std::to_string(c) + ")", tags,
                  [c](long) { return StepMatrix::scalar(c); });
}

Schedule diagonal_power(double exponent, std::vector<double> weights) {
  if (!(exponent > 0.0)) throw InvalidValueError("diagonal_power: exponent must be > 0");
  if (weights.empty()) throw InvalidValueError("diagonal_power: weights must be nonempty");
  for (double w : weights)
    if (!(w > 0.0)) throw InvalidValueError("diagonal_power: weights must be > 0");
  PropertyTags tags;
  tags.spd = true;
  tags.divergent_min_sum = exponent <= 1.0;
  tags.diminishing = true;
  tags.q_summable = std::max(2.0, 2.0 / exponent);
  return Schedule("diagonal_power(" + std::to_string(exponent) + ")", tags,
                  [exponent, weights](long k) {
                    const double f = std::pow(double(k + 1), -exponent);
                    std::vector<double> d(weights.size());
                    for (std::size_t i = 0; i < weights.size(); ++i) d[i] = f * weights[i];
                    return StepMatrix::diagonal(std::move(d));
                  });
}

PropertyReport classify(const Schedule& s, long horizon, const std::vector<double>& q_grid,
                        const ClassifyThresholds& th) {
  if (horizon < 2) throw InvalidValueError("classify: horizon must be >= 2");
  std::set<double> qs(q_grid.begin(), q_grid.end());
  if (s.tags().q_summable) qs.insert(*s.tags().q_summable);
  for (double q : qs)
    if (!(q > 1.0)) throw InvalidValueError("classify: every q must be > 1");

  PropertyReport rep;
  rep.horizon = horizon;

  std::vector<double> lmax(static_cast<std::size_t>(horizon));
  bool all_spd = true;
  double min_sum = 0.0;
  for (long k = 0; k < horizon; ++k) {
    const StepMatrix m = s.step_at(k);
    lmax[static_cast<std::size_t>(k)] = m.lambda_max();
    min_sum += m.lambda_min();
    all_spd = all_spd && m.is_spd(0.0);
  }
  rep.partial_min_sum = min_sum;
  rep.lambda_max_first = lmax.front();
  rep.max_lambda_at_horizon = lmax.back();

  rep.spd = s.tags().spd ? (all_spd ? Verdict::kConsistentWithTag : Verdict::kInconsistentWithTag)
                         : (all_spd ? Verdict::kInconclusive : Verdict::kConsistentWithTag);

  // Divergence of the min-eigenvalue sum can never be contradicted by a finite
  // prefix; the partial sum either shows clear growth or the evidence is
  // inconclusive.
  rep.divergent_min_sum = (min_sum >= th.divergent_sum_log_factor * std::log(double(horizon)))
                              ? Verdict::kConsistentWithTag
                              : Verdict::kInconclusive;

  const double ratio = rep.lambda_max_first > 0.0 ? rep.max_lambda_at_horizon / rep.lambda_max_first
                                                  : 0.0;
  if (ratio > th.diminishing_ratio_high)
    rep.diminishing = Verdict::kInconsistentWithTag;
  else if (ratio < th.diminishing_ratio_low)
    rep.diminishing = Verdict::kConsistentWithTag;
  else
    rep.diminishing = Verdict::kInconclusive;

  // q-summability: the partial sum alone cannot separate slow divergence from
  // convergence, so also fit the decay exponent of lambda_max^q over the last
  // decade (log-log least squares). Exponent <= 1 means the terms still decay
  // like a divergent series.
  const std::size_t h = static_cast<std::size_t>(horizon);
  const std::size_t fit_from = h - h * 9 / 10;
  for (double q : qs) {
    double total = 0.0;
    double half = 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t nfit = 0;
    for (std::size_t k = 0; k < h; ++k) {
      const double term = std::pow(lmax[k], q);
      total += term;
      if (k < h / 2) half += term;
      if (k >= fit_from && term > 0.0) {
        const double lx = std::log(double(k + 1));
        const double ly = std::log(term);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++nfit;
      }
    }
    const double tail_share = total > 0.0 ? (total - half) / total : 0.0;
    double alpha = 0.0;
    if (nfit >= 2) {
      const double denom = double(nfit) * sxx - sx * sx;
      if (denom != 0.0) alpha = -(double(nfit) * sxy - sx * sy) / denom;
    }
    rep.q_partial_sums[q] = total;
    rep.q_tail_ratio[q] = tail_share;
    rep.q_decay_exponent[q] = alpha;
    if (alpha <= th.summable_min_exponent)
      rep.q_verdicts[q] = Verdict::kInconsistentWithTag;
    else if (tail_share < th.summable_tail_share)
      rep.q_verdicts[q] = Verdict::kConsistentWithTag;
    else
      rep.q_verdicts[q] = Verdict::kInconclusive;
  }
  return rep;
}

}  // namespace dlab
