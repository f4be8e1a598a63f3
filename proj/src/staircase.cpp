#include "dlab/staircase.hpp"

#include <algorithm>
#include <cmath>

namespace dlab {

namespace {

// u^2 exp(u + 1) for u <= -1 and u^2 exp(-u + 1) for u >= 1 without
// intermediate overflow (u^2 alone can overflow while the product underflows).
double bump_slope(double u) {
  const double a = std::abs(u);
  return std::exp(1.0 - a + 2.0 * std::log(a));
}

}  // namespace

Staircase::Staircase(Schedule widths, std::size_t max_segments)
    : widths_(std::move(widths)), max_segments_(max_segments) {
  if (max_segments_ == 0) throw InvalidValueError("staircase: max_segments must be >= 1");
  // The construction assumes widths that vanish while their sum diverges;
  // both are declared tags of the schedule.
  if (!widths_.tags().diminishing || !widths_.tags().divergent_min_sum)
    throw TagViolationError(
        "staircase: width schedule must be tagged diminishing with a divergent sum");
  s_.push_back(0.0);
  // Fail fast on schedules that do not produce scalar widths.
  const StepMatrix m0 = widths_.step_at(0);
  if (m0.form() != StepMatrix::Form::kScalar)
    throw InvalidValueError("staircase: width schedule must emit scalar matrices");
}

void Staircase::extend_count_locked(std::size_t segments) const {
  while (m_.size() < segments) {
    if (m_.size() >= max_segments_)
      throw SegmentOverflowError("staircase: segment count exceeded max_segments = " +
                                 std::to_string(max_segments_));
    const std::size_t j = m_.size();
    const StepMatrix mk = widths_.step_at(long(j));
    if (mk.form() != StepMatrix::Form::kScalar)
      throw InvalidValueError("staircase: width schedule must emit scalar matrices");
    const double m = mk.lambda_max();
    if (!(m > 0.0) || !std::isfinite(m))
      throw InvalidValueError("staircase: segment width must be positive and finite");
    m_.push_back(m);
    // Plain left-to-right accumulation, same order as a descent run.
    s_.push_back(s_.back() + m);
  }
}

void Staircase::extend_until_locked(double x) const {
  while (s_.back() < x) {
    extend_count_locked(m_.size() + 1);
  }
}

std::optional<Staircase::SegmentView> Staircase::locate_view(double x) const {
  if (!std::isfinite(x)) throw NonFiniteError("staircase: non-finite input");
  if (x <= 0.0) return std::nullopt;
  std::lock_guard<std::mutex> lock(mutex_);
  extend_until_locked(x);
  // First S_i >= x; the segment left of it contains x since intervals are
  // (S_j, S_{j+1}].
  const auto it = std::lower_bound(s_.begin(), s_.end(), x);
  const std::size_t j = std::size_t(it - s_.begin()) - 1;
  return SegmentView{j, s_[j], s_[j + 1], m_[j]};
}

std::optional<std::size_t> Staircase::locate(double x) const {
  const auto view = locate_view(x);
  if (!view) return std::nullopt;
  return view->index;
}

double Staircase::prefix(std::size_t j) const {
  std::lock_guard<std::mutex> lock(mutex_);
  extend_count_locked(j);
  return s_[j];
}

double Staircase::width(std::size_t j) const {
  std::lock_guard<std::mutex> lock(mutex_);
  extend_count_locked(j + 1);
  return m_[j];
}

double Staircase::value_at(double x) const {
  const auto view = locate_view(x);
  if (!view) return -x;

  const double m = view->width;
  const double base = 0.5 * view->s_lo;  // f_{j-1}(S_j) = S_j / 2
  const double xi = x - view->s_lo;
  const double mid = 0.5 * m;
  const double beta = 5.0 * m / 16.0;

  if (xi < m / 16.0) return base - xi;
  if (xi < 3.0 * m / 16.0) {
    const double t = xi - m * 0.125;
    return (8.0 / m) * t * t - 3.0 * m / 32.0 + base;
  }
  if (xi < mid) return -beta * std::exp(beta / (xi - mid) + 1.0) + 0.25 * m + base;
  if (xi == mid) return 0.25 * m + base;
  if (xi < 13.0 * m / 16.0) return beta * std::exp(-beta / (xi - mid) + 1.0) + 0.25 * m + base;
  if (xi < 15.0 * m / 16.0) {
    const double t = xi - m * 0.875;
    return -(8.0 / m) * t * t + 19.0 * m / 32.0 + base;
  }
  // Final descending piece, anchored at the right endpoint so that
  // F(S_{j+1}) is exactly S_{j+1}/2.
  return 0.5 * view->s_hi + (view->s_hi - x);
}

double Staircase::gradient_at(double x) const {
  const auto view = locate_view(x);
  if (!view) return -1.0;

  const double m = view->width;
  const double xi = x - view->s_lo;
  const double mid = 0.5 * m;
  const double beta = 5.0 * m / 16.0;

  if (xi < m / 16.0) return -1.0;
  if (xi < 3.0 * m / 16.0) return (16.0 / m) * (xi - m * 0.125);
  if (xi < mid) return bump_slope(beta / (xi - mid));
  if (xi == mid) return 0.0;
  if (xi < 13.0 * m / 16.0) return bump_slope(beta / (xi - mid));
  if (xi < 15.0 * m / 16.0) return -(16.0 / m) * (xi - m * 0.875);
  return -1.0;
}

double Staircase::value(const Point& x) const {
  check_input(x);
  return value_at(x[0]);
}

Point Staircase::gradient(const Point& x) const {
  check_input(x);
  return {gradient_at(x[0])};
}

std::optional<double> Staircase::lower_bound() const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (lower_bound_) return lower_bound_;
  // Each segment dips to S_j/2 - 3 m_j/32; the negative region is >= 0. The
  // minimum sits in the early segments for any diminishing width schedule.
  const std::size_t scan = std::min<std::size_t>(max_segments_, 10'000);
  extend_count_locked(scan);
  double lb = 0.0;
  for (std::size_t j = 0; j < scan; ++j) {
    lb = std::min(lb, 0.5 * s_[j] - 3.0 * m_[j] / 32.0);
  }
  lower_bound_ = lb;
  return lower_bound_;
}

}  // namespace dlab
