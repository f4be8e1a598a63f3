#pragma once

#include <cstddef>
#include <mutex>
#include <optional>
#include <vector>

#include "dlab/objectives.hpp"
#include "dlab/schedules.hpp"

namespace dlab {

// The divergence staircase on R: F(x) = -x for x <= 0, and on each segment
// (S_j, S_{j+1}] a fixed piecewise shape of width m_j that descends with slope
// -1 at both ends, dips by 3 m_j/32, and climbs so that F(S_{j+1}) = S_{j+1}/2.
// Segment widths come from a scalar schedule; the prefix sums S_j are built by
// plain left-to-right accumulation so a gradient-descent run with M_k = m_k I
// reproduces them bitwise.
class Staircase : public Objective {
 public:
  // The schedule must emit scalar matrices with positive entries.
  explicit Staircase(Schedule widths, std::size_t max_segments = 10'000'000);

  const std::string& name() const override { return name_; }
  std::size_t dim() const override { return 1; }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  std::optional<double> lower_bound() const override;

  double value_at(double x) const;
  double gradient_at(double x) const;

  // Segment index j with S_j < x <= S_{j+1} (intervals left-open), or nullopt
  // for the x <= 0 region. Extends the prefix lazily; throws
  // SegmentOverflowError past max_segments.
  std::optional<std::size_t> locate(double x) const;

  // Prefix sum S_j (extends as needed).
  double prefix(std::size_t j) const;
  // Width m_j as emitted by the schedule.
  double width(std::size_t j) const;

  std::size_t max_segments() const { return max_segments_; }
  const Schedule& width_schedule() const { return widths_; }

 private:
  struct SegmentView {
    std::size_t index;
    double s_lo;
    double s_hi;
    double width;
  };

  // Negative-region queries return nullopt; otherwise a consistent snapshot of
  // the containing segment, taken under the cache lock.
  std::optional<SegmentView> locate_view(double x) const;
  void extend_until_locked(double x) const;
  void extend_count_locked(std::size_t segments) const;

  std::string name_ = "staircase";
  Schedule widths_;
  std::size_t max_segments_;

  mutable std::mutex mutex_;
  mutable std::vector<double> s_;  // s_[j] = S_j, s_[0] = 0
  mutable std::vector<double> m_;  // m_[j] = width of segment j
  mutable std::optional<double> lower_bound_;
};

}  // namespace dlab
