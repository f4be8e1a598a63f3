#pragma once

#include <string>
#include <vector>

#include "dlab/linalg.hpp"

namespace dlab {

// Hand-emitted polyline SVG plots; diagnostic output only.

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<double> values;  // plotted against index
};

// F / grad_norm vs k with a log10 y-axis (values clamped below at 1e-300).
void write_series_svg(const std::string& path, const std::string& title,
                      const std::vector<SvgSeries>& series, bool log_y);

struct SvgPath {
  std::string label;
  std::string color;
  std::vector<Point> points;  // planar
};

// Trajectories in the plane; optionally overlays the unit circle.
void write_plane_svg(const std::string& path, const std::string& title,
                     const std::vector<SvgPath>& paths, bool unit_circle);

}  // namespace dlab
