#include "dlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace dlab {

namespace {

constexpr int kWidth = 840;
constexpr int kHeight = 560;
constexpr int kMargin = 60;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Mapper {
  double x_min, x_max, y_min, y_max;
  double map_x(double x) const {
    const double range = x_max > x_min ? x_max - x_min : 1.0;
    return kMargin + (x - x_min) / range * (kWidth - 2 * kMargin);
  }
  double map_y(double y) const {
    const double range = y_max > y_min ? y_max - y_min : 1.0;
    return kHeight - kMargin - (y - y_min) / range * (kHeight - 2 * kMargin);
  }
};

void emit_frame(std::ofstream& out, const std::string& title, const Mapper& m,
                const std::string& x_label, const std::string& y_label) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
      << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "  <text x=\"" << kWidth / 2 << "\" y=\"" << kMargin - 20
      << "\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  out << "  <text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  out << "  <text x=\"15\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 " << kHeight / 2
      << ")\">" << y_label << "</text>\n";
  // Corner tick labels.
  out << "  <text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" font-size=\"10\">" << fmt(m.x_min) << "</text>\n";
  out << "  <text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(m.x_max) << "</text>\n";
  out << "  <text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin
      << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(m.y_min) << "</text>\n";
  out << "  <text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4
      << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(m.y_max) << "</text>\n";
}

void emit_polyline(std::ofstream& out, const Mapper& m, const std::string& color,
                   const std::vector<std::pair<double, double>>& pts) {
  out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
  // Thin long series so files stay reasonable.
  const std::size_t stride = std::max<std::size_t>(1, pts.size() / 4000);
  for (std::size_t i = 0; i < pts.size(); i += stride) {
    out << fmt(m.map_x(pts[i].first)) << ',' << fmt(m.map_y(pts[i].second)) << ' ';
  }
  if ((pts.size() - 1) % stride != 0 && !pts.empty()) {
    out << fmt(m.map_x(pts.back().first)) << ',' << fmt(m.map_y(pts.back().second));
  }
  out << "\"/>\n";
}

}  // namespace

void write_series_svg(const std::string& path, const std::string& title,
                      const std::vector<SvgSeries>& series, bool log_y) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);

  std::vector<std::vector<std::pair<double, double>>> data;
  double y_min = 1e308, y_max = -1e308;
  std::size_t n_max = 1;
  for (const SvgSeries& s : series) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(s.values.size());
    for (std::size_t k = 0; k < s.values.size(); ++k) {
      double v = s.values[k];
      if (log_y) v = std::log10(std::max(std::abs(v), 1e-300));
      pts.emplace_back(double(k), v);
      y_min = std::min(y_min, v);
      y_max = std::max(y_max, v);
    }
    n_max = std::max(n_max, s.values.size());
    data.push_back(std::move(pts));
  }
  if (y_min > y_max) {
    y_min = 0;
    y_max = 1;
  }

  Mapper m{0.0, double(n_max > 1 ? n_max - 1 : 1), y_min, y_max};
  emit_frame(out, title, m, "k", log_y ? "log10 |value|" : "value");
  for (std::size_t i = 0; i < series.size(); ++i) {
    emit_polyline(out, m, series[i].color, data[i]);
    out << "  <text x=\"" << kWidth - kMargin - 8 << "\" y=\"" << kMargin + 18 + 16 * double(i)
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << series[i].color << "\">"
        << series[i].label << "</text>\n";
  }
  out << "</svg>\n";
}

void write_plane_svg(const std::string& path, const std::string& title,
                     const std::vector<SvgPath>& paths, bool unit_circle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);

  double lo = -1.5, hi = 1.5;
  for (const SvgPath& p : paths) {
    for (const Point& pt : p.points) {
      lo = std::min({lo, pt[0], pt[1]});
      hi = std::max({hi, pt[0], pt[1]});
    }
  }
  const double pad = 0.05 * (hi - lo);
  Mapper m{lo - pad, hi + pad, lo - pad, hi + pad};

  emit_frame(out, title, m, "x1", "x2");
  if (unit_circle) {
    const double cx = m.map_x(0.0), cy = m.map_y(0.0);
    const double r = m.map_x(1.0) - m.map_x(0.0);
    out << "  <circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(r)
        << "\" fill=\"none\" stroke=\"green\" stroke-dasharray=\"4,3\"/>\n";
  }
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(paths[i].points.size());
    for (const Point& pt : paths[i].points) pts.emplace_back(pt[0], pt[1]);
    emit_polyline(out, m, paths[i].color, pts);
    out << "  <text x=\"" << kWidth - kMargin - 8 << "\" y=\"" << kMargin + 18 + 16 * double(i)
        << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << paths[i].color << "\">"
        << paths[i].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace dlab
