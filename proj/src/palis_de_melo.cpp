#include "dlab/palis_de_melo.hpp"

#include <cmath>

namespace dlab {

double PalisDeMelo::branch_angle(const Point& x) {
  const double r = std::hypot(x[0], x[1]);
  const double a = std::asin(x[1] / r);
  return x[0] >= 0.0 ? a : 3.14159265358979323846 - a;
}

double PalisDeMelo::value(const Point& x) const {
  check_input(x);
  const double r2 = x[0] * x[0] + x[1] * x[1];
  if (std::abs(r2 - 1.0) < kUnderflowBand) return 0.0;
  if (r2 < 1.0) return std::exp(1.0 / (r2 - 1.0));
  const double r = std::sqrt(r2);
  const double theta = branch_angle(x);
  return -std::exp(-1.0 / (r2 - 1.0)) * std::sin(1.0 / (r - 1.0) - theta);
}

Point PalisDeMelo::gradient(const Point& x) const {
  check_input(x);
  const double r2 = x[0] * x[0] + x[1] * x[1];
  if (std::abs(r2 - 1.0) < kUnderflowBand) return {0.0, 0.0};
  if (r2 < 1.0) {
    const double d = r2 - 1.0;
    const double f = std::exp(1.0 / d) * (-2.0 / (d * d));
    return {f * x[0], f * x[1]};
  }
  const double r = std::sqrt(r2);
  const double theta = branch_angle(x);
  const double psi = 1.0 / (r - 1.0) - theta;
  const double s = std::sin(psi);
  const double c = std::cos(psi);
  const double E = std::exp(-1.0 / (r2 - 1.0));
  const double dE = E * 2.0 * r / ((r2 - 1.0) * (r2 - 1.0));
  const double dg = -1.0 / ((r - 1.0) * (r - 1.0));
  // Chain rule on F(r, theta) = -E(r) sin(1/(r-1) - theta).
  const double fr = -dE * s - E * c * dg;
  const double ft_over_r = E * c / r;
  return {fr * x[0] / r - ft_over_r * x[1] / r, fr * x[1] / r + ft_over_r * x[0] / r};
}

}  // namespace dlab
