#pragma once

#include <string>

#include "dlab/objectives.hpp"

namespace dlab {

// Modified Palis-de Melo function on R^2: a hill inside the unit circle, zero
// on the circle, and outside an exponentially damped sinusoid whose zero set
// spirals into the circle. Continuous gradient descent admits the circle as a
// limit cycle; bounded below by -1.
//
// Outside the circle the value and gradient are computed in polar form,
//   F = -exp(-1/(r^2-1)) * sin(1/(r-1) - theta),
// which equals the Cartesian bracket form identically.
class PalisDeMelo : public Objective {
 public:
  const std::string& name() const override { return name_; }
  std::size_t dim() const override { return 2; }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  std::optional<double> lower_bound() const override { return -1.0; }

  // For |r^2 - 1| below this band both exponential factors underflow double
  // precision even against the polynomially growing prefactors; value and
  // gradient are exactly zero there (the true limit on the circle).
  static constexpr double kUnderflowBand = 1.3e-3;

  // Polar angle per the arcsin construction: asin(x2/r) for x1 >= 0, else
  // pi - asin(x2/r).
  static double branch_angle(const Point& x);

 private:
  std::string name_ = "palis_de_melo";
};

}  // namespace dlab
