#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "dlab/linalg.hpp"

namespace dlab {

// Local constants of the gradient over a ball: Lipschitz constant and maximum
// gradient norm. Estimates produced by sampling are lower bounds of the truth.
struct LocalConstants {
  double lipschitz = 0.0;
  double grad_max = 0.0;
  bool lower_estimate = false;
};

// A scalar field on R^p with analytic gradient. value/gradient are total on
// finite inputs; non-finite input throws NonFiniteError.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual const std::string& name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double value(const Point& x) const = 0;
  virtual Point gradient(const Point& x) const = 0;
  virtual std::optional<double> lower_bound() const { return std::nullopt; }
  // Exact (L_R, G_R) around z when known in closed form.
  virtual std::optional<LocalConstants> analytic_constants(const Point& z, double radius) const {
    (void)z;
    (void)radius;
    return std::nullopt;
  }

 protected:
  void check_input(const Point& x) const;
};

// F = |x|^2 / 2 on R^p. Gradient is x, L = 1 everywhere, G_R = |z| + R.
class QuadraticBowl : public Objective {
 public:
  explicit QuadraticBowl(std::size_t dim);
  const std::string& name() const override { return name_; }
  std::size_t dim() const override { return dim_; }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  std::optional<double> lower_bound() const override { return 0.0; }
  std::optional<LocalConstants> analytic_constants(const Point& z, double radius) const override;

 private:
  std::string name_ = "quadratic_bowl";
  std::size_t dim_;
};

// F = exp(-x^2) on R. Iterates of descent run off to infinity while the
// gradient decays; bounded below by 0.
class ExpNegSquare : public Objective {
 public:
  const std::string& name() const override { return name_; }
  std::size_t dim() const override { return 1; }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  std::optional<double> lower_bound() const override { return 0.0; }

 private:
  std::string name_ = "exp_neg_square";
};

// Central finite differences, one coordinate at a time.
Point fd_gradient(const Objective& obj, const Point& x, double h);

// Sampling estimates of (L_R, G_R) around z: G from n points in the closed
// ball, L from n point pairs at separations spanning 1e-4*R .. 2R. Both are
// lower estimates; the result is flagged as such.
LocalConstants estimate_local_constants(const Objective& obj, const Point& z, double radius,
                                        std::size_t n, std::uint64_t seed);

}  // namespace dlab
