#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "dlab/errors.hpp"

namespace dlab {

// A point in R^p. Dimension is fixed per experiment.
using Point = std::vector<double>;

bool all_finite(const Point& v);
double dot(const Point& a, const Point& b);
double norm2(const Point& v);
double distance2(const Point& a, const Point& b);

// All eigenvalues of a symmetric p x p matrix (row-major entries), via cyclic
// Jacobi rotation sweeps. Convergence: off-diagonal Frobenius norm below
// 1e-14 times the diagonal scale.
std::vector<double> jacobi_eigenvalues(std::size_t p, std::vector<double> entries);

// (lambda_min, lambda_max) of a symmetric matrix. Throws NonSymmetricError if
// |M_ij - M_ji| > 1e-12 * max|entry|, NonFiniteError on NaN/Inf entries.
std::pair<double, double> eigen_extremes(std::size_t p, const std::vector<double>& entries);

// Step matrix M_k: scalar, diagonal, or dense symmetric form. Eigenvalue
// extremes are computed at construction; values are immutable afterwards.
class StepMatrix {
 public:
  enum class Form { kScalar, kDiagonal, kDense };

  static StepMatrix scalar(double c);
  static StepMatrix diagonal(std::vector<double> d);
  // Row-major p x p entries; symmetry is validated, the lower triangle is
  // authoritative.
  static StepMatrix dense_symmetric(std::size_t p, std::vector<double> entries);

  Form form() const { return form_; }
  // 0 for the scalar form (applies to any dimension).
  std::size_t dim() const { return dim_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  bool is_spd(double tol = 0.0) const { return lambda_min_ > tol; }

  // M v. Scalar and diagonal forms use elementwise products.
  Point apply(const Point& v) const;

  // Underlying storage: scalar value, diagonal entries, or row-major dense.
  const std::vector<double>& data() const { return data_; }

  bool same_bits(const StepMatrix& other) const;

 private:
  StepMatrix(Form form, std::size_t dim, std::vector<double> data, double lmin, double lmax)
      : form_(form), dim_(dim), data_(std::move(data)), lambda_min_(lmin), lambda_max_(lmax) {}

  Form form_;
  std::size_t dim_;
  std::vector<double> data_;
  double lambda_min_;
  double lambda_max_;
};

}  // namespace dlab
