#include "dlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace dlab {

bool all_finite(const Point& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double dot(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw DimensionMismatchError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Point& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double distance2(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw DimensionMismatchError("distance2: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

namespace {

double off_diagonal_frobenius(std::size_t p, const std::vector<double>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) s += 2.0 * a[i * p + j] * a[i * p + j];
  return std::sqrt(s);
}

double diagonal_scale(std::size_t p, const std::vector<double>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < p; ++i) s += a[i * p + i] * a[i * p + i];
  return std::sqrt(s);
}

}  // namespace

std::vector<double> jacobi_eigenvalues(std::size_t p, std::vector<double> a) {
  if (p == 0) throw InvalidValueError("jacobi: empty matrix");
  if (p == 1) return {a[0]};

  const double scale0 = std::max(diagonal_scale(p, a), 1e-300);
  constexpr int kMaxSweeps = 64;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_diagonal_frobenius(p, a);
    const double scale = std::max(diagonal_scale(p, a), scale0);
    if (off < 1e-14 * scale) break;
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        const double apq = a[i * p + j];
        if (apq == 0.0) continue;
        const double app = a[i * p + i];
        const double aqq = a[j * p + j];
        // Classic Jacobi rotation choosing the smaller-angle root.
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < p; ++k) {
          const double aki = a[k * p + i];
          const double akj = a[k * p + j];
          a[k * p + i] = c * aki - s * akj;
          a[k * p + j] = s * aki + c * akj;
        }
        for (std::size_t k = 0; k < p; ++k) {
          const double aik = a[i * p + k];
          const double ajk = a[j * p + k];
          a[i * p + k] = c * aik - s * ajk;
          a[j * p + k] = s * aik + c * ajk;
        }
      }
    }
  }

  std::vector<double> eigs(p);
  for (std::size_t i = 0; i < p; ++i) eigs[i] = a[i * p + i];
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

std::pair<double, double> eigen_extremes(std::size_t p, const std::vector<double>& entries) {
  if (entries.size() != p * p) throw DimensionMismatchError("eigen_extremes: bad entry count");
  double max_abs = 0.0;
  for (double e : entries) {
    if (!std::isfinite(e)) throw NonFiniteError("eigen_extremes: non-finite entry");
    max_abs = std::max(max_abs, std::abs(e));
  }
  std::vector<double> a(entries);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (std::abs(a[i * p + j] - a[j * p + i]) > 1e-12 * max_abs)
        throw NonSymmetricError("eigen_extremes: matrix is not symmetric");
      // The lower triangle is authoritative.
      a[i * p + j] = a[j * p + i];
    }
  }
  const std::vector<double> eigs = jacobi_eigenvalues(p, std::move(a));
  return {eigs.front(), eigs.back()};
}

StepMatrix StepMatrix::scalar(double c) {
  if (!std::isfinite(c)) throw NonFiniteError("StepMatrix::scalar: non-finite value");
  return StepMatrix(Form::kScalar, 0, {c}, c, c);
}

StepMatrix StepMatrix::diagonal(std::vector<double> d) {
  if (d.empty()) throw InvalidValueError("StepMatrix::diagonal: empty diagonal");
  if (!all_finite(d)) throw NonFiniteError("StepMatrix::diagonal: non-finite entry");
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  const double lmin = *lo;
  const double lmax = *hi;
  const std::size_t p = d.size();
  return StepMatrix(Form::kDiagonal, p, std::move(d), lmin, lmax);
}

StepMatrix StepMatrix::dense_symmetric(std::size_t p, std::vector<double> entries) {
  const auto [lmin, lmax] = eigen_extremes(p, entries);
  return StepMatrix(Form::kDense, p, std::move(entries), lmin, lmax);
}

Point StepMatrix::apply(const Point& v) const {
  switch (form_) {
    case Form::kScalar: {
      Point out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = data_[0] * v[i];
      return out;
    }
    case Form::kDiagonal: {
      if (v.size() != dim_) throw DimensionMismatchError("StepMatrix::apply: dimension mismatch");
      Point out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = data_[i] * v[i];
      return out;
    }
    case Form::kDense: {
      if (v.size() != dim_) throw DimensionMismatchError("StepMatrix::apply: dimension mismatch");
      Point out(dim_, 0.0);
      for (std::size_t i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) s += data_[i * dim_ + j] * v[j];
        out[i] = s;
      }
      return out;
    }
  }
  throw Error("StepMatrix::apply: unreachable");
}

bool StepMatrix::same_bits(const StepMatrix& other) const {
  return form_ == other.form_ && dim_ == other.dim_ && data_ == other.data_;
}

}  // namespace dlab
