#include "dlab/objectives.hpp"

#include <algorithm>
#include <cmath>

namespace dlab {

void Objective::check_input(const Point& x) const {
  if (x.size() != dim()) throw DimensionMismatchError(name() + ": dimension mismatch");
  if (!all_finite(x)) throw NonFiniteError(name() + ": non-finite input");
}

QuadraticBowl::QuadraticBowl(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidValueError("quadratic_bowl: dim must be >= 1");
}

double QuadraticBowl::value(const Point& x) const {
  check_input(x);
  return 0.5 * dot(x, x);
}

Point QuadraticBowl::gradient(const Point& x) const {
  check_input(x);
  return x;
}

std::optional<LocalConstants> QuadraticBowl::analytic_constants(const Point& z,
                                                                double radius) const {
  check_input(z);
  if (!(radius > 0.0)) throw InvalidValueError("quadratic_bowl: radius must be > 0");
  return LocalConstants{1.0, norm2(z) + radius, false};
}

double ExpNegSquare::value(const Point& x) const {
  check_input(x);
  return std::exp(-x[0] * x[0]);
}

Point ExpNegSquare::gradient(const Point& x) const {
  check_input(x);
  return {-2.0 * x[0] * std::exp(-x[0] * x[0])};
}

Point fd_gradient(const Objective& obj, const Point& x, double h) {
  if (!(h > 0.0)) throw InvalidValueError("fd_gradient: h must be > 0");
  if (!all_finite(x)) throw NonFiniteError("fd_gradient: non-finite input");
  Point g(x.size());
  Point xp = x;
  Point xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (obj.value(xp) - obj.value(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  if (!all_finite(g)) throw NonFiniteError("fd_gradient: non-finite result");
  return g;
}

namespace {

// splitmix64; implementation-independent uniform deviates.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed + 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }  // [0, 1)
  double normal() {
    // Box-Muller; the second deviate is dropped.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }
};

Point sample_ball(Rng& rng, const Point& z, double radius) {
  const std::size_t p = z.size();
  Point dir(p);
  double n = 0.0;
  do {
    for (std::size_t i = 0; i < p; ++i) dir[i] = rng.normal();
    n = norm2(dir);
  } while (n == 0.0);
  const double r = radius * std::pow(rng.uniform(), 1.0 / double(p));
  Point out(p);
  for (std::size_t i = 0; i < p; ++i) out[i] = z[i] + r * dir[i] / n;
  return out;
}

}  // namespace

LocalConstants estimate_local_constants(const Objective& obj, const Point& z, double radius,
                                        std::size_t n, std::uint64_t seed) {
  if (!(radius > 0.0)) throw InvalidValueError("estimate_local_constants: radius must be > 0");
  if (n < 2) throw InvalidValueError("estimate_local_constants: n must be >= 2");
  if (z.size() != obj.dim())
    throw DimensionMismatchError("estimate_local_constants: center dimension mismatch");

  Rng rng(seed);
  const std::size_t p = z.size();
  const double log_lo = std::log(1e-4 * radius);
  const double log_hi = std::log(2.0 * radius);

  double grad_max = 0.0;
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point x = sample_ball(rng, z, radius);
    const Point gx = obj.gradient(x);
    grad_max = std::max(grad_max, norm2(gx));

    // Pair at a mixed (log-uniform) separation scale, clamped back to the ball.
    const double s = std::exp(log_lo + (log_hi - log_lo) * rng.uniform());
    Point dir(p);
    double dn = 0.0;
    do {
      for (std::size_t j = 0; j < p; ++j) dir[j] = rng.normal();
      dn = norm2(dir);
    } while (dn == 0.0);
    Point y(p);
    for (std::size_t j = 0; j < p; ++j) y[j] = x[j] + s * dir[j] / dn;
    const double ry = distance2(y, z);
    if (ry > radius) {
      for (std::size_t j = 0; j < p; ++j) y[j] = z[j] + (y[j] - z[j]) * (radius / ry);
    }
    const double d = distance2(x, y);
    if (d == 0.0) continue;
    const Point gy = obj.gradient(y);
    lipschitz = std::max(lipschitz, distance2(gx, gy) / d);
  }
  return LocalConstants{lipschitz, grad_max, true};
}

}  // namespace dlab
