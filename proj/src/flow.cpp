#include "dlab/flow.hpp"

#include <algorithm>
#include <cmath>

namespace dlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
  while (a <= -kPi) a += 2.0 * kPi;
  while (a > kPi) a -= 2.0 * kPi;
  return a;
}

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kA71 = 35.0 / 384, kA73 = 500.0 / 1113, kA74 = 125.0 / 192,
                 kA75 = -2187.0 / 6784, kA76 = 11.0 / 84;
// y5 - y4 error weights.
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

// State augmented with the dissipation integral: w = (y, d), d' = |grad F|^2.
struct Derivative {
  std::vector<Point> k;  // 7 stages, each dim p+1
};

}  // namespace

FlowTrace integrate(const Objective& obj, const Point& x0, double T, const FlowOptions& opts) {
  if (!(T > 0.0)) throw InvalidValueError("integrate: T must be > 0");
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0))
    throw InvalidValueError("integrate: tolerances must be > 0");
  if (x0.size() != obj.dim()) throw DimensionMismatchError("integrate: x0 dimension mismatch");
  if (!all_finite(x0)) throw NonFiniteError("integrate: non-finite x0");

  const std::size_t p = x0.size();
  const std::size_t n = p + 1;  // + dissipation component
  const bool planar = p == 2;

  auto rhs = [&](const std::vector<double>& w, std::vector<double>& dw) {
    Point y(w.begin(), w.begin() + long(p));
    const Point g = obj.gradient(y);
    double g2 = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      dw[i] = -g[i];
      g2 += g[i] * g[i];
    }
    dw[p] = g2;
  };

  FlowTrace trace;
  trace.objective_name = obj.name();
  trace.y0 = x0;
  trace.rel_tol = opts.rel_tol;
  trace.abs_tol = opts.abs_tol;

  std::vector<double> w(n), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), wtmp(n), wnew(n);
  for (std::size_t i = 0; i < p; ++i) w[i] = x0[i];
  w[p] = 0.0;

  rhs(w, k1);
  if (!all_finite(k1)) throw NonFiniteError("integrate: non-finite gradient at y0");

  double grad0 = std::sqrt(k1[p]);
  double radius = planar ? std::hypot(w[0], w[1]) : 0.0;
  trace.min_radius = radius;

  FlowRecord rec0;
  rec0.t = 0.0;
  rec0.y = x0;
  rec0.value = obj.value(x0);
  rec0.grad_norm = grad0;
  rec0.dissipation = 0.0;
  rec0.winding = 0.0;
  trace.records.push_back(rec0);

  double t = 0.0;
  double winding = 0.0;
  double h = std::min(T / 10.0, 1e-2 * (1.0 + norm2(x0)) / (1e-8 + grad0));
  h = std::min(h, T);
  trace.min_step = h;
  trace.max_step = 0.0;

  double facold = 1e-4;
  constexpr double kBeta = 0.04;
  constexpr double kExpo = 0.2 - kBeta * 0.75;
  constexpr double kSafe = 0.9;

  std::size_t steps = 0;
  while (t < T * (1.0 - 1e-15)) {
    if (++steps > opts.max_steps) throw Error("integrate: step budget exceeded");
    if (h < 1e-14 * T) throw StepUnderflowError("integrate: step size underflow at t=" + std::to_string(t));
    h = std::min(h, T - t);

    auto stage = [&](const std::vector<double>& coeffs, const std::vector<const std::vector<double>*>& ks,
                     std::vector<double>& out) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = w[i];
        for (std::size_t j = 0; j < ks.size(); ++j) s += h * coeffs[j] * (*ks[j])[i];
        out[i] = s;
      }
    };

    stage({kA21}, {&k1}, wtmp);
    rhs(wtmp, k2);
    stage({kA31, kA32}, {&k1, &k2}, wtmp);
    rhs(wtmp, k3);
    stage({kA41, kA42, kA43}, {&k1, &k2, &k3}, wtmp);
    rhs(wtmp, k4);
    stage({kA51, kA52, kA53, kA54}, {&k1, &k2, &k3, &k4}, wtmp);
    rhs(wtmp, k5);
    stage({kA61, kA62, kA63, kA64, kA65}, {&k1, &k2, &k3, &k4, &k5}, wtmp);
    rhs(wtmp, k6);
    stage({kA71, 0.0, kA73, kA74, kA75, kA76}, {&k1, &k2, &k3, &k4, &k5, &k6}, wnew);
    rhs(wnew, k7);  // FSAL

    double err = 0.0;
    bool finite = all_finite(wnew);
    if (finite) {
      for (std::size_t i = 0; i < n; ++i) {
        const double e = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] +
                              kE6 * k6[i] + kE7 * k7[i]);
        const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(w[i]), std::abs(wnew[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / double(n));
      if (!std::isfinite(err)) finite = false;
    }
    if (!finite) {
      ++trace.rejected_steps;
      h *= 0.1;
      continue;
    }

    const double fac11 = std::pow(std::max(err, 1e-16), kExpo);
    if (err <= 1.0) {
      // Planar unwrap guard: reject steps with too large an angle swing.
      double dtheta = 0.0;
      if (planar) {
        const double r_new = std::hypot(wnew[0], wnew[1]);
        if (std::min(radius, r_new) >= 0.1) {
          dtheta = wrap_angle(std::atan2(wnew[1], wnew[0]) - std::atan2(w[1], w[0]));
          if (std::abs(dtheta) > opts.max_angle_step) {
            ++trace.rejected_steps;
            h *= std::max(0.1, 0.7 * opts.max_angle_step / std::abs(dtheta));
            continue;
          }
        } else {
          dtheta = wrap_angle(std::atan2(wnew[1], wnew[0]) - std::atan2(w[1], w[0]));
        }
        trace.min_radius = std::min(trace.min_radius, r_new);
        radius = r_new;
      }

      t += h;
      trace.min_step = std::min(trace.min_step, h);
      trace.max_step = std::max(trace.max_step, h);
      ++trace.accepted_steps;
      w = wnew;
      k1 = k7;
      winding += dtheta;

      FlowRecord rec;
      rec.t = t;
      rec.y.assign(w.begin(), w.begin() + long(p));
      rec.value = obj.value(rec.y);
      rec.grad_norm = std::sqrt(k1[p]);
      rec.dissipation = w[p];
      rec.winding = winding;
      trace.records.push_back(std::move(rec));

      const double fac = std::max(0.2, std::min(5.0, kSafe / (fac11 / std::pow(facold, kBeta))));
      facold = std::max(err, 1e-4);
      h *= fac;
    } else {
      ++trace.rejected_steps;
      h *= std::max(0.2, kSafe / fac11);
    }
  }
  return trace;
}

FlowTrace integrate(const Objective& obj, const Point& x0, double T, double rel_tol,
                    double abs_tol) {
  FlowOptions opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = abs_tol;
  return integrate(obj, x0, T, opts);
}

double winding_angle(const FlowTrace& trace) {
  if (trace.dim() != 2) throw InvalidValueError("winding_angle: planar traces only");
  if (trace.records.empty()) throw InvalidValueError("winding_angle: empty trace");
  double total = 0.0;
  double prev = std::atan2(trace.records[0].y[1], trace.records[0].y[0]);
  for (const FlowRecord& r : trace.records) {
    if (norm2(r.y) < 0.1)
      throw OriginCrossingError("winding_angle: trajectory came within 0.1 of the origin");
    const double a = std::atan2(r.y[1], r.y[0]);
    total += wrap_angle(a - prev);
    prev = a;
  }
  return total;
}

bool AnnulusRegion::contains(double r, double theta_unwrapped) {
  if (theta_unwrapped < 0.0) return false;
  return inner(theta_unwrapped) < r && r < outer(theta_unwrapped);
}

AnnulusResidency annulus_residency(const FlowTrace& trace) {
  if (trace.dim() != 2) throw InvalidValueError("annulus_residency: planar traces only");
  AnnulusResidency res;
  if (trace.records.empty()) return res;
  const double theta0 = std::atan2(trace.records[0].y[1], trace.records[0].y[0]);
  bool inside_prev = false;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const FlowRecord& r = trace.records[i];
    const double theta = theta0 + r.winding;
    const bool inside = AnnulusRegion::contains(norm2(r.y), theta);
    if (inside) {
      res.ever_inside = true;
      if (inside_prev && i > 0)
        res.winding_inside += r.winding - trace.records[i - 1].winding;
    } else if (res.ever_inside && !res.first_exit_time) {
      res.first_exit_time = r.t;
    }
    inside_prev = inside;
  }
  return res;
}

const char* to_string(PdmClass c) {
  return c == PdmClass::kInner ? "inner" : "outer";
}

PdmClass classify_pdm_trajectory(const FlowTrace& trace, double settle_tol) {
  if (trace.dim() != 2) throw InvalidValueError("classify: planar traces only");
  if (trace.records.empty()) throw InvalidValueError("classify: empty trace");
  const FlowRecord& last = trace.back();
  const double r = norm2(last.y);
  if (r * r <= 1.0 + 1.3e-3)
    throw NotSettledError("classify: trajectory ended at the circle (r=" + std::to_string(r) + ")");
  if (!(last.grad_norm < settle_tol))
    throw NotSettledError("classify: gradient norm " + std::to_string(last.grad_norm) +
                          " above settle tolerance " + std::to_string(settle_tol));
  const double theta0 = std::atan2(trace.records[0].y[1], trace.records[0].y[0]);
  const double psi = 1.0 / (r - 1.0) - (theta0 + last.winding);
  // Between the spirals psi sits in (pi, 2 pi); leaving through the inner
  // zero branch pins it above 2 pi, through the outer branch below pi. The
  // objective strictly decreases along the flow, so a committed trajectory
  // can never re-enter the positive band and the windows are permanent.
  if (psi >= 2.0 * kPi) return PdmClass::kInner;
  if (psi <= kPi) return PdmClass::kOuter;
  throw NotSettledError("classify: trajectory still between the spirals (psi=" +
                        std::to_string(psi) + ")");
}

namespace {

PdmClass classify_start(const Objective& pdm, double r0, double T, const SeparatrixOptions& opts) {
  double horizon = T;
  for (int attempt = 0;; ++attempt) {
    const FlowTrace trace = integrate(pdm, {r0, 0.0}, horizon, opts.flow);
    try {
      return classify_pdm_trajectory(trace, opts.settle_tol);
    } catch (const NotSettledError&) {
      if (attempt >= 3) throw;
      horizon *= 2.0;  // caller guidance: extend T
    }
  }
}

}  // namespace

SeparatrixResult bisect_separatrix(const Objective& pdm, double lo, double hi, double T, int iters,
                                   const SeparatrixOptions& opts) {
  if (!(lo < hi)) throw InvalidValueError("bisect_separatrix: need lo < hi");
  if (iters < 0) throw InvalidValueError("bisect_separatrix: iters must be >= 0");

  SeparatrixResult res;
  res.lo_class = classify_start(pdm, lo, T, opts);
  res.hi_class = classify_start(pdm, hi, T, opts);
  if (res.lo_class == res.hi_class)
    throw SameClassError(std::string("bisect_separatrix: both endpoints classify as ") +
                         to_string(res.lo_class));

  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) break;  // bracket at floating-point resolution
    const PdmClass c = classify_start(pdm, mid, T, opts);
    if (c == res.lo_class)
      lo = mid;
    else
      hi = mid;
    res.iterations = i + 1;
  }
  res.lo = lo;
  res.hi = hi;
  res.r_star = 0.5 * (lo + hi);
  return res;
}

double discrete_winding(const std::vector<Point>& xs) {
  if (xs.empty()) throw InvalidValueError("discrete_winding: empty sequence");
  double total = 0.0;
  double prev = std::atan2(xs[0][1], xs[0][0]);
  for (const Point& x : xs) {
    if (x.size() != 2) throw InvalidValueError("discrete_winding: planar sequences only");
    if (norm2(x) < 0.1)
      throw OriginCrossingError("discrete_winding: iterate within 0.1 of the origin");
    const double a = std::atan2(x[1], x[0]);
    total += wrap_angle(a - prev);
    prev = a;
  }
  return total;
}

ContrastReport contrast_discrete(const Objective& pdm, double r_star, const Schedule& s,
                                 long budget, const ContrastOptions& opts) {
  if (!s.tags().q_summable)
    throw TagViolationError("contrast_discrete: schedule must carry a q-summable tag");

  ContrastReport rep;
  rep.discrete_trace = run(pdm, s, {r_star, 0.0}, budget);
  rep.discrete_outcome = detect_outcome(rep.discrete_trace, opts.outcome);
  rep.discrete_final_grad = rep.discrete_trace.records.back().grad_norm;

  // Unwrapped angle along the iterate sequence.
  std::vector<double> theta;
  theta.reserve(rep.discrete_trace.size());
  double acc = 0.0;
  double prev = std::atan2(rep.discrete_trace.records[0].x[1], rep.discrete_trace.records[0].x[0]);
  for (const TraceRecord& r : rep.discrete_trace.records) {
    const double a = std::atan2(r.x[1], r.x[0]);
    acc += wrap_angle(a - prev);
    prev = a;
    theta.push_back(acc);
  }
  rep.discrete_total_winding = theta.back();
  const std::size_t n = theta.size();
  const std::size_t tail_from = n - std::max<std::size_t>(1, n / 10);
  rep.discrete_tail_winding = std::abs(theta.back() - theta[tail_from]);

  rep.continuous_T = opts.continuous_T;
  rep.continuous_trace = integrate(pdm, {r_star, 0.0}, opts.continuous_T, opts.flow);
  rep.continuous_winding = winding_angle(rep.continuous_trace);
  rep.continuous_annulus = annulus_residency(rep.continuous_trace);
  return rep;
}

}  // namespace dlab
