#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dlab/flow.hpp"
#include "dlab/palis_de_melo.hpp"
#include "dlab/staircase.hpp"

using namespace dlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

FlowTrace synthetic_flow(const std::vector<Point>& ys) {
  FlowTrace t;
  t.y0 = ys.front();
  for (std::size_t i = 0; i < ys.size(); ++i) {
    FlowRecord r;
    r.t = double(i);
    r.y = ys[i];
    t.records.push_back(r);
  }
  return t;
}

double endpoint_error(double rel_tol) {
  QuadraticBowl q(2);
  const FlowTrace t = integrate(q, {1.0, 0.0}, 1.0, rel_tol, rel_tol * 1e-2);
  const double exact = std::exp(-1.0);
  return std::hypot(t.back().y[0] - exact, t.back().y[1]);
}

}  // namespace

TEST_CASE("integrate: quadratic bowl matches the exact exponential") {
  QuadraticBowl q(2);
  const FlowTrace t = integrate(q, {1.0, 0.0}, 1.0, 1e-8, 1e-10);
  CHECK(std::abs(t.back().y[0] - std::exp(-1.0)) < 1e-8);
  CHECK(std::abs(t.back().y[1]) < 1e-12);
  CHECK(t.back().t == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.records.front().y == Point{1.0, 0.0});
}

TEST_CASE("integrate: tolerance ladder gains at least 8x per hundredfold") {
  double prev = endpoint_error(1e-4);
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    const double err = endpoint_error(tol);
    CHECK(err < prev / 8.0);
    prev = err;
  }
}

TEST_CASE("integrate: dissipation identity on the suite") {
  struct Case {
    const Objective& obj;
    Point y0;
    double T;
  };
  QuadraticBowl q(2);
  ExpNegSquare e;
  const Schedule widths = power_scalar(1.0);
  const Staircase st(widths);
  PalisDeMelo pdm;
  const double rel = 1e-8;
  const Case cases[] = {
      {q, {1.0, 0.0}, 1.0},
      {e, {1.0}, 2.0},
      {st, {-1.0}, 2.0},
      {pdm, {1.25, 0.0}, 5.0},
  };
  for (const Case& c : cases) {
    const FlowTrace t = integrate(c.obj, c.y0, c.T, rel, 1e-10);
    const double f0 = t.records.front().value;
    const double residual = std::abs(t.back().value - f0 + t.back().dissipation);
    CHECK(residual < 10.0 * rel * (1.0 + std::abs(f0)));

    // Energy monotone within 5x the local tolerance.
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      CHECK(t.records[i + 1].value <=
            t.records[i].value + 5.0 * (1e-10 + rel * std::abs(t.records[i].value)));
    }

    // No-cycle consequence: real dissipation forces real descent.
    const double eps = 1e-3;
    if (t.back().dissipation > eps) {
      CHECK(t.back().value < f0 - 0.5 * eps);
    }
  }
}

TEST_CASE("integrate: strict dissipation off stationary sets") {
  PalisDeMelo pdm;
  const FlowTrace t = integrate(pdm, {1.25, 0.0}, 5.0, 1e-8, 1e-10);
  CHECK(t.back().value < t.records.front().value);
}

TEST_CASE("integrate: input validation") {
  QuadraticBowl q(1);
  CHECK_THROWS_AS(integrate(q, {1.0}, -1.0, 1e-8, 1e-10), InvalidValueError);
  CHECK_THROWS_AS(integrate(q, {1.0}, 1.0, 0.0, 1e-10), InvalidValueError);
  CHECK_THROWS_AS(integrate(q, {1.0, 2.0}, 1.0, 1e-8, 1e-10), DimensionMismatchError);
}

TEST_CASE("winding_angle on synthetic paths") {
  // quarter circle (1,0) -> (0,1)
  std::vector<Point> arc;
  for (int i = 0; i <= 20; ++i) {
    const double t = 0.5 * kPi * double(i) / 20.0;
    arc.push_back({std::cos(t), std::sin(t)});
  }
  CHECK(winding_angle(synthetic_flow(arc)) == doctest::Approx(0.5 * kPi).epsilon(1e-12));

  // radially inward path (2,0) -> (1.5,0)
  std::vector<Point> radial;
  for (int i = 0; i <= 10; ++i) radial.push_back({2.0 - 0.05 * i, 0.0});
  CHECK(winding_angle(synthetic_flow(radial)) == 0.0);

  // origin guard
  CHECK_THROWS_AS(winding_angle(synthetic_flow({{1.0, 0.0}, {0.05, 0.0}})), OriginCrossingError);
}

TEST_CASE("annulus region membership") {
  CHECK(AnnulusRegion::contains(1.2, 0.0));
  CHECK_FALSE(AnnulusRegion::contains(1.1, 0.0));   // below inner bound 1.159
  CHECK_FALSE(AnnulusRegion::contains(1.4, 0.0));   // above outer bound 1.318
  CHECK_FALSE(AnnulusRegion::contains(1.2, -0.5));  // theta >= 0 only
  // Bounds tighten as theta grows.
  CHECK(AnnulusRegion::inner(2.0 * kPi) == doctest::Approx(1.0 + 1.0 / (4.0 * kPi)));
  CHECK(AnnulusRegion::contains(1.1, 2.0 * kPi));
}

TEST_CASE("classify: unsettled short run") {
  PalisDeMelo pdm;
  const FlowTrace t = integrate(pdm, {1.0 + 1.0 / (2.0 * kPi) + 1e-4, 0.0}, 0.01, 1e-8, 1e-10);
  CHECK_THROWS_AS(classify_pdm_trajectory(t, 0.9), NotSettledError);
}

TEST_CASE("classify: the two bracket endpoints settle into different classes") {
  PalisDeMelo pdm;
  const double lo = 1.0 + 1.0 / (2.0 * kPi) + 1e-4;
  const double hi = 1.0 + 1.0 / kPi - 1e-4;
  const FlowTrace tlo = integrate(pdm, {lo, 0.0}, 100.0, 1e-8, 1e-10);
  const FlowTrace thi = integrate(pdm, {hi, 0.0}, 100.0, 1e-8, 1e-10);
  const PdmClass clo = classify_pdm_trajectory(tlo, 0.9);
  const PdmClass chi_ = classify_pdm_trajectory(thi, 0.9);
  CHECK(clo == PdmClass::kInner);
  CHECK(chi_ == PdmClass::kOuter);
  // Deterministic given a trace.
  CHECK(classify_pdm_trajectory(tlo, 0.9) == clo);
}

TEST_CASE("bisect_separatrix narrows the bracket by 2^-iters") {
  PalisDeMelo pdm;
  const double lo = 1.0 + 1.0 / (2.0 * kPi) + 1e-4;
  const double hi = 1.0 + 1.0 / kPi - 1e-4;
  const SeparatrixResult res = bisect_separatrix(pdm, lo, hi, 60.0, 12);
  CHECK(res.iterations == 12);
  CHECK(res.r_star > lo);
  CHECK(res.r_star < hi);
  const double expect = (hi - lo) * std::pow(2.0, -12);
  CHECK(res.hi - res.lo == doctest::Approx(expect).epsilon(1e-9));
  CHECK(res.lo_class != res.hi_class);
}

TEST_CASE("bisect_separatrix: iters=0 returns the midpoint") {
  PalisDeMelo pdm;
  const double lo = 1.0 + 1.0 / (2.0 * kPi) + 1e-4;
  const double hi = 1.0 + 1.0 / kPi - 1e-4;
  const SeparatrixResult res = bisect_separatrix(pdm, lo, hi, 60.0, 0);
  CHECK(res.r_star == 0.5 * (lo + hi));
}

TEST_CASE("bisect_separatrix rejects an equal-class bracket") {
  PalisDeMelo pdm;
  CHECK_THROWS_AS(bisect_separatrix(pdm, 1.159, 1.160, 60.0, 4), SameClassError);
}

TEST_CASE("contrast_discrete: no discrete cycle at the separatrix") {
  PalisDeMelo pdm;
  const SeparatrixResult sep = bisect_separatrix(pdm, 1.0 + 1.0 / (2.0 * kPi) + 1e-4,
                                                 1.0 + 1.0 / kPi - 1e-4, 60.0, 16);
  ContrastOptions opts;
  opts.continuous_T = 60.0;
  const Schedule s = power_scalar(0.75, 0.1);
  CHECK_THROWS_AS(contrast_discrete(pdm, sep.r_star, log_scalar(), 100, opts),
                  TagViolationError);  // log schedule carries no summable tag

  const ContrastReport rep = contrast_discrete(pdm, sep.r_star, s, 20000, opts);
  CHECK(rep.discrete_tail_winding < 0.05);
  CHECK(rep.continuous_annulus.ever_inside);
  CHECK(rep.continuous_annulus.winding_inside > 0.0);
  CHECK(std::abs(rep.discrete_total_winding) < 2.0 * kPi);  // nothing like a cycle
  CHECK(rep.discrete_trace.size() == 20001);
}

TEST_CASE("step underflow guard trips instead of hanging") {
  // A gradient with a jump the controller cannot resolve: |x|^(1/2) slope
  // blows up at 0 and the error estimate never settles.
  struct Nasty : Objective {
    std::string n = "nasty";
    const std::string& name() const override { return n; }
    std::size_t dim() const override { return 1; }
    double value(const Point& x) const override { return std::sqrt(std::abs(x[0])); }
    Point gradient(const Point& x) const override {
      if (x[0] == 0.0) return {0.0};
      const double s = x[0] > 0.0 ? 1.0 : -1.0;
      return {s * 0.5 / std::sqrt(std::abs(x[0]))};
    }
  } nasty;
  CHECK_THROWS_AS(integrate(nasty, {1e-3, }, 10.0, 1e-12, 1e-14), StepUnderflowError);
}
