#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dlab/schedules.hpp"

using namespace dlab;

TEST_CASE("power_scalar grid values") {
  const Schedule s = power_scalar(0.25);
  CHECK(s.step_at(0).lambda_max() == 1.0);   // (0+1)^{-1/4}
  CHECK(s.step_at(15).lambda_max() == 0.5);  // 16^{-1/4}
  CHECK(s.step_at(15).form() == StepMatrix::Form::kScalar);
}

TEST_CASE("log_scalar offset convention keeps k=0 finite") {
  const Schedule s = log_scalar();
  CHECK(s.step_at(0).lambda_max() == doctest::Approx(1.4426950408889634).epsilon(1e-15));
  CHECK(s.step_at(1).lambda_max() == doctest::Approx(1.0 / std::log(3.0)).epsilon(1e-15));
  CHECK(std::isfinite(s.step_at(0).lambda_max()));
}

TEST_CASE("step_at is referentially transparent") {
  const Schedule s = diagonal_power(0.5, {1.0, 2.0, 0.5});
  for (long k : {0L, 1L, 7L, 1000L}) {
    CHECK(s.step_at(k).same_bits(s.step_at(k)));
  }
  const Schedule p = power_scalar(0.75, 0.1);
  CHECK(p.step_at(12345).same_bits(p.step_at(12345)));
}

TEST_CASE("tag consistency: q_summable requires diminishing") {
  PropertyTags tags;
  tags.spd = true;
  tags.q_summable = 2.0;
  tags.diminishing = false;
  CHECK_THROWS_AS(Schedule("bad", tags, [](long) { return StepMatrix::scalar(1.0); }),
                  TagViolationError);
  CHECK_THROWS_AS(
      [] {
        PropertyTags t;
        t.diminishing = true;
        t.q_summable = 0.5;  // q must exceed 1
        return Schedule("bad-q", t, [](long) { return StepMatrix::scalar(1.0); });
      }(),
      InvalidValueError);
}

TEST_CASE("tagged-SPD schedule emitting a non-SPD matrix is a tag violation") {
  PropertyTags tags;
  tags.spd = true;
  const Schedule s("broken", tags, [](long k) { return StepMatrix::scalar(k == 3 ? -1.0 : 1.0); });
  CHECK_NOTHROW(s.step_at(0));
  CHECK_THROWS_AS(s.step_at(3), TagViolationError);
}

TEST_CASE("classify input validation") {
  const Schedule s = power_scalar(0.5);
  CHECK_THROWS_AS(classify(s, 1, {2.0}), InvalidValueError);
  CHECK_THROWS_AS(classify(s, 100, {0.5}), InvalidValueError);
}

TEST_CASE("classify: power(1/4) is summable-consistent at q=5, inconsistent at q=2") {
  const PropertyReport rep = classify(power_scalar(0.25), 100000, {2.0, 5.0});
  CHECK(rep.q_verdicts.at(5.0) == Verdict::kConsistentWithTag);
  CHECK(rep.q_verdicts.at(2.0) == Verdict::kInconsistentWithTag);
  CHECK(rep.divergent_min_sum == Verdict::kConsistentWithTag);
  CHECK(rep.diminishing == Verdict::kConsistentWithTag);
  CHECK(rep.spd == Verdict::kConsistentWithTag);
  // decay exponent of (k+1)^{-q/4} is q/4
  CHECK(rep.q_decay_exponent.at(2.0) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(rep.q_decay_exponent.at(5.0) == doctest::Approx(1.25).epsilon(1e-3));
}

TEST_CASE("classify: the log schedule fails q-summability at every probed q") {
  const PropertyReport rep = classify(log_scalar(), 100000, {2.0, 4.0, 8.0});
  for (double q : {2.0, 4.0, 8.0}) {
    CHECK(rep.q_verdicts.at(q) == Verdict::kInconsistentWithTag);
  }
  CHECK(rep.divergent_min_sum == Verdict::kConsistentWithTag);
  CHECK(rep.diminishing == Verdict::kConsistentWithTag);
}

TEST_CASE("classify: constant schedule flagged non-diminishing, divergent sum consistent") {
  const PropertyReport rep = classify(constant_scalar(0.1), 1000, {2.0});
  CHECK(rep.diminishing == Verdict::kInconsistentWithTag);
  CHECK(rep.divergent_min_sum == Verdict::kConsistentWithTag);
  CHECK(rep.q_verdicts.at(2.0) == Verdict::kInconsistentWithTag);
}

TEST_CASE("power partial min-sums grow by a fixed amount per decade") {
  for (double a : {0.25, 0.5, 0.75}) {
    const Schedule s = power_scalar(a);
    double prev_sum = 0.0;
    double prev_increment = 0.0;
    long k = 0;
    for (long horizon = 100; horizon <= 1000000; horizon *= 10) {
      double sum = prev_sum;
      for (; k < horizon; ++k) sum += s.step_at(k).lambda_min();
      const double increment = sum - prev_sum;
      CHECK(sum > prev_sum);
      if (prev_increment > 0.0) CHECK(increment > prev_increment);  // unbounded growth
      prev_increment = increment;
      prev_sum = sum;
    }
  }
}

TEST_CASE("q-summable partial sums are monotone with shrinking tail increments") {
  const Schedule s = power_scalar(0.5);  // q_summable tag q = 4
  const double q = *s.tags().q_summable;
  double sum = 0.0;
  double prev_sum = 0.0;
  double prev_increment = 0.0;
  long k = 0;
  for (long horizon = 100; horizon <= 100000; horizon *= 10) {
    for (; k < horizon; ++k) sum += std::pow(s.step_at(k).lambda_max(), q);
    CHECK(sum >= prev_sum);
    const double increment = sum - prev_sum;
    if (prev_increment > 0.0) CHECK(increment < prev_increment);  // Cauchy trend
    prev_increment = increment;
    prev_sum = sum;
  }
}

TEST_CASE("diagonal_power emits diagonal matrices with weighted extremes") {
  const Schedule s = diagonal_power(0.5, {2.0, 1.0});
  const StepMatrix m = s.step_at(3);  // factor 4^{-1/2} = 1/2
  CHECK(m.form() == StepMatrix::Form::kDiagonal);
  CHECK(m.lambda_min() == 0.5);
  CHECK(m.lambda_max() == 1.0);
}

TEST_CASE("classify handles matrix-valued schedules") {
  // lambda_max = 2 (k+1)^{-1/2}: fourth powers are summable, squares are the
  // harmonic series.
  const PropertyReport rep = classify(diagonal_power(0.5, {1.0, 2.0}), 10000, {2.0, 4.0});
  CHECK(rep.spd == Verdict::kConsistentWithTag);
  CHECK(rep.diminishing == Verdict::kConsistentWithTag);
  CHECK(rep.q_verdicts.at(2.0) == Verdict::kInconsistentWithTag);
  CHECK(rep.q_decay_exponent.at(4.0) == doctest::Approx(2.0).epsilon(1e-3));
}
