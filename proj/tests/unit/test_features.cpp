// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "ricnn/features.hpp"

using namespace ricnn;

TEST_CASE("relative_diff basic values") {
  CHECK(relative_diff(5.0, 5.0) == 0.0);
  CHECK(relative_diff(1.0, 0.0) == 2.0);
  CHECK(relative_diff(0.0, 1.0) == -2.0);
  CHECK(relative_diff(3.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));  // 2*2/4
  CHECK(relative_diff(0.0, 0.0) == 0.0);  // the 0/0 case is defined, not an error
}

TEST_CASE("relative_diff is antisymmetric, scale invariant and bounded") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int iter = 0; iter < 200; ++iter) {
    const double x = gauss(rng);
    const double y = gauss(rng);
    const double c = scale(rng);
    const double d = relative_diff(x, y);
    CHECK(relative_diff(y, x) == -d);
    CHECK(relative_diff(c * x, c * y) == doctest::Approx(d).epsilon(1e-12));
    CHECK(std::abs(d) <= 2.0);
  }
}

TEST_CASE("normalized_rank hits the published anchor points") {
  Vec v(3);
  v << 10, 20, 30;
  const Vec r = normalized_rank(v);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 0.5);  // odd n: the median maps to exactly one half
  CHECK(r[2] == 1.0);
}

TEST_CASE("normalized_rank gives ties their midrank") {
  Vec v(2);
  v << 7, 7;
  const Vec r = normalized_rank(v);
  CHECK(r[0] == 0.5);
  CHECK(r[1] == 0.5);
}

TEST_CASE("normalized_rank matches a hand-sorted example") {
  Vec v(5);
  v << 4, 1, 3, 2, 5;
  const Vec r = normalized_rank(v);
  CHECK(r[0] == 0.75);
  CHECK(r[1] == 0.0);
  CHECK(r[2] == 0.5);
  CHECK(r[3] == 0.25);
  CHECK(r[4] == 1.0);
}

TEST_CASE("normalized_rank is invariant under strictly increasing transforms") {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> gauss;
  for (int iter = 0; iter < 50; ++iter) {
    Vec v(2 + static_cast<Eigen::Index>(rng() % 20));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    const Vec base = normalized_rank(v);
    const Vec mapped = normalized_rank(v.array().exp() * 2.0 + 1.0);
    CHECK((base - mapped).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("normalized_rank needs two values") {
  try {
    normalized_rank(Vec::Ones(1));
    FAIL("expected degenerate-universe");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateUniverse);
  }
}

TEST_CASE("normalize_factors ranks each column within the step") {
  FactorPanel panel = ricnn::testing::make_panel(
      3, 1, [](int, int, int) { return 0.0; }, [](int, int) { return 0.0; });
  TimeStep& step = panel.steps[0];
  step.factors.col(0) << 1, 2, 3;
  step.factors.col(1) << 9, 9, 9;  // constant column
  step.all_missing[2] = true;      // flagged as carrying no information

  const Mat norm = normalize_factors(step);
  CHECK(norm(0, 0) == 0.0);
  CHECK(norm(1, 0) == 0.5);
  CHECK(norm(2, 0) == 1.0);
  CHECK(norm.col(1).isConstant(0.5));
  CHECK(norm.col(2).isZero());
}

TEST_CASE("normalize_factors handles midranks in a mixed column") {
  FactorPanel panel = ricnn::testing::make_panel(
      4, 1, [](int, int, int) { return 0.0; }, [](int, int) { return 0.0; });
  panel.steps[0].factors.col(0) << -1, 5, 2, 2;
  const Mat norm = normalize_factors(panel.steps[0]);
  CHECK(norm(0, 0) == 0.0);
  CHECK(norm(1, 0) == 1.0);
  CHECK(norm(2, 0) == 0.5);
  CHECK(norm(3, 0) == 0.5);
}

namespace {

/// Test-side oracle: assembles one stock's feature row straight from the
/// panel, with its own midranking, independent of the pipeline.
Vec brute_force_features(const FactorPanel& panel, const std::string& stock, int t) {
  auto column_rank = [](const Vec& column, int row) {
    const Eigen::Index n = column.size();
    double less = 0, equal = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (column[i] < column[row]) ++less;
      if (column[i] == column[row]) ++equal;
    }
    const double midrank = less + 0.5 * (equal + 1);
    return (midrank - 1.0) / static_cast<double>(n - 1);
  };
  auto rel = [](double x, double y) {
    return x == y ? 0.0 : 2.0 * (x - y) / (std::abs(x) + std::abs(y));
  };

  Vec out(kFeatureDim);
  int col = 0;
  const int lags[5] = {0, 3, 6, 9, 12};
  for (int lag : lags) {
    const TimeStep& step = panel.step(t - lag);
    const int row = step.row_of(stock);
    for (int j = 0; j < kFactorCount; ++j) {
      out[col++] = column_rank(step.factors.col(j), row);
    }
  }
  const TimeStep& now = panel.step(t);
  const int now_row = now.row_of(stock);
  for (int b = 1; b < 5; ++b) {
    const TimeStep& past = panel.step(t - lags[b]);
    const int past_row = past.row_of(stock);
    for (int j = 0; j < kFactorCount; ++j) {
      out[col++] = rel(column_rank(now.factors.col(j), now_row),
                       column_rank(past.factors.col(j), past_row));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("build_samples matches an independent brute-force assembler") {
  // distinct patterned factors so ranks vary with stock, time and column
  const FactorPanel panel = ricnn::testing::make_panel(
      3, 15,
      [](int i, int t, int j) {
        return std::sin(1.7 * i + 0.9 * t + 0.31 * j) + 0.01 * i * j;
      },
      [](int i, int t) { return 0.01 * ((i + t) % 3) - 0.005; });
  const NormalizedPanel np = NormalizedPanel::build(panel);

  const SampleSet samples = build_samples(np, 13, 14);
  REQUIRE(samples.steps.size() == 2);
  for (const StepSamples& step : samples.steps) {
    REQUIRE(step.stock_ids.size() == 3);
    CHECK(step.features.cols() == kFeatureDim);
    for (std::size_t i = 0; i < step.stock_ids.size(); ++i) {
      const Vec expected = brute_force_features(panel, step.stock_ids[i], step.t);
      const Vec got = step.features.row(static_cast<Eigen::Index>(i)).transpose();
      CHECK((got - expected).lpNorm<Eigen::Infinity>() == 0.0);
    }
  }
}

TEST_CASE("a constant panel produces 0.5 lag blocks and zero diff blocks") {
  const FactorPanel panel = ricnn::testing::make_panel(
      3, 14, [](int, int, int) { return 7.0; }, [](int, int) { return 0.0; });
  const NormalizedPanel np = NormalizedPanel::build(panel);
  const SampleSet samples = build_samples(np, 13, 13);
  const StepSamples& step = samples.steps[0];
  REQUIRE(step.stock_ids.size() == 3);
  CHECK(step.features.leftCols(100).isConstant(0.5));
  CHECK(step.features.rightCols(80).isZero());
  CHECK(step.targets.isConstant(0.5));  // tied returns rank to the midpoint
}

TEST_CASE("a stock missing one lag is skipped and counted") {
  FactorPanel panel = ricnn::testing::make_panel(
      3, 14, [](int i, int t, int j) { return i + 0.1 * t + 0.01 * j; },
      [](int i, int t) { return 0.001 * i + 0.0001 * t; });
  // S003 enters the universe at t-6 = 7: drop it from steps 1..6
  for (int t = 1; t <= 6; ++t) {
    TimeStep& step = panel.steps[static_cast<std::size_t>(t - 1)];
    step.universe.pop_back();
    step.factors.conservativeResize(2, kFactorCount);
    step.returns.conservativeResize(2);
  }
  const NormalizedPanel np = NormalizedPanel::build(panel);
  const SampleSet samples = build_samples(np, 13, 13);
  const StepSamples& step = samples.steps[0];
  CHECK(step.stock_ids == std::vector<std::string>{"S001", "S002"});
  CHECK(step.skipped == 1);
}

TEST_CASE("tie-free targets tile the unit interval") {
  const FactorPanel panel = ricnn::testing::make_panel(
      5, 14, [](int i, int t, int j) { return std::cos(i + t + j); },
      [](int i, int t) { return 0.01 * i + 0.0001 * t; });  // distinct per stock
  const NormalizedPanel np = NormalizedPanel::build(panel);
  const SampleSet samples = build_samples(np, 13, 13);
  Vec targets = samples.steps[0].targets;
  std::sort(targets.begin(), targets.end());
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    CHECK(targets[i] == doctest::Approx(i / 4.0).epsilon(1e-15));
  }
}

TEST_CASE("build_samples enforces its time bounds") {
  const FactorPanel panel = ricnn::testing::make_panel(
      3, 20, [](int i, int t, int j) { return i + t + j; },
      [](int, int) { return 0.0; });
  const NormalizedPanel np = NormalizedPanel::build(panel);
  CHECK_THROWS_AS(build_samples(np, 12, 13), Error);  // lags would not exist
  CHECK_THROWS_AS(build_samples(np, 13, 20), Error);  // target needs t+1
  CHECK_NOTHROW(build_samples(np, 13, 19));
}

TEST_CASE("build_samples reports a panel with no eligible stock") {
  // nobody survives 13 consecutive steps: disjoint universes at odd/even t
  FactorPanel panel = ricnn::testing::make_panel(
      4, 14, [](int i, int t, int j) { return i + t + j; },
      [](int, int) { return 0.0; });
  for (TimeStep& step : panel.steps) {
    const bool odd = step.index % 2 == 1;
    step.universe = odd ? std::vector<std::string>{"S001", "S002"}
                        : std::vector<std::string>{"S003", "S004"};
    step.factors.conservativeResize(2, kFactorCount);
    step.returns.conservativeResize(2);
  }
  const NormalizedPanel np = NormalizedPanel::build(panel);
  try {
    build_samples(np, 13, 13);
    FAIL("expected empty-sample-set");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySampleSet);
  }
}

TEST_CASE("build_features_at keeps stocks that leave at t+1") {
  FactorPanel panel = ricnn::testing::make_panel(
      3, 14, [](int i, int t, int j) { return i * 1.0 + t + j; },
      [](int, int) { return 0.0; });
  // S003 leaves at the final step; scoring at t=13 must still include it
  TimeStep& last = panel.steps[13];
  last.universe.pop_back();
  last.factors.conservativeResize(2, kFactorCount);
  last.returns.conservativeResize(2);

  const NormalizedPanel np = NormalizedPanel::build(panel);
  const FeatureRows rows = build_features_at(np, 13);
  CHECK(rows.stock_ids == std::vector<std::string>{"S001", "S002", "S003"});
  const SampleSet samples = build_samples(np, 13, 13);
  CHECK(samples.steps[0].stock_ids == std::vector<std::string>{"S001", "S002"});
}
