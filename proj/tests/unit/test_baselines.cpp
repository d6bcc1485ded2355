// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "ricnn/baselines.hpp"

using namespace ricnn;

namespace {

Mat random_design(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  }
  return m;
}

/// Test-side oracle: plain least squares with intercept via the normal
/// equations on the augmented design.
std::pair<Vec, double> least_squares(const Mat& x, const Vec& y) {
  Mat aug(x.rows(), x.cols() + 1);
  aug.leftCols(x.cols()) = x;
  aug.col(x.cols()).setOnes();
  const Vec solution = (aug.transpose() * aug).ldlt().solve(aug.transpose() * y);
  return {solution.head(x.cols()), solution[x.cols()]};
}

}  // namespace

TEST_CASE("unpenalized lasso solves least squares") {
  const Mat x = random_design(40, 3, 1);
  const Vec y = x * Vec::Constant(3, 0.5) + 0.1 * random_design(40, 1, 2).col(0);
  const LinearModel model = fit_lasso(x, y, 0.0, 1e-12, 20000);
  const auto [w, b] = least_squares(x, y);
  CHECK((model.weights - w).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK(model.intercept == doctest::Approx(b).epsilon(1e-8));
}

TEST_CASE("a huge penalty shrinks every weight to exactly zero") {
  const Mat x = random_design(30, 4, 3);
  const Vec y = random_design(30, 1, 4).col(0);
  const LinearModel model = fit_lasso(x, y, 1e6);
  CHECK(model.weights.isZero());
  CHECK(model.intercept == doctest::Approx(y.mean()).epsilon(1e-12));
}

TEST_CASE("lasso matches the closed-form soft threshold on an orthogonal design") {
  // columns are orthogonal, so one coordinate pass is exact:
  // w1 = 1 - 2*lambda, w2 = max(0, 0.5 - 2*lambda)
  Mat x(4, 2);
  x << 1, 0, -1, 0, 0, 1, 0, -1;
  Vec y(4);
  y << 1, -1, 0.5, -0.5;

  LinearModel m1 = fit_lasso(x, y, 0.1, 1e-12, 100);
  CHECK(m1.weights[0] == doctest::Approx(0.8).epsilon(1e-10));
  CHECK(m1.weights[1] == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(m1.intercept == doctest::Approx(0.0).epsilon(1e-12));

  LinearModel m2 = fit_lasso(x, y, 0.3, 1e-12, 100);
  CHECK(m2.weights[0] == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(m2.weights[1] == 0.0);  // soft-thresholded to an exact zero
}

TEST_CASE("the lasso objective never increases across sweeps") {
  const Mat x = random_design(60, 12, 7);
  const Vec y = x.leftCols(3) * Vec::Constant(3, 0.4) +
                0.2 * random_design(60, 1, 8).col(0);
  const LinearModel model = fit_lasso(x, y, 0.01, 1e-10, 500);
  REQUIRE(model.objective_trace.size() >= 2);
  for (std::size_t s = 1; s < model.objective_trace.size(); ++s) {
    CHECK(model.objective_trace[s] <=
          model.objective_trace[s - 1] + 1e-12 * std::abs(model.objective_trace[s - 1]));
  }
  // and the final trace entry is the true objective of the returned model
  CHECK(model.objective_trace.back() ==
        doctest::Approx(lasso_objective(x, y, model.weights, model.intercept, 0.01))
            .epsilon(1e-9));
}

TEST_CASE("lasso reports non-convergence but still returns the model") {
  const Mat x = random_design(50, 20, 9);
  const Vec y = random_design(50, 1, 10).col(0);
  const LinearModel model = fit_lasso(x, y, 1e-6, 1e-14, 2);
  CHECK_FALSE(model.converged);
  CHECK(model.sweeps == 2);
  CHECK(model.weights.allFinite());
}

TEST_CASE("ridge on an identity design with centered targets halves them") {
  const Mat x = Mat::Identity(3, 3);
  Vec y(3);
  y << 2, 0, -2;  // zero mean, so centering is a no-op
  const LinearModel model = fit_ridge(x, y, 1.0);
  CHECK(model.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.weights[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(model.weights[2] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(model.intercept == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ridge weights vanish as the penalty grows") {
  const Mat x = random_design(25, 4, 11);
  const Vec y = x * Vec::Constant(4, 1.0);
  CHECK(fit_ridge(x, y, 1e9).weights.lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("ridge satisfies its normal equations") {
  const Mat x = random_design(30, 6, 13);
  const Vec y = random_design(30, 1, 14).col(0);
  const double lambda = 0.37;
  const LinearModel model = fit_ridge(x, y, lambda);

  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const Mat xc = x.rowwise() - x_mean;
  const Vec yc = y.array() - y.mean();
  const Vec residual = (xc.transpose() * xc + lambda * Mat::Identity(6, 6)) *
                           model.weights - xc.transpose() * yc;
  CHECK(residual.lpNorm<Eigen::Infinity>() <=
        1e-10 * std::max(1.0, model.weights.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("lasso at zero penalty and ridge at tiny penalty agree with least squares") {
  const Mat x = random_design(50, 3, 15);
  const Vec y = x * Vec::Constant(3, -0.25) + 0.05 * random_design(50, 1, 16).col(0);
  const auto [w, b] = least_squares(x, y);
  const LinearModel lasso = fit_lasso(x, y, 0.0, 1e-12, 20000);
  const LinearModel ridge = fit_ridge(x, y, 1e-10);
  CHECK((lasso.weights - w).lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK((ridge.weights - w).lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK(lasso.intercept == doctest::Approx(b).epsilon(1e-6));
  CHECK(ridge.intercept == doctest::Approx(b).epsilon(1e-6));
}

TEST_CASE("predict applies the affine map") {
  LinearModel model;
  model.weights = Vec::Zero(2);
  model.intercept = 0.75;
  Mat x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  CHECK(predict(model, x).isConstant(0.75));

  model.weights << 0.0, 1.0;  // one-hot picks the second column
  const Vec picked = predict(model, x);
  CHECK(picked[0] == 2.75);
  CHECK(picked[1] == 4.75);
  CHECK(picked[2] == 6.75);

  // hand 2x2 case: [1,2;3,4] * [0.5, -1] + 0.25
  model.weights << 0.5, -1.0;
  model.intercept = 0.25;
  Mat small(2, 2);
  small << 1, 2, 3, 4;
  const Vec out = predict(model, small);
  CHECK(out[0] == doctest::Approx(1 * 0.5 - 2 + 0.25).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(3 * 0.5 - 4 + 0.25).epsilon(1e-15));

  CHECK_THROWS_AS(predict(model, Mat::Zero(2, 3)), Error);
}

TEST_CASE("lasso validates its inputs") {
  const Mat x = random_design(4, 2, 17);
  CHECK_THROWS_AS(fit_lasso(x, Vec::Zero(3), 0.1), Error);   // row mismatch
  CHECK_THROWS_AS(fit_lasso(x, Vec::Zero(4), -0.1), Error);  // negative penalty
  CHECK_THROWS_AS(fit_ridge(x, Vec::Zero(4), 0.0), Error);   // ridge needs > 0
}
