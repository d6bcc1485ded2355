// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include "ricnn/baselines.hpp"

#include <cmath>

#include "ricnn/metrics.hpp"

namespace ricnn {

namespace {

double soft_threshold(double a, double lambda) {
  if (a > lambda) return a - lambda;
  if (a < -lambda) return a + lambda;
  return 0.0;
}

void pool_samples(const SampleSet& samples, Mat& features, Vec& targets) {
  const auto total = static_cast<Eigen::Index>(samples.total_samples());
  features.resize(total, kFeatureDim);
  targets.resize(total);
  Eigen::Index row = 0;
  for (const StepSamples& step : samples.steps) {
    const auto n = static_cast<Eigen::Index>(step.stock_ids.size());
    if (n > 0) {
      features.middleRows(row, n) = step.features;
      targets.segment(row, n) = step.targets;
      row += n;
    }
  }
}

}  // namespace

double lasso_objective(const Mat& features, const Vec& targets, const Vec& weights,
                       double intercept, double lambda) {
  const Vec residual =
      targets - features * weights - Vec::Constant(targets.size(), intercept);
  const double k = static_cast<double>(targets.size());
  return residual.squaredNorm() / (2.0 * k) + lambda * weights.lpNorm<1>();
}

LinearModel fit_lasso(const Mat& features, const Vec& targets, double lambda,
                      double tol, int max_iter) {
  if (lambda < 0.0) throw Error(ErrorCode::Parameter, "lasso lambda must be >= 0");
  if (targets.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "lasso needs at least 2 samples");
  }
  if (features.rows() != targets.size()) {
    throw Error(ErrorCode::Shape, "lasso: feature/target row mismatch");
  }

  const auto k = static_cast<double>(targets.size());
  const Eigen::Index d = features.cols();
  const Vec col_scale = features.colwise().squaredNorm() / k;  // z_j

  LinearModel model;
  model.kind = LinearKind::Lasso;
  model.lambda = lambda;
  model.weights = Vec::Zero(d);
  model.intercept = targets.mean();

  Vec residual = targets - Vec::Constant(targets.size(), model.intercept);
  double max_step = tol + 1.0;
  int sweep = 0;
  while (max_step > tol && sweep < max_iter) {
    max_step = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (col_scale[j] == 0.0) continue;  // dead column stays at 0
      const double w_old = model.weights[j];
      const double rho = residual.dot(features.col(j)) / k + w_old * col_scale[j];
      const double w_new = soft_threshold(rho, lambda) / col_scale[j];
      if (w_new != w_old) {
        residual += (w_old - w_new) * features.col(j);
        model.weights[j] = w_new;
        max_step = std::max(max_step, std::abs(w_new - w_old));
      }
    }
    // unpenalized intercept: absorb the mean residual
    const double shift = residual.mean();
    if (shift != 0.0) {
      model.intercept += shift;
      residual.array() -= shift;
      max_step = std::max(max_step, std::abs(shift));
    }
    model.objective_trace.push_back(
        residual.squaredNorm() / (2.0 * k) + lambda * model.weights.lpNorm<1>());
    ++sweep;
  }
  model.sweeps = sweep;
  model.converged = max_step <= tol;
  if (!model.converged) {
    warn("lasso did not converge in " + std::to_string(max_iter) +
         " sweeps; last max coordinate step " + std::to_string(max_step));
  }
  return model;
}

LinearModel fit_lasso(const SampleSet& samples, double lambda, double tol,
                      int max_iter) {
  Mat x;
  Vec y;
  pool_samples(samples, x, y);
  return fit_lasso(x, y, lambda, tol, max_iter);
}

LinearModel fit_ridge(const Mat& features, const Vec& targets, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::Parameter, "ridge lambda must be > 0");
  if (features.rows() != targets.size()) {
    throw Error(ErrorCode::Shape, "ridge: feature/target row mismatch");
  }
  if (targets.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "ridge needs at least 2 samples");
  }

  const Eigen::RowVectorXd x_mean = features.colwise().mean();
  const double y_mean = targets.mean();
  const Mat xc = features.rowwise() - x_mean;
  const Vec yc = targets.array() - y_mean;

  Mat gram = xc.transpose() * xc;
  gram.diagonal().array() += lambda;

  LinearModel model;
  model.kind = LinearKind::Ridge;
  model.lambda = lambda;
  model.weights = gram.ldlt().solve(xc.transpose() * yc);
  model.intercept = y_mean - x_mean.dot(model.weights);
  return model;
}

LinearModel fit_ridge(const SampleSet& samples, double lambda) {
  Mat x;
  Vec y;
  pool_samples(samples, x, y);
  return fit_ridge(x, y, lambda);
}

Vec predict(const LinearModel& model, const Mat& features) {
  if (features.cols() != model.weights.size()) {
    throw Error(ErrorCode::Shape,
                "predict: feature width " + std::to_string(features.cols()) +
                    " != model width " + std::to_string(model.weights.size()));
  }
  return features * model.weights + Vec::Constant(features.rows(), model.intercept);
}

StepTrainInfo LinearStepModel::fit(const SampleSet& window_samples, int t) {
  model_ = kind_ == LinearKind::Lasso
               ? fit_lasso(window_samples, lambda_, tol_, max_iter_)
               : fit_ridge(window_samples, lambda_);
  fitted_ = true;

  StepTrainInfo info;
  info.t = t;
  info.epochs_run = model_.sweeps;
  info.terminated = Termination::ReachedEpochTarget;
  info.ic_trace.push_back(
      window_rank_ic([&](const Mat& x) { return predict(model_, x); }, window_samples));
  return info;
}

Vec LinearStepModel::score(const Mat& features) const {
  if (!fitted_) throw Error(ErrorCode::Parameter, "score() before any fit()");
  return predict(model_, features);
}

}  // namespace ricnn
