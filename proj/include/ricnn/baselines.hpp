// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ricnn/features.hpp"
#include "ricnn/trainer.hpp"
#include "ricnn/types.hpp"

namespace ricnn {

enum class LinearKind { Lasso, Ridge };

struct LinearModel {
  Vec weights;
  double intercept = 0.0;
  double lambda = 0.0;
  LinearKind kind = LinearKind::Lasso;
  bool converged = true;                // lasso only
  int sweeps = 0;                       // lasso only
  std::vector<double> objective_trace;  // lasso objective after each sweep
};

/// Cyclic coordinate descent with soft thresholding on
///   (1/2K) * sum (y - w.x - b)^2 + lambda * ||w||_1,
/// intercept unpenalized. Converged when no coordinate moves more than
/// `tol` in a sweep; past `max_iter` sweeps the model is returned with a
/// warning and converged = false. The objective never increases across
/// sweeps.
LinearModel fit_lasso(const Mat& features, const Vec& targets, double lambda,
                      double tol = 1e-6, int max_iter = 1000);
LinearModel fit_lasso(const SampleSet& samples, double lambda, double tol = 1e-6,
                      int max_iter = 1000);

/// The lasso objective at (weights, intercept); exposed so the
/// monotonicity property is checkable from outside.
double lasso_objective(const Mat& features, const Vec& targets, const Vec& weights,
                       double intercept, double lambda);

/// Closed-form ridge (X'X + lambda I)^{-1} X'y on centered data, intercept
/// recovered from the means. lambda must be positive.
LinearModel fit_ridge(const Mat& features, const Vec& targets, double lambda);
LinearModel fit_ridge(const SampleSet& samples, double lambda);

Vec predict(const LinearModel& model, const Mat& features);

/// Baseline adapter for the walk-forward driver; refits from scratch on
/// every window (linear models have no warm start).
class LinearStepModel : public StepModel {
 public:
  LinearStepModel(LinearKind kind, double lambda, int window, double tol = 1e-6,
                  int max_iter = 1000)
      : kind_(kind), lambda_(lambda), window_(window), tol_(tol), max_iter_(max_iter) {}

  int window() const override { return window_; }
  StepTrainInfo fit(const SampleSet& window_samples, int t) override;
  Vec score(const Mat& features) const override;

 private:
  LinearKind kind_;
  double lambda_;
  int window_;
  double tol_;
  int max_iter_;
  LinearModel model_;
  bool fitted_ = false;
};

}  // namespace ricnn
