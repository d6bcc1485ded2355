// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ricnn/panel.hpp"
#include "ricnn/types.hpp"

namespace ricnn {

/// Scale-free difference 2(x-y)/(|x|+|y|), defined as 0 at x = y = 0.
/// Antisymmetric, invariant under positive scaling, always in [-2, 2].
double relative_diff(double x, double y);

/// Maps values to [0, 1] by rank: smallest -> 0, largest -> 1, ties at
/// their midrank. With n distinct values the image is {0, 1/(n-1), .., 1}
/// and an odd-n median lands exactly on 0.5.
Vec normalized_rank(const Vec& values);

/// Cross-sectional rank normalization of every factor column of a step.
/// Constant columns map to all 0.5; columns flagged all-missing map to 0.
Mat normalize_factors(const TimeStep& step);

/// Per-step normalized factor matrices for a whole panel, computed once and
/// shared by sample building and inference-time feature rows.
struct NormalizedPanel {
  const FactorPanel* panel = nullptr;
  std::vector<Mat> normalized;  // aligned with panel->steps

  /// Keeps a reference to `panel`, which must outlive this object; a
  /// temporary panel is rejected at compile time.
  static NormalizedPanel build(const FactorPanel& panel);
  static NormalizedPanel build(FactorPanel&&) = delete;
  const Mat& at(int time_index) const;
};

/// Training rows for one time step: 180-wide features v_{i,t} and the
/// normalized-rank target r_{i,t+1} over the step's eligible stocks.
struct StepSamples {
  int t = 0;
  std::vector<std::string> stock_ids;
  Mat features;  // n x 180
  Vec targets;   // n, in [0,1]
  int skipped = 0;  // stocks in U_t missing a lag or the target step
};

struct SampleSet {
  int t_low = 0;
  int t_high = 0;
  std::vector<StepSamples> steps;

  std::size_t total_samples() const;
  const StepSamples& at(int time_index) const;
};

/// A stock is usable at t when it is in the universe at t, all four
/// quarterly lags, and (for training) at t+1.
bool eligible_for_features(const FactorPanel& panel, const std::string& stock, int t);

/// Samples for every step in [t_low, t_high]. Requires t_low >= 13 and
/// t_high <= T-1. Throws EmptySampleSet when no step yields any sample.
SampleSet build_samples(const NormalizedPanel& np, int t_low, int t_high);

/// One step's samples (used incrementally by the rolling trainer).
StepSamples build_step_samples(const NormalizedPanel& np, int t);

/// Inference rows at t: feature matrix for every stock with full lag
/// history, without the t+1 requirement (predicting is what t+1 is for).
struct FeatureRows {
  int t = 0;
  std::vector<std::string> stock_ids;
  Mat features;
};

FeatureRows build_features_at(const NormalizedPanel& np, int t);

}  // namespace ricnn
