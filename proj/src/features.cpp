// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include "ricnn/features.hpp"

#include <cmath>

#include "ricnn/ranking.hpp"

namespace ricnn {

double relative_diff(double x, double y) {
  if (x == y) return 0.0;  // covers the 0/0 case and keeps antisymmetry exact
  return 2.0 * (x - y) / (std::abs(x) + std::abs(y));
}

Vec normalized_rank(const Vec& values) {
  const Eigen::Index n = values.size();
  if (n < 2) {
    throw Error(ErrorCode::DegenerateUniverse,
                "normalized_rank needs at least 2 values, got " + std::to_string(n));
  }
  Vec ranks = midranks(values);
  return (ranks.array() - 1.0) / static_cast<double>(n - 1);
}

Mat normalize_factors(const TimeStep& step) {
  const Eigen::Index n = step.factors.rows();
  if (n < 2) {
    throw Error(ErrorCode::DegenerateUniverse,
                "cannot rank-normalize a universe of size " + std::to_string(n) +
                    " at t=" + std::to_string(step.index));
  }
  Mat out(n, kFactorCount);
  for (int j = 0; j < kFactorCount; ++j) {
    if (j < static_cast<int>(step.all_missing.size()) &&
        step.all_missing[static_cast<std::size_t>(j)]) {
      out.col(j).setZero();
      continue;
    }
    out.col(j) = normalized_rank(step.factors.col(j));
  }
  return out;
}

NormalizedPanel NormalizedPanel::build(const FactorPanel& panel) {
  NormalizedPanel np;
  np.panel = &panel;
  np.normalized.reserve(panel.steps.size());
  for (const TimeStep& step : panel.steps) {
    if (step.factors.hasNaN()) {
      throw Error(ErrorCode::Integrity,
                  "factors must be imputed before normalization (t=" +
                      std::to_string(step.index) + ")");
    }
    np.normalized.push_back(normalize_factors(step));
  }
  return np;
}

const Mat& NormalizedPanel::at(int time_index) const {
  if (!panel->has_step(time_index)) {
    throw Error(ErrorCode::Parameter,
                "no normalized step " + std::to_string(time_index));
  }
  return normalized[static_cast<std::size_t>(time_index - panel->first_index())];
}

std::size_t SampleSet::total_samples() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.stock_ids.size();
  return n;
}

const StepSamples& SampleSet::at(int time_index) const {
  if (time_index < t_low || time_index > t_high) {
    throw Error(ErrorCode::Parameter,
                "sample set has no step " + std::to_string(time_index));
  }
  return steps[static_cast<std::size_t>(time_index - t_low)];
}

bool eligible_for_features(const FactorPanel& panel, const std::string& stock, int t) {
  for (int lag : kFeatureLags) {
    const int t_lag = t - lag;
    if (!panel.has_step(t_lag) || panel.step(t_lag).row_of(stock) < 0) return false;
  }
  return true;
}

namespace {

/// Writes the 180 entries for one stock: the five rank-normalized lag
/// blocks, then the relative differences of lag 0 against lags 3..12.
void assemble_row(const NormalizedPanel& np, int t,
                  const std::vector<int>& lag_rows, Mat& out, Eigen::Index row) {
  int col = 0;
  for (int b = 0; b < 5; ++b) {
    const Mat& norm = np.at(t - kFeatureLags[b]);
    out.row(row).segment(col, kFactorCount) =
        norm.row(lag_rows[static_cast<std::size_t>(b)]);
    col += kFactorCount;
  }
  const Mat& now = np.at(t);
  for (int b = 1; b < 5; ++b) {
    const Mat& past = np.at(t - kFeatureLags[b]);
    for (int j = 0; j < kFactorCount; ++j) {
      out(row, col++) = relative_diff(now(lag_rows[0], j),
                                      past(lag_rows[static_cast<std::size_t>(b)], j));
    }
  }
}

}  // namespace

StepSamples build_step_samples(const NormalizedPanel& np, int t) {
  const FactorPanel& panel = *np.panel;
  if (t < 13) {
    throw Error(ErrorCode::Parameter,
                "samples need t >= 13 so all lags exist, got " + std::to_string(t));
  }
  if (!panel.has_step(t + 1)) {
    throw Error(ErrorCode::Parameter,
                "samples at t=" + std::to_string(t) + " need returns at t+1");
  }

  const TimeStep& now = panel.step(t);
  const TimeStep& next = panel.step(t + 1);

  StepSamples out;
  out.t = t;
  std::vector<std::vector<int>> rows_per_stock;
  std::vector<double> next_returns;
  for (const std::string& stock : now.universe) {
    const int next_row = next.row_of(stock);
    if (next_row < 0 || !eligible_for_features(panel, stock, t)) {
      ++out.skipped;
      continue;
    }
    std::vector<int> lag_rows;
    lag_rows.reserve(5);
    for (int lag : kFeatureLags) lag_rows.push_back(panel.step(t - lag).row_of(stock));
    out.stock_ids.push_back(stock);
    rows_per_stock.push_back(std::move(lag_rows));
    next_returns.push_back(next.returns[next_row]);
  }

  const auto n = static_cast<Eigen::Index>(out.stock_ids.size());
  out.features.resize(n, kFeatureDim);
  for (Eigen::Index i = 0; i < n; ++i) {
    assemble_row(np, t, rows_per_stock[static_cast<std::size_t>(i)], out.features, i);
  }
  if (n >= 2) {
    out.targets = normalized_rank(Eigen::Map<const Vec>(next_returns.data(), n));
  } else {
    out.targets.resize(n);  // a 0/1-sample step; the trainer rejects it by name
    if (n == 1) out.targets[0] = 0.5;
  }
  return out;
}

SampleSet build_samples(const NormalizedPanel& np, int t_low, int t_high) {
  if (t_low < 13) {
    throw Error(ErrorCode::Parameter, "sample range must start at t >= 13");
  }
  if (t_high > np.panel->last_index() - 1) {
    throw Error(ErrorCode::Parameter,
                "sample range must end by T-1 (targets need t+1)");
  }
  if (t_low > t_high) {
    throw Error(ErrorCode::Parameter, "empty sample range");
  }
  SampleSet set;
  set.t_low = t_low;
  set.t_high = t_high;
  for (int t = t_low; t <= t_high; ++t) {
    set.steps.push_back(build_step_samples(np, t));
  }
  if (set.total_samples() == 0) {
    throw Error(ErrorCode::EmptySampleSet,
                "no eligible stock in any step of [" + std::to_string(t_low) +
                    ", " + std::to_string(t_high) + "]");
  }
  return set;
}

FeatureRows build_features_at(const NormalizedPanel& np, int t) {
  const FactorPanel& panel = *np.panel;
  if (t < 13) {
    throw Error(ErrorCode::Parameter,
                "features need t >= 13 so all lags exist, got " + std::to_string(t));
  }
  FeatureRows out;
  out.t = t;
  std::vector<std::vector<int>> rows_per_stock;
  for (const std::string& stock : panel.step(t).universe) {
    if (!eligible_for_features(panel, stock, t)) continue;
    std::vector<int> lag_rows;
    lag_rows.reserve(5);
    for (int lag : kFeatureLags) lag_rows.push_back(panel.step(t - lag).row_of(stock));
    out.stock_ids.push_back(stock);
    rows_per_stock.push_back(std::move(lag_rows));
  }
  const auto n = static_cast<Eigen::Index>(out.stock_ids.size());
  out.features.resize(n, kFeatureDim);
  for (Eigen::Index i = 0; i < n; ++i) {
    assemble_row(np, t, rows_per_stock[static_cast<std::size_t>(i)], out.features, i);
  }
  return out;
}

}  // namespace ricnn
