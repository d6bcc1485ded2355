// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ricnn/types.hpp"

namespace ricnn {

enum class SeriesKind { LongAlpha, LongShort, Absolute };

/// Monthly portfolio (or excess) returns for one strategy.
struct ReturnSeries {
  Vec values;
  SeriesKind kind = SeriesKind::Absolute;
};

struct MetricsReport {
  double annualized_return = 0.0;
  double risk = 0.0;           // annualized standard deviation
  double risk_adjusted = 0.0;  // annualized_return / risk
  double max_drawdown = 0.0;   // in [-1, 0]
};

/// Spearman rank correlation, computed as the Pearson correlation of
/// midranks so that tied inputs are handled. Equals the classical
/// 1 - 6*sum(d^2)/(n(n^2-1)) form whenever neither side has ties.
double rank_ic(const Vec& actual, const Vec& predicted);

/// Compounded return scaled to a 12-step year: prod(1+v)^(12/T) - 1.
double annualized_excess(const ReturnSeries& series);

/// sqrt(12) times the sample standard deviation of the series.
double annualized_risk(const ReturnSeries& series);

double risk_adjusted(const ReturnSeries& series);

/// Largest relative drop of the compounded wealth curve from its running
/// maximum; 0 when wealth never falls below a previous peak.
double max_drawdown(const ReturnSeries& series);

/// All four statistics of one series. `drawdown_values`, when given, is the
/// series the wealth curve is compounded from (the long strategy measures
/// excess return but draws down on raw leg returns).
MetricsReport compute_report(const ReturnSeries& series,
                             const Vec* drawdown_values = nullptr);

}  // namespace ricnn
