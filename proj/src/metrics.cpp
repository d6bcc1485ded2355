// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include "ricnn/metrics.hpp"

#include <cmath>

#include "ricnn/ranking.hpp"

namespace ricnn {

namespace {

void require_compoundable(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > -1.0)) {
      throw Error(ErrorCode::Domain,
                  "return <= -1 cannot be compounded (index " +
                      std::to_string(i) + ", value " + std::to_string(v[i]) + ")");
    }
  }
}

}  // namespace

double rank_ic(const Vec& actual, const Vec& predicted) {
  if (actual.size() != predicted.size()) {
    throw Error(ErrorCode::Shape, "rank_ic:: length mismatch: " +
                                      std::to_string(actual.size()) + " vs " +
                                      std::to_string(predicted.size()));
  }
  const Eigen::Index n = actual.size();
  if (n < 2) throw Error(ErrorCode::InsufficientData, "rank_ic needs n >= 2");

  const Vec ra = midranks(actual);
  const Vec rb = midranks(predicted);
  const Vec ca = ra.array() - ra.mean();
  const Vec cb = rb.array() - rb.mean();
  const double va = ca.squaredNorm();
  const double vb = cb.squaredNorm();
  if (va <= 0.0 || vb <= 0.0) {
    throw Error(ErrorCode::UndefinedCorrelation,
                "rank_ic undefined for a constant vector");
  }
  return ca.dot(cb) / std::sqrt(va * vb);
}

double annualized_excess(const ReturnSeries& series) {
  const Vec& v = series.values;
  if (v.size() < 1) {
    throw Error(ErrorCode::InsufficientData, "annualized_excess needs T >= 1");
  }
  require_compoundable(v);
  double wealth = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) wealth *= 1.0 + v[i];
  return std::pow(wealth, 12.0 / static_cast<double>(v.size())) - 1.0;
}

double annualized_risk(const ReturnSeries& series) {
  const Vec& v = series.values;
  if (v.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "annualized_risk needs T >= 2");
  }
  const double mean = v.mean();
  const double ss = (v.array() - mean).square().sum();
  return std::sqrt(12.0 * ss / static_cast<double>(v.size() - 1));
}

double risk_adjusted(const ReturnSeries& series) {
  const double ret = annualized_excess(series);
  const double risk = annualized_risk(series);
  if (risk <= 0.0) {
    throw Error(ErrorCode::DivisionByZero,
                "risk_adjusted undefined: risk = 0 with annualized return " +
                    std::to_string(ret));
  }
  return ret / risk;
}

double max_drawdown(const ReturnSeries& series) {
  const Vec& v = series.values;
  if (v.size() < 1) {
    throw Error(ErrorCode::InsufficientData, "max_drawdown needs T >= 1");
  }
  require_compoundable(v);
  double wealth = 1.0;
  double peak = 1.0;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    wealth *= 1.0 + v[i];
    if (wealth > peak) peak = wealth;
    worst = std::min(worst, wealth / peak - 1.0);
  }
  return worst;
}

MetricsReport compute_report(const ReturnSeries& series, const Vec* drawdown_values) {
  MetricsReport report;
  report.annualized_return = annualized_excess(series);
  report.risk = annualized_risk(series);
  report.risk_adjusted = risk_adjusted(series);
  ReturnSeries dd = series;
  if (drawdown_values != nullptr) dd.values = *drawdown_values;
  report.max_drawdown = max_drawdown(dd);
  return report;
}

}  // namespace ricnn
