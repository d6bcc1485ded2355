// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include "ricnn/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ricnn {

void PortfolioSpec::validate() const {
  if (!(quantile > 0.0 && quantile <= 0.5)) {
    throw Error(ErrorCode::Parameter,
                "quantile must be in (0, 0.5] so legs cannot overlap");
  }
  if (cost_per_side < 0.0) {
    throw Error(ErrorCode::Parameter, "cost_per_side must be >= 0");
  }
}

StepPortfolio form_portfolio(const std::vector<std::string>& stock_ids,
                             const Vec& scores, int t, const PortfolioSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(stock_ids.size());
  if (scores.size() != n) {
    throw Error(ErrorCode::Shape, "form_portfolio: ids/scores length mismatch");
  }
  const auto minimum = static_cast<Eigen::Index>(std::ceil(1.0 / spec.quantile));
  if (n < minimum) {
    throw Error(ErrorCode::DegenerateUniverse,
                "form_portfolio at t=" + std::to_string(t) + ": " +
                    std::to_string(n) + " stocks scored, need >= " +
                    std::to_string(minimum));
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return stock_ids[static_cast<std::size_t>(a)] < stock_ids[static_cast<std::size_t>(b)];
  });

  const auto leg = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::floor(spec.quantile * static_cast<double>(n))));

  StepPortfolio portfolio;
  portfolio.formed_at = t;
  for (Eigen::Index k = 0; k < leg; ++k) {
    portfolio.long_set.push_back(stock_ids[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]);
  }
  if (spec.style == PortfolioStyle::LongShort) {
    for (Eigen::Index k = n - leg; k < n; ++k) {
      portfolio.short_set.push_back(stock_ids[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]);
    }
  }
  std::sort(portfolio.long_set.begin(), portfolio.long_set.end());
  std::sort(portfolio.short_set.begin(), portfolio.short_set.end());
  return portfolio;
}

std::vector<StepPortfolio> form_portfolios(const std::vector<StepScores>& scores,
                                           const PortfolioSpec& spec) {
  std::vector<StepPortfolio> out;
  out.reserve(scores.size());
  for (const StepScores& step : scores) {
    out.push_back(form_portfolio(step.stock_ids, step.scores, step.t, spec));
  }
  return out;
}

namespace {

/// Mean next-step return of a leg; a member absent at t+1 is closed at its
/// return through t (the last the data provides).
double leg_return(const std::vector<std::string>& members, const TimeStep& now,
                  const TimeStep& next, int* delisted) {
  if (members.empty()) return 0.0;
  double sum = 0.0;
  for (const std::string& stock : members) {
    const int next_row = next.row_of(stock);
    if (next_row >= 0) {
      sum += next.returns[next_row];
      continue;
    }
    const int row = now.row_of(stock);
    if (row < 0) {
      throw Error(ErrorCode::Integrity,
                  "portfolio member " + stock + " missing from its formation step");
    }
    sum += now.returns[row];
    ++*delisted;
  }
  return sum / static_cast<double>(members.size());
}

}  // namespace

PortfolioSeries realize_returns(const std::vector<StepPortfolio>& portfolios,
                                const FactorPanel& panel, const PortfolioSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(portfolios.size());
  PortfolioSeries series;
  series.long_returns.resize(n);
  series.short_returns.resize(n);
  series.long_short_returns.resize(n);
  series.benchmark.resize(n);
  series.alpha.resize(n);
  series.long_returns_net.resize(n);
  series.long_short_returns_net.resize(n);
  series.alpha_net.resize(n);
  series.delisted.assign(static_cast<std::size_t>(n), 0);

  // full monthly rebalance of every leg: buy and sell each position once
  const double leg_cost = 2.0 * spec.cost_per_side;

  for (Eigen::Index k = 0; k < n; ++k) {
    const StepPortfolio& portfolio = portfolios[static_cast<std::size_t>(k)];
    const int t = portfolio.formed_at;
    if (!panel.has_step(t + 1)) {
      throw Error(ErrorCode::Parameter,
                  "cannot realize portfolio formed at t=" + std::to_string(t) +
                      ": no returns at t+1");
    }
    const TimeStep& now = panel.step(t);
    const TimeStep& next = panel.step(t + 1);

    int delisted = 0;
    const double r_long = leg_return(portfolio.long_set, now, next, &delisted);
    const double r_short = leg_return(portfolio.short_set, now, next, &delisted);
    const double bench = next.returns.mean();

    series.formed_at.push_back(t);
    series.long_returns[k] = r_long;
    series.short_returns[k] = r_short;
    series.long_short_returns[k] = r_long - r_short;
    series.benchmark[k] = bench;
    series.alpha[k] = r_long - bench;
    series.long_returns_net[k] = r_long - leg_cost;
    series.alpha_net[k] = series.alpha[k] - leg_cost;
    series.long_short_returns_net[k] =
        series.long_short_returns[k] -
        (portfolio.short_set.empty() ? leg_cost : 2.0 * leg_cost);
    series.delisted[static_cast<std::size_t>(k)] = delisted;
    if (delisted > 0) {
      warn(std::to_string(delisted) + " position(s) formed at t=" +
           std::to_string(t) + " closed at their last available return");
    }
  }
  return series;
}

}  // namespace ricnn
