// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ricnn/panel.hpp"
#include "ricnn/trainer.hpp"
#include "ricnn/types.hpp"

namespace ricnn {

enum class PortfolioStyle { Long, LongShort };

struct PortfolioSpec {
  PortfolioStyle style = PortfolioStyle::LongShort;
  double quantile = 0.2;        // fraction per leg, in (0, 0.5]
  double cost_per_side = 0.0;   // e.g. 0.0005 = 5 bp one way

  void validate() const;
};

/// Legs formed from the score cross-section at one time step.
struct StepPortfolio {
  int formed_at = 0;
  std::vector<std::string> long_set;
  std::vector<std::string> short_set;  // empty for the long style
};

/// Realized monthly returns of a formed-portfolio sequence. Row k realizes
/// over (t_k, t_k+1]: leg returns, the universe benchmark, the excess of the
/// long leg, and cost-adjusted variants under a full monthly rebalance
/// (2 x cost_per_side per leg per step).
struct PortfolioSeries {
  std::vector<int> formed_at;
  Vec long_returns;
  Vec short_returns;
  Vec long_short_returns;   // long - short, exactly
  Vec benchmark;            // universe mean return at realization
  Vec alpha;                // long - benchmark, exactly
  Vec long_returns_net;
  Vec long_short_returns_net;
  Vec alpha_net;
  std::vector<int> delisted;  // positions closed early per step
};

/// Top (and for long-short, bottom) floor(q*n) stocks by score. One total
/// order decides both legs: score descending, ties by stock id ascending.
StepPortfolio form_portfolio(const std::vector<std::string>& stock_ids,
                             const Vec& scores, int t, const PortfolioSpec& spec);

/// Equal-weight realization against next-step returns. A holding absent
/// from U_{t+1} is closed at its last available return and counted in
/// `delisted`.
PortfolioSeries realize_returns(const std::vector<StepPortfolio>& portfolios,
                                const FactorPanel& panel, const PortfolioSpec& spec);

/// form_portfolio over every score step of a backtest.
std::vector<StepPortfolio> form_portfolios(const std::vector<StepScores>& scores,
                                           const PortfolioSpec& spec);

}  // namespace ricnn
