// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "ricnn/types.hpp"

namespace ricnn {

/// One monthly cross-section: the investable universe, its factor matrix
/// and the realized unit returns R_{i,t} over (t-1, t].
struct TimeStep {
  int index = 0;                        // month counter, 1-based
  std::vector<std::string> universe;    // stock ids, sorted ascending
  Mat factors;                          // |universe| x 20, NaN = missing
  Vec returns;                          // |universe|, each > -1
  std::vector<bool> all_missing;        // per factor: whole column was missing

  /// Row of `stock` in this step, or -1 if not a member.
  int row_of(const std::string& stock) const;
};

struct FactorPanel {
  std::vector<std::string> factor_names;  // exactly 20
  std::vector<TimeStep> steps;            // indices 1..T, consecutive

  int first_index() const { return steps.empty() ? 0 : steps.front().index; }
  int last_index() const { return steps.empty() ? 0 : steps.back().index; }
  const TimeStep& step(int time_index) const;
  TimeStep& step(int time_index);
  bool has_step(int time_index) const;
};

/// Throws if the panel breaks a structural invariant (indices not 1..T,
/// dimension mismatches, returns <= -1).
void validate_panel(const FactorPanel& panel, bool allow_missing_factors);

/// Default schema used when a config does not rename columns. The names
/// follow the usual 20-factor multi-factor set (valuation ratios,
/// profitability, balance-sheet quality, EPS revisions, price technicals).
const std::vector<std::string>& default_factor_names();

/// Column mapping for CSV ingestion. Factor columns may carry an integer
/// lag: the value used at month t is then the one reported at t - lag.
struct CsvSchema {
  std::string stock_column = "stock";
  std::string time_column = "time";
  std::string return_column = "return";
  std::vector<std::string> factor_columns = default_factor_names();
  std::map<std::string, int> factor_lags;  // by factor column name
};

FactorPanel load_panel(const std::string& path, const CsvSchema& schema = {});

/// Mirror of the ingestion format; numeric cells are written with
/// shortest-round-trip formatting so load(save(p)) == p bit for bit.
void save_panel(const FactorPanel& panel, const std::string& path,
                const CsvSchema& schema = {});

enum class SignalKind { Linear, Nonlinear, None };

/// Recipe for a reproducible synthetic panel. Factor paths are stationary
/// AR(1) per stock (rho = 0.9); next-month returns are
///   R_{i,t+1} = 0.05 * tanh(g(x_{i,t})) + noise_scale * z
/// with g linear, nonlinear, or absent. The nonlinear g is the fixed pair
/// interaction g(x) = (x0*x1 + 0.5*sign(x2)*x3) / sqrt(1.25), chosen to
/// have zero correlation with every linear function of the factors.
struct SyntheticSpec {
  int n_stocks = 50;
  int n_steps = 160;
  SignalKind signal_kind = SignalKind::Nonlinear;
  double noise_scale = 0.01;
  double turnover_rate = 0.02;  // fraction of the universe replaced per step
  std::uint64_t seed = 1;
};

FactorPanel generate_panel(const SyntheticSpec& spec);

/// The planted predictor the generator ranks stocks by: g(x_{i,t}) for every
/// stock in U_t. Exposed for oracle checks of the generator itself.
Vec planted_signal(const SyntheticSpec& spec, const TimeStep& step);

/// Replaces each missing factor cell by the cross-sectional median of its
/// column at that step. A column missing in its entirety is filled with 0 and
/// flagged in TimeStep::all_missing (normalization later maps it to 0).
FactorPanel impute_missing(const FactorPanel& panel);

}  // namespace ricnn
