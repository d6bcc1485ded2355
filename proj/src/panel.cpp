// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include "ricnn/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ricnn/csv.hpp"
#include "ricnn/rng.hpp"

namespace ricnn {

int TimeStep::row_of(const std::string& stock) const {
  auto it = std::lower_bound(universe.begin(), universe.end(), stock);
  if (it == universe.end() || *it != stock) return -1;
  return static_cast<int>(it - universe.begin());
}

const TimeStep& FactorPanel::step(int time_index) const {
  if (!has_step(time_index)) {
    throw Error(ErrorCode::Parameter,
                "no time step " + std::to_string(time_index) + " in panel");
  }
  return steps[static_cast<std::size_t>(time_index - first_index())];
}

TimeStep& FactorPanel::step(int time_index) {
  return const_cast<TimeStep&>(std::as_const(*this).step(time_index));
}

bool FactorPanel::has_step(int time_index) const {
  return !steps.empty() && time_index >= first_index() && time_index <= last_index();
}

void validate_panel(const FactorPanel& panel, bool allow_missing_factors) {
  if (panel.factor_names.size() != kFactorCount) {
    throw Error(ErrorCode::Schema,
                "panel must carry exactly 20 factor names, got " +
                    std::to_string(panel.factor_names.size()));
  }
  int expected = 1;
  for (const TimeStep& step : panel.steps) {
    if (step.index != expected) {
      throw Error(ErrorCode::Integrity,
                  "non-contiguous time indices: expected " +
                      std::to_string(expected) + ", found " +
                      std::to_string(step.index));
    }
    ++expected;
    const auto n = static_cast<Eigen::Index>(step.universe.size());
    if (step.factors.rows() != n || step.factors.cols() != kFactorCount) {
      throw Error(ErrorCode::Integrity,
                  "factor matrix shape mismatch at t=" + std::to_string(step.index));
    }
    if (step.returns.size() != n) {
      throw Error(ErrorCode::Integrity,
                  "returns length mismatch at t=" + std::to_string(step.index));
    }
    if (!std::is_sorted(step.universe.begin(), step.universe.end())) {
      throw Error(ErrorCode::Integrity,
                  "universe not sorted at t=" + std::to_string(step.index));
    }
    if (std::adjacent_find(step.universe.begin(), step.universe.end()) !=
        step.universe.end()) {
      throw Error(ErrorCode::Integrity,
                  "duplicate stock id at t=" + std::to_string(step.index));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(step.returns[i] > -1.0)) {
        throw Error(ErrorCode::Integrity,
                    "return <= -1 for stock " + step.universe[i] + " at t=" +
                        std::to_string(step.index));
      }
    }
    if (!allow_missing_factors && step.factors.hasNaN()) {
      throw Error(ErrorCode::Integrity,
                  "missing factor cell at t=" + std::to_string(step.index));
    }
  }
}

const std::vector<std::string>& default_factor_names() {
  static const std::vector<std::string> names = {
      "book_to_price",  "earnings_to_price", "dividend_yield", "sales_to_price",
      "cashflow_to_price", "roe",            "roa",            "roic",
      "accruals",       "asset_growth",      "current_ratio",  "equity_ratio",
      "asset_turnover", "capex_growth",      "eps_rev_1m",     "eps_rev_3m",
      "momentum_1m",    "momentum_12_1",     "volatility",     "skewness"};
  return names;
}

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct RawRow {
  std::string stock;
  int time = 0;
  double ret = 0.0;
  Vec factors;
};

void apply_factor_lags(FactorPanel& panel, const CsvSchema& schema) {
  std::vector<int> lags(kFactorCount, 0);
  bool any = false;
  for (const auto& [name, lag] : schema.factor_lags) {
    auto it = std::find(schema.factor_columns.begin(), schema.factor_columns.end(), name);
    if (it == schema.factor_columns.end()) {
      throw Error(ErrorCode::Schema, "lag given for unknown factor column: " + name);
    }
    if (lag < 0) throw Error(ErrorCode::Schema, "factor lag must be >= 0: " + name);
    lags[it - schema.factor_columns.begin()] = lag;
    any = any || lag > 0;
  }
  if (!any) return;

  const FactorPanel original = panel;
  for (TimeStep& step : panel.steps) {
    for (int j = 0; j < kFactorCount; ++j) {
      const int lag = lags[static_cast<std::size_t>(j)];
      if (lag == 0) continue;
      const int src_t = step.index - lag;
      for (std::size_t i = 0; i < step.universe.size(); ++i) {
        double value = kMissing;
        if (original.has_step(src_t)) {
          const TimeStep& src = original.step(src_t);
          const int row = src.row_of(step.universe[i]);
          if (row >= 0) value = src.factors(row, j);
        }
        step.factors(static_cast<Eigen::Index>(i), j) = value;
      }
    }
  }
}

}  // namespace

FactorPanel load_panel(const std::string& path, const CsvSchema& schema) {
  if (schema.factor_columns.size() != kFactorCount) {
    throw Error(ErrorCode::Schema,
                "schema must map exactly 20 factor columns, got " +
                    std::to_string(schema.factor_columns.size()));
  }
  const csv::Table table = csv::read_file(path);

  auto need = [&](const std::string& name) {
    const int idx = table.column(name);
    if (idx < 0) throw Error(ErrorCode::Schema, "missing column: " + name);
    return idx;
  };
  const int stock_col = need(schema.stock_column);
  const int time_col = need(schema.time_column);
  const int ret_col = need(schema.return_column);
  std::vector<int> factor_cols;
  factor_cols.reserve(kFactorCount);
  for (const auto& name : schema.factor_columns) factor_cols.push_back(need(name));

  std::vector<RawRow> rows;
  rows.reserve(table.rows.size());
  std::vector<std::string> bad_rows;
  std::set<std::pair<int, std::string>> seen;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& fields = table.rows[r];
    const std::string where = "row " + std::to_string(r + 2);  // 1-based + header
    if (fields.size() != table.header.size()) {
      bad_rows.push_back(where + " (field count)");
      continue;
    }
    RawRow row;
    row.stock = fields[static_cast<std::size_t>(stock_col)];
    const auto time = csv::parse_int(fields[static_cast<std::size_t>(time_col)]);
    const auto ret = csv::parse_double(fields[static_cast<std::size_t>(ret_col)]);
    if (row.stock.empty() || !time || !ret) {
      bad_rows.push_back(where);
      continue;
    }
    row.time = static_cast<int>(*time);
    row.ret = *ret;
    row.factors.resize(kFactorCount);
    bool ok = true;
    for (int j = 0; j < kFactorCount; ++j) {
      const std::string& cell = fields[static_cast<std::size_t>(factor_cols[static_cast<std::size_t>(j)])];
      if (cell.empty()) {
        row.factors[j] = kMissing;  // missing cell, imputable later
      } else if (auto value = csv::parse_double(cell)) {
        row.factors[j] = *value;
      } else {
        ok = false;
        break;
      }
    }
    if (!ok) {
      bad_rows.push_back(where);
      continue;
    }
    if (!seen.insert({row.time, row.stock}).second) {
      throw Error(ErrorCode::Integrity,
                  "duplicate (stock=" + row.stock + ", t=" +
                      std::to_string(row.time) + ") row");
    }
    rows.push_back(std::move(row));
  }

  if (!bad_rows.empty()) {
    std::string listed;
    for (std::size_t i = 0; i < bad_rows.size() && i < 10; ++i) {
      if (i) listed += ", ";
      listed += bad_rows[i];
    }
    if (bad_rows.size() > 10) listed += ", ...";
    throw Error(ErrorCode::Integrity,
                "unparseable numeric content in " + std::to_string(bad_rows.size()) +
                    " row(s): " + listed);
  }
  if (rows.empty()) throw Error(ErrorCode::Integrity, "no data rows in " + path);

  std::map<int, std::vector<const RawRow*>> by_time;
  for (const RawRow& row : rows) by_time[row.time].push_back(&row);

  const int t_min = by_time.begin()->first;
  const int t_max = by_time.rbegin()->first;
  if (t_min != 1 || static_cast<int>(by_time.size()) != t_max) {
    throw Error(ErrorCode::Integrity,
                "non-contiguous time indices: need consecutive integers 1..T");
  }

  FactorPanel panel;
  panel.factor_names = schema.factor_columns;
  panel.steps.reserve(by_time.size());
  for (auto& [t, step_rows] : by_time) {
    std::sort(step_rows.begin(), step_rows.end(),
              [](const RawRow* a, const RawRow* b) { return a->stock < b->stock; });
    TimeStep step;
    step.index = t;
    const auto n = static_cast<Eigen::Index>(step_rows.size());
    step.factors.resize(n, kFactorCount);
    step.returns.resize(n);
    step.all_missing.assign(kFactorCount, false);
    for (Eigen::Index i = 0; i < n; ++i) {
      step.universe.push_back(step_rows[static_cast<std::size_t>(i)]->stock);
      step.factors.row(i) = step_rows[static_cast<std::size_t>(i)]->factors.transpose();
      step.returns[i] = step_rows[static_cast<std::size_t>(i)]->ret;
    }
    panel.steps.push_back(std::move(step));
  }

  apply_factor_lags(panel, schema);
  validate_panel(panel, /*allow_missing_factors=*/true);
  return panel;
}

void save_panel(const FactorPanel& panel, const std::string& path,
                const CsvSchema& schema) {
  csv::Table table;
  table.header.push_back(schema.stock_column);
  table.header.push_back(schema.time_column);
  for (const auto& name : schema.factor_columns) table.header.push_back(name);
  table.header.push_back(schema.return_column);

  for (const TimeStep& step : panel.steps) {
    for (std::size_t i = 0; i < step.universe.size(); ++i) {
      std::vector<std::string> row;
      row.reserve(kFactorCount + 3);
      row.push_back(step.universe[i]);
      row.push_back(std::to_string(step.index));
      for (int j = 0; j < kFactorCount; ++j) {
        const double v = step.factors(static_cast<Eigen::Index>(i), j);
        row.push_back(std::isnan(v) ? std::string() : csv::format_double(v));
      }
      row.push_back(csv::format_double(step.returns[static_cast<Eigen::Index>(i)]));
      table.rows.push_back(std::move(row));
    }
  }
  csv::write_file(path, table);
}

namespace {

void check_spec(const SyntheticSpec& spec) {
  if (spec.n_stocks < 10) {
    throw Error(ErrorCode::Parameter, "synthetic spec needs n_stocks >= 10");
  }
  if (spec.n_steps < 140) {
    throw Error(ErrorCode::Parameter,
                "synthetic spec needs n_steps >= 140 (training window plus "
                "augmentation lags plus one prediction step)");
  }
  if (!(spec.noise_scale >= 0.0)) {
    throw Error(ErrorCode::Parameter, "noise_scale must be >= 0");
  }
  if (!(spec.turnover_rate >= 0.0 && spec.turnover_rate < 1.0)) {
    throw Error(ErrorCode::Parameter, "turnover_rate must be in [0, 1)");
  }
}

std::string make_id(int n) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "S%05d", n);
  return buf;
}

double signal_value(SignalKind kind, const Eigen::Ref<const Vec>& x) {
  switch (kind) {
    case SignalKind::Linear:
      return (x[0] - x[1] + 0.5 * x[2]) / 1.5;
    case SignalKind::Nonlinear: {
      // two threshold interactions; each term has zero covariance with any
      // function of any single factor's history, so no linear model over
      // per-factor features can capture it
      const double s0 = x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : 0.0);
      const double s2 = x[2] > 0.0 ? 1.0 : (x[2] < 0.0 ? -1.0 : 0.0);
      return (s0 * x[1] + s2 * x[3]) / std::sqrt(2.0);
    }
    case SignalKind::None:
      return 0.0;
  }
  return 0.0;
}

constexpr double kSignalAmplitude = 0.05;
constexpr double kFactorPersistence = 0.3;

}  // namespace

FactorPanel generate_panel(const SyntheticSpec& spec) {
  check_spec(spec);
  auto rng = make_rng(derive_seed(spec.seed, 0x70616E656CULL));
  std::normal_distribution<double> gauss(0.0, 1.0);

  FactorPanel panel;
  panel.factor_names = default_factor_names();
  panel.steps.reserve(static_cast<std::size_t>(spec.n_steps));

  std::vector<std::string> members;
  std::unordered_map<std::string, Vec> state;      // factors at the latest step
  std::unordered_map<std::string, Vec> prev_state; // factors one step back
  int next_id = 1;
  for (int i = 0; i < spec.n_stocks; ++i) members.push_back(make_id(next_id++));

  const int replaced_per_step =
      static_cast<int>(std::floor(spec.turnover_rate * spec.n_stocks + 1e-9));

  for (int t = 1; t <= spec.n_steps; ++t) {
    if (t > 1 && replaced_per_step > 0) {
      // partial Fisher-Yates over the sorted membership; removed ids never return
      for (int k = 0; k < replaced_per_step; ++k) {
        std::uniform_int_distribution<std::size_t> pick(
            static_cast<std::size_t>(k), members.size() - 1);
        std::swap(members[static_cast<std::size_t>(k)], members[pick(rng)]);
      }
      for (int k = 0; k < replaced_per_step; ++k) {
        state.erase(members[static_cast<std::size_t>(k)]);
        prev_state.erase(members[static_cast<std::size_t>(k)]);
        members[static_cast<std::size_t>(k)] = make_id(next_id++);
      }
    }
    std::sort(members.begin(), members.end());

    TimeStep step;
    step.index = t;
    step.universe = members;
    const auto n = static_cast<Eigen::Index>(members.size());
    step.factors.resize(n, kFactorCount);
    step.returns.resize(n);
    step.all_missing.assign(kFactorCount, false);

    // returns over (t-1, t] come from the factor values at t-1
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = gauss(rng);
      double r = spec.noise_scale * z;
      auto it = state.find(members[static_cast<std::size_t>(i)]);
      if (t > 1 && it != state.end() && spec.signal_kind != SignalKind::None) {
        r += kSignalAmplitude * std::tanh(signal_value(spec.signal_kind, it->second));
      }
      step.returns[i] = std::max(r, -0.99);
    }

    prev_state = state;
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::string& id = members[static_cast<std::size_t>(i)];
      Vec x(kFactorCount);
      auto it = state.find(id);
      if (it == state.end()) {
        for (int j = 0; j < kFactorCount; ++j) x[j] = gauss(rng);
      } else {
        const double rho = kFactorPersistence;
        const double fresh = std::sqrt(1.0 - rho * rho);
        for (int j = 0; j < kFactorCount; ++j) {
          x[j] = rho * it->second[j] + fresh * gauss(rng);
        }
      }
      state[id] = x;
      step.factors.row(i) = x.transpose();
    }

    panel.steps.push_back(std::move(step));
  }

  validate_panel(panel, /*allow_missing_factors=*/false);
  return panel;
}

Vec planted_signal(const SyntheticSpec& spec, const TimeStep& step) {
  Vec g(step.factors.rows());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    g[i] = signal_value(spec.signal_kind, step.factors.row(i).transpose());
  }
  return g;
}

FactorPanel impute_missing(const FactorPanel& panel) {
  FactorPanel out = panel;
  for (TimeStep& step : out.steps) {
    if (step.all_missing.size() != kFactorCount) {
      step.all_missing.assign(kFactorCount, false);
    }
    const Eigen::Index n = step.factors.rows();
    for (int j = 0; j < kFactorCount; ++j) {
      std::vector<double> present;
      present.reserve(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        const double v = step.factors(i, j);
        if (!std::isnan(v)) present.push_back(v);
      }
      if (present.size() == static_cast<std::size_t>(n)) continue;
      if (present.empty()) {
        step.all_missing[static_cast<std::size_t>(j)] = true;
        step.factors.col(j).setZero();
        warn("factor '" + out.factor_names[static_cast<std::size_t>(j)] +
             "' entirely missing at t=" + std::to_string(step.index) +
             "; column carries no information this step");
        continue;
      }
      std::sort(present.begin(), present.end());
      const std::size_t m = present.size();
      const double median = (m % 2 == 1)
                                ? present[m / 2]
                                : 0.5 * (present[m / 2 - 1] + present[m / 2]);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::isnan(step.factors(i, j))) step.factors(i, j) = median;
      }
    }
  }
  return out;
}

}  // namespace ricnn
