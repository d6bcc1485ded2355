// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ricnn/metrics.hpp"
#include "ricnn/net.hpp"
#include "ricnn/panel.hpp"
#include "ricnn/portfolio.hpp"
#include "ricnn/trainer.hpp"

namespace ricnn {

enum class ModelKind { RicNn, EpochNn, Lasso, Ridge };

const char* model_kind_name(ModelKind kind);

/// Fully resolved run description. Parsed from the JSON config file; every
/// field has a default except the panel source and the evaluation window.
struct RunConfig {
  std::optional<std::string> panel_csv;
  CsvSchema csv_schema;
  std::optional<SyntheticSpec> synthetic;

  ModelKind model = ModelKind::RicNn;
  TrainPolicy policy;
  bool warm_start = true;
  bool auto_epoch_from_first_step = false;

  double lasso_lambda = 0.001;
  double lasso_tol = 1e-5;
  int lasso_max_iter = 2000;
  double ridge_lambda = 0.001;

  double batchnorm_momentum = 0.99;
  Seeds seeds;
  PortfolioSpec portfolio;
  int t_start = 0;
  int t_end = 0;
  std::optional<std::string> transfer_source;
  bool save_all_snapshots = false;

  void validate() const;
};

RunConfig parse_run_config(const std::string& json_text);

/// Canonical JSON of the config with every default resolved; also the
/// input of the config hash recorded in reports.
std::string effective_config_json(const RunConfig& config);

std::string config_hash(const RunConfig& config);

struct StrategyReport {
  MetricsReport raw;
  MetricsReport cost_adjusted;
};

struct BacktestReport {
  std::string config_hash;
  std::string model_name;
  Seeds seeds;
  int t_start = 0;
  int t_end = 0;
  int n_steps = 0;
  double mean_oos_rank_ic = 0.0;
  std::vector<double> oos_rank_ic;  // per step; NaN when undefined
  std::optional<StrategyReport> long_strategy;
  std::optional<StrategyReport> long_short_strategy;
};

std::string report_to_json(const BacktestReport& report);

/// Full pipeline: panel -> features -> walk-forward fit/score -> portfolios
/// -> metric suite; writes report.json, series.csv, scores.csv, trace.csv
/// and (for network models) model_final.json under `output_dir`.
BacktestReport run(const RunConfig& config, const std::string& output_dir);

/// Metric suite recomputed from an emitted series.csv, as JSON with the
/// same metric block layout as the report.
std::string recompute_metrics_json(const std::string& series_csv_path);

/// Checks every metric in report.json against a recomputation from
/// series.csv at 1e-12 relative tolerance; throws on mismatch.
void verify_report(const std::string& report_json_path,
                   const std::string& series_csv_path);

/// One grid point of a sweep: the overridden values and the outcome.
struct SweepPoint {
  std::string id;
  std::vector<std::pair<std::string, std::string>> params;
  bool ok = false;
  std::string error;
  BacktestReport report;
};

/// Cartesian sweep over `grid_json` ({"dotted.config.path": [values...]}).
/// Each point runs the full pipeline into output_dir/<id>/; failures are
/// recorded and the sweep continues. Writes comparison.csv with one row per
/// point and a trailing cross-point standard-deviation row.
std::vector<SweepPoint> sweep(const std::string& base_config_json,
                              const std::string& grid_json,
                              const std::string& output_dir, int jobs = 1);

}  // namespace ricnn
