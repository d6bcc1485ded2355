// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include "ricnn/engine.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "ricnn/baselines.hpp"
#include "ricnn/csv.hpp"
#include "ricnn/features.hpp"

namespace ricnn {

namespace fs = std::filesystem;
using nlohmann::json;

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::RicNn: return "ric_nn";
    case ModelKind::EpochNn: return "epoch_nn";
    case ModelKind::Lasso: return "lasso";
    case ModelKind::Ridge: return "ridge";
  }
  return "unknown";
}

namespace {

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "ric_nn") return ModelKind::RicNn;
  if (name == "epoch_nn") return ModelKind::EpochNn;
  if (name == "lasso") return ModelKind::Lasso;
  if (name == "ridge") return ModelKind::Ridge;
  throw Error(ErrorCode::Config, "unknown model '" + name +
                                     "' (expected ric_nn, epoch_nn, lasso or ridge)");
}

SignalKind signal_kind_from_name(const std::string& name) {
  if (name == "linear") return SignalKind::Linear;
  if (name == "nonlinear") return SignalKind::Nonlinear;
  if (name == "none") return SignalKind::None;
  throw Error(ErrorCode::Config, "unknown signal kind '" + name + "'");
}

const char* signal_kind_name(SignalKind kind) {
  switch (kind) {
    case SignalKind::Linear: return "linear";
    case SignalKind::Nonlinear: return "nonlinear";
    case SignalKind::None: return "none";
  }
  return "unknown";
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::Config, std::string("config field '") + key +
                                       "' has the wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (panel_csv.has_value() == synthetic.has_value()) {
    throw Error(ErrorCode::Config,
                "config needs exactly one panel source (panel.csv or panel.synthetic)");
  }
  policy.validate();
  portfolio.validate();
  if (t_start <= 0 || t_end <= 0) {
    throw Error(ErrorCode::Config, "evaluation window (t_start, t_end) required");
  }
  if (t_end <= t_start) {
    throw Error(ErrorCode::Config,
                "evaluation window needs t_end > t_start (risk statistics need "
                "at least two steps)");
  }
  if (model == ModelKind::EpochNn && !auto_epoch_from_first_step && policy.epochs < 1) {
    throw Error(ErrorCode::Config,
                "epoch_nn needs policy.epochs >= 1 or auto_epoch_from_first_step");
  }
  if (!(batchnorm_momentum > 0.0 && batchnorm_momentum < 1.0)) {
    throw Error(ErrorCode::Config, "batchnorm_momentum must be in (0, 1)");
  }
  if (model == ModelKind::Lasso && lasso_lambda < 0.0) {
    throw Error(ErrorCode::Config, "lasso lambda must be >= 0");
  }
  if (model == ModelKind::Ridge && ridge_lambda <= 0.0) {
    throw Error(ErrorCode::Config, "ridge lambda must be > 0");
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, "config is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");

  RunConfig config;

  const json panel = get_or<json>(doc, "panel", json::object());
  if (panel.contains("csv")) {
    const json& c = panel.at("csv");
    config.panel_csv = get_or<std::string>(c, "path", "");
    if (config.panel_csv->empty()) {
      throw Error(ErrorCode::Config, "panel.csv.path required");
    }
    if (c.contains("columns")) {
      const json& cols = c.at("columns");
      config.csv_schema.stock_column = get_or<std::string>(cols, "stock", "stock");
      config.csv_schema.time_column = get_or<std::string>(cols, "time", "time");
      config.csv_schema.return_column = get_or<std::string>(cols, "return", "return");
      if (cols.contains("factors")) {
        config.csv_schema.factor_columns =
            cols.at("factors").get<std::vector<std::string>>();
      }
    }
    if (c.contains("factor_lags")) {
      for (auto& [name, lag] : c.at("factor_lags").items()) {
        config.csv_schema.factor_lags[name] = lag.get<int>();
      }
    }
  }
  if (panel.contains("synthetic")) {
    const json& s = panel.at("synthetic");
    SyntheticSpec spec;
    spec.n_stocks = get_or<int>(s, "n_stocks", spec.n_stocks);
    spec.n_steps = get_or<int>(s, "n_steps", spec.n_steps);
    spec.signal_kind = signal_kind_from_name(get_or<std::string>(s, "signal", "nonlinear"));
    spec.noise_scale = get_or<double>(s, "noise_scale", spec.noise_scale);
    spec.turnover_rate = get_or<double>(s, "turnover_rate", spec.turnover_rate);
    config.synthetic = spec;
  }

  config.model = model_kind_from_name(get_or<std::string>(doc, "model", "ric_nn"));

  const json policy = get_or<json>(doc, "policy", json::object());
  config.policy.kind = (config.model == ModelKind::EpochNn)
                           ? TrainPolicy::Kind::FixedEpoch
                           : TrainPolicy::Kind::RankIC;
  config.policy.v_init = get_or<double>(policy, "v_init", 0.16);
  config.policy.v_stop = get_or<double>(policy, "v_stop", 0.20);
  config.policy.epochs = get_or<int>(policy, "epochs", 0);
  config.policy.max_epochs = get_or<int>(policy, "max_epochs", 500);
  config.policy.window = get_or<int>(policy, "window", 120);
  config.policy.batch_size = get_or<int>(policy, "batch_size", 300);
  config.warm_start = get_or<bool>(policy, "warm_start", true);
  config.auto_epoch_from_first_step =
      get_or<bool>(policy, "auto_epoch_from_first_step", false);

  const json lasso = get_or<json>(doc, "lasso", json::object());
  config.lasso_lambda = get_or<double>(lasso, "lambda", 0.001);
  config.lasso_tol = get_or<double>(lasso, "tol", 1e-5);
  config.lasso_max_iter = get_or<int>(lasso, "max_iter", 2000);
  const json ridge = get_or<json>(doc, "ridge", json::object());
  config.ridge_lambda = get_or<double>(ridge, "lambda", 0.001);

  const json network = get_or<json>(doc, "network", json::object());
  config.batchnorm_momentum = get_or<double>(network, "batchnorm_momentum", 0.99);

  const json seeds = get_or<json>(doc, "seeds", json::object());
  config.seeds.net_init = get_or<std::uint64_t>(seeds, "net_init", 1);
  config.seeds.dropout = get_or<std::uint64_t>(seeds, "dropout", 2);
  config.seeds.shuffle = get_or<std::uint64_t>(seeds, "shuffle", 3);
  config.seeds.synthetic = get_or<std::uint64_t>(seeds, "synthetic", 4);
  if (config.synthetic) config.synthetic->seed = config.seeds.synthetic;

  const json portfolio = get_or<json>(doc, "portfolio", json::object());
  const std::string style = get_or<std::string>(portfolio, "style", "long_short");
  if (style == "long") {
    config.portfolio.style = PortfolioStyle::Long;
  } else if (style == "long_short") {
    config.portfolio.style = PortfolioStyle::LongShort;
  } else {
    throw Error(ErrorCode::Config, "portfolio.style must be long or long_short");
  }
  config.portfolio.quantile = get_or<double>(portfolio, "quantile", 0.2);
  config.portfolio.cost_per_side = get_or<double>(portfolio, "cost_per_side", 0.0);

  const json eval = get_or<json>(doc, "evaluation", json::object());
  config.t_start = get_or<int>(eval, "t_start", 0);
  config.t_end = get_or<int>(eval, "t_end", 0);

  if (doc.contains("transfer_source")) {
    config.transfer_source = doc.at("transfer_source").get<std::string>();
  }
  config.save_all_snapshots = get_or<bool>(doc, "save_all_snapshots", false);

  config.validate();
  return config;
}

std::string effective_config_json(const RunConfig& config) {
  json doc;
  if (config.panel_csv) {
    json cols;
    cols["stock"] = config.csv_schema.stock_column;
    cols["time"] = config.csv_schema.time_column;
    cols["return"] = config.csv_schema.return_column;
    cols["factors"] = config.csv_schema.factor_columns;
    json c;
    c["path"] = *config.panel_csv;
    c["columns"] = cols;
    if (!config.csv_schema.factor_lags.empty()) {
      json lags;
      for (const auto& [name, lag] : config.csv_schema.factor_lags) lags[name] = lag;
      c["factor_lags"] = lags;
    }
    doc["panel"]["csv"] = c;
  } else if (config.synthetic) {
    doc["panel"]["synthetic"] = {
        {"n_stocks", config.synthetic->n_stocks},
        {"n_steps", config.synthetic->n_steps},
        {"signal", signal_kind_name(config.synthetic->signal_kind)},
        {"noise_scale", config.synthetic->noise_scale},
        {"turnover_rate", config.synthetic->turnover_rate},
    };
  }
  doc["model"] = model_kind_name(config.model);
  doc["policy"] = {
      {"v_init", config.policy.v_init},
      {"v_stop", config.policy.v_stop},
      {"epochs", config.policy.epochs},
      {"max_epochs", config.policy.max_epochs},
      {"window", config.policy.window},
      {"batch_size", config.policy.batch_size},
      {"warm_start", config.warm_start},
      {"auto_epoch_from_first_step", config.auto_epoch_from_first_step},
  };
  doc["lasso"] = {{"lambda", config.lasso_lambda},
                  {"tol", config.lasso_tol},
                  {"max_iter", config.lasso_max_iter}};
  doc["ridge"] = {{"lambda", config.ridge_lambda}};
  doc["network"] = {{"batchnorm_momentum", config.batchnorm_momentum}};
  doc["seeds"] = {{"net_init", config.seeds.net_init},
                  {"dropout", config.seeds.dropout},
                  {"shuffle", config.seeds.shuffle},
                  {"synthetic", config.seeds.synthetic}};
  doc["portfolio"] = {
      {"style", config.portfolio.style == PortfolioStyle::Long ? "long" : "long_short"},
      {"quantile", config.portfolio.quantile},
      {"cost_per_side", config.portfolio.cost_per_side},
  };
  doc["evaluation"] = {{"t_start", config.t_start}, {"t_end", config.t_end}};
  if (config.transfer_source) doc["transfer_source"] = *config.transfer_source;
  doc["save_all_snapshots"] = config.save_all_snapshots;
  return doc.dump(1);
}

std::string config_hash(const RunConfig& config) {
  const std::string text = effective_config_json(config);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

json metrics_to_json(const MetricsReport& m) {
  return {{"annualized_return", m.annualized_return},
          {"risk", m.risk},
          {"risk_adjusted", m.risk_adjusted},
          {"max_drawdown", m.max_drawdown}};
}

json strategy_to_json(const StrategyReport& s) {
  return {{"raw", metrics_to_json(s.raw)},
          {"cost_adjusted", metrics_to_json(s.cost_adjusted)}};
}

double mean_skipping_nan(const std::vector<double>& values) {
  double sum = 0.0;
  int n = 0;
  for (double v : values) {
    if (std::isfinite(v)) {
      sum += v;
      ++n;
    }
  }
  return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::string report_to_json(const BacktestReport& report) {
  json doc;
  doc["format"] = "ricnn-report";
  doc["version"] = 1;
  doc["config_hash"] = report.config_hash;
  doc["model"] = report.model_name;
  doc["seeds"] = {{"net_init", report.seeds.net_init},
                  {"dropout", report.seeds.dropout},
                  {"shuffle", report.seeds.shuffle},
                  {"synthetic", report.seeds.synthetic}};
  doc["evaluation"] = {{"t_start", report.t_start},
                       {"t_end", report.t_end},
                       {"n_steps", report.n_steps}};
  doc["mean_oos_rank_ic"] = report.mean_oos_rank_ic;
  doc["oos_rank_ic"] = report.oos_rank_ic;  // NaN entries serialize as null
  if (report.long_strategy) doc["long"] = strategy_to_json(*report.long_strategy);
  if (report.long_short_strategy) {
    doc["long_short"] = strategy_to_json(*report.long_short_strategy);
  }
  doc["files"] = {{"series", "series.csv"},
                  {"scores", "scores.csv"},
                  {"trace", "trace.csv"}};
  return doc.dump(1);
}

namespace {

FactorPanel obtain_panel(const RunConfig& config) {
  if (config.panel_csv) return load_panel(*config.panel_csv, config.csv_schema);
  return generate_panel(*config.synthetic);
}

std::vector<double> oos_rank_ic_series(const std::vector<StepScores>& scores,
                                       const FactorPanel& panel) {
  std::vector<double> out;
  out.reserve(scores.size());
  for (const StepScores& step : scores) {
    const TimeStep& next = panel.step(step.t + 1);
    std::vector<double> realized;
    std::vector<double> predicted;
    for (std::size_t i = 0; i < step.stock_ids.size(); ++i) {
      const int row = next.row_of(step.stock_ids[i]);
      if (row < 0) continue;  // delisted before realization
      realized.push_back(next.returns[row]);
      predicted.push_back(step.scores[static_cast<Eigen::Index>(i)]);
    }
    double ic = std::numeric_limits<double>::quiet_NaN();
    if (realized.size() >= 2) {
      try {
        ic = rank_ic(Eigen::Map<const Vec>(realized.data(),
                                           static_cast<Eigen::Index>(realized.size())),
                     Eigen::Map<const Vec>(predicted.data(),
                                           static_cast<Eigen::Index>(predicted.size())));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UndefinedCorrelation) throw;
      }
    }
    out.push_back(ic);
  }
  return out;
}

StrategyReport long_strategy_report(const PortfolioSeries& series) {
  StrategyReport report;
  report.raw = compute_report({series.alpha, SeriesKind::LongAlpha},
                              &series.long_returns);
  report.cost_adjusted = compute_report({series.alpha_net, SeriesKind::LongAlpha},
                                        &series.long_returns_net);
  return report;
}

StrategyReport long_short_strategy_report(const PortfolioSeries& series) {
  StrategyReport report;
  report.raw = compute_report({series.long_short_returns, SeriesKind::LongShort});
  report.cost_adjusted =
      compute_report({series.long_short_returns_net, SeriesKind::LongShort});
  return report;
}

void write_scores_csv(const std::string& path, const std::vector<StepScores>& scores) {
  csv::Table table;
  table.header = {"time", "stock", "score"};
  for (const StepScores& step : scores) {
    for (std::size_t i = 0; i < step.stock_ids.size(); ++i) {
      table.rows.push_back({std::to_string(step.t), step.stock_ids[i],
                            csv::format_double(step.scores[static_cast<Eigen::Index>(i)])});
    }
  }
  csv::write_file(path, table);
}

void write_trace_csv(const std::string& path, const std::vector<StepTrainInfo>& info) {
  csv::Table table;
  table.header = {"time", "epoch", "loss", "window_rank_ic", "terminated"};
  for (const StepTrainInfo& step : info) {
    const std::size_t rows =
        std::max<std::size_t>(1, std::max(step.loss_trace.size(), step.ic_trace.size()));
    for (std::size_t e = 0; e < rows; ++e) {
      std::vector<std::string> row;
      row.push_back(std::to_string(step.t));
      row.push_back(std::to_string(step.loss_trace.empty() && step.ic_trace.empty()
                                       ? step.epochs_run
                                       : static_cast<int>(e + 1)));
      row.push_back(e < step.loss_trace.size() ? csv::format_double(step.loss_trace[e])
                                               : std::string());
      row.push_back(e < step.ic_trace.size() ? csv::format_double(step.ic_trace[e])
                                             : std::string());
      row.push_back(e + 1 == rows ? termination_name(step.terminated) : std::string());
      table.rows.push_back(std::move(row));
    }
  }
  csv::write_file(path, table);
}

void write_series_csv(const std::string& path, const PortfolioSeries& series,
                      const std::vector<double>& oos_ic) {
  csv::Table table;
  table.header = {"time",       "r_long",     "r_short",   "r_long_short",
                  "benchmark",  "alpha",      "r_long_net", "r_long_short_net",
                  "alpha_net",  "oos_rank_ic", "n_delisted"};
  for (std::size_t k = 0; k < series.formed_at.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    table.rows.push_back({
        std::to_string(series.formed_at[k]),
        csv::format_double(series.long_returns[i]),
        csv::format_double(series.short_returns[i]),
        csv::format_double(series.long_short_returns[i]),
        csv::format_double(series.benchmark[i]),
        csv::format_double(series.alpha[i]),
        csv::format_double(series.long_returns_net[i]),
        csv::format_double(series.long_short_returns_net[i]),
        csv::format_double(series.alpha_net[i]),
        csv::format_double(oos_ic[k]),
        std::to_string(series.delisted[k]),
    });
  }
  csv::write_file(path, table);
}

int resolve_auto_epochs(const RunConfig& config, const NormalizedPanel& np) {
  TrainPolicy probe = config.policy;
  probe.kind = TrainPolicy::Kind::RankIC;
  NetworkConfig net_config;
  net_config.batchnorm_momentum = config.batchnorm_momentum;
  net_config.seed = step_seeds(config.seeds, config.t_start).net_init;
  Network net = Network::init(net_config);
  if (config.transfer_source) {
    const ModelSnapshot source = load_snapshot(*config.transfer_source);
    net.copy_layers_from(source.net, 4);
  }
  SampleSet window =
      build_samples(np, config.t_start - probe.window, config.t_start - 1);
  const StepSeeds ss = step_seeds(config.seeds, config.t_start);
  auto shuffle_rng = make_rng(ss.shuffle);
  auto dropout_rng = make_rng(ss.dropout);
  TrainOutcome outcome = train_one_step(net, window, probe, shuffle_rng, dropout_rng);
  if (outcome.terminated != Termination::ReachedStop) {
    throw Error(ErrorCode::TrainingDiverged,
                "auto epoch selection: first step never reached v_stop=" +
                    std::to_string(probe.v_stop) + " within " +
                    std::to_string(probe.max_epochs) + " epochs");
  }
  return outcome.final_model->epoch;
}

}  // namespace

BacktestReport run(const RunConfig& config, const std::string& output_dir) {
  config.validate();
  fs::create_directories(output_dir);

  const FactorPanel panel = impute_missing(obtain_panel(config));
  const NormalizedPanel np = NormalizedPanel::build(panel);

  std::optional<ModelSnapshot> transfer;
  if (config.transfer_source &&
      (config.model == ModelKind::RicNn || config.model == ModelKind::EpochNn)) {
    transfer = load_snapshot(*config.transfer_source);
  }

  std::unique_ptr<StepModel> model;
  TrainPolicy policy = config.policy;
  switch (config.model) {
    case ModelKind::RicNn:
    case ModelKind::EpochNn: {
      if (config.model == ModelKind::EpochNn && config.auto_epoch_from_first_step) {
        policy.epochs = resolve_auto_epochs(config, np);
      }
      NetworkConfig net_config;
      net_config.batchnorm_momentum = config.batchnorm_momentum;
      model = std::make_unique<RicnnStepModel>(net_config, policy, config.seeds,
                                               config.warm_start, transfer, 4,
                                               config.save_all_snapshots);
      break;
    }
    case ModelKind::Lasso:
      model = std::make_unique<LinearStepModel>(LinearKind::Lasso, config.lasso_lambda,
                                                policy.window, config.lasso_tol,
                                                config.lasso_max_iter);
      break;
    case ModelKind::Ridge:
      model = std::make_unique<LinearStepModel>(LinearKind::Ridge, config.ridge_lambda,
                                                policy.window);
      break;
  }

  const BacktestResult result =
      rolling_backtest(np, *model, config.t_start, config.t_end);

  const std::vector<StepPortfolio> portfolios =
      form_portfolios(result.scores, config.portfolio);
  const PortfolioSeries series = realize_returns(portfolios, panel, config.portfolio);
  const std::vector<double> oos_ic = oos_rank_ic_series(result.scores, panel);

  BacktestReport report;
  report.config_hash = config_hash(config);
  report.model_name = model_kind_name(config.model);
  report.seeds = config.seeds;
  report.t_start = config.t_start;
  report.t_end = config.t_end;
  report.n_steps = static_cast<int>(result.scores.size());
  report.oos_rank_ic = oos_ic;
  report.mean_oos_rank_ic = mean_skipping_nan(oos_ic);
  report.long_strategy = long_strategy_report(series);
  if (config.portfolio.style == PortfolioStyle::LongShort) {
    report.long_short_strategy = long_short_strategy_report(series);
  }

  const fs::path dir(output_dir);
  write_scores_csv((dir / "scores.csv").string(), result.scores);
  write_trace_csv((dir / "trace.csv").string(), result.train_info);
  write_series_csv((dir / "series.csv").string(), series, oos_ic);
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write report.json");
    out << report_to_json(report) << "\n";
  }
  {
    std::ofstream out(dir / "effective_config.json", std::ios::binary);
    out << effective_config_json(config) << "\n";
  }
  if (result.final_snapshot) {
    save_snapshot(*result.final_snapshot, (dir / "model_final.json").string());
  }
  if (config.save_all_snapshots) {
    auto* nn = dynamic_cast<RicnnStepModel*>(model.get());
    if (nn != nullptr) {
      fs::create_directories(dir / "snapshots");
      for (const ModelSnapshot& snapshot : nn->collected_snapshots()) {
        save_snapshot(snapshot, (dir / "snapshots" /
                                 ("model_t" + std::to_string(snapshot.time_index) + ".json"))
                                    .string());
      }
    }
  }
  return report;
}

namespace {

struct SeriesColumns {
  std::vector<int> time;
  Vec r_long, r_short, r_ls, benchmark, alpha, r_long_net, r_ls_net, alpha_net;
  std::vector<double> oos_ic;
};

SeriesColumns read_series(const std::string& path) {
  const csv::Table table = csv::read_file(path);
  auto col = [&](const char* name) {
    const int idx = table.column(name);
    if (idx < 0) throw Error(ErrorCode::Schema, std::string("series.csv missing column ") + name);
    return idx;
  };
  const int c_time = col("time"), c_rl = col("r_long"), c_rs = col("r_short"),
            c_rls = col("r_long_short"), c_b = col("benchmark"), c_a = col("alpha"),
            c_rln = col("r_long_net"), c_rlsn = col("r_long_short_net"),
            c_an = col("alpha_net"), c_ic = col("oos_rank_ic");

  const auto n = static_cast<Eigen::Index>(table.rows.size());
  SeriesColumns out;
  out.r_long.resize(n);
  out.r_short.resize(n);
  out.r_ls.resize(n);
  out.benchmark.resize(n);
  out.alpha.resize(n);
  out.r_long_net.resize(n);
  out.r_ls_net.resize(n);
  out.alpha_net.resize(n);
  auto cell = [&](std::size_t r, int c) -> double {
    const auto parsed = csv::parse_double(table.rows[r][static_cast<std::size_t>(c)]);
    if (!parsed) {
      throw Error(ErrorCode::Integrity,
                  "unparseable numeric in series.csv row " + std::to_string(r + 2));
    }
    return *parsed;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    out.time.push_back(static_cast<int>(*csv::parse_int(table.rows[r][static_cast<std::size_t>(c_time)])));
    out.r_long[i] = cell(r, c_rl);
    out.r_short[i] = cell(r, c_rs);
    out.r_ls[i] = cell(r, c_rls);
    out.benchmark[i] = cell(r, c_b);
    out.alpha[i] = cell(r, c_a);
    out.r_long_net[i] = cell(r, c_rln);
    out.r_ls_net[i] = cell(r, c_rlsn);
    out.alpha_net[i] = cell(r, c_an);
    out.oos_ic.push_back(cell(r, c_ic));
  }
  return out;
}

json recomputed_metrics(const SeriesColumns& s) {
  json doc;
  doc["mean_oos_rank_ic"] = mean_skipping_nan(s.oos_ic);
  auto set_block = [&](const char* strategy, const char* variant,
                       const ReturnSeries& series, const Vec* dd) {
    try {
      doc[strategy][variant] = metrics_to_json(compute_report(series, dd));
    } catch (const Error&) {
      // undefined on this series (zero risk or degenerate length); leave absent
    }
  };
  set_block("long", "raw", {s.alpha, SeriesKind::LongAlpha}, &s.r_long);
  set_block("long", "cost_adjusted", {s.alpha_net, SeriesKind::LongAlpha},
            &s.r_long_net);
  set_block("long_short", "raw", {s.r_ls, SeriesKind::LongShort}, nullptr);
  set_block("long_short", "cost_adjusted", {s.r_ls_net, SeriesKind::LongShort},
            nullptr);
  return doc;
}

}  // namespace

std::string recompute_metrics_json(const std::string& series_csv_path) {
  return recomputed_metrics(read_series(series_csv_path)).dump(1);
}

void verify_report(const std::string& report_json_path,
                   const std::string& series_csv_path) {
  std::ifstream in(report_json_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open report: " + report_json_path);
  json report;
  try {
    in >> report;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema, "report is not valid JSON: " + std::string(e.what()));
  }
  const json recomputed = recomputed_metrics(read_series(series_csv_path));

  auto close = [](double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return true;
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  auto check = [&](const json& got, const json& want, const std::string& where) {
    const double a = got.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                   : got.get<double>();
    const double b = want.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                    : want.get<double>();
    if (!close(a, b)) {
      throw Error(ErrorCode::Integrity,
                  "report mismatch at " + where + ": report has " +
                      csv::format_double(a) + ", series recompute to " +
                      csv::format_double(b));
    }
  };

  check(report.at("mean_oos_rank_ic"), recomputed.at("mean_oos_rank_ic"),
        "mean_oos_rank_ic");
  for (const char* strategy : {"long", "long_short"}) {
    if (!report.contains(strategy)) continue;
    for (const char* variant : {"raw", "cost_adjusted"}) {
      for (const char* metric :
           {"annualized_return", "risk", "risk_adjusted", "max_drawdown"}) {
        check(report.at(strategy).at(variant).at(metric),
              recomputed.at(strategy).at(variant).at(metric),
              std::string(strategy) + "." + variant + "." + metric);
      }
    }
  }
}

namespace {

void apply_override(json& doc, const std::string& dotted_path, const json& value) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_path.find('.', start);
    const std::string key = dotted_path.substr(start, dot - start);
    if (key.empty()) throw Error(ErrorCode::Config, "empty key in grid path");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::string metric_or_empty(const BacktestReport& report, int which) {
  auto fmt = [](double v) { return csv::format_double(v); };
  switch (which) {
    case 0: return report.long_strategy ? fmt(report.long_strategy->raw.annualized_return) : "";
    case 1: return report.long_strategy ? fmt(report.long_strategy->raw.risk) : "";
    case 2: return report.long_strategy ? fmt(report.long_strategy->raw.risk_adjusted) : "";
    case 3: return report.long_strategy ? fmt(report.long_strategy->raw.max_drawdown) : "";
    case 4: return report.long_short_strategy ? fmt(report.long_short_strategy->raw.annualized_return) : "";
    case 5: return report.long_short_strategy ? fmt(report.long_short_strategy->raw.risk) : "";
    case 6: return report.long_short_strategy ? fmt(report.long_short_strategy->raw.risk_adjusted) : "";
    case 7: return report.long_short_strategy ? fmt(report.long_short_strategy->raw.max_drawdown) : "";
    case 8: return fmt(report.mean_oos_rank_ic);
  }
  return "";
}

constexpr const char* kMetricColumns[] = {"alpha", "te",   "ir",  "maxdd_long",
                                          "ar",    "risk", "rr",  "maxdd_ls",
                                          "mean_oos_ic"};

}  // namespace

std::vector<SweepPoint> sweep(const std::string& base_config_json,
                              const std::string& grid_json,
                              const std::string& output_dir, int jobs) {
  json base;
  json grid;
  try {
    base = json::parse(base_config_json);
    grid = json::parse(grid_json);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, "sweep input is not valid JSON: " + std::string(e.what()));
  }
  if (!grid.is_object() || grid.empty()) {
    throw Error(ErrorCode::Config, "sweep grid must be a non-empty JSON object");
  }
  std::vector<std::string> keys;
  std::vector<std::vector<json>> values;
  for (auto& [key, list] : grid.items()) {
    if (!list.is_array() || list.empty()) {
      throw Error(ErrorCode::Config, "grid entry '" + key + "' must be a non-empty array");
    }
    keys.push_back(key);
    values.push_back(std::vector<json>(list.begin(), list.end()));
  }

  // cartesian product, last key cycling fastest
  std::vector<SweepPoint> points;
  std::vector<std::string> point_configs;
  std::vector<std::size_t> counter(keys.size(), 0);
  bool exhausted = false;
  while (!exhausted) {
    SweepPoint point;
    json doc = base;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const json& v = values[k][counter[k]];
      apply_override(doc, keys[k], v);
      point.params.emplace_back(keys[k], v.dump());
    }
    char id[16];
    std::snprintf(id, sizeof(id), "p%03zu", points.size());
    point.id = id;
    points.push_back(std::move(point));
    point_configs.push_back(doc.dump());

    exhausted = true;
    std::size_t k = keys.size();
    while (k > 0) {
      --k;
      if (++counter[k] < values[k].size()) {
        exhausted = false;
        break;
      }
      counter[k] = 0;
    }
  }

  fs::create_directories(output_dir);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      SweepPoint& point = points[i];
      try {
        const RunConfig config = parse_run_config(point_configs[i]);
        point.report = run(config, (fs::path(output_dir) / point.id).string());
        point.ok = true;
      } catch (const std::exception& e) {
        point.ok = false;
        point.error = e.what();
      }
    }
  };
  const int n_jobs = std::max(1, jobs);
  std::vector<std::thread> threads;
  for (int j = 1; j < n_jobs; ++j) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  // comparison table: one row per point, then cross-point stddev per metric
  csv::Table table;
  table.header = {"point"};
  for (const auto& key : keys) table.header.push_back(key);
  table.header.push_back("status");
  table.header.push_back("error");
  for (const char* col : kMetricColumns) table.header.push_back(col);

  std::vector<std::vector<double>> metric_values(std::size(kMetricColumns));
  for (const SweepPoint& point : points) {
    std::vector<std::string> row{point.id};
    for (const auto& [key, value] : point.params) {
      (void)key;
      row.push_back(value);
    }
    row.push_back(point.ok ? "ok" : "error");
    std::string sanitized = point.error;
    for (char& c : sanitized) {
      if (c == ',' || c == '\n') c = ';';
    }
    row.push_back(sanitized);
    for (int m = 0; m < static_cast<int>(std::size(kMetricColumns)); ++m) {
      const std::string cell = point.ok ? metric_or_empty(point.report, m) : "";
      if (!cell.empty()) {
        metric_values[static_cast<std::size_t>(m)].push_back(*csv::parse_double(cell));
      }
      row.push_back(cell);
    }
    table.rows.push_back(std::move(row));
  }

  std::vector<std::string> stddev_row{"stddev"};
  for (std::size_t k = 0; k < keys.size(); ++k) stddev_row.push_back("");
  stddev_row.push_back("");
  stddev_row.push_back("");
  for (const auto& column : metric_values) {
    if (column.size() < 2) {
      stddev_row.push_back("");
      continue;
    }
    double mean = 0.0;
    for (double v : column) mean += v;
    mean /= static_cast<double>(column.size());
    double ss = 0.0;
    for (double v : column) ss += (v - mean) * (v - mean);
    stddev_row.push_back(csv::format_double(
        std::sqrt(ss / static_cast<double>(column.size() - 1))));
  }
  table.rows.push_back(std::move(stddev_row));
  csv::write_file((fs::path(output_dir) / "comparison.csv").string(), table);

  return points;
}

}  // namespace ricnn
