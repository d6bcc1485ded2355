// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0

// Batch front door. Assembles a run config from a JSON file plus command
// line overrides and drives the engine through its C interface.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ricnn.h"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int exit_code_from_last_error() {
  return ricnn_last_error_code() == RICNN_ERR_CONFIG ? kExitConfig : kExitRuntime;
}

int fail_with_last_error(const std::string& context) {
  std::cerr << "error: " << context << ": " << ricnn_last_error() << "\n";
  return exit_code_from_last_error();
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  in >> doc;
  return doc;
}

void set_path(json& doc, const std::string& dotted, const json& value) {
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

struct OwnedString {
  char* text = nullptr;
  ~OwnedString() { ricnn_string_free(text); }
  explicit operator bool() const { return text != nullptr; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ricnn - cross-sectional return prediction and backtesting engine"};
  app.require_subcommand(1);

  // ---- run --------------------------------------------------------------
  auto* run_cmd = app.add_subcommand("run", "run one backtest from a config");
  std::string config_path, output_dir = "out";
  bool print_effective = false;
  run_cmd->add_option("--config", config_path, "config JSON file");
  run_cmd->add_option("--output-dir", output_dir, "directory for reports and series");
  run_cmd->add_flag("--print-effective-config", print_effective,
                    "print the resolved config and exit");

  std::string panel_csv, model, signal, style, transfer_source;
  int n_stocks = 0, n_steps = 0, epochs = 0, max_epochs = 0, window = 0,
      batch_size = 0, t_start = 0, t_end = 0;
  double noise_scale = 0, turnover_rate = 0, v_init = 0, v_stop = 0,
         lasso_lambda = 0, ridge_lambda = 0, quantile = 0, cost_per_side = 0;
  std::uint64_t seed_net = 0, seed_dropout = 0, seed_shuffle = 0, seed_synth = 0;
  bool warm_start = true, auto_epoch = false, save_all_snapshots = false,
       use_synthetic = false;

  auto* o_panel = run_cmd->add_option("--panel-csv", panel_csv, "CSV panel path");
  auto* o_synth = run_cmd->add_flag("--synthetic", use_synthetic, "use a generated panel");
  auto* o_nstocks = run_cmd->add_option("--n-stocks", n_stocks);
  auto* o_nsteps = run_cmd->add_option("--n-steps", n_steps);
  auto* o_signal = run_cmd->add_option("--signal", signal, "linear|nonlinear|none");
  auto* o_noise = run_cmd->add_option("--noise-scale", noise_scale);
  auto* o_turn = run_cmd->add_option("--turnover-rate", turnover_rate);
  auto* o_model = run_cmd->add_option("--model", model, "ric_nn|epoch_nn|lasso|ridge");
  auto* o_vinit = run_cmd->add_option("--v-init", v_init, "initialization rank IC");
  auto* o_vstop = run_cmd->add_option("--v-stop", v_stop, "stopping rank IC");
  auto* o_epochs = run_cmd->add_option("--epochs", epochs, "epoch_nn stopping epoch");
  auto* o_maxep = run_cmd->add_option("--max-epochs", max_epochs);
  auto* o_window = run_cmd->add_option("--window", window, "sliding window N");
  auto* o_batch = run_cmd->add_option("--batch-size", batch_size);
  auto* o_warm = run_cmd->add_flag("--warm-start,!--no-warm-start", warm_start);
  auto* o_autoep = run_cmd->add_flag("--auto-epoch-from-first-step", auto_epoch,
                                     "pick the epoch count that reaches v_stop on "
                                     "the first step's training");
  auto* o_llam = run_cmd->add_option("--lasso-lambda", lasso_lambda);
  auto* o_rlam = run_cmd->add_option("--ridge-lambda", ridge_lambda);
  auto* o_style = run_cmd->add_option("--style", style, "long|long_short");
  auto* o_quant = run_cmd->add_option("--quantile", quantile);
  auto* o_cost = run_cmd->add_option("--cost-per-side", cost_per_side);
  auto* o_tstart = run_cmd->add_option("--t-start", t_start);
  auto* o_tend = run_cmd->add_option("--t-end", t_end);
  auto* o_s1 = run_cmd->add_option("--seed-net-init", seed_net);
  auto* o_s2 = run_cmd->add_option("--seed-dropout", seed_dropout);
  auto* o_s3 = run_cmd->add_option("--seed-shuffle", seed_shuffle);
  auto* o_s4 = run_cmd->add_option("--seed-synthetic", seed_synth);
  auto* o_tf = run_cmd->add_option("--transfer-source", transfer_source,
                                   "model snapshot seeding the first step");
  auto* o_save = run_cmd->add_flag("--save-all-snapshots", save_all_snapshots);

  // ---- sweep ------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "run a config grid");
  std::string sweep_config, sweep_grid, sweep_out = "sweep_out";
  int jobs = 1;
  sweep_cmd->add_option("--config", sweep_config, "base config JSON file")->required();
  sweep_cmd->add_option("--grid", sweep_grid,
                        "grid JSON file: {\"policy.epochs\": [40, 80], ...}")
      ->required();
  sweep_cmd->add_option("--output-dir", sweep_out);
  sweep_cmd->add_option("--jobs", jobs, "parallel grid points");

  // ---- gen-data ----------------------------------------------------------
  auto* gen_cmd = app.add_subcommand("gen-data", "write a synthetic panel CSV");
  std::string gen_out;
  int gen_stocks = 50, gen_steps = 160;
  std::string gen_signal = "nonlinear";
  double gen_noise = 0.01, gen_turnover = 0.02;
  std::uint64_t gen_seed = 1;
  gen_cmd->add_option("--out", gen_out, "output CSV path")->required();
  gen_cmd->add_option("--n-stocks", gen_stocks);
  gen_cmd->add_option("--n-steps", gen_steps);
  gen_cmd->add_option("--signal", gen_signal, "linear|nonlinear|none");
  gen_cmd->add_option("--noise-scale", gen_noise);
  gen_cmd->add_option("--turnover-rate", gen_turnover);
  gen_cmd->add_option("--seed", gen_seed);

  // ---- recompute-metrics --------------------------------------------------
  auto* rec_cmd = app.add_subcommand(
      "recompute-metrics", "recompute the metric suite from an emitted series.csv");
  std::string rec_series, rec_report;
  rec_cmd->add_option("--series", rec_series, "series.csv path")->required();
  rec_cmd->add_option("--report", rec_report,
                      "report.json to verify against (1e-12 relative)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      json config = json::object();
      if (!config_path.empty()) config = load_json_file(config_path);

      if (o_panel->count()) set_path(config, "panel.csv.path", panel_csv);
      if (o_synth->count() && use_synthetic && !config["panel"].contains("synthetic")) {
        set_path(config, "panel.synthetic", json::object());
      }
      if (o_nstocks->count()) set_path(config, "panel.synthetic.n_stocks", n_stocks);
      if (o_nsteps->count()) set_path(config, "panel.synthetic.n_steps", n_steps);
      if (o_signal->count()) set_path(config, "panel.synthetic.signal", signal);
      if (o_noise->count()) set_path(config, "panel.synthetic.noise_scale", noise_scale);
      if (o_turn->count()) set_path(config, "panel.synthetic.turnover_rate", turnover_rate);
      if (o_model->count()) set_path(config, "model", model);
      if (o_vinit->count()) set_path(config, "policy.v_init", v_init);
      if (o_vstop->count()) set_path(config, "policy.v_stop", v_stop);
      if (o_epochs->count()) set_path(config, "policy.epochs", epochs);
      if (o_maxep->count()) set_path(config, "policy.max_epochs", max_epochs);
      if (o_window->count()) set_path(config, "policy.window", window);
      if (o_batch->count()) set_path(config, "policy.batch_size", batch_size);
      if (o_warm->count()) set_path(config, "policy.warm_start", warm_start);
      if (o_autoep->count()) {
        set_path(config, "policy.auto_epoch_from_first_step", auto_epoch);
      }
      if (o_llam->count()) set_path(config, "lasso.lambda", lasso_lambda);
      if (o_rlam->count()) set_path(config, "ridge.lambda", ridge_lambda);
      if (o_style->count()) set_path(config, "portfolio.style", style);
      if (o_quant->count()) set_path(config, "portfolio.quantile", quantile);
      if (o_cost->count()) set_path(config, "portfolio.cost_per_side", cost_per_side);
      if (o_tstart->count()) set_path(config, "evaluation.t_start", t_start);
      if (o_tend->count()) set_path(config, "evaluation.t_end", t_end);
      if (o_s1->count()) set_path(config, "seeds.net_init", seed_net);
      if (o_s2->count()) set_path(config, "seeds.dropout", seed_dropout);
      if (o_s3->count()) set_path(config, "seeds.shuffle", seed_shuffle);
      if (o_s4->count()) set_path(config, "seeds.synthetic", seed_synth);
      if (o_tf->count()) set_path(config, "transfer_source", transfer_source);
      if (o_save->count()) set_path(config, "save_all_snapshots", save_all_snapshots);

      const std::string config_text = config.dump();
      if (print_effective) {
        OwnedString effective{ricnn_effective_config(config_text.c_str())};
        if (!effective) return fail_with_last_error("config");
        std::cout << effective.text << "\n";
        return 0;
      }
      OwnedString report{ricnn_run(config_text.c_str(), output_dir.c_str())};
      if (!report) return fail_with_last_error("run");
      std::cout << report.text << "\n";
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const std::string base = load_json_file(sweep_config).dump();
      const std::string grid = load_json_file(sweep_grid).dump();
      OwnedString result{ricnn_sweep(base.c_str(), grid.c_str(), sweep_out.c_str(), jobs)};
      if (!result) return fail_with_last_error("sweep");
      std::cout << result.text << "\n";
      std::cout << "comparison table: " << sweep_out << "/comparison.csv\n";
      return 0;
    }

    if (gen_cmd->parsed()) {
      json spec;
      spec["n_stocks"] = gen_stocks;
      spec["n_steps"] = gen_steps;
      spec["signal"] = gen_signal;
      spec["noise_scale"] = gen_noise;
      spec["turnover_rate"] = gen_turnover;
      spec["seed"] = gen_seed;
      ricnn_panel* panel = ricnn_panel_generate(spec.dump().c_str());
      if (panel == nullptr) return fail_with_last_error("gen-data");
      const int rc = ricnn_panel_save_csv(panel, gen_out.c_str());
      const int steps = ricnn_panel_steps(panel);
      ricnn_panel_free(panel);
      if (rc != RICNN_OK) return fail_with_last_error("gen-data");
      std::cout << "wrote " << gen_out << " (" << steps << " time steps)\n";
      return 0;
    }

    if (rec_cmd->parsed()) {
      OwnedString metrics{ricnn_recompute_metrics(rec_series.c_str())};
      if (!metrics) return fail_with_last_error("recompute-metrics");
      std::cout << metrics.text << "\n";
      if (!rec_report.empty()) {
        if (ricnn_verify_report(rec_report.c_str(), rec_series.c_str()) != RICNN_OK) {
          return fail_with_last_error("verify");
        }
        std::cout << "report matches series at 1e-12 relative tolerance\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
