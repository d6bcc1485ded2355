// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include "ricnn.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "ricnn/engine.hpp"

namespace {

using nlohmann::json;

thread_local std::string g_last_error;
thread_local int g_last_code = RICNN_OK;

void clear_error() {
  g_last_error.clear();
  g_last_code = RICNN_OK;
}

int record_error(const std::exception& e) {
  g_last_error = e.what();
  g_last_code = RICNN_ERR_RUNTIME;
  if (const auto* err = dynamic_cast<const ricnn::Error*>(&e)) {
    g_last_error = std::string(ricnn::error_code_name(err->code())) + ": " + e.what();
    if (err->code() == ricnn::ErrorCode::Config ||
        err->code() == ricnn::ErrorCode::Schema ||
        err->code() == ricnn::ErrorCode::Parameter) {
      g_last_code = RICNN_ERR_CONFIG;
    }
  }
  return g_last_code;
}

int record_invalid_arg(const char* what) {
  g_last_error = what;
  g_last_code = RICNN_ERR_INVALID_ARG;
  return g_last_code;
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

ricnn::CsvSchema schema_from_json(const char* schema_json) {
  ricnn::CsvSchema schema;
  if (schema_json == nullptr || *schema_json == '\0') return schema;
  json doc;
  try {
    doc = json::parse(schema_json);
  } catch (const json::exception& e) {
    throw ricnn::Error(ricnn::ErrorCode::Schema,
                       "schema is not valid JSON: " + std::string(e.what()));
  }
  if (doc.contains("columns")) {
    const json& cols = doc.at("columns");
    if (cols.contains("stock")) schema.stock_column = cols.at("stock").get<std::string>();
    if (cols.contains("time")) schema.time_column = cols.at("time").get<std::string>();
    if (cols.contains("return")) schema.return_column = cols.at("return").get<std::string>();
    if (cols.contains("factors")) {
      schema.factor_columns = cols.at("factors").get<std::vector<std::string>>();
    }
  }
  if (doc.contains("factor_lags")) {
    for (auto& [name, lag] : doc.at("factor_lags").items()) {
      schema.factor_lags[name] = lag.get<int>();
    }
  }
  return schema;
}

}  // namespace

struct ricnn_panel {
  ricnn::FactorPanel panel;
};

extern "C" {

const char* ricnn_version(void) { return "0.1.0"; }

const char* ricnn_last_error(void) { return g_last_error.c_str(); }

int ricnn_last_error_code(void) { return g_last_code; }

void ricnn_string_free(char* text) { delete[] text; }

ricnn_panel* ricnn_panel_load_csv(const char* path, const char* schema_json) {
  clear_error();
  if (path == nullptr) {
    record_invalid_arg("path is NULL");
    return nullptr;
  }
  try {
    auto* handle = new ricnn_panel{ricnn::load_panel(path, schema_from_json(schema_json))};
    return handle;
  } catch (const std::exception& e) {
    record_error(e);
    return nullptr;
  }
}

ricnn_panel* ricnn_panel_generate(const char* spec_json) {
  clear_error();
  if (spec_json == nullptr) {
    record_invalid_arg("spec_json is NULL");
    return nullptr;
  }
  try {
    json doc;
    try {
      doc = json::parse(spec_json);
    } catch (const json::exception& e) {
      throw ricnn::Error(ricnn::ErrorCode::Parameter,
                         "spec is not valid JSON: " + std::string(e.what()));
    }
    ricnn::SyntheticSpec spec;
    if (doc.contains("n_stocks")) spec.n_stocks = doc.at("n_stocks").get<int>();
    if (doc.contains("n_steps")) spec.n_steps = doc.at("n_steps").get<int>();
    if (doc.contains("signal")) {
      const std::string kind = doc.at("signal").get<std::string>();
      if (kind == "linear") {
        spec.signal_kind = ricnn::SignalKind::Linear;
      } else if (kind == "nonlinear") {
        spec.signal_kind = ricnn::SignalKind::Nonlinear;
      } else if (kind == "none") {
        spec.signal_kind = ricnn::SignalKind::None;
      } else {
        throw ricnn::Error(ricnn::ErrorCode::Parameter, "unknown signal kind: " + kind);
      }
    }
    if (doc.contains("noise_scale")) spec.noise_scale = doc.at("noise_scale").get<double>();
    if (doc.contains("turnover_rate")) {
      spec.turnover_rate = doc.at("turnover_rate").get<double>();
    }
    if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
    return new ricnn_panel{ricnn::generate_panel(spec)};
  } catch (const std::exception& e) {
    record_error(e);
    return nullptr;
  }
}

int ricnn_panel_save_csv(const ricnn_panel* panel, const char* path) {
  clear_error();
  if (panel == nullptr || path == nullptr) {
    return record_invalid_arg("panel or path is NULL");
  }
  try {
    ricnn::save_panel(panel->panel, path);
    return RICNN_OK;
  } catch (const std::exception& e) {
    return record_error(e);
  }
}

int ricnn_panel_steps(const ricnn_panel* panel) {
  return panel == nullptr ? 0 : static_cast<int>(panel->panel.steps.size());
}

int ricnn_panel_universe_size(const ricnn_panel* panel, int time_index) {
  if (panel == nullptr || !panel->panel.has_step(time_index)) return 0;
  return static_cast<int>(panel->panel.step(time_index).universe.size());
}

void ricnn_panel_free(ricnn_panel* panel) { delete panel; }

char* ricnn_effective_config(const char* config_json) {
  clear_error();
  if (config_json == nullptr) {
    record_invalid_arg("config_json is NULL");
    return nullptr;
  }
  try {
    return copy_string(
        ricnn::effective_config_json(ricnn::parse_run_config(config_json)));
  } catch (const std::exception& e) {
    record_error(e);
    return nullptr;
  }
}

char* ricnn_run(const char* config_json, const char* output_dir) {
  clear_error();
  if (config_json == nullptr || output_dir == nullptr) {
    record_invalid_arg("config_json or output_dir is NULL");
    return nullptr;
  }
  try {
    const ricnn::RunConfig config = ricnn::parse_run_config(config_json);
    return copy_string(ricnn::report_to_json(ricnn::run(config, output_dir)));
  } catch (const std::exception& e) {
    record_error(e);
    return nullptr;
  }
}

char* ricnn_sweep(const char* config_json, const char* grid_json,
                  const char* output_dir, int jobs) {
  clear_error();
  if (config_json == nullptr || grid_json == nullptr || output_dir == nullptr) {
    record_invalid_arg("sweep argument is NULL");
    return nullptr;
  }
  try {
    const auto points = ricnn::sweep(config_json, grid_json, output_dir, jobs);
    json out = json::array();
    for (const auto& point : points) {
      json p;
      p["id"] = point.id;
      for (const auto& [key, value] : point.params) p["params"][key] = json::parse(value);
      p["ok"] = point.ok;
      if (!point.ok) p["error"] = point.error;
      out.push_back(std::move(p));
    }
    return copy_string(out.dump(1));
  } catch (const std::exception& e) {
    record_error(e);
    return nullptr;
  }
}

char* ricnn_recompute_metrics(const char* series_csv_path) {
  clear_error();
  if (series_csv_path == nullptr) {
    record_invalid_arg("series_csv_path is NULL");
    return nullptr;
  }
  try {
    return copy_string(ricnn::recompute_metrics_json(series_csv_path));
  } catch (const std::exception& e) {
    record_error(e);
    return nullptr;
  }
}

int ricnn_verify_report(const char* report_json_path, const char* series_csv_path) {
  clear_error();
  if (report_json_path == nullptr || series_csv_path == nullptr) {
    return record_invalid_arg("report or series path is NULL");
  }
  try {
    ricnn::verify_report(report_json_path, series_csv_path);
    return RICNN_OK;
  } catch (const std::exception& e) {
    return record_error(e);
  }
}

}  // extern "C"
