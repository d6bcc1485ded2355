// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0

// Exercises the shared-library surface exactly as an external consumer
// would: through ricnn.h alone.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "ricnn.h"

namespace {

struct Owned {
  char* text = nullptr;
  ~Owned() { ricnn_string_free(text); }
  explicit operator bool() const { return text != nullptr; }
  std::string str() const { return text ? std::string(text) : std::string(); }
};

const char* kRunConfig = R"({
  "panel": {"synthetic": {"n_stocks": 15, "n_steps": 140, "signal": "nonlinear",
                           "noise_scale": 0.01, "turnover_rate": 0.0}},
  "model": "lasso",
  "policy": {"window": 10},
  "lasso": {"lambda": 0.001, "tol": 0.001, "max_iter": 100},
  "evaluation": {"t_start": 24, "t_end": 28}
})";

std::filesystem::path scratch(const std::string& leaf) {
  std::filesystem::create_directories("test_tmp/capi");
  return std::filesystem::path("test_tmp/capi") / leaf;
}

}  // namespace

TEST_CASE("version and error state are reachable") {
  CHECK(std::strlen(ricnn_version()) > 0);
  CHECK(ricnn_last_error_code() == RICNN_OK);
}

TEST_CASE("panels generate, save and reload through the C surface") {
  ricnn_panel* panel = ricnn_panel_generate(
      R"({"n_stocks": 12, "n_steps": 140, "signal": "none", "noise_scale": 0.01,
          "turnover_rate": 0.0, "seed": 9})");
  REQUIRE(panel != nullptr);
  CHECK(ricnn_panel_steps(panel) == 140);
  CHECK(ricnn_panel_universe_size(panel, 1) == 12);
  CHECK(ricnn_panel_universe_size(panel, 999) == 0);

  const std::string path = scratch("panel.csv").string();
  REQUIRE(ricnn_panel_save_csv(panel, path.c_str()) == RICNN_OK);
  ricnn_panel_free(panel);

  ricnn_panel* loaded = ricnn_panel_load_csv(path.c_str(), nullptr);
  REQUIRE(loaded != nullptr);
  CHECK(ricnn_panel_steps(loaded) == 140);
  ricnn_panel_free(loaded);
}

TEST_CASE("panel errors set a code and message") {
  CHECK(ricnn_panel_load_csv("does_not_exist.csv", nullptr) == nullptr);
  CHECK(ricnn_last_error_code() != RICNN_OK);
  CHECK(std::strlen(ricnn_last_error()) > 0);

  CHECK(ricnn_panel_generate(R"({"n_stocks": 2})") == nullptr);
  CHECK(ricnn_last_error_code() == RICNN_ERR_CONFIG);

  CHECK(ricnn_panel_generate("{{{") == nullptr);
  CHECK(ricnn_last_error_code() == RICNN_ERR_CONFIG);

  CHECK(ricnn_panel_load_csv(nullptr, nullptr) == nullptr);
  CHECK(ricnn_last_error_code() == RICNN_ERR_INVALID_ARG);
}

TEST_CASE("effective config resolves defaults") {
  Owned effective{ricnn_effective_config(kRunConfig)};
  REQUIRE(effective);
  CHECK(effective.str().find("\"v_stop\": 0.2") != std::string::npos);
  CHECK(effective.str().find("\"batch_size\": 300") != std::string::npos);

  CHECK(ricnn_effective_config(R"({"model": "nope"})") == nullptr);
  CHECK(ricnn_last_error_code() == RICNN_ERR_CONFIG);
}

TEST_CASE("a full run works through the C surface") {
  const std::string outdir = scratch("run").string();
  Owned report{ricnn_run(kRunConfig, outdir.c_str())};
  REQUIRE(report);
  CHECK(report.str().find("config_hash") != std::string::npos);
  CHECK(std::filesystem::exists(scratch("run") / "series.csv"));

  const std::string report_path = (scratch("run") / "report.json").string();
  const std::string series_path = (scratch("run") / "series.csv").string();
  CHECK(ricnn_verify_report(report_path.c_str(), series_path.c_str()) == RICNN_OK);

  Owned metrics{ricnn_recompute_metrics(series_path.c_str())};
  REQUIRE(metrics);
  CHECK(metrics.str().find("max_drawdown") != std::string::npos);
}

TEST_CASE("config errors exit through the config code") {
  CHECK(ricnn_run(R"({"model": "lasso"})", "test_tmp/capi/none") == nullptr);
  CHECK(ricnn_last_error_code() == RICNN_ERR_CONFIG);
  CHECK(ricnn_run(nullptr, "x") == nullptr);
  CHECK(ricnn_last_error_code() == RICNN_ERR_INVALID_ARG);
}

TEST_CASE("sweeps run through the C surface") {
  const std::string outdir = scratch("sweep").string();
  Owned result{ricnn_sweep(kRunConfig, R"({"lasso.lambda": [0.01, 0.001]})",
                           outdir.c_str(), 2)};
  REQUIRE(result);
  CHECK(result.str().find("p000") != std::string::npos);
  CHECK(result.str().find("p001") != std::string::npos);
  CHECK(std::filesystem::exists(scratch("sweep") / "comparison.csv"));
}
