// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <fstream>

#include "helpers.hpp"
#include "ricnn/metrics.hpp"
#include "ricnn/panel.hpp"

using namespace ricnn;
using ricnn::testing::TempDir;

namespace {

std::string factor_header() {
  std::string out;
  for (const auto& name : default_factor_names()) out += "," + name;
  return out;
}

/// A minimal well-formed row: all 20 factors set to `base + j`.
std::string data_row(const std::string& stock, int t, double base, double ret) {
  std::string row = stock + "," + std::to_string(t);
  for (int j = 0; j < kFactorCount; ++j) {
    row += "," + std::to_string(base + j);
  }
  return row + "," + std::to_string(ret);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("load_panel round-trips a well-formed file") {
  TempDir dir("panel_roundtrip");
  const std::string path = dir.file("panel.csv");
  std::string text = "stock,time" + factor_header() + ",return\n";
  text += data_row("AAA", 1, 0.25, 0.01) + "\n";
  text += data_row("BBB", 1, -1.5, -0.02) + "\n";
  text += data_row("CCC", 1, 3.0, 0.005) + "\n";
  text += data_row("AAA", 2, 0.5, 0.012) + "\n";
  text += data_row("BBB", 2, 1.0 / 3.0, 0.0) + "\n";
  text += data_row("CCC", 2, -0.125, 0.03) + "\n";
  write_file(path, text);

  const FactorPanel panel = load_panel(path);
  CHECK(panel.steps.size() == 2);
  CHECK(panel.step(1).universe.size() == 3);
  CHECK(panel.step(2).universe.size() == 3);
  CHECK(panel.step(1).universe == std::vector<std::string>{"AAA", "BBB", "CCC"});
  CHECK(panel.step(2).factors(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

  const std::string saved = dir.file("saved.csv");
  save_panel(panel, saved);
  CHECK(ricnn::testing::panels_equal(panel, load_panel(saved)));
}

TEST_CASE("load_panel preserves every bit through save/load") {
  TempDir dir("panel_bits");
  // values exercising shortest-round-trip formatting
  FactorPanel panel = ricnn::testing::make_panel(
      3, 2,
      [](int i, int t, int j) {
        return std::sin(i * 12.9898 + t * 78.233 + j) * 43758.5453;
      },
      [](int i, int t) { return 0.001 * i - 0.0001 * t; });
  panel.steps[1].factors(1, 4) = std::numeric_limits<double>::quiet_NaN();  // missing

  const std::string path = dir.file("panel.csv");
  save_panel(panel, path);
  CHECK(ricnn::testing::panels_equal(panel, load_panel(path)));
}

TEST_CASE("load_panel rejects a duplicated (stock, time) row") {
  TempDir dir("panel_dup");
  const std::string path = dir.file("panel.csv");
  std::string text = "stock,time" + factor_header() + ",return\n";
  text += data_row("A", 1, 0, 0.01) + "\n";
  text += data_row("A", 1, 1, 0.02) + "\n";
  write_file(path, text);
  try {
    load_panel(path);
    FAIL("expected integrity error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Integrity);
    CHECK(std::string(e.what()).find("stock=A") != std::string::npos);
    CHECK(std::string(e.what()).find("t=1") != std::string::npos);
  }
}

TEST_CASE("load_panel rejects non-contiguous time indices") {
  TempDir dir("panel_gap");
  const std::string path = dir.file("panel.csv");
  std::string text = "stock,time" + factor_header() + ",return\n";
  text += data_row("A", 1, 0, 0.01) + "\n";
  text += data_row("A", 3, 1, 0.02) + "\n";
  write_file(path, text);
  try {
    load_panel(path);
    FAIL("expected integrity error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Integrity);
    CHECK(std::string(e.what()).find("non-contiguous") != std::string::npos);
  }
}

TEST_CASE("load_panel rejects a missing mapped column") {
  TempDir dir("panel_col");
  const std::string path = dir.file("panel.csv");
  write_file(path, "stock,time,only_one_factor,return\nA,1,0.5,0.01\n");
  try {
    load_panel(path);
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Schema);
  }
}

TEST_CASE("load_panel reports unparseable numerics instead of dropping rows") {
  TempDir dir("panel_badnum");
  const std::string path = dir.file("panel.csv");
  std::string text = "stock,time" + factor_header() + ",return\n";
  text += data_row("A", 1, 0, 0.01) + "\n";
  std::string bad = data_row("B", 1, 0, 0.01);
  bad.replace(bad.find("0.000000"), 8, "oops!!!!");
  text += bad + "\n";
  write_file(path, text);
  try {
    load_panel(path);
    FAIL("expected integrity error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Integrity);
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
}

TEST_CASE("empty factor cells load as missing and impute to the median") {
  TempDir dir("panel_missing");
  const std::string path = dir.file("panel.csv");
  std::string text = "stock,time" + factor_header() + ",return\n";
  // factor 0 of A is empty; B, C, D carry 1, 2, 4
  std::string row_a = data_row("A", 1, 9, 0.01);
  const std::string needle = "A,1,9.000000";
  row_a.replace(row_a.find(needle), needle.size(), "A,1,");
  text += row_a + "\n";
  text += data_row("B", 1, 1, 0.0) + "\n";
  text += data_row("C", 1, 2, 0.0) + "\n";
  text += data_row("D", 1, 4, 0.0) + "\n";
  write_file(path, text);

  const FactorPanel panel = load_panel(path);
  CHECK(std::isnan(panel.step(1).factors(0, 0)));

  const FactorPanel fixed = impute_missing(panel);
  CHECK(fixed.step(1).factors(0, 0) == 2.0);  // median of {1, 2, 4}
  CHECK_FALSE(fixed.step(1).factors.hasNaN());
}

TEST_CASE("impute_missing leaves complete panels alone and averages even splits") {
  FactorPanel panel = ricnn::testing::make_panel(
      4, 1, [](int i, int, int j) { return i + j * 0.1; },
      [](int, int) { return 0.0; });
  const FactorPanel same = impute_missing(panel);
  CHECK(ricnn::testing::panels_equal(panel, same));

  // two missing among {1, 3}: both get the even-split median 2
  panel.steps[0].factors(0, 5) = std::numeric_limits<double>::quiet_NaN();
  panel.steps[0].factors(1, 5) = std::numeric_limits<double>::quiet_NaN();
  panel.steps[0].factors(2, 5) = 1.0;
  panel.steps[0].factors(3, 5) = 3.0;
  const FactorPanel fixed = impute_missing(panel);
  CHECK(fixed.steps[0].factors(0, 5) == 2.0);
  CHECK(fixed.steps[0].factors(1, 5) == 2.0);
}

TEST_CASE("impute_missing flags a fully missing column") {
  FactorPanel panel = ricnn::testing::make_panel(
      3, 1, [](int i, int, int j) { return i * 1.0 + j; },
      [](int, int) { return 0.0; });
  for (int i = 0; i < 3; ++i) {
    panel.steps[0].factors(i, 7) = std::numeric_limits<double>::quiet_NaN();
  }
  const FactorPanel fixed = impute_missing(panel);
  CHECK(fixed.steps[0].all_missing[7]);
  CHECK(fixed.steps[0].factors.col(7).isZero());
}

TEST_CASE("factor lags shift columns on load") {
  TempDir dir("panel_lag");
  const std::string path = dir.file("panel.csv");
  std::string text = "stock,time" + factor_header() + ",return\n";
  // factor j of stock A at time t is t*100 + j
  for (int t = 1; t <= 5; ++t) {
    std::string row = "A," + std::to_string(t);
    for (int j = 0; j < kFactorCount; ++j) row += "," + std::to_string(t * 100 + j);
    row += ",0.01";
    text += row + "\n";
  }
  write_file(path, text);

  CsvSchema schema;
  schema.factor_lags[default_factor_names()[2]] = 3;
  const FactorPanel panel = load_panel(path, schema);
  CHECK(panel.step(5).factors(0, 2) == 202.0);  // value from t=2
  CHECK(panel.step(5).factors(0, 3) == 503.0);  // unlagged column untouched
  CHECK(std::isnan(panel.step(2).factors(0, 2)));  // no t=-1 to pull from
}

TEST_CASE("generate_panel is a pure function of its spec") {
  SyntheticSpec spec;
  spec.n_stocks = 15;
  spec.n_steps = 140;
  spec.turnover_rate = 0.1;
  spec.seed = 99;
  const FactorPanel a = generate_panel(spec);
  const FactorPanel b = generate_panel(spec);
  CHECK(ricnn::testing::panels_equal(a, b));

  spec.seed = 100;
  CHECK_FALSE(ricnn::testing::panels_equal(a, generate_panel(spec)));
}

TEST_CASE("generate_panel with no signal and no noise returns exact zeros") {
  SyntheticSpec spec;
  spec.n_stocks = 10;
  spec.n_steps = 140;
  spec.signal_kind = SignalKind::None;
  spec.noise_scale = 0.0;
  spec.turnover_rate = 0.0;
  const FactorPanel panel = generate_panel(spec);
  for (const TimeStep& step : panel.steps) {
    CHECK(step.returns.isZero());
  }
}

TEST_CASE("noise-free nonlinear returns rank exactly as the planted signal") {
  SyntheticSpec spec;
  spec.n_stocks = 25;
  spec.n_steps = 140;
  spec.signal_kind = SignalKind::Nonlinear;
  spec.noise_scale = 0.0;
  spec.turnover_rate = 0.04;
  spec.seed = 5;
  const FactorPanel panel = generate_panel(spec);

  for (int t : {3, 60, 139}) {
    const TimeStep& now = panel.step(t);
    const TimeStep& next = panel.step(t + 1);
    const Vec signal = planted_signal(spec, now);
    std::vector<double> sig, ret;
    for (std::size_t i = 0; i < now.universe.size(); ++i) {
      const int row = next.row_of(now.universe[i]);
      if (row < 0) continue;  // churned out before realization
      sig.push_back(signal[static_cast<Eigen::Index>(i)]);
      ret.push_back(next.returns[row]);
    }
    REQUIRE(sig.size() >= 2);
    const double ic = rank_ic(
        Eigen::Map<const Vec>(sig.data(), static_cast<Eigen::Index>(sig.size())),
        Eigen::Map<const Vec>(ret.data(), static_cast<Eigen::Index>(ret.size())));
    CHECK(ic == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("generate_panel churns the universe at the requested rate") {
  SyntheticSpec spec;
  spec.n_stocks = 20;
  spec.n_steps = 140;
  spec.turnover_rate = 0.1;  // 2 stocks per step
  const FactorPanel panel = generate_panel(spec);
  const auto& u1 = panel.step(1).universe;
  const auto& u2 = panel.step(2).universe;
  CHECK(u1.size() == 20);
  CHECK(u2.size() == 20);
  int shared = 0;
  for (const auto& s : u2) {
    shared += panel.step(1).row_of(s) >= 0 ? 1 : 0;
  }
  CHECK(shared == 18);
}

TEST_CASE("generate_panel validates its spec") {
  SyntheticSpec spec;
  spec.n_stocks = 5;  // too few
  CHECK_THROWS_AS(generate_panel(spec), Error);
  spec.n_stocks = 10;
  spec.n_steps = 100;  // below the window+lag minimum
  CHECK_THROWS_AS(generate_panel(spec), Error);
  spec.n_steps = 140;
  spec.turnover_rate = 1.5;
  CHECK_THROWS_AS(generate_panel(spec), Error);
}
