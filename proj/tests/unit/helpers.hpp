// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ricnn/panel.hpp"

namespace ricnn::testing {

/// Fresh scratch directory under the build tree, wiped on construction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) : path("test_tmp/" + name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  std::string file(const std::string& leaf) const { return (path / leaf).string(); }
};

/// Panel with every stock present at every step. `factor` and `ret` map
/// (stock index, time, column) / (stock index, time) to values.
inline FactorPanel make_panel(
    int n_stocks, int n_steps,
    const std::function<double(int, int, int)>& factor,
    const std::function<double(int, int)>& ret) {
  FactorPanel panel;
  panel.factor_names = default_factor_names();
  for (int t = 1; t <= n_steps; ++t) {
    TimeStep step;
    step.index = t;
    for (int i = 0; i < n_stocks; ++i) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "S%03d", i + 1);
      step.universe.push_back(buf);
    }
    step.factors.resize(n_stocks, kFactorCount);
    step.returns.resize(n_stocks);
    step.all_missing.assign(kFactorCount, false);
    for (int i = 0; i < n_stocks; ++i) {
      for (int j = 0; j < kFactorCount; ++j) step.factors(i, j) = factor(i, t, j);
      step.returns[i] = ret(i, t);
    }
    panel.steps.push_back(std::move(step));
  }
  return panel;
}

/// Bitwise equality of two Eigen objects of the same shape.
template <typename A, typename B>
bool exact_equal(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

inline bool panels_equal(const FactorPanel& a, const FactorPanel& b) {
  if (a.factor_names != b.factor_names || a.steps.size() != b.steps.size()) return false;
  for (std::size_t s = 0; s < a.steps.size(); ++s) {
    const TimeStep& x = a.steps[s];
    const TimeStep& y = b.steps[s];
    if (x.index != y.index || x.universe != y.universe) return false;
    if (!exact_equal(x.returns, y.returns)) return false;
    for (Eigen::Index i = 0; i < x.factors.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.factors.cols(); ++j) {
        const double u = x.factors(i, j);
        const double v = y.factors(i, j);
        if (std::isnan(u) != std::isnan(v)) return false;
        if (!std::isnan(u) && u != v) return false;
      }
    }
  }
  return true;
}

}  // namespace ricnn::testing
