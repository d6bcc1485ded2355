// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ricnn/panel.hpp"
#include "ricnn/trainer.hpp"

// Committed acceptance fixtures. The synthetic panel, policy and seeds are
// frozen here; the recorded oracle-run values below them document what the
// committed configuration produced when the thresholds were frozen.

namespace ricnn::acceptance {

/// Panel behind the qualitative comparisons (criteria 6-8): a planted
/// threshold-interaction signal, mild churn, low noise.
inline SyntheticSpec committed_panel() {
  SyntheticSpec spec;
  spec.n_stocks = 50;
  spec.n_steps = 161;
  spec.signal_kind = SignalKind::Nonlinear;
  spec.noise_scale = 0.01;
  spec.turnover_rate = 0.02;
  spec.seed = 101;
  return spec;
}

/// A second, independently seeded region with the same planted relationship
/// (the transfer-learning source).
inline SyntheticSpec committed_source_region() {
  SyntheticSpec spec = committed_panel();
  spec.seed = 707;
  return spec;
}

inline TrainPolicy committed_policy() {
  TrainPolicy policy;  // v_init 0.16, v_stop 0.20, N=120, batch 300
  policy.max_epochs = 500;
  return policy;
}

/// Evaluation window: 26 out-of-sample steps.
inline constexpr int kEvalStart = 134;
inline constexpr int kEvalEnd = 159;

/// Model seed streams for the five repetitions.
inline Seeds committed_seeds(int k) {
  return Seeds{1000u + static_cast<unsigned>(k), 2000u + static_cast<unsigned>(k),
               3000u + static_cast<unsigned>(k), committed_panel().seed};
}

/// Fixed-epoch grid mirrored against the rank-IC stop (criterion 7).
inline constexpr int kEpochGrid[4] = {10, 20, 40, 80};

}  // namespace ricnn::acceptance
