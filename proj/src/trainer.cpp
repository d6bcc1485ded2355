// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include "ricnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "ricnn/metrics.hpp"

namespace ricnn {

void TrainPolicy::validate() const {
  if (kind == Kind::RankIC) {
    if (!(v_init > 0.0 && v_init < v_stop && v_stop <= 1.0)) {
      throw Error(ErrorCode::Parameter,
                  "rank-IC thresholds need 0 < v_init < v_stop <= 1");
    }
  } else if (epochs < 0) {
    throw Error(ErrorCode::Parameter, "epoch target must be >= 0");
  }
  if (max_epochs < 1) throw Error(ErrorCode::Parameter, "max_epochs must be >= 1");
  if (window < 1) throw Error(ErrorCode::Parameter, "window must be >= 1");
  if (batch_size < 2) throw Error(ErrorCode::Parameter, "batch_size must be >= 2");
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::ReachedStop: return "reached_stop";
    case Termination::ReachedEpochTarget: return "reached_epoch_target";
    case Termination::HitCap: return "hit_cap";
  }
  return "unknown";
}

namespace {

void require_window_steps(const SampleSet& samples) {
  if (samples.steps.empty()) {
    throw Error(ErrorCode::Parameter, "window_rank_ic: empty sample set");
  }
  for (const StepSamples& step : samples.steps) {
    if (step.stock_ids.size() < 2) {
      throw Error(ErrorCode::DegenerateStep,
                  "window step t=" + std::to_string(step.t) + " has " +
                      std::to_string(step.stock_ids.size()) +
                      " samples; need at least 2");
    }
  }
}

/// Mean per-step IC of predictions laid out in window order.
double window_ic_of_pooled(const Vec& pooled_scores, const SampleSet& samples) {
  double sum = 0.0;
  Eigen::Index offset = 0;
  for (const StepSamples& step : samples.steps) {
    const auto n = static_cast<Eigen::Index>(step.stock_ids.size());
    sum += rank_ic(step.targets, pooled_scores.segment(offset, n));
    offset += n;
  }
  return sum / static_cast<double>(samples.steps.size());
}

}  // namespace

double window_rank_ic(const std::function<Vec(const Mat&)>& scorer,
                      const SampleSet& samples) {
  require_window_steps(samples);
  double sum = 0.0;
  for (const StepSamples& step : samples.steps) {
    sum += rank_ic(step.targets, scorer(step.features));
  }
  return sum / static_cast<double>(samples.steps.size());
}

double window_rank_ic(const Network& net, const SampleSet& samples) {
  require_window_steps(samples);
  const auto total = static_cast<Eigen::Index>(samples.total_samples());
  Mat pooled(total, kFeatureDim);
  Eigen::Index row = 0;
  for (const StepSamples& step : samples.steps) {
    const auto n = static_cast<Eigen::Index>(step.stock_ids.size());
    pooled.middleRows(row, n) = step.features;
    row += n;
  }
  // one batched Eval pass; per-row results do not depend on other rows
  return window_ic_of_pooled(net.forward_eval(pooled), samples);
}

StepSeeds step_seeds(const Seeds& seeds, int t) {
  StepSeeds out;
  const auto salt = static_cast<std::uint64_t>(t);
  out.net_init = derive_seed(seeds.net_init, salt);
  out.dropout = derive_seed(seeds.dropout, salt);
  out.shuffle = derive_seed(seeds.shuffle, salt);
  return out;
}

TrainOutcome train_one_step(Network& net, const SampleSet& samples,
                            const TrainPolicy& policy,
                            std::mt19937_64& shuffle_rng,
                            std::mt19937_64& dropout_rng) {
  policy.validate();
  const int t = samples.t_high + 1;

  const auto total = static_cast<Eigen::Index>(samples.total_samples());
  if (total < 2) {
    throw Error(ErrorCode::EmptySampleSet, "training window has fewer than 2 samples");
  }
  Mat pool(total, kFeatureDim);
  Vec pool_targets(total);
  Eigen::Index row = 0;
  for (const StepSamples& step : samples.steps) {
    const auto n = static_cast<Eigen::Index>(step.stock_ids.size());
    if (n > 0) {
      pool.middleRows(row, n) = step.features;
      pool_targets.segment(row, n) = step.targets;
      row += n;
    }
  }

  require_window_steps(samples);
  TrainOutcome outcome;
  AdamState adam = AdamState::init(net);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);

  std::optional<ModelSnapshot> best;
  auto snapshot_now = [&](int epoch, double ic) {
    return ModelSnapshot{net, t, epoch, ic};
  };

  const bool rank_gated = policy.kind == TrainPolicy::Kind::RankIC;
  const int epoch_limit = rank_gated ? policy.max_epochs : policy.epochs;

  for (int epoch = 1; epoch <= epoch_limit; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    Eigen::Index done = 0;
    while (done < total) {
      Eigen::Index take = std::min<Eigen::Index>(policy.batch_size, total - done);
      // a trailing single row cannot carry batch statistics; extend this batch
      if (total - done - take == 1) take += 1;
      Mat xb(take, kFeatureDim);
      Vec yb(take);
      for (Eigen::Index k = 0; k < take; ++k) {
        xb.row(k) = pool.row(order[static_cast<std::size_t>(done + k)]);
        yb[k] = pool_targets[order[static_cast<std::size_t>(done + k)]];
      }
      auto [loss, grads] = net.loss_and_grads(xb, yb, dropout_rng);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::TrainingDiverged,
                    "non-finite loss at t=" + std::to_string(t) + ", epoch " +
                        std::to_string(epoch));
      }
      adam_step(net, grads, adam);
      loss_sum += loss * static_cast<double>(take);
      done += take;
    }
    outcome.loss_trace.push_back(loss_sum / static_cast<double>(total));

    const double ic = window_ic_of_pooled(net.forward_eval(pool), samples);
    outcome.rank_ic_trace.push_back(ic);
    outcome.epochs_run = epoch;

    if (rank_gated) {
      if (!outcome.init_seed_model && ic >= policy.v_init) {
        outcome.init_seed_model = snapshot_now(epoch, ic);
      }
      if (!best || ic > best->train_rank_ic) best = snapshot_now(epoch, ic);
      if (ic >= policy.v_stop) {
        outcome.final_model = snapshot_now(epoch, ic);
        outcome.terminated = Termination::ReachedStop;
        return outcome;
      }
    }
  }

  if (rank_gated) {
    // never reached v_stop: fall back to the best epoch seen, flagged
    outcome.terminated = Termination::HitCap;
    outcome.final_model = std::move(*best);
    warn("rank-IC stop not reached by epoch cap " + std::to_string(policy.max_epochs) +
         " at t=" + std::to_string(t) + "; using best epoch " +
         std::to_string(outcome.final_model->epoch) + " (IC " +
         std::to_string(outcome.final_model->train_rank_ic) + ")");
  } else {
    outcome.terminated = Termination::ReachedEpochTarget;
    const double ic = outcome.rank_ic_trace.empty() ? 0.0 : outcome.rank_ic_trace.back();
    outcome.final_model = ModelSnapshot{net, t, outcome.epochs_run, ic};
  }
  return outcome;
}

RicnnStepModel::RicnnStepModel(NetworkConfig net_config, TrainPolicy policy,
                               Seeds seeds, bool warm_start,
                               std::optional<ModelSnapshot> transfer_source,
                               int transfer_layers, bool collect_snapshots)
    : net_config_(std::move(net_config)),
      policy_(std::move(policy)),
      seeds_(seeds),
      warm_start_(warm_start),
      transfer_source_(std::move(transfer_source)),
      transfer_layers_(transfer_layers),
      collect_snapshots_(collect_snapshots) {
  net_config_.validate();
  policy_.validate();
}

Network RicnnStepModel::initial_network_for(int t) const {
  if (warm_start_ && (first_step_ >= 0 && t > first_step_) && prev_init_) {
    return prev_init_->net;
  }
  NetworkConfig cfg = net_config_;
  cfg.seed = step_seeds(seeds_, t).net_init;
  Network net = Network::init(cfg);
  if ((first_step_ < 0 || t == first_step_) && transfer_source_) {
    net.copy_layers_from(transfer_source_->net, transfer_layers_);
  }
  return net;
}

StepTrainInfo RicnnStepModel::fit(const SampleSet& window_samples, int t) {
  if (first_step_ < 0) first_step_ = t;
  Network net = initial_network_for(t);

  const StepSeeds ss = step_seeds(seeds_, t);
  auto shuffle_rng = make_rng(ss.shuffle);
  auto dropout_rng = make_rng(ss.dropout);
  TrainOutcome outcome =
      train_one_step(net, window_samples, policy_, shuffle_rng, dropout_rng);

  prev_init_ = outcome.init_seed_model;
  current_final_ = outcome.final_model;
  if (collect_snapshots_ && current_final_) collected_.push_back(*current_final_);

  StepTrainInfo info;
  info.t = t;
  info.loss_trace = std::move(outcome.loss_trace);
  info.ic_trace = std::move(outcome.rank_ic_trace);
  info.terminated = outcome.terminated;
  info.epochs_run = outcome.epochs_run;
  return info;
}

Vec RicnnStepModel::score(const Mat& features) const {
  if (!current_final_) {
    throw Error(ErrorCode::Parameter, "score() before any fit()");
  }
  return current_final_->net.forward_eval(features);
}

std::optional<ModelSnapshot> RicnnStepModel::last_snapshot() const {
  return current_final_;
}

BacktestResult rolling_backtest(const NormalizedPanel& np, StepModel& model,
                                int t_start, int t_end) {
  const FactorPanel& panel = *np.panel;
  const int n = model.window();
  if (t_start < 14 + n) {
    throw Error(ErrorCode::Parameter,
                "t_start must be >= 14 + window (= " + std::to_string(14 + n) +
                    ") so lags, window and targets all exist");
  }
  if (t_end > panel.last_index() - 1) {
    throw Error(ErrorCode::Parameter, "t_end must be <= T-1");
  }
  if (t_start > t_end) {
    throw Error(ErrorCode::Parameter, "t_start must be <= t_end");
  }

  // per-step samples are window-independent; cache them as the window slides
  std::deque<StepSamples> cache;
  int cache_low = 0;
  auto window_for = [&](int t) {
    const int lo = t - n;
    const int hi = t - 1;
    if (cache.empty()) {
      for (int s = lo; s <= hi; ++s) cache.push_back(build_step_samples(np, s));
      cache_low = lo;
    } else {
      while (cache_low < lo) {
        cache.pop_front();
        ++cache_low;
      }
      while (cache_low + static_cast<int>(cache.size()) <= hi) {
        cache.push_back(build_step_samples(np, cache_low + static_cast<int>(cache.size())));
      }
    }
    SampleSet set;
    set.t_low = lo;
    set.t_high = hi;
    set.steps.assign(cache.begin(), cache.end());
    if (set.total_samples() == 0) {
      throw Error(ErrorCode::EmptySampleSet,
                  "no eligible stock in window ending at t=" + std::to_string(hi));
    }
    return set;
  };

  BacktestResult result;
  for (int t = t_start; t <= t_end; ++t) {
    SampleSet window_samples = window_for(t);
    try {
      result.train_info.push_back(model.fit(window_samples, t));
    } catch (const Error& e) {
      throw Error(e.code(), "at t=" + std::to_string(t) + ": " + e.what());
    }

    FeatureRows rows = build_features_at(np, t);
    if (rows.stock_ids.empty()) {
      throw Error(ErrorCode::DegenerateStep,
                  "universe at t=" + std::to_string(t) + " empty after eligibility");
    }
    StepScores scores;
    scores.t = t;
    scores.stock_ids = std::move(rows.stock_ids);
    scores.scores = model.score(rows.features);
    for (Eigen::Index i = 0; i < scores.scores.size(); ++i) {
      if (!std::isfinite(scores.scores[i])) {
        throw Error(ErrorCode::TrainingDiverged,
                    "non-finite score at t=" + std::to_string(t));
      }
    }
    result.scores.push_back(std::move(scores));
  }
  result.final_snapshot = model.last_snapshot();
  return result;
}

BacktestResult rolling_backtest(const NormalizedPanel& np,
                                const NetworkConfig& net_config,
                                const TrainPolicy& policy, int t_start, int t_end,
                                bool warm_start, const Seeds& seeds,
                                const std::optional<ModelSnapshot>& transfer_source) {
  RicnnStepModel model(net_config, policy, seeds, warm_start, transfer_source);
  return rolling_backtest(np, model, t_start, t_end);
}

}  // namespace ricnn
