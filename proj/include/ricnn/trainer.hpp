// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ricnn/features.hpp"
#include "ricnn/net.hpp"
#include "ricnn/rng.hpp"

namespace ricnn {

/// When and how a window training run stops.
///
/// RankIC mode implements the gated protocol: after every epoch the
/// window-average rank IC is measured in Eval mode; the first epoch it
/// reaches v_init the parameters are captured as the warm-start seed for the
/// next time step, and the first epoch it reaches v_stop training ends and
/// that state is the final model. FixedEpoch mode runs exactly `epochs`
/// epochs (the conventional baseline).
struct TrainPolicy {
  enum class Kind { RankIC, FixedEpoch };
  Kind kind = Kind::RankIC;
  double v_init = 0.16;
  double v_stop = 0.20;
  int epochs = 0;        // FixedEpoch target, >= 0
  int max_epochs = 500;  // RankIC safety cap
  int window = 120;      // sliding window N, in time steps
  int batch_size = 300;

  void validate() const;
};

enum class Termination { ReachedStop, ReachedEpochTarget, HitCap };

const char* termination_name(Termination t);

/// Network state captured at a threshold crossing, the unit of warm start
/// and cross-region transfer.
struct ModelSnapshot {
  Network net;
  int time_index = 0;
  int epoch = 0;
  double train_rank_ic = 0.0;
};

void save_snapshot(const ModelSnapshot& snapshot, const std::string& path);
ModelSnapshot load_snapshot(const std::string& path);

struct TrainOutcome {
  std::optional<ModelSnapshot> final_model;
  std::optional<ModelSnapshot> init_seed_model;  // RankIC mode, at v_init
  int epochs_run = 0;
  std::vector<double> rank_ic_trace;  // window-average rank IC per epoch
  std::vector<double> loss_trace;     // mean training MSE per epoch
  Termination terminated = Termination::ReachedEpochTarget;
};

/// Mean over window steps of rank_ic(targets at t', scores at t').
/// Every step needs >= 2 samples.
double window_rank_ic(const std::function<Vec(const Mat&)>& scorer,
                      const SampleSet& samples);
double window_rank_ic(const Network& net, const SampleSet& samples);

/// One rolling step's training on the window `samples` (steps t-N .. t-1).
/// Shuffles the pooled samples every epoch, slices mini-batches of
/// policy.batch_size (a trailing 1-row batch is folded into its
/// predecessor), and takes one Adam step per batch. Adam state is fresh.
TrainOutcome train_one_step(Network& net, const SampleSet& samples,
                            const TrainPolicy& policy,
                            std::mt19937_64& shuffle_rng,
                            std::mt19937_64& dropout_rng);

/// Per-step seeds for the three model streams, derived from the named
/// config seeds so that isolated step trainings can reproduce a rolling run.
struct StepSeeds {
  std::uint64_t net_init = 0;
  std::uint64_t dropout = 0;
  std::uint64_t shuffle = 0;
};
StepSeeds step_seeds(const Seeds& seeds, int t);

struct StepScores {
  int t = 0;
  std::vector<std::string> stock_ids;
  Vec scores;
};

struct StepTrainInfo {
  int t = 0;
  std::vector<double> loss_trace;
  std::vector<double> ic_trace;
  Termination terminated = Termination::ReachedEpochTarget;
  int epochs_run = 0;
};

struct BacktestResult {
  std::vector<StepScores> scores;
  std::vector<StepTrainInfo> train_info;
  std::optional<ModelSnapshot> final_snapshot;   // last step's final model
  std::vector<ModelSnapshot> step_snapshots;     // only when collected
};

/// Anything that can be refit on a window and then score feature rows.
/// The walk-forward driver below is model-agnostic; the network and the
/// linear baselines all run through it.
class StepModel {
 public:
  virtual ~StepModel() = default;
  virtual int window() const = 0;
  virtual StepTrainInfo fit(const SampleSet& window_samples, int t) = 0;
  virtual Vec score(const Mat& features) const = 0;
  virtual std::optional<ModelSnapshot> last_snapshot() const { return std::nullopt; }
};

/// The rank-IC-gated network model. Initialization at step t is, in order:
/// the transfer source's first `transfer_layers` hidden layers at the first
/// step; the previous step's v_init snapshot under warm start; a fresh
/// seeded init otherwise.
class RicnnStepModel : public StepModel {
 public:
  RicnnStepModel(NetworkConfig net_config, TrainPolicy policy, Seeds seeds,
                 bool warm_start, std::optional<ModelSnapshot> transfer_source,
                 int transfer_layers = 4, bool collect_snapshots = false);

  int window() const override { return policy_.window; }
  StepTrainInfo fit(const SampleSet& window_samples, int t) override;
  Vec score(const Mat& features) const override;
  std::optional<ModelSnapshot> last_snapshot() const override;
  const std::vector<ModelSnapshot>& collected_snapshots() const { return collected_; }

  /// Parameters the next fit would start from (exposed for protocol tests).
  Network initial_network_for(int t) const;

 private:
  NetworkConfig net_config_;
  TrainPolicy policy_;
  Seeds seeds_;
  bool warm_start_;
  std::optional<ModelSnapshot> transfer_source_;
  int transfer_layers_;
  bool collect_snapshots_;
  int first_step_ = -1;
  std::optional<ModelSnapshot> prev_init_;
  std::optional<ModelSnapshot> current_final_;
  std::vector<ModelSnapshot> collected_;
};

/// Walk-forward driver: for each t in [t_start, t_end], fit `model` on the
/// window of samples ending at t-1 and score every eligible stock in U_t.
/// Training windows never contain a target later than t.
BacktestResult rolling_backtest(const NormalizedPanel& np, StepModel& model,
                                int t_start, int t_end);

/// Convenience entry point matching the protocol description directly.
BacktestResult rolling_backtest(const NormalizedPanel& np,
                                const NetworkConfig& net_config,
                                const TrainPolicy& policy, int t_start, int t_end,
                                bool warm_start, const Seeds& seeds,
                                const std::optional<ModelSnapshot>& transfer_source);

}  // namespace ricnn
