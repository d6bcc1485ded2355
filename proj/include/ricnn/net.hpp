// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ricnn/types.hpp"

namespace ricnn {

/// Architecture and initialization recipe. The default is the production
/// regressor: 180 inputs, six hidden layers (150-150-100-100-50-50) with
/// per-layer dropout (50-50-30-30-10-10 %), one linear output unit.
struct NetworkConfig {
  int input_dim = kFeatureDim;
  std::vector<int> hidden_dims = {150, 150, 100, 100, 50, 50};
  std::vector<double> dropout_rates = {0.50, 0.50, 0.30, 0.30, 0.10, 0.10};
  double batchnorm_momentum = 0.99;
  std::uint64_t seed = 0;

  void validate() const;
  bool same_shape(const NetworkConfig& other) const;
};

enum class Mode { Train, Eval };

/// One hidden block: affine -> batch norm -> ReLU -> dropout.
struct HiddenLayer {
  Mat weight;    // in x out
  Vec bias;      // out
  Vec bn_gamma;  // out
  Vec bn_beta;   // out
  Vec bn_mean;   // running mean (Eval statistics)
  Vec bn_var;    // running variance, >= 0
};

struct OutputLayer {
  Mat weight;  // in x 1
  Vec bias;    // 1
};

struct LayerGrads {
  Mat weight;
  Vec bias;
  Vec bn_gamma;
  Vec bn_beta;
};

struct Gradients {
  std::vector<LayerGrads> hidden;
  Mat out_weight;
  Vec out_bias;
};

class Network {
 public:
  /// Fan-in-scaled normal weights, unit batch-norm statistics; identical
  /// parameters for identical config (including seed).
  static Network init(const NetworkConfig& config);

  const NetworkConfig& config() const { return config_; }
  std::vector<HiddenLayer>& hidden() { return hidden_; }
  const std::vector<HiddenLayer>& hidden() const { return hidden_; }
  OutputLayer& output() { return output_; }
  const OutputLayer& output() const { return output_; }

  /// Eval forward: running statistics, no dropout; a pure function of
  /// (parameters, running statistics, input).
  Vec forward_eval(const Mat& batch) const;

  /// Train forward: per-batch statistics, sampled inverted-dropout masks,
  /// running statistics updated in place. Needs at least two rows.
  Vec forward_train(const Mat& batch, std::mt19937_64& dropout_rng);

  Vec forward(const Mat& batch, Mode mode, std::mt19937_64* dropout_rng);

  /// Mean squared error over the batch and its exact gradient through the
  /// same dropout masks and batch statistics as the forward pass.
  /// Updates running batch-norm statistics (this is the training pass).
  std::pair<double, Gradients> loss_and_grads(const Mat& batch, const Vec& targets,
                                              std::mt19937_64& dropout_rng);

  /// Copies weights, biases and batch-norm state of hidden layers 1..k from
  /// `source`; k = n_hidden+1 also copies the output layer. 1 <= k.
  void copy_layers_from(const Network& source, int k);

  Gradients zero_gradients() const;

  bool same_parameters(const Network& other) const;

 private:
  NetworkConfig config_;
  std::vector<HiddenLayer> hidden_;
  OutputLayer output_;
};

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  long step = 0;
  Gradients m;  // first moments, same shapes as the gradients
  Gradients v;  // second moments, elementwise >= 0

  static AdamState init(const Network& net, const AdamConfig& config = {});
};

/// Standard bias-corrected Adam update. Throws TrainingDiverged on
/// non-finite gradients.
void adam_step(Network& net, const Gradients& grads, AdamState& state);

}  // namespace ricnn
