// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include "ricnn/net.hpp"

#include <cmath>

#include "ricnn/rng.hpp"

namespace ricnn {

namespace {

constexpr double kBnEpsilon = 1e-5;

void check_finite(const double* data, Eigen::Index n, const char* what) {
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(data[i])) {
      throw Error(ErrorCode::TrainingDiverged,
                  std::string("non-finite ") + what + " encountered");
    }
  }
}

}  // namespace

void NetworkConfig::validate() const {
  if (input_dim < 1) throw Error(ErrorCode::Parameter, "input_dim must be >= 1");
  if (hidden_dims.empty()) {
    throw Error(ErrorCode::Parameter, "at least one hidden layer required");
  }
  if (hidden_dims.size() != dropout_rates.size()) {
    throw Error(ErrorCode::Parameter,
                "hidden_dims and dropout_rates must have equal length");
  }
  for (int d : hidden_dims) {
    if (d < 1) throw Error(ErrorCode::Parameter, "hidden width must be >= 1");
  }
  for (double p : dropout_rates) {
    if (!(p >= 0.0 && p < 1.0)) {
      throw Error(ErrorCode::Parameter, "dropout rates must be in [0, 1)");
    }
  }
  if (!(batchnorm_momentum > 0.0 && batchnorm_momentum < 1.0)) {
    throw Error(ErrorCode::Parameter, "batchnorm_momentum must be in (0, 1)");
  }
}

bool NetworkConfig::same_shape(const NetworkConfig& other) const {
  return input_dim == other.input_dim && hidden_dims == other.hidden_dims;
}

Network Network::init(const NetworkConfig& config) {
  config.validate();
  Network net;
  net.config_ = config;
  auto rng = make_rng(derive_seed(config.seed, 0x6E6574ULL));
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto he_matrix = [&](int in, int out) {
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    Mat w(in, out);
    for (int i = 0; i < in; ++i) {
      for (int j = 0; j < out; ++j) w(i, j) = scale * gauss(rng);
    }
    return w;
  };

  int in = config.input_dim;
  for (int width : config.hidden_dims) {
    HiddenLayer layer;
    layer.weight = he_matrix(in, width);
    layer.bias = Vec::Zero(width);
    layer.bn_gamma = Vec::Ones(width);
    layer.bn_beta = Vec::Zero(width);
    layer.bn_mean = Vec::Zero(width);
    layer.bn_var = Vec::Ones(width);
    net.hidden_.push_back(std::move(layer));
    in = width;
  }
  net.output_.weight = he_matrix(in, 1);
  net.output_.bias = Vec::Zero(1);
  return net;
}

Vec Network::forward_eval(const Mat& batch) const {
  if (batch.cols() != config_.input_dim) {
    throw Error(ErrorCode::Shape, "forward: batch width " +
                                      std::to_string(batch.cols()) + " != input_dim " +
                                      std::to_string(config_.input_dim));
  }
  Mat a = batch;
  Mat z;
  for (const HiddenLayer& layer : hidden_) {
    z.noalias() = a * layer.weight;
    z.rowwise() += layer.bias.transpose();
    z.rowwise() -= layer.bn_mean.transpose();
    const Eigen::ArrayXd scale =
        layer.bn_gamma.array() / (layer.bn_var.array() + kBnEpsilon).sqrt();
    z.array().rowwise() *= scale.transpose();
    z.array().rowwise() += layer.bn_beta.transpose().array();
    a = z.cwiseMax(0.0);
  }
  return (a * output_.weight).col(0) + Vec::Constant(a.rows(), output_.bias[0]);
}

namespace {

/// Per-layer forward caches needed by the exact backward pass.
struct LayerCache {
  Mat input;    // activations entering the affine map
  Mat xhat;     // normalized pre-activations
  Eigen::ArrayXd inv_std;
  Mat relu_in;  // gamma*xhat + beta (ReLU argument)
  Mat mask;     // inverted dropout mask, empty when rate == 0
};

}  // namespace

Vec Network::forward_train(const Mat& batch, std::mt19937_64& dropout_rng) {
  if (batch.cols() != config_.input_dim) {
    throw Error(ErrorCode::Shape, "forward: batch width mismatch");
  }
  if (batch.rows() < 2) {
    throw Error(ErrorCode::BatchTooSmall,
                "Train-mode forward needs a batch of >= 2 rows, got " +
                    std::to_string(batch.rows()));
  }
  // the op order below mirrors loss_and_grads bit for bit
  Mat a = batch;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t l = 0; l < hidden_.size(); ++l) {
    HiddenLayer& layer = hidden_[l];
    Mat z;
    z.noalias() = a * layer.weight;
    z.rowwise() += layer.bias.transpose();
    const Eigen::RowVectorXd mu = z.colwise().mean();
    z.rowwise() -= mu;
    const Eigen::RowVectorXd var = z.array().square().colwise().mean();
    const double m = config_.batchnorm_momentum;
    layer.bn_mean = m * layer.bn_mean + (1.0 - m) * mu.transpose();
    layer.bn_var = m * layer.bn_var + (1.0 - m) * var.transpose();
    const Eigen::ArrayXd inv_std =
        (var.transpose().array() + kBnEpsilon).sqrt().inverse();
    z.array().rowwise() *= inv_std.transpose();                      // xhat
    z.array().rowwise() *= layer.bn_gamma.transpose().array();
    z.array().rowwise() += layer.bn_beta.transpose().array();
    a = z.cwiseMax(0.0);
    const double p = config_.dropout_rates[l];
    if (p > 0.0) {
      const double keep = 1.0 - p;
      const double inv_keep = 1.0 / keep;
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
          a(i, j) = unif(dropout_rng) < keep ? a(i, j) * inv_keep : 0.0;
        }
      }
    }
  }
  return (a * output_.weight).col(0) + Vec::Constant(a.rows(), output_.bias[0]);
}

Vec Network::forward(const Mat& batch, Mode mode, std::mt19937_64* dropout_rng) {
  if (mode == Mode::Eval) return forward_eval(batch);
  if (dropout_rng == nullptr) {
    throw Error(ErrorCode::Parameter, "Train-mode forward needs a dropout rng");
  }
  return forward_train(batch, *dropout_rng);
}

std::pair<double, Gradients> Network::loss_and_grads(const Mat& batch,
                                                     const Vec& targets,
                                                     std::mt19937_64& dropout_rng) {
  if (batch.cols() != config_.input_dim) {
    throw Error(ErrorCode::Shape, "loss_and_grads: batch width mismatch");
  }
  if (batch.rows() != targets.size()) {
    throw Error(ErrorCode::Shape, "loss_and_grads: batch rows " +
                                      std::to_string(batch.rows()) + " != targets " +
                                      std::to_string(targets.size()));
  }
  const Eigen::Index bsz = batch.rows();
  if (bsz < 2) {
    throw Error(ErrorCode::BatchTooSmall,
                "training batch needs >= 2 rows for batch statistics, got " +
                    std::to_string(bsz));
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<LayerCache> caches(hidden_.size());

  Mat a = batch;
  for (std::size_t l = 0; l < hidden_.size(); ++l) {
    HiddenLayer& layer = hidden_[l];
    LayerCache& cache = caches[l];
    cache.input = std::move(a);

    Mat z;
    z.noalias() = cache.input * layer.weight;
    z.rowwise() += layer.bias.transpose();
    const Eigen::RowVectorXd mu = z.colwise().mean();
    z.rowwise() -= mu;
    const Eigen::RowVectorXd var = z.array().square().colwise().mean();

    const double m = config_.batchnorm_momentum;
    layer.bn_mean = m * layer.bn_mean + (1.0 - m) * mu.transpose();
    layer.bn_var = m * layer.bn_var + (1.0 - m) * var.transpose();

    cache.inv_std = (var.transpose().array() + kBnEpsilon).sqrt().inverse();
    z.array().rowwise() *= cache.inv_std.transpose();
    cache.xhat = std::move(z);
    cache.relu_in = cache.xhat;
    cache.relu_in.array().rowwise() *= layer.bn_gamma.transpose().array();
    cache.relu_in.array().rowwise() += layer.bn_beta.transpose().array();

    Mat r = cache.relu_in.cwiseMax(0.0);
    const double p = config_.dropout_rates[l];
    if (p > 0.0) {
      const double keep = 1.0 - p;
      cache.mask.resize(r.rows(), r.cols());
      for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
          cache.mask(i, j) = unif(dropout_rng) < keep ? 1.0 / keep : 0.0;
        }
      }
      r = r.cwiseProduct(cache.mask);
    }
    a = std::move(r);
  }

  Vec preds = (a * output_.weight).col(0) + Vec::Constant(bsz, output_.bias[0]);
  Vec residual = preds - targets;
  const double loss = residual.squaredNorm() / static_cast<double>(bsz);

  Gradients grads = zero_gradients();
  Vec dpred = (2.0 / static_cast<double>(bsz)) * residual;

  grads.out_weight.noalias() = a.transpose() * dpred;
  grads.out_bias[0] = dpred.sum();
  Mat da;
  da.noalias() = dpred * output_.weight.transpose();

  for (int l = static_cast<int>(hidden_.size()) - 1; l >= 0; --l) {
    const HiddenLayer& layer = hidden_[static_cast<std::size_t>(l)];
    const LayerCache& cache = caches[static_cast<std::size_t>(l)];
    LayerGrads& lg = grads.hidden[static_cast<std::size_t>(l)];

    // da becomes, in place: masked, ReLU-gated, gamma-scaled, then the full
    // batch-norm backward signal
    if (cache.mask.size() > 0) da.array() *= cache.mask.array();
    da = (cache.relu_in.array() > 0.0).select(da, 0.0);

    lg.bn_gamma = (da.array() * cache.xhat.array()).colwise().sum().transpose();
    lg.bn_beta = da.colwise().sum().transpose();

    da.array().rowwise() *= layer.bn_gamma.transpose().array();  // dxhat
    const Eigen::RowVectorXd mean_dxhat = da.colwise().mean();
    const Eigen::RowVectorXd mean_dxhat_xhat =
        (da.array() * cache.xhat.array()).colwise().mean();
    da.rowwise() -= mean_dxhat;
    da.array() -= cache.xhat.array().rowwise() * mean_dxhat_xhat.array();
    da.array().rowwise() *= cache.inv_std.transpose();  // dz

    lg.bias = da.colwise().sum().transpose();
    lg.weight.noalias() = cache.input.transpose() * da;
    if (l > 0) da = da * layer.weight.transpose();
  }

  return {loss, std::move(grads)};
}

void Network::copy_layers_from(const Network& source, int k) {
  if (!config_.same_shape(source.config_)) {
    throw Error(ErrorCode::Shape, "copy_layers: incompatible network shapes");
  }
  const int n_hidden = static_cast<int>(hidden_.size());
  if (k < 1 || k > n_hidden + 1) {
    throw Error(ErrorCode::Shape,
                "copy_layers: k must be in [1, " + std::to_string(n_hidden + 1) +
                    "], got " + std::to_string(k));
  }
  for (int l = 0; l < std::min(k, n_hidden); ++l) {
    hidden_[static_cast<std::size_t>(l)] = source.hidden_[static_cast<std::size_t>(l)];
  }
  if (k == n_hidden + 1) output_ = source.output_;
}

Gradients Network::zero_gradients() const {
  Gradients g;
  g.hidden.reserve(hidden_.size());
  for (const HiddenLayer& layer : hidden_) {
    LayerGrads lg;
    lg.weight = Mat::Zero(layer.weight.rows(), layer.weight.cols());
    lg.bias = Vec::Zero(layer.bias.size());
    lg.bn_gamma = Vec::Zero(layer.bn_gamma.size());
    lg.bn_beta = Vec::Zero(layer.bn_beta.size());
    g.hidden.push_back(std::move(lg));
  }
  g.out_weight = Mat::Zero(output_.weight.rows(), output_.weight.cols());
  g.out_bias = Vec::Zero(1);
  return g;
}

namespace {

template <typename T>
bool bits_equal(const T& a, const T& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

}  // namespace

bool Network::same_parameters(const Network& other) const {
  if (hidden_.size() != other.hidden_.size()) return false;
  for (std::size_t l = 0; l < hidden_.size(); ++l) {
    const HiddenLayer& a = hidden_[l];
    const HiddenLayer& b = other.hidden_[l];
    if (!bits_equal(a.weight, b.weight) || !bits_equal(a.bias, b.bias) ||
        !bits_equal(a.bn_gamma, b.bn_gamma) || !bits_equal(a.bn_beta, b.bn_beta) ||
        !bits_equal(a.bn_mean, b.bn_mean) || !bits_equal(a.bn_var, b.bn_var)) {
      return false;
    }
  }
  return bits_equal(output_.weight, other.output_.weight) &&
         bits_equal(output_.bias, other.output_.bias);
}

AdamState AdamState::init(const Network& net, const AdamConfig& config) {
  AdamState state;
  state.config = config;
  state.m = net.zero_gradients();
  state.v = net.zero_gradients();
  return state;
}

namespace {

void adam_update_tensor(Eigen::Ref<Mat> param, const Mat& grad, Mat& m, Mat& v,
                        const AdamConfig& cfg, double bc1, double bc2) {
  check_finite(grad.data(), grad.size(), "gradient");
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  param.array() -= cfg.learning_rate * (m.array() / bc1) /
                   ((v.array() / bc2).sqrt() + cfg.epsilon);
}

void adam_update_vector(Vec& param, const Vec& grad, Vec& m, Vec& v,
                        const AdamConfig& cfg, double bc1, double bc2) {
  check_finite(grad.data(), grad.size(), "gradient");
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  param.array() -= cfg.learning_rate * (m.array() / bc1) /
                   ((v.array() / bc2).sqrt() + cfg.epsilon);
}

}  // namespace

void adam_step(Network& net, const Gradients& grads, AdamState& state) {
  if (grads.hidden.size() != net.hidden().size()) {
    throw Error(ErrorCode::Shape, "adam_step: gradient/network mismatch");
  }
  state.step += 1;
  const AdamConfig& cfg = state.config;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

  for (std::size_t l = 0; l < net.hidden().size(); ++l) {
    HiddenLayer& layer = net.hidden()[l];
    const LayerGrads& lg = grads.hidden[l];
    LayerGrads& m = state.m.hidden[l];
    LayerGrads& v = state.v.hidden[l];
    adam_update_tensor(layer.weight, lg.weight, m.weight, v.weight, cfg, bc1, bc2);
    adam_update_vector(layer.bias, lg.bias, m.bias, v.bias, cfg, bc1, bc2);
    adam_update_vector(layer.bn_gamma, lg.bn_gamma, m.bn_gamma, v.bn_gamma, cfg, bc1, bc2);
    adam_update_vector(layer.bn_beta, lg.bn_beta, m.bn_beta, v.bn_beta, cfg, bc1, bc2);
  }
  adam_update_tensor(net.output().weight, grads.out_weight, state.m.out_weight,
                     state.v.out_weight, cfg, bc1, bc2);
  adam_update_vector(net.output().bias, grads.out_bias, state.m.out_bias,
                     state.v.out_bias, cfg, bc1, bc2);
}

}  // namespace ricnn
