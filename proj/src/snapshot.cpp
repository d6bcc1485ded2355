// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0

// Model snapshot persistence: a self-describing JSON document holding the
// network config, every parameter tensor, the running batch-norm statistics
// and the capture metadata. Doubles are written shortest-round-trip, so a
// load restores the exact bits.

#include <fstream>

#include <json.hpp>

#include "ricnn/trainer.hpp"

namespace ricnn {

namespace {

using nlohmann::json;

constexpr int kSnapshotVersion = 1;

json vec_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json mat_to_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Vec vec_from_json(const json& j) {
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Mat mat_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::Shape, "ragged matrix in snapshot");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

}  // namespace

void save_snapshot(const ModelSnapshot& snapshot, const std::string& path) {
  const Network& net = snapshot.net;
  json doc;
  doc["format"] = "ricnn-snapshot";
  doc["version"] = kSnapshotVersion;
  doc["config"] = {
      {"input_dim", net.config().input_dim},
      {"hidden_dims", net.config().hidden_dims},
      {"dropout_rates", net.config().dropout_rates},
      {"batchnorm_momentum", net.config().batchnorm_momentum},
      {"seed", net.config().seed},
  };
  doc["captured_at"] = {
      {"time_index", snapshot.time_index},
      {"epoch", snapshot.epoch},
      {"train_rank_ic", snapshot.train_rank_ic},
  };
  json layers = json::array();
  for (const HiddenLayer& layer : net.hidden()) {
    layers.push_back({
        {"weight", mat_to_json(layer.weight)},
        {"bias", vec_to_json(layer.bias)},
        {"bn_gamma", vec_to_json(layer.bn_gamma)},
        {"bn_beta", vec_to_json(layer.bn_beta)},
        {"bn_mean", vec_to_json(layer.bn_mean)},
        {"bn_var", vec_to_json(layer.bn_var)},
    });
  }
  doc["hidden_layers"] = std::move(layers);
  doc["output_layer"] = {
      {"weight", mat_to_json(net.output().weight)},
      {"bias", vec_to_json(net.output().bias)},
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write snapshot: " + path);
  out << doc.dump(1) << "\n";
  if (!out) throw Error(ErrorCode::Io, "snapshot write failed: " + path);
}

ModelSnapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open snapshot: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema, "snapshot is not valid JSON: " + std::string(e.what()));
  }
  try {
    if (doc.at("format").get<std::string>() != "ricnn-snapshot") {
      throw Error(ErrorCode::Schema, "not a model snapshot: " + path);
    }
    if (doc.at("version").get<int>() != kSnapshotVersion) {
      throw Error(ErrorCode::Schema,
                  "unsupported snapshot version in " + path);
    }
    NetworkConfig cfg;
    const json& jc = doc.at("config");
    cfg.input_dim = jc.at("input_dim").get<int>();
    cfg.hidden_dims = jc.at("hidden_dims").get<std::vector<int>>();
    cfg.dropout_rates = jc.at("dropout_rates").get<std::vector<double>>();
    cfg.batchnorm_momentum = jc.at("batchnorm_momentum").get<double>();
    cfg.seed = jc.at("seed").get<std::uint64_t>();

    ModelSnapshot snapshot{Network::init(cfg), 0, 0, 0.0};
    const json& meta = doc.at("captured_at");
    snapshot.time_index = meta.at("time_index").get<int>();
    snapshot.epoch = meta.at("epoch").get<int>();
    snapshot.train_rank_ic = meta.at("train_rank_ic").get<double>();

    const json& layers = doc.at("hidden_layers");
    if (layers.size() != snapshot.net.hidden().size()) {
      throw Error(ErrorCode::Shape, "layer count mismatch in snapshot");
    }
    auto take_mat = [&](const json& j, const Mat& like, const char* what) {
      Mat m = mat_from_json(j);
      if (m.rows() != like.rows() || m.cols() != like.cols()) {
        throw Error(ErrorCode::Shape, std::string("snapshot tensor '") + what +
                                          "' does not match its config shape");
      }
      return m;
    };
    auto take_vec = [&](const json& j, const Vec& like, const char* what) {
      Vec v = vec_from_json(j);
      if (v.size() != like.size()) {
        throw Error(ErrorCode::Shape, std::string("snapshot tensor '") + what +
                                          "' does not match its config shape");
      }
      return v;
    };
    for (std::size_t l = 0; l < layers.size(); ++l) {
      HiddenLayer& layer = snapshot.net.hidden()[l];
      const json& jl = layers[l];
      layer.weight = take_mat(jl.at("weight"), layer.weight, "weight");
      layer.bias = take_vec(jl.at("bias"), layer.bias, "bias");
      layer.bn_gamma = take_vec(jl.at("bn_gamma"), layer.bn_gamma, "bn_gamma");
      layer.bn_beta = take_vec(jl.at("bn_beta"), layer.bn_beta, "bn_beta");
      layer.bn_mean = take_vec(jl.at("bn_mean"), layer.bn_mean, "bn_mean");
      layer.bn_var = take_vec(jl.at("bn_var"), layer.bn_var, "bn_var");
    }
    snapshot.net.output().weight = take_mat(doc.at("output_layer").at("weight"),
                                            snapshot.net.output().weight, "out_weight");
    snapshot.net.output().bias = take_vec(doc.at("output_layer").at("bias"),
                                          snapshot.net.output().bias, "out_bias");
    return snapshot;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Schema,
                "malformed snapshot " + path + ": " + std::string(e.what()));
  }
}

}  // namespace ricnn
