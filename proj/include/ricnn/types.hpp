// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace ricnn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Number of raw factor columns in every panel.
inline constexpr int kFactorCount = 20;

/// Augmented feature width: five lag blocks plus four relative-difference
/// blocks, 20 columns each.
inline constexpr int kFeatureDim = 180;

/// Lags (in months) entering the feature vector, most recent first.
inline constexpr int kFeatureLags[5] = {0, 3, 6, 9, 12};

enum class ErrorCode {
  Config,
  Schema,
  Integrity,
  Parameter,
  Io,
  DegenerateUniverse,
  DegenerateStep,
  EmptySampleSet,
  Shape,
  UndefinedCorrelation,
  InsufficientData,
  Domain,
  DivisionByZero,
  BatchTooSmall,
  TrainingDiverged,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Non-fatal diagnostics (all-missing factor columns, unconverged solvers,
/// delisted holdings). Printed to stderr; never touches output files.
void warn(const std::string& message);

}  // namespace ricnn
