// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ricnn/types.hpp"

namespace ricnn {

/// Midranks of `values`: 1-based ranks with ties replaced by the mean of the
/// positions they occupy (Spearman convention).
Vec midranks(const Vec& values);

}  // namespace ricnn
