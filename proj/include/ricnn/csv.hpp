// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ricnn::csv {

/// Shortest decimal string that parses back to exactly the same double.
/// All numeric file output goes through this, which is what makes emitted
/// files byte-stable across runs.
std::string format_double(double value);

/// Locale-independent parse of a full-string double. nullopt on failure or
/// trailing garbage.
std::optional<double> parse_double(const std::string& field);

std::optional<long long> parse_int(const std::string& field);

/// Plain comma split; fields must not contain commas or newlines.
std::vector<std::string> split_row(const std::string& line);

std::string join_row(const std::vector<std::string>& fields);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index for `name`, or -1.
  int column(const std::string& name) const;
};

/// Reads a whole CSV file; requires a header row.
Table read_file(const std::string& path);

void write_file(const std::string& path, const Table& table);

}  // namespace ricnn::csv
