// Copyright 2026 ricnn developers
// SPDX-License-Identifier: Apache-2.0
#include "ricnn/csv.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ricnn/types.hpp"

namespace ricnn {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config: return "config";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::Integrity: return "integrity";
    case ErrorCode::Parameter: return "parameter";
    case ErrorCode::Io: return "io";
    case ErrorCode::DegenerateUniverse: return "degenerate-universe";
    case ErrorCode::DegenerateStep: return "degenerate-step";
    case ErrorCode::EmptySampleSet: return "empty-sample-set";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::UndefinedCorrelation: return "undefined-correlation";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::DivisionByZero: return "division-by-zero";
    case ErrorCode::BatchTooSmall: return "batch-too-small";
    case ErrorCode::TrainingDiverged: return "training-diverged";
  }
  return "unknown";
}

void warn(const std::string& message) {
  std::cerr << "[ricnn] warning: " << message << "\n";
}

}  // namespace ricnn

namespace ricnn::csv {

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(const std::string& field) {
  if (field.empty()) return std::nullopt;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  double out = 0.0;
  auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return out;
}

std::optional<long long> parse_int(const std::string& field) {
  if (field.empty()) return std::nullopt;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  long long out = 0;
  auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return out;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += fields[i];
  }
  return out;
}

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open file: " + path);
  Table table;
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::Schema, "empty file, header row required: " + path);
  }
  table.header = split_row(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split_row(line));
  }
  return table;
}

void write_file(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write file: " + path);
  out << join_row(table.header) << "\n";
  for (const auto& row : table.rows) out << join_row(row) << "\n";
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

}  // namespace ricnn::csv
