// SPDX-License-Identifier: Apache-2.0
#include "netsim/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "netsim/error.hpp"

namespace netsim::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    auto piece = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.emplace_back(trim(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Table parse(std::string_view text, std::string_view expected_header) {
  Table table;
  auto expected = split(expected_header);
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (!have_header) {
      if (fields != expected) {
        std::size_t i = 0;
        while (i < fields.size() && i < expected.size() && fields[i] == expected[i]) ++i;
        std::string column = i < fields.size() ? fields[i] : (i < expected.size() ? expected[i] : "");
        fail(ErrorCode::SchemaMismatch, fmt::format("header column '{}' (expected '{}')", column, expected_header));
      }
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != expected.size()) {
      fail(ErrorCode::BadRow,
           fmt::format("line {}: expected {} fields, found {}", line_no, expected.size(), fields.size()));
    }
    table.rows.push_back({line_no, std::move(fields)});
  }
  if (!have_header) fail(ErrorCode::SchemaMismatch, fmt::format("missing header '{}'", expected_header));
  return table;
}

Table read(const std::string& path, std::string_view expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, fmt::format("cannot open '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), expected_header);
}

double parse_double(const Row& row, std::size_t column) {
  const std::string& s = row.fields.at(column);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    fail(ErrorCode::BadRow, fmt::format("line {}: '{}' is not a finite number", row.line, s));
  }
  return v;
}

long long parse_integer(const Row& row, std::size_t column) {
  const std::string& s = row.fields.at(column);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(ErrorCode::BadRow, fmt::format("line {}: '{}' is not an integer", row.line, s));
  }
  return v;
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, fmt::format("cannot write '{}'", path));
  out << text;
  if (!out) fail(ErrorCode::Io, fmt::format("write to '{}' failed", path));
}

}  // namespace netsim::csv
