// SPDX-License-Identifier: Apache-2.0
//
// Plain comma-separated files without quoting.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace netsim::csv {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;
};

std::vector<std::string> split(std::string_view line);

// Reads a file; blank lines are skipped. Throws Io when unreadable and
// SchemaMismatch when the header differs from `expected_header`.
Table read(const std::string& path, std::string_view expected_header);
Table parse(std::string_view text, std::string_view expected_header);

double parse_double(const Row& row, std::size_t column);
long long parse_integer(const Row& row, std::size_t column);

// Writes text atomically enough for our purposes: truncate and write.
void write_file(const std::string& path, std::string_view text);

}  // namespace netsim::csv
