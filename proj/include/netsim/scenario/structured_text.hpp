// SPDX-License-Identifier: Apache-2.0
//
// Reader/writer for the sectioned key = value configuration format used by
// scenario and override files. Supported subset:
//
//   # comment
//   [section]              single table
//   [[group]]              appends a table to an array of tables
//   [[group.child]]        appends a child table to the most recent [[group]]
//   key = 1.5 | 42 | true | "text" | [1, 2, [3, 4]]
//
// Arrays may span several lines.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace netsim::config {

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<double, bool, std::string, Array> data;
  int line = 0;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
};

class Table {
 public:
  std::string name;
  int line = 0;
  std::map<std::string, Value> entries;
  std::map<std::string, std::vector<Table>> children;

  bool has(std::string_view key) const;

  // Typed accessors raise MissingField / OutOfRange (wrong type) with the
  // qualified key name and line number.
  double number(std::string_view key) const;
  double number_or(std::string_view key, double fallback) const;
  std::int64_t integer(std::string_view key) const;
  std::int64_t integer_or(std::string_view key, std::int64_t fallback) const;
  bool boolean_or(std::string_view key, bool fallback) const;
  std::string string(std::string_view key) const;
  std::string string_or(std::string_view key, std::string fallback) const;
  std::vector<double> numbers(std::string_view key) const;
  std::vector<std::vector<double>> number_rows(std::string_view key) const;

  // Fails closed: any key (or child group) outside `allowed` is an error.
  void expect_only(const std::set<std::string, std::less<>>& allowed) const;

 private:
  const Value& at(std::string_view key) const;
  std::string qualified(std::string_view key) const;
};

struct Document {
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> arrays;

  const Table* table(std::string_view name) const;
  const std::vector<Table>& array(std::string_view name) const;
  void expect_only(const std::set<std::string, std::less<>>& allowed) const;
};

Document parse(std::string_view text);
Document parse_file(const std::string& path);

// Round-trip-exact number formatting (shortest representation that reparses
// to the same double).
std::string format_number(double v);

class Writer {
 public:
  void section(std::string_view name);
  void array_section(std::string_view name);
  void number(std::string_view k, double v);
  void integer(std::string_view k, std::int64_t v);
  void flag(std::string_view k, bool v);
  void text(std::string_view k, std::string_view v);
  void list(std::string_view k, const std::vector<double>& v);
  void rows(std::string_view k, const std::vector<std::vector<double>>& v);
  void blank();

  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

}  // namespace netsim::config
