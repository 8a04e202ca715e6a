// SPDX-License-Identifier: Apache-2.0
#include "netsim/scenario/structured_text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "netsim/error.hpp"

namespace netsim::config {
namespace {

[[noreturn]] void syntax(int line, const std::string& what) {
  fail(ErrorCode::MalformedSyntax, fmt::format("line {}: {}", line, what));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string strip_comment(std::string_view s) {
  std::string out;
  bool in_string = false;
  for (char c : s) {
    if (c == '"') in_string = !in_string;
    if (c == '#' && !in_string) break;
    out.push_back(c);
  }
  return out;
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

class ValueParser {
 public:
  ValueParser(std::string_view text, int line) : text_(text), line_(line) {}

  Value parse_all() {
    Value v = parse_value();
    skip_ws();
    if (pos_ != text_.size()) syntax(line_, fmt::format("trailing characters '{}'", text_.substr(pos_)));
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Value parse_value() {
    skip_ws();
    if (pos_ >= text_.size()) syntax(line_, "missing value");
    char c = text_[pos_];
    Value v;
    v.line = line_;
    if (c == '[') {
      ++pos_;
      Array items;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        v.data = std::move(items);
        return v;
      }
      while (true) {
        items.push_back(parse_value());
        skip_ws();
        if (pos_ >= text_.size()) syntax(line_, "unterminated array");
        if (text_[pos_] == ',') {
          ++pos_;
          skip_ws();
          // trailing comma
          if (pos_ < text_.size() && text_[pos_] == ']') {
            ++pos_;
            break;
          }
          continue;
        }
        if (text_[pos_] == ']') {
          ++pos_;
          break;
        }
        syntax(line_, fmt::format("unexpected '{}' in array", text_[pos_]));
      }
      v.data = std::move(items);
      return v;
    }
    if (c == '"') {
      auto end = text_.find('"', pos_ + 1);
      if (end == std::string_view::npos) syntax(line_, "unterminated string");
      v.data = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return v;
    }
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      v.data = true;
      return v;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      v.data = false;
      return v;
    }
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                                  text_[end] == '.' || text_[end] == '-' || text_[end] == '+')) {
      ++end;
    }
    std::string token(text_.substr(pos_, end - pos_));
    if (token.empty()) syntax(line_, fmt::format("unexpected character '{}'", c));
    double d = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), d);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(d)) {
      syntax(line_, fmt::format("invalid number '{}'", token));
    }
    pos_ = end;
    v.data = d;
    return v;
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

int bracket_balance(std::string_view s) {
  int depth = 0;
  bool in_string = false;
  for (char c : s) {
    if (c == '"') in_string = !in_string;
    if (in_string) continue;
    if (c == '[') ++depth;
    if (c == ']') --depth;
  }
  return depth;
}

}  // namespace

bool Table::has(std::string_view key) const { return entries.find(std::string(key)) != entries.end(); }

std::string Table::qualified(std::string_view key) const {
  return name.empty() ? std::string(key) : name + "." + std::string(key);
}

const Value& Table::at(std::string_view key) const {
  auto it = entries.find(std::string(key));
  if (it == entries.end()) {
    fail(ErrorCode::MissingField, fmt::format("{} (section at line {})", qualified(key), line));
  }
  return it->second;
}

double Table::number(std::string_view key) const {
  const Value& v = at(key);
  if (!v.is_number()) fail(ErrorCode::OutOfRange, fmt::format("{} must be a number (line {})", qualified(key), v.line));
  return std::get<double>(v.data);
}

double Table::number_or(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::int64_t Table::integer(std::string_view key) const {
  double d = number(key);
  if (d != std::floor(d) || std::fabs(d) > 9.0e15) {
    fail(ErrorCode::OutOfRange, fmt::format("{} must be an integer, got {}", qualified(key), d));
  }
  return static_cast<std::int64_t>(d);
}

std::int64_t Table::integer_or(std::string_view key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool Table::boolean_or(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const Value& v = at(key);
  if (!v.is_bool()) fail(ErrorCode::OutOfRange, fmt::format("{} must be true/false (line {})", qualified(key), v.line));
  return std::get<bool>(v.data);
}

std::string Table::string(std::string_view key) const {
  const Value& v = at(key);
  if (!v.is_string()) fail(ErrorCode::OutOfRange, fmt::format("{} must be a string (line {})", qualified(key), v.line));
  return std::get<std::string>(v.data);
}

std::string Table::string_or(std::string_view key, std::string fallback) const {
  return has(key) ? string(key) : fallback;
}

std::vector<double> Table::numbers(std::string_view key) const {
  const Value& v = at(key);
  if (!v.is_array()) fail(ErrorCode::OutOfRange, fmt::format("{} must be an array (line {})", qualified(key), v.line));
  std::vector<double> out;
  for (const Value& item : std::get<Array>(v.data)) {
    if (!item.is_number()) fail(ErrorCode::OutOfRange, fmt::format("{} must contain numbers (line {})", qualified(key), v.line));
    out.push_back(std::get<double>(item.data));
  }
  return out;
}

std::vector<std::vector<double>> Table::number_rows(std::string_view key) const {
  const Value& v = at(key);
  if (!v.is_array()) fail(ErrorCode::OutOfRange, fmt::format("{} must be an array (line {})", qualified(key), v.line));
  std::vector<std::vector<double>> out;
  for (const Value& row : std::get<Array>(v.data)) {
    if (!row.is_array()) fail(ErrorCode::OutOfRange, fmt::format("{} must be an array of arrays (line {})", qualified(key), v.line));
    std::vector<double> r;
    for (const Value& item : std::get<Array>(row.data)) {
      if (!item.is_number()) fail(ErrorCode::OutOfRange, fmt::format("{} must contain numbers (line {})", qualified(key), v.line));
      r.push_back(std::get<double>(item.data));
    }
    out.push_back(std::move(r));
  }
  return out;
}

void Table::expect_only(const std::set<std::string, std::less<>>& allowed) const {
  for (const auto& [k, v] : entries) {
    if (!allowed.contains(k)) fail(ErrorCode::UnknownKey, fmt::format("{} (line {})", qualified(k), v.line));
  }
  for (const auto& [k, tables] : children) {
    if (!allowed.contains(k)) {
      fail(ErrorCode::UnknownKey, fmt::format("[[{}]] (line {})", qualified(k), tables.front().line));
    }
  }
}

const Table* Document::table(std::string_view name) const {
  auto it = tables.find(std::string(name));
  return it == tables.end() ? nullptr : &it->second;
}

const std::vector<Table>& Document::array(std::string_view name) const {
  static const std::vector<Table> empty;
  auto it = arrays.find(std::string(name));
  return it == arrays.end() ? empty : it->second;
}

void Document::expect_only(const std::set<std::string, std::less<>>& allowed) const {
  for (const auto& [k, t] : tables) {
    if (!allowed.contains(k)) fail(ErrorCode::UnknownKey, fmt::format("[{}] (line {})", k, t.line));
  }
  for (const auto& [k, ts] : arrays) {
    if (!allowed.contains(k)) fail(ErrorCode::UnknownKey, fmt::format("[[{}]] (line {})", k, ts.front().line));
  }
}

Document parse(std::string_view text) {
  Document doc;
  Table* current = nullptr;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    int start_line = line_no;
    std::string line = strip_comment(raw);
    while (bracket_balance(line) > 0 && line.find('=') != std::string::npos) {
      std::string more;
      if (!std::getline(in, more)) syntax(start_line, "unterminated array");
      ++line_no;
      line += " " + strip_comment(more);
    }
    std::string_view body = trim(line);
    if (body.empty()) continue;

    if (body.starts_with("[[")) {
      if (!body.ends_with("]]")) syntax(start_line, "malformed array-of-tables header");
      std::string name(trim(body.substr(2, body.size() - 4)));
      auto dot = name.find('.');
      Table t;
      t.line = start_line;
      if (dot == std::string::npos) {
        if (!valid_key(name)) syntax(start_line, fmt::format("invalid section name '{}'", name));
        t.name = name;
        auto& vec = doc.arrays[name];
        vec.push_back(std::move(t));
        current = &vec.back();
      } else {
        std::string parent = name.substr(0, dot);
        std::string child = name.substr(dot + 1);
        if (!valid_key(parent) || !valid_key(child)) syntax(start_line, fmt::format("invalid section name '{}'", name));
        auto it = doc.arrays.find(parent);
        if (it == doc.arrays.end() || it->second.empty()) {
          syntax(start_line, fmt::format("[[{}]] appears before any [[{}]]", name, parent));
        }
        Table& owner = it->second.back();
        t.name = name;
        auto& vec = owner.children[child];
        vec.push_back(std::move(t));
        current = &vec.back();
      }
      continue;
    }
    if (body.starts_with("[")) {
      if (!body.ends_with("]")) syntax(start_line, "malformed section header");
      std::string name(trim(body.substr(1, body.size() - 2)));
      if (!valid_key(name)) syntax(start_line, fmt::format("invalid section name '{}'", name));
      if (doc.tables.contains(name)) syntax(start_line, fmt::format("duplicate section [{}]", name));
      Table t;
      t.name = name;
      t.line = start_line;
      current = &(doc.tables[name] = std::move(t));
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string_view::npos) syntax(start_line, "expected key = value");
    std::string key(trim(body.substr(0, eq)));
    if (!valid_key(key)) syntax(start_line, fmt::format("invalid key '{}'", key));
    if (current == nullptr) syntax(start_line, "key outside of any section");
    if (current->entries.contains(key)) syntax(start_line, fmt::format("duplicate key '{}'", key));
    Value v = ValueParser(trim(body.substr(eq + 1)), start_line).parse_all();
    current->entries.emplace(key, std::move(v));
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, fmt::format("cannot open '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void Writer::section(std::string_view name) {
  if (!out_.empty()) out_ += "\n";
  out_ += fmt::format("[{}]\n", name);
}

void Writer::array_section(std::string_view name) {
  if (!out_.empty()) out_ += "\n";
  out_ += fmt::format("[[{}]]\n", name);
}

void Writer::number(std::string_view k, double v) { out_ += fmt::format("{} = {}\n", k, format_number(v)); }

void Writer::integer(std::string_view k, std::int64_t v) { out_ += fmt::format("{} = {}\n", k, v); }

void Writer::flag(std::string_view k, bool v) { out_ += fmt::format("{} = {}\n", k, v ? "true" : "false"); }

void Writer::text(std::string_view k, std::string_view v) { out_ += fmt::format("{} = \"{}\"\n", k, v); }

void Writer::list(std::string_view k, const std::vector<double>& v) {
  out_ += fmt::format("{} = [", k);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out_ += ", ";
    out_ += format_number(v[i]);
  }
  out_ += "]\n";
}

void Writer::rows(std::string_view k, const std::vector<std::vector<double>>& v) {
  out_ += fmt::format("{} = [", k);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out_ += ", ";
    out_ += "[";
    for (std::size_t j = 0; j < v[i].size(); ++j) {
      if (j) out_ += ", ";
      out_ += format_number(v[i][j]);
    }
    out_ += "]";
  }
  out_ += "]\n";
}

void Writer::blank() { out_ += "\n"; }

}  // namespace netsim::config
