//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/text.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace molopt {

std::string format_fixed2(double value) {
  char buf[64];
  // printf rounds the exact binary value; under the default rounding mode
  // exact ties go to even.
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  std::string out(buf);
  if (out == "-0.00") out = "0.00";
  return out;
}

std::string format_truncated2(double value) {
  const double scaled = std::trunc(value * 100.0 + (value < 0 ? -1e-9 : 1e-9));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", scaled / 100.0);
  std::string out(buf);
  if (out == "-0.00") out = "0.00";
  return out;
}

std::string format_double(double value) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  std::string owned(text);
  char* end = nullptr;
  const double v = std::strtod(owned.c_str(), &end);
  if (end != owned.c_str() + owned.size()) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(std::string_view text) {
  text = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

TsvTable TsvTable::parse(std::string_view content, std::string_view source_name) {
  TsvTable table;
  table.source_ = source_name;
  std::size_t line_no = 0;
  for (std::string_view line : split(content, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    for (auto cell : split(line, '\t')) cells.emplace_back(trim(cell));
    if (table.header_.empty()) {
      table.header_ = std::move(cells);
      continue;
    }
    if (cells.size() != table.header_.size()) {
      throw std::runtime_error(table.source_ + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(table.header_.size()) + " columns, found " +
                               std::to_string(cells.size()));
    }
    table.rows_.push_back(std::move(cells));
  }
  if (table.header_.empty()) throw std::runtime_error(table.source_ + ": missing header row");
  return table;
}

std::size_t TsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw std::runtime_error(source_ + ": no column '" + std::string(name) + "'");
}

}  // namespace molopt
