//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace molopt {

/// Two decimals, rounding half to even on the exact binary value.
std::string format_fixed2(double value);

/// Two decimals, truncated toward zero. A 1e-9 guard absorbs binary
/// representation error so that 0.59 renders as "0.59".
std::string format_truncated2(double value);

/// Round-trip double formatting ("%.17g" trimmed to the shortest exact form).
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);

/// A tab-separated table with a header row. Lines starting with '#' and
/// blank lines are skipped.
class TsvTable {
 public:
  static TsvTable parse(std::string_view content, std::string_view source_name);

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
  std::size_t column(std::string_view name) const;

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace molopt
