//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/data.hpp"

#include <stdexcept>
#include <string>

namespace molopt::data {
namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_files();
}

std::string_view file(std::string_view name) {
  for (const auto& [n, content] : detail::embedded_files()) {
    if (n == name) return content;
  }
  throw std::out_of_range("no embedded data file '" + std::string(name) + "'");
}

const std::vector<std::pair<std::string_view, std::string_view>>& files() {
  return detail::embedded_files();
}

}  // namespace molopt::data
