//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string_view>
#include <utility>
#include <vector>

namespace molopt::data {

/// Contents of a parameter file compiled in from the data/ directory.
/// Throws std::out_of_range for unknown names.
std::string_view file(std::string_view name);

/// Every embedded (name, contents) pair, in build order.
const std::vector<std::pair<std::string_view, std::string_view>>& files();

}  // namespace molopt::data
