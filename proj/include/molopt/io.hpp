//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace molopt::io {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over the target, so a
/// reader never observes a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace molopt::io
