//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "molopt/generator.hpp"
#include "molopt/metrics.hpp"
#include "molopt/optimizer.hpp"

namespace molopt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

/// Invalid configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::string> backend;
  std::optional<std::string> remote_url;
};

/// Reads a JSON config and checks its "schema" field. Syntax errors are
/// reported with 1-based line and column.
nlohmann::json load_config(const std::filesystem::path& path, std::string_view expected_schema);
nlohmann::json parse_config_text(std::string_view text, std::string_view source, std::string_view expected_schema);

/// Strict conversions: unknown keys and wrong types throw ConfigError.
OptimizerConfig optimizer_config(const nlohmann::json& j);
MetricOptions metric_options(const nlohmann::json& j);

struct GeneratorSpec {
  std::string backend = "surrogate";
  std::string url;
  double timeout_seconds = 60.0;
  SurrogateGenerator::Options surrogate;
};
GeneratorSpec generator_spec(const nlohmann::json& j);
std::unique_ptr<GeneratorBackend> make_generator(const GeneratorSpec& spec);

struct GridAxes {
  std::vector<std::size_t> P = {10, 30, 50};
  std::vector<std::size_t> S = {0, 1, 2, 5};
  std::vector<std::size_t> K = {3, 5, 7};
  std::vector<double> lr = {1e-4, 1e-5};
};
GridAxes grid_axes(const nlohmann::json& j);

struct GridCell {
  std::size_t P = 0, S = 0, K = 0;
  double lr = 0.0;
};
std::vector<GridCell> grid_cells(const GridAxes& axes);

/// Index of the cell with the highest mean AUC; the first on ties.
std::size_t best_cell(const std::vector<double>& mean_auc);

int cmd_run(const std::filesystem::path& config, const Overrides& overrides);
int cmd_grid(const std::filesystem::path& config, const Overrides& overrides);
int cmd_corpus(const std::filesystem::path& config, const Overrides& overrides);
int cmd_calibrate(const std::filesystem::path& config, const Overrides& overrides);
int cmd_metrics(const std::filesystem::path& config, const Overrides& overrides);

/// Full command line (argv[0] included). Returns the exit code.
int main(int argc, char** argv);

}  // namespace molopt::cli
