//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cstdlib>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "molopt/cli.hpp"

namespace molopt::cli {

namespace {

void init_logging() {
  static const auto logger = [] {
    auto l = spdlog::stderr_color_mt("molopt");
    spdlog::set_default_logger(l);
    return l;
  }();
  const char* level = std::getenv("MOLOPT_LOG");
  logger->set_level(level ? spdlog::level::from_str(level) : spdlog::level::info);
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Language-model-guided molecular optimization"};
  app.require_subcommand(1);
  std::string config;
  std::string out;
  std::vector<std::uint64_t> seeds;
  std::string backend;
  std::string remote_url;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"run", "Optimize once per seed"},
      {"grid", "Sweep the pool/similar/tolerance/learning-rate grid"},
      {"corpus", "Render and pack a training corpus"},
      {"calibrate", "Multiple-choice calibration of a scoring backend"},
      {"metrics", "Metrics for a trace CSV"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON config")->required();
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seeds", seeds, "Comma-separated seeds")->delimiter(',');
    sub->add_option("--backend", backend, "surrogate or remote");
    sub->add_option("--remote-url", remote_url, "Generation server URL");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  Overrides ov;
  if (!out.empty()) ov.out = out;
  if (!seeds.empty()) ov.seeds = seeds;
  if (!backend.empty()) ov.backend = backend;
  if (!remote_url.empty()) ov.remote_url = remote_url;
  const auto* sub = app.get_subcommands().front();
  const auto& name = sub->get_name();
  if (name == "run") return cmd_run(config, ov);
  if (name == "grid") return cmd_grid(config, ov);
  if (name == "corpus") return cmd_corpus(config, ov);
  if (name == "calibrate") return cmd_calibrate(config, ov);
  return cmd_metrics(config, ov);
}

}  // namespace molopt::cli
