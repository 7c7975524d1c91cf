//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <set>
#include <type_traits>

#include "fields.hpp"
#include "molopt/cli.hpp"
#include "molopt/io.hpp"

namespace molopt::cli {

Fields::Fields(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j.is_object()) throw ConfigError(path_ + ": expected an object");
}

const nlohmann::json* Fields::raw(const char* key) {
  used_.insert(key);
  const auto it = j_.find(key);
  return it == j_.end() ? nullptr : &*it;
}

std::string Fields::where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

void Fields::done() const {
  for (const auto& [k, v] : j_.items()) {
    if (!used_.count(k)) throw ConfigError(path_.empty() ? "unknown key '" + k + "'" : path_ + ": unknown key '" + k + "'");
  }
}

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

nlohmann::json parse_config_text(std::string_view text, std::string_view source, std::string_view expected_schema) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": invalid JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw ConfigError(std::string(source) + ": top level must be an object");
  const auto it = j.find("schema");
  if (it == j.end() || !it->is_string()) throw ConfigError(std::string(source) + ": missing \"schema\" string");
  if (it->get<std::string>() != expected_schema) {
    throw ConfigError(std::string(source) + ": schema is \"" + it->get<std::string>() + "\", expected \"" +
                      std::string(expected_schema) + "\"");
  }
  return j;
}

nlohmann::json load_config(const std::filesystem::path& path, std::string_view expected_schema) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_config_text(text, path.string(), expected_schema);
}

OptimizerConfig optimizer_config(const nlohmann::json& j) {
  OptimizerConfig c;
  Fields f(j, "optimizer");
  f.opt("P", c.P);
  f.opt("S", c.S);
  f.opt("N", c.N);
  f.opt("K", c.K);
  f.opt("budget", c.budget);
  f.opt("temp_start", c.temp_start);
  f.opt("temp_end", c.temp_end);
  f.opt("sim_low", c.sim_low);
  f.opt("sim_high", c.sim_high);
  f.opt("fixed_similarity", c.fixed_similarity);
  f.opt("tune_enabled", c.tune_enabled);
  f.opt("max_tune_rounds", c.max_tune_rounds);
  f.opt("target_score", c.target_score);
  f.opt("count_raw_calls", c.count_raw_calls);
  f.opt("retry_factor", c.retry_factor);
  f.opt("begin_marker", c.begin_marker);
  if (const auto* s = f.raw("sampling")) {
    Fields g(*s, "optimizer.sampling");
    g.opt("cot", c.sampling.cot);
    g.opt("repetition_penalty", c.sampling.repetition_penalty);
    g.opt("suppress_until_smiles", c.sampling.suppress_until_smiles);
    g.opt("suppress_tokens", c.sampling.suppress_tokens);
    g.opt("max_new_tokens", c.sampling.max_new_tokens);
    g.opt("stop_tag", c.sampling.stop_tag);
    g.done();
  }
  if (const auto* t = f.raw("tune")) {
    Fields g(*t, "optimizer.tune");
    g.opt("peak_lr", c.tune.peak_lr);
    g.opt("warmup_steps", c.tune.warmup_steps);
    g.opt("epochs", c.tune.epochs);
    g.opt("validation_fraction", c.tune.validation_fraction);
    g.done();
  }
  f.done();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("optimizer: ") + e.what());
  }
  return c;
}

MetricOptions metric_options(const nlohmann::json& j) {
  MetricOptions m;
  Fields f(j, "metrics");
  f.opt("checkpoint", m.checkpoint);
  std::string mode = "carry_forward";
  f.opt("early_stop", mode);
  if (mode == "carry_forward") {
    m.early_stop = EarlyStop::kCarryForward;
  } else if (mode == "zero_pad") {
    m.early_stop = EarlyStop::kZeroPad;
  } else {
    throw ConfigError("metrics.early_stop: expected \"carry_forward\" or \"zero_pad\"");
  }
  f.opt("yield_thresholds", m.yield_thresholds);
  f.opt("burden_counts", m.burden_counts);
  f.done();
  if (m.checkpoint == 0) throw ConfigError("metrics.checkpoint must be positive");
  return m;
}

GeneratorSpec generator_spec(const nlohmann::json& j) {
  GeneratorSpec g;
  Fields f(j, "generator");
  f.opt("backend", g.backend);
  f.opt("url", g.url);
  f.opt("timeout_seconds", g.timeout_seconds);
  if (const auto* s = f.raw("surrogate")) {
    Fields h(*s, "generator.surrogate");
    h.opt("min_parent_similarity", g.surrogate.min_parent_similarity);
    h.opt("max_heavy_atoms", g.surrogate.max_heavy_atoms);
    h.opt("max_attempts", g.surrogate.max_attempts);
    h.opt("smoothing", g.surrogate.smoothing);
    h.done();
  }
  f.done();
  if (g.backend != "surrogate" && g.backend != "remote") {
    throw ConfigError("generator.backend: expected \"surrogate\" or \"remote\"");
  }
  if (g.backend == "remote" && g.url.empty()) throw ConfigError("generator.url is required for the remote backend");
  return g;
}

std::unique_ptr<GeneratorBackend> make_generator(const GeneratorSpec& spec) {
  if (spec.backend == "remote") return std::make_unique<RemoteGenerator>(spec.url, spec.timeout_seconds);
  return std::make_unique<SurrogateGenerator>(spec.surrogate);
}

GridAxes grid_axes(const nlohmann::json& j) {
  GridAxes a;
  Fields f(j, "grid");
  f.opt("P", a.P);
  f.opt("S", a.S);
  f.opt("K", a.K);
  f.opt("lr", a.lr);
  f.done();
  if (a.P.empty() || a.S.empty() || a.K.empty() || a.lr.empty()) throw ConfigError("grid: every axis needs a value");
  return a;
}

std::vector<GridCell> grid_cells(const GridAxes& axes) {
  std::vector<GridCell> cells;
  for (const auto p : axes.P) {
    for (const auto s : axes.S) {
      for (const auto k : axes.K) {
        for (const auto lr : axes.lr) cells.push_back({p, s, k, lr});
      }
    }
  }
  return cells;
}

std::size_t best_cell(const std::vector<double>& mean_auc) {
  if (mean_auc.empty()) throw std::invalid_argument("best_cell of an empty grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < mean_auc.size(); ++i) {
    if (mean_auc[i] > mean_auc[best]) best = i;
  }
  return best;
}

}  // namespace molopt::cli
