//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "molopt/generator.hpp"
#include "molopt/oracle.hpp"
#include "molopt/rng.hpp"

namespace molopt {

struct PoolEntry {
  std::string molecule;
  double score = 0.0;
  /// Prompt molecules this one was generated from.
  std::vector<std::string> parents;
  friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

/// Top-P molecules, unique by canonical SMILES, ordered by score descending
/// then SMILES ascending.
class Pool {
 public:
  explicit Pool(std::size_t capacity) : capacity_(capacity) { }
  /// Adds entries (later duplicates of a present molecule are ignored) and
  /// truncates to capacity.
  void merge(std::vector<PoolEntry> entries);
  const std::vector<PoolEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::optional<double> best() const;

 private:
  std::size_t capacity_;
  std::vector<PoolEntry> entries_;
};

struct OptimizerConfig {
  std::size_t P = 50;
  std::size_t S = 2;
  std::size_t N = 200;
  std::size_t K = 5;
  std::size_t budget = 3000;
  double temp_start = 1.0;
  double temp_end = 1.5;
  double sim_low = 0.4;
  double sim_high = 0.9;
  /// Write this similarity for every prompt parent instead of sampling.
  std::optional<double> fixed_similarity;
  bool tune_enabled = true;
  TuneConfig tune;
  /// Defaults to budget / (N * K).
  std::optional<std::size_t> max_tune_rounds;
  /// Stop once the best score reaches this value; defaults to oracle_max.
  std::optional<double> target_score;
  bool count_raw_calls = false;
  std::uint64_t seed = 0;
  /// temperature is overwritten by the schedule.
  SamplingParams sampling;
  std::string begin_marker = "<bos>";
  /// Generation attempts per iteration are capped at retry_factor * N.
  std::size_t retry_factor = 10;

  void validate() const;
  std::size_t tune_round_limit() const;
};

/// temp_start + (temp_end - temp_start) * calls_used / budget.
double temperature(std::size_t calls_used, std::size_t budget, const OptimizerConfig& cfg);

struct PromptContext {
  std::string begin_marker = "<bos>";
  double sim_low = 0.4;
  double sim_high = 0.9;
  std::optional<double> fixed_similarity;
  bool cot = true;
  /// At least one tuning round has completed.
  bool tuned = false;
  double v_max = 0.0;
  double oracle_max = 1.0;
};

struct TrainingTarget {
  std::string smiles;
  /// Cached oracle score of smiles.
  double score = 0.0;
};

/// Prompt for the language model. Without a target (generation mode) each
/// parent gets "[SIMILAR]p v[/SIMILAR]" with v ~ U(sim_low, sim_high), a
/// "[PROPERTY]v[/PROPERTY]" with v ~ U(v_max, oracle_max) follows once tuning
/// has happened, and "[START_SMILES]" ends the prompt unless cot is set.
/// With a target (training mode) the similarities are the Tanimoto values
/// to the target, the property is its score, and the text ends with
/// "[START_SMILES]m[END_SMILES]</s>". Numbers are truncated to 2 decimals.
std::string molecules2prompt(const std::vector<std::string>& parents, const std::optional<TrainingTarget>& target,
                             const PromptContext& ctx, Rng& rng);

/// Splits a training-mode prompt after its last [START_SMILES].
TrainingSample to_training_sample(const std::string& training_prompt);

struct IterationInfo {
  std::size_t iteration = 0;
  std::size_t attempts = 0;
  std::size_t invalid = 0;
  std::size_t duplicates = 0;
  std::size_t new_molecules = 0;
  std::size_t calls_used = 0;
  double best = 0.0;
  bool tuned_after = false;
};

class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_prompt(const std::string& /*prompt*/, const PromptContext& /*ctx*/) { }
  virtual void on_iteration(const IterationInfo& /*info*/, const Pool& /*pool*/) { }
  virtual void on_tune(const std::vector<TrainingSample>& /*samples*/) { }
};

struct RunResult {
  RunTrace trace;
  std::vector<PoolEntry> pool;
  std::size_t iterations = 0;
  std::size_t tune_rounds = 0;
  std::size_t generation_attempts = 0;
  std::size_t invalid_generations = 0;
  std::size_t duplicate_generations = 0;
  /// "budget", "target", "stalled" (an iteration produced nothing new) or
  /// "empty_budget".
  std::string stop_reason;
};

/// The pool loop. Deterministic for a deterministic backend and a fixed
/// cfg.seed. Generator and oracle errors propagate.
RunResult run(const OracleSpec& oracle, GeneratorBackend& generator, const OptimizerConfig& cfg,
              RunObserver* observer = nullptr);

nlohmann::json run_summary(const RunResult& result, const OptimizerConfig& cfg);

}  // namespace molopt
