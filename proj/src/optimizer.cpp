//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "molopt/corpus.hpp"
#include "molopt/fingerprint.hpp"
#include "molopt/text.hpp"

namespace molopt {

void Pool::merge(std::vector<PoolEntry> entries) {
  std::unordered_set<std::string> present;
  for (const auto& e : entries_) present.insert(e.molecule);
  for (auto& e : entries) {
    if (present.insert(e.molecule).second) entries_.push_back(std::move(e));
  }
  std::sort(entries_.begin(), entries_.end(), [](const PoolEntry& a, const PoolEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.molecule < b.molecule;
  });
  if (entries_.size() > capacity_) entries_.resize(capacity_);
}

std::optional<double> Pool::best() const {
  if (entries_.empty()) return std::nullopt;
  return entries_.front().score;
}

void OptimizerConfig::validate() const {
  if (P < 1) throw std::invalid_argument("P must be at least 1");
  if (N < 1) throw std::invalid_argument("N must be at least 1");
  if (K < 1) throw std::invalid_argument("K must be at least 1");
  if (!(sim_low >= 0.0 && sim_low <= sim_high && sim_high <= 1.0)) {
    throw std::invalid_argument("similarity bounds must satisfy 0 <= sim_low <= sim_high <= 1");
  }
  if (fixed_similarity && !(*fixed_similarity >= 0.0 && *fixed_similarity <= 1.0)) {
    throw std::invalid_argument("fixed_similarity must be in [0, 1]");
  }
  if (!(temp_start >= 0.0 && temp_start <= 4.0 && temp_end >= 0.0 && temp_end <= 4.0)) {
    throw std::invalid_argument("temperatures must be in [0, 4]");
  }
  if (retry_factor < 1) throw std::invalid_argument("retry_factor must be at least 1");
  sampling.validate();
  tune.validate();
}

std::size_t OptimizerConfig::tune_round_limit() const {
  if (max_tune_rounds) return *max_tune_rounds;
  return budget / (N * K);
}

double temperature(std::size_t calls_used, std::size_t budget, const OptimizerConfig& cfg) {
  if (budget == 0) return cfg.temp_start;
  const double frac = static_cast<double>(std::min(calls_used, budget)) / static_cast<double>(budget);
  return cfg.temp_start + (cfg.temp_end - cfg.temp_start) * frac;
}

std::string molecules2prompt(const std::vector<std::string>& parents, const std::optional<TrainingTarget>& target,
                             const PromptContext& ctx, Rng& rng) {
  std::string p = ctx.begin_marker;
  std::optional<Fingerprint> target_fp;
  if (target) target_fp = ecfc(chem::parse_smiles(target->smiles), 2);
  for (const auto& parent : parents) {
    double v;
    if (target) {
      v = tanimoto(ecfc(chem::parse_smiles(parent), 2), *target_fp);
    } else if (ctx.fixed_similarity) {
      v = *ctx.fixed_similarity;
    } else {
      v = rng.uniform(ctx.sim_low, ctx.sim_high);
    }
    p += wrap_tag("SIMILAR", parent + " " + format_truncated2(v));
  }
  if (target) {
    p += wrap_tag("PROPERTY", format_truncated2(target->score));
    p += tags::kStartSmiles;
    p += target->smiles;
    p += tags::kEndSmiles;
    p += tags::kEos;
    return p;
  }
  if (ctx.tuned) p += wrap_tag("PROPERTY", format_truncated2(rng.uniform(ctx.v_max, ctx.oracle_max)));
  if (!ctx.cot) p += tags::kStartSmiles;
  return p;
}

TrainingSample to_training_sample(const std::string& training_prompt) {
  const auto pos = training_prompt.rfind(tags::kStartSmiles);
  if (pos == std::string::npos) throw std::invalid_argument("training prompt lacks [START_SMILES]");
  const auto split = pos + tags::kStartSmiles.size();
  return {training_prompt.substr(0, split), training_prompt.substr(split)};
}

namespace {

std::vector<std::string> random_subset(const Pool& pool, std::size_t s, Rng& rng) {
  const auto n = pool.size();
  const auto k = std::min(s, n);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(pool.entries()[idx[i]].molecule);
  return out;
}

}  // namespace

RunResult run(const OracleSpec& oracle, GeneratorBackend& generator, const OptimizerConfig& cfg, RunObserver* observer) {
  cfg.validate();
  RunResult result;
  BudgetLedger ledger(cfg.budget, cfg.count_raw_calls);
  Pool pool(cfg.P);
  Rng rng(cfg.seed);
  const double oracle_max = oracle.oracle_max();
  const double target = cfg.target_score.value_or(oracle_max);
  const auto tune_limit = cfg.tune_round_limit();
  std::size_t stagnant = 0;
  std::uint64_t attempt_counter = 0;

  PromptContext ctx;
  ctx.begin_marker = cfg.begin_marker;
  ctx.sim_low = cfg.sim_low;
  ctx.sim_high = cfg.sim_high;
  ctx.fixed_similarity = cfg.fixed_similarity;
  ctx.cot = cfg.sampling.cot;

  auto finish = [&](std::string reason) {
    result.trace = ledger.trace();
    result.pool = pool.entries();
    result.stop_reason = std::move(reason);
    return result;
  };
  if (cfg.budget == 0) return finish("empty_budget");

  while (true) {
    IterationInfo info;
    info.iteration = ++result.iterations;
    const double best_before = pool.best().value_or(-std::numeric_limits<double>::infinity());
    const auto remaining = cfg.budget - ledger.used();
    const auto wanted = std::min(cfg.N, remaining);
    std::vector<PoolEntry> fresh;
    std::unordered_set<std::string> seen;
    SamplingParams params = cfg.sampling;
    params.temperature = temperature(ledger.used(), cfg.budget, cfg);
    ctx.v_max = pool.best().value_or(0.0);
    // Unbounded objectives ask for the current best.
    ctx.oracle_max = std::isfinite(oracle_max) ? oracle_max : ctx.v_max;
    while (fresh.size() < wanted && info.attempts < cfg.retry_factor * cfg.N) {
      ++info.attempts;
      auto parents = random_subset(pool, cfg.S, rng);
      const auto prompt = molecules2prompt(parents, std::nullopt, ctx, rng);
      if (observer) observer->on_prompt(prompt, ctx);
      Rng gen_rng = rng.fork(attempt_counter++);
      const auto completion = generator.generate(prompt, params, gen_rng);
      const auto smiles = extract_smiles(prompt, completion, params.stop_tag);
      if (!smiles) {
        ++info.invalid;
        continue;
      }
      std::string canon;
      try {
        canon = chem::canonicalize(*smiles).text;
      } catch (const std::exception&) {
        ++info.invalid;
        continue;
      }
      if (ledger.contains(canon) || !seen.insert(canon).second) {
        ++info.duplicates;
        continue;
      }
      fresh.push_back({canon, 0.0, std::move(parents)});
    }
    bool exhausted = false;
    std::vector<PoolEntry> scored;
    for (auto& e : fresh) {
      try {
        e.score = ledger.evaluate(oracle, Molecule::parse(e.molecule));
      } catch (const BudgetExhausted&) {
        exhausted = true;
        break;
      }
      scored.push_back(std::move(e));
    }
    info.new_molecules = scored.size();
    pool.merge(std::move(scored));
    result.generation_attempts += info.attempts;
    result.invalid_generations += info.invalid;
    result.duplicate_generations += info.duplicates;
    info.calls_used = ledger.used();
    const double best_now = pool.best().value_or(-std::numeric_limits<double>::infinity());
    info.best = pool.best().value_or(0.0);

    const bool done_budget = exhausted || ledger.used() >= cfg.budget;
    const bool done_target = best_now >= target;
    const bool stalled = info.new_molecules == 0;
    if (!done_budget && !done_target && !stalled) {
      stagnant = best_now > best_before ? 0 : stagnant + 1;
      if (stagnant >= cfg.K && cfg.tune_enabled && result.tune_rounds < tune_limit) {
        std::vector<TrainingSample> samples;
        PromptContext train_ctx = ctx;
        for (const auto& e : pool.entries()) {
          samples.push_back(to_training_sample(molecules2prompt(e.parents, TrainingTarget{e.molecule, e.score}, train_ctx, rng)));
        }
        if (observer) observer->on_tune(samples);
        generator.tune(samples, cfg.tune);
        ++result.tune_rounds;
        ctx.tuned = true;
        stagnant = 0;
        info.tuned_after = true;
      }
    }
    if (observer) observer->on_iteration(info, pool);
    if (done_budget) return finish("budget");
    if (done_target) return finish("target");
    if (stalled) return finish("stalled");
  }
}

nlohmann::json run_summary(const RunResult& result, const OptimizerConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["budget"] = cfg.budget;
  j["calls_used"] = result.trace.entries.size();
  j["iterations"] = result.iterations;
  j["tune_rounds"] = result.tune_rounds;
  j["generation_attempts"] = result.generation_attempts;
  j["invalid_generations"] = result.invalid_generations;
  j["duplicate_generations"] = result.duplicate_generations;
  j["stop_reason"] = result.stop_reason;
  j["pool"] = nlohmann::json::array();
  for (const auto& e : result.pool) j["pool"].push_back({{"smiles", e.molecule}, {"score", e.score}, {"parents", e.parents}});
  if (!result.pool.empty()) j["best"] = {{"smiles", result.pool.front().molecule}, {"score", result.pool.front().score}};
  return j;
}

}  // namespace molopt
