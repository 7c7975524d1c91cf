//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <regex>

#include <doctest.h>

#include "molopt/chem/smiles.hpp"
#include "molopt/fingerprint.hpp"
#include "molopt/optimizer.hpp"
#include "molopt/text.hpp"

using namespace molopt;

namespace {

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

/// Returns the same molecule every time.
class FixedGenerator final : public GeneratorBackend {
 public:
  Capabilities capabilities() const override { return {true, false, false}; }
  std::string generate(const std::string&, const SamplingParams&, Rng&) override {
    return "[START_SMILES]CCO[END_SMILES]";
  }
};

class BrokenGenerator final : public GeneratorBackend {
 public:
  Capabilities capabilities() const override { return {true, false, false}; }
  std::string generate(const std::string&, const SamplingParams&, Rng&) override {
    throw GeneratorError(GeneratorError::Kind::kUnavailable, "down");
  }
};

struct PromptLog final : RunObserver {
  std::size_t prompts = 0, violations = 0, tunes = 0;
  void on_prompt(const std::string& prompt, const PromptContext& ctx) override {
    ++prompts;
    if ((prompt.find("[PROPERTY]") != std::string::npos) != ctx.tuned) ++violations;
  }
  void on_tune(const std::vector<TrainingSample>& samples) override {
    ++tunes;
    for (const auto& s : samples) {
      if (!s.completion.ends_with("[END_SMILES]</s>")) ++violations;
    }
  }
};

OptimizerConfig small_config() {
  OptimizerConfig c;
  c.P = 10;
  c.S = 2;
  c.N = 20;
  c.K = 2;
  c.budget = 300;
  return c;
}

}  // namespace

TEST_CASE("pool: ordering, uniqueness, capacity") {
  Pool pool(3);
  pool.merge({{"CCC", 0.5, {}}, {"CCO", 0.9, {}}, {"CCN", 0.5, {}}});
  pool.merge({{"CCO", 0.1, {}}, {"C", 0.7, {}}});
  REQUIRE(pool.size() == 3);
  CHECK(pool.entries()[0].molecule == "CCO");
  CHECK(pool.entries()[0].score == 0.9);
  CHECK(pool.entries()[1].molecule == "C");
  CHECK(pool.entries()[2].molecule == "CCC");  // tie broken by SMILES
  CHECK(pool.best() == 0.9);
  CHECK_FALSE(Pool(2).best().has_value());
}

TEST_CASE("temperature schedule is linear in calls used") {
  OptimizerConfig c;
  CHECK(temperature(0, 3000, c) == 1.0);
  CHECK(temperature(1500, 3000, c) == doctest::Approx(1.25));
  CHECK(temperature(3000, 3000, c) == 1.5);
  CHECK(temperature(5000, 3000, c) == 1.5);
}

TEST_CASE("molecules2prompt: generation mode") {
  Rng rng(1);
  PromptContext ctx;
  const std::vector<std::string> parents = {"CCO", "c1ccccc1"};
  const auto p = molecules2prompt(parents, std::nullopt, ctx, rng);
  CHECK(p.starts_with("<bos>[SIMILAR]CCO 0."));
  CHECK(count_of(p, "[SIMILAR]") == 2);
  CHECK(p.find("[PROPERTY]") == std::string::npos);
  CHECK_FALSE(p.ends_with("[START_SMILES]"));

  ctx.cot = false;
  ctx.fixed_similarity = 0.8;
  CHECK(molecules2prompt(parents, std::nullopt, ctx, rng) ==
        "<bos>[SIMILAR]CCO 0.80[/SIMILAR][SIMILAR]c1ccccc1 0.80[/SIMILAR][START_SMILES]");

  ctx.tuned = true;
  ctx.v_max = 0.5;
  ctx.oracle_max = 1.0;
  const std::regex prop(R"(\[PROPERTY\]([0-9.]+)\[/PROPERTY\])");
  for (int k = 0; k < 200; ++k) {
    const auto q = molecules2prompt(parents, std::nullopt, ctx, rng);
    std::smatch m;
    REQUIRE(std::regex_search(q, m, prop));
    const double v = *parse_double(m[1].str());
    CHECK(v >= 0.5);
    CHECK(v <= 1.0);
  }
  CHECK(molecules2prompt({}, std::nullopt, PromptContext{}, rng) == "<bos>");
}

TEST_CASE("molecules2prompt: training mode") {
  Rng rng(1);
  PromptContext ctx;
  const std::string target = "CC(=O)Oc1ccccc1C(=O)O";
  const std::string parent = "O=C(Oc1ccccc1C(=O)O)c1ccccc1O";
  const auto p = molecules2prompt({parent}, TrainingTarget{target, 0.8765}, ctx, rng);
  CHECK(p == "<bos>[SIMILAR]" + parent + " 0.50[/SIMILAR][PROPERTY]0.87[/PROPERTY][START_SMILES]" + target +
                 "[END_SMILES]</s>");
  const auto s = to_training_sample(p);
  CHECK(s.prompt.ends_with("[START_SMILES]"));
  CHECK(s.completion == target + "[END_SMILES]</s>");
  CHECK_THROWS(to_training_sample("<bos>"));
}

TEST_CASE("run: budget, trace shape, determinism") {
  const auto oracle = rediscovery_oracle("CC(=O)Oc1ccccc1C(=O)O");
  auto cfg = small_config();
  SurrogateGenerator g1, g2;
  const auto a = run(*oracle, g1, cfg);
  const auto b = run(*oracle, g2, cfg);
  CHECK(a.trace == b.trace);
  CHECK(a.trace.entries.size() <= cfg.budget);
  for (std::size_t i = 0; i < a.trace.entries.size(); ++i) CHECK(a.trace.entries[i].call_index == i + 1);
  CHECK(a.pool.size() <= cfg.P);
  CHECK((a.stop_reason == "budget" || a.stop_reason == "target"));
  cfg.seed = 1;
  SurrogateGenerator g3;
  CHECK_FALSE(run(*oracle, g3, cfg).trace == a.trace);
}

TEST_CASE("run: stagnation triggers tuning and [PROPERTY] appears only afterwards") {
  const auto oracle = constant_oracle(0.5);
  auto cfg = small_config();
  cfg.max_tune_rounds = 3;
  SurrogateGenerator gen;
  PromptLog log;
  const auto r = run(*oracle, gen, cfg, &log);
  CHECK(r.tune_rounds == 3);
  CHECK(gen.tune_rounds() == 3);
  CHECK(log.tunes == 3);
  CHECK(log.violations == 0);
  CHECK(log.prompts > 0);

  cfg.tune_enabled = false;
  SurrogateGenerator plain;
  CHECK(run(*oracle, plain, cfg).tune_rounds == 0);
  CHECK(plain.tune_rounds() == 0);
}

TEST_CASE("run: stop reasons and failures") {
  auto cfg = small_config();
  SurrogateGenerator gen;
  const auto done = run(*constant_oracle(1.0), gen, cfg);
  CHECK(done.stop_reason == "target");
  CHECK(done.trace.entries.size() == cfg.N);

  cfg.budget = 0;
  const auto empty = run(*constant_oracle(0.1), gen, cfg);
  CHECK(empty.stop_reason == "empty_budget");
  CHECK(empty.trace.entries.empty());

  cfg.budget = 100;
  FixedGenerator fixed;
  const auto stalled = run(*constant_oracle(0.1), fixed, cfg);
  CHECK(stalled.stop_reason == "stalled");
  CHECK(stalled.trace.entries.size() == 1);

  BrokenGenerator broken;
  CHECK_THROWS_AS(run(*constant_oracle(0.1), broken, cfg), GeneratorError);
}

TEST_CASE("run: best-so-far never decreases, S = 0 works") {
  const auto oracle = descriptor_oracle("qed");
  auto cfg = small_config();
  cfg.S = 0;
  SurrogateGenerator gen;
  struct Best final : RunObserver {
    double last = -1.0;
    bool ok = true;
    void on_iteration(const IterationInfo& info, const Pool&) override {
      ok = ok && info.best >= last;
      last = info.best;
    }
  } best;
  const auto r = run(*oracle, gen, cfg, &best);
  CHECK(best.ok);
  CHECK(r.trace.entries.size() == cfg.budget);
}

TEST_CASE("config validation") {
  OptimizerConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.tune_round_limit() == 3);
  c.sim_low = 0.95;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.N = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
