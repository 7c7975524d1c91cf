//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "molopt/rng.hpp"

namespace molopt {

struct SamplingParams {
  double temperature = 1.0;
  double repetition_penalty = 1.010;
  /// Suppress the tokens in `suppress_tokens` until [START_SMILES] appears.
  bool suppress_until_smiles = true;
  std::vector<std::string> suppress_tokens = {"</s>"};
  /// The prompt omits the trailing [START_SMILES]; the model writes it.
  bool cot = true;
  int max_new_tokens = 256;
  std::string stop_tag = "[END_SMILES]";

  /// Throws std::invalid_argument when a field is outside its range.
  void validate() const;
};

struct TrainingSample {
  std::string prompt;
  /// Ends with "[END_SMILES]" followed by the end-of-sequence marker.
  std::string completion;
};

struct TuneConfig {
  double peak_lr = 1e-4;
  int warmup_steps = 0;
  int epochs = 3;
  double validation_fraction = 0.1;

  void validate() const;
};

struct ScoreResult {
  std::vector<double> token_logprobs;
  double total = 0.0;
};

class GeneratorError : public std::runtime_error {
 public:
  enum class Kind { kUnavailable, kUnsupported, kProtocol, kInvalidArgument };
  GeneratorError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) { }
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct Capabilities {
  bool generate = true;
  bool score = false;
  bool tune = false;
};

/// The language-model role of the optimization loop. generate and score are
/// reentrant; tune needs exclusive access and callers must not generate
/// while it runs.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual Capabilities capabilities() const = 0;
  /// Returns the completion text (prompt not included).
  virtual std::string generate(const std::string& prompt, const SamplingParams& params, Rng& rng) = 0;
  virtual ScoreResult score(std::string_view text);
  virtual void tune(const std::vector<TrainingSample>& samples, const TuneConfig& cfg);
};

/// SMILES between [START_SMILES] and the stop tag. When the completion does
/// not contain [START_SMILES] the prompt must end with it. nullopt when
/// either tag is missing or the span is empty.
std::optional<std::string> extract_smiles(std::string_view prompt, std::string_view completion,
                                          std::string_view stop_tag = "[END_SMILES]");

/// Parents and property target read back from a generation prompt.
struct PromptContent {
  std::vector<std::pair<std::string, double>> similars;
  std::optional<double> property;
};
PromptContent parse_prompt(std::string_view prompt);

/// Genetic stand-in for the language model. Parents found in [SIMILAR]
/// blocks are recombined at acyclic single bonds and point-mutated (element
/// swap within valence, bond order toggle, atom add/remove, ring append);
/// parentless prompts are assembled from the fragment library. tune re-fits
/// fragment weights toward fragments of the completions, and [PROPERTY]
/// targets bias selection toward fragments whose tuned-sample mean score is
/// near the target. score uses a token bigram model over the reference
/// tokenizer.
class SurrogateGenerator final : public GeneratorBackend {
 public:
  struct Options {
    /// Candidates less similar than this to every parent are resampled,
    /// standing in for the prompt's similarity conditioning.
    double min_parent_similarity = 0.2;
    std::size_t max_heavy_atoms = 60;
    int max_attempts = 16;
    /// Add-one style smoothing of the bigram scorer.
    double smoothing = 0.1;
  };

  SurrogateGenerator();
  explicit SurrogateGenerator(Options options);
  ~SurrogateGenerator() override;

  Capabilities capabilities() const override { return {true, true, true}; }
  std::string generate(const std::string& prompt, const SamplingParams& params, Rng& rng) override;
  ScoreResult score(std::string_view text) override;
  void tune(const std::vector<TrainingSample>& samples, const TuneConfig& cfg) override;

  /// Next-token distribution of the scorer after token `previous`.
  std::vector<double> next_token_probabilities(std::int32_t previous) const;
  /// Current selection weight of a fragment given as canonical SMILES (0
  /// when absent).
  double fragment_weight(std::string_view canonical_smiles) const;
  std::size_t tune_rounds() const;

  struct State;

 private:
  Options options_;
  std::unique_ptr<State> state_;
};

/// Client for the HTTP generation protocol:
///   POST /generate {prompt, temperature, repetition_penalty, suppress, stop,
///                   max_new_tokens, n} -> {completions:[{text, token_logprobs?}]}
///   POST /score {text} -> {token_logprobs, total}
///   POST /tune {samples:[{prompt, completion}], peak_lr, warmup_steps, epochs,
///               validation_fraction} -> {status}
class RemoteGenerator final : public GeneratorBackend {
 public:
  /// url like "http://127.0.0.1:8080".
  explicit RemoteGenerator(std::string url, double timeout_seconds = 60.0);
  ~RemoteGenerator() override;

  Capabilities capabilities() const override { return {true, true, true}; }
  std::string generate(const std::string& prompt, const SamplingParams& params, Rng& rng) override;
  ScoreResult score(std::string_view text) override;
  void tune(const std::vector<TrainingSample>& samples, const TuneConfig& cfg) override;

  /// JSON bodies as sent; exposed for protocol tests.
  static std::string generate_body(const std::string& prompt, const SamplingParams& params);
  static std::string score_body(std::string_view text);
  static std::string tune_body(const std::vector<TrainingSample>& samples, const TuneConfig& cfg);

 private:
  std::string post(const std::string& path, const std::string& body);

  std::string url_;
  double timeout_;
};

}  // namespace molopt
