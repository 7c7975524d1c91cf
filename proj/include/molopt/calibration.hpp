//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "molopt/corpus.hpp"
#include "molopt/generator.hpp"
#include "molopt/rng.hpp"

namespace molopt {

inline constexpr std::size_t kMcqChoices = 5;

struct McqItem {
  /// "[START_SMILES]m[END_SMILES]"
  std::string stem;
  /// "[TAG]v[/TAG]" continuations.
  std::array<std::string, kMcqChoices> choices;
  std::size_t correct_index = 0;
};

class InsufficientRecords : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The value a record would render for a computed-property tag (WEIGHT,
/// TPSA, CLOGP, SAS, QED, NUMHDONORS, ...). Throws std::invalid_argument on
/// an unknown tag.
std::optional<std::string> rendered_property(const ComputedProperties& c, std::string_view tag);

/// Picks records carrying the property uniformly with replacement. The four
/// distractors are drawn from the empirical distribution of rendered values
/// over all carrying records, distinct from the correct value and from each
/// other. Throws InsufficientRecords when fewer than five distinct rendered
/// values exist.
std::vector<McqItem> build_mcq(std::span<const MoleculeRecord> records, std::string_view tag, std::size_t count,
                               Rng& rng);

struct ChoiceScore {
  /// Summed log-probability of the continuation tokens.
  double logprob = 0.0;
  std::size_t tokens = 1;
};

class ChoiceScorer {
 public:
  virtual ~ChoiceScorer() = default;
  /// One score per choice. Must be reentrant when used with workers > 1.
  virtual std::array<ChoiceScore, kMcqChoices> score_choices(const McqItem& item) = 0;
};

/// Continuation log-probability from a generator backend: the token
/// log-probabilities of stem + choice past the tokens of stem. Throws
/// GeneratorError(kUnsupported) if the backend cannot score.
class BackendChoiceScorer final : public ChoiceScorer {
 public:
  explicit BackendChoiceScorer(GeneratorBackend& backend);
  std::array<ChoiceScore, kMcqChoices> score_choices(const McqItem& item) override;

 private:
  GeneratorBackend& backend_;
};

enum class Normalization {
  /// Geometric-mean per-token probability, renormalized over choices.
  kLengthNormalized,
  /// Whole-continuation likelihood, renormalized over choices.
  kRaw,
};

std::array<double, kMcqChoices> choice_probabilities(std::span<const ChoiceScore, kMcqChoices> scores,
                                                     Normalization mode);

struct CalibrationBin {
  double low = 0.0;
  double high = 0.0;
  std::size_t count = 0;
  std::size_t correct = 0;
  /// nullopt for an empty bin.
  std::optional<double> accuracy() const;
};

struct CalibrationItemResult {
  std::array<double, kMcqChoices> probabilities{};
  /// argmax, lowest index on ties.
  std::size_t chosen = 0;
  double confidence = 0.0;
  bool correct = false;
};

struct CalibrationResult {
  std::array<CalibrationBin, 10> bins;
  std::vector<CalibrationItemResult> items;
};

/// Ten equal-width confidence bins over [0, 1]; the last bin includes 1.
CalibrationResult calibration_table(std::span<const McqItem> items, ChoiceScorer& scorer,
                                    Normalization mode = Normalization::kLengthNormalized, std::size_t workers = 1);

/// bin_low,bin_high,count,accuracy (accuracy empty for an empty bin).
std::string calibration_to_csv(const CalibrationResult& result);

}  // namespace molopt
