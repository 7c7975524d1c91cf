//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>

#include "molopt/corpus.hpp"
#include "molopt/generator.hpp"
#include "molopt/text.hpp"

namespace molopt {

void SamplingParams::validate() const {
  if (!(temperature >= 0.0 && temperature <= 4.0)) {
    throw std::invalid_argument("temperature must be in [0, 4], got " + format_double(temperature));
  }
  if (!(repetition_penalty >= 1.0 && repetition_penalty <= 2.0)) {
    throw std::invalid_argument("repetition_penalty must be in [1, 2], got " + format_double(repetition_penalty));
  }
  if (max_new_tokens <= 0) throw std::invalid_argument("max_new_tokens must be positive");
  if (stop_tag.empty()) throw std::invalid_argument("stop_tag must not be empty");
}

void TuneConfig::validate() const {
  if (!(peak_lr > 0.0) || !std::isfinite(peak_lr)) throw std::invalid_argument("peak_lr must be positive");
  if (warmup_steps < 0) throw std::invalid_argument("warmup_steps must be non-negative");
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw std::invalid_argument("validation_fraction must be in [0, 1)");
  }
}

ScoreResult GeneratorBackend::score(std::string_view) {
  throw GeneratorError(GeneratorError::Kind::kUnsupported, "backend does not support scoring");
}

void GeneratorBackend::tune(const std::vector<TrainingSample>&, const TuneConfig&) {
  throw GeneratorError(GeneratorError::Kind::kUnsupported, "backend does not support tuning");
}

std::optional<std::string> extract_smiles(std::string_view prompt, std::string_view completion, std::string_view stop_tag) {
  std::size_t begin = 0;
  const auto start = completion.find(tags::kStartSmiles);
  if (start != std::string_view::npos) {
    begin = start + tags::kStartSmiles.size();
  } else if (!prompt.ends_with(tags::kStartSmiles)) {
    return std::nullopt;
  }
  const auto end = completion.find(stop_tag, begin);
  if (end == std::string_view::npos || end == begin) return std::nullopt;
  return std::string(completion.substr(begin, end - begin));
}

PromptContent parse_prompt(std::string_view prompt) {
  PromptContent out;
  auto blocks = [&](std::string_view open, std::string_view close, auto&& fn) {
    std::size_t pos = 0;
    while ((pos = prompt.find(open, pos)) != std::string_view::npos) {
      const auto begin = pos + open.size();
      const auto end = prompt.find(close, begin);
      if (end == std::string_view::npos) break;
      fn(prompt.substr(begin, end - begin));
      pos = end + close.size();
    }
  };
  blocks("[SIMILAR]", "[/SIMILAR]", [&](std::string_view body) {
    const auto space = body.rfind(' ');
    if (space == std::string_view::npos) return;
    if (auto v = parse_double(body.substr(space + 1))) out.similars.emplace_back(std::string(body.substr(0, space)), *v);
  });
  blocks("[PROPERTY]", "[/PROPERTY]", [&](std::string_view body) {
    if (auto v = parse_double(trim(body))) out.property = *v;
  });
  return out;
}

}  // namespace molopt
