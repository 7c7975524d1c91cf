//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>

#include "molopt/text.hpp"

namespace molopt {

std::optional<std::string> rendered_property(const ComputedProperties& c, std::string_view tag) {
  auto real = [](const std::optional<double>& v) -> std::optional<std::string> {
    if (!v) return std::nullopt;
    return format_fixed2(*v);
  };
  auto integer = [](const std::optional<int>& v) -> std::optional<std::string> {
    if (!v) return std::nullopt;
    return std::to_string(*v);
  };
  if (tag == "WEIGHT") return real(c.mw);
  if (tag == "TPSA") return real(c.tpsa);
  if (tag == "CLOGP") return real(c.clogp);
  if (tag == "SAS") return real(c.sas);
  if (tag == "QED") return real(c.qed);
  if (tag == "NUMHDONORS") return integer(c.hbd);
  if (tag == "NUMHACCEPTORS") return integer(c.hba);
  if (tag == "RINGCOUNT") return integer(c.rings);
  if (tag == "NUMAROMATICRINGS") return integer(c.aromatic_rings);
  if (tag == "NUMROTATABLEBONDS") return integer(c.rotatable_bonds);
  throw std::invalid_argument("not a computed-property tag: " + std::string(tag));
}

std::vector<McqItem> build_mcq(std::span<const MoleculeRecord> records, std::string_view tag, std::size_t count,
                               Rng& rng) {
  std::vector<std::size_t> carrying;
  std::vector<std::string> values;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (auto v = rendered_property(records[i].computed, tag)) {
      carrying.push_back(i);
      values.push_back(std::move(*v));
    }
  }
  const std::set<std::string> distinct(values.begin(), values.end());
  if (distinct.size() < kMcqChoices) {
    throw InsufficientRecords("need at least " + std::to_string(kMcqChoices) + " distinct " + std::string(tag) +
                              " values, found " + std::to_string(distinct.size()));
  }
  const std::vector<std::string> distinct_list(distinct.begin(), distinct.end());
  std::vector<McqItem> items;
  items.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto pick = rng.index(carrying.size());
    const auto& correct = values[pick];
    std::vector<std::string> chosen = {correct};
    // Empirical draws; a heavily skewed distribution falls back to a
    // uniform pick over distinct values.
    for (int attempt = 0; chosen.size() < kMcqChoices && attempt < 200; ++attempt) {
      const auto& v = values[rng.index(values.size())];
      if (std::find(chosen.begin(), chosen.end(), v) == chosen.end()) chosen.push_back(v);
    }
    while (chosen.size() < kMcqChoices) {
      const auto& v = distinct_list[rng.index(distinct_list.size())];
      if (std::find(chosen.begin(), chosen.end(), v) == chosen.end()) chosen.push_back(v);
    }
    McqItem item;
    item.stem = std::string(tags::kStartSmiles) + records[carrying[pick]].smiles + std::string(tags::kEndSmiles);
    item.correct_index = rng.index(kMcqChoices);
    std::swap(chosen[0], chosen[item.correct_index]);
    for (std::size_t c = 0; c < kMcqChoices; ++c) item.choices[c] = wrap_tag(tag, chosen[c]);
    items.push_back(std::move(item));
  }
  return items;
}

BackendChoiceScorer::BackendChoiceScorer(GeneratorBackend& backend) : backend_(backend) {
  if (!backend.capabilities().score) {
    throw GeneratorError(GeneratorError::Kind::kUnsupported, "backend does not support scoring");
  }
}

std::array<ChoiceScore, kMcqChoices> BackendChoiceScorer::score_choices(const McqItem& item) {
  const auto stem = backend_.score(item.stem);
  const auto n = stem.token_logprobs.size();
  std::array<ChoiceScore, kMcqChoices> out;
  for (std::size_t c = 0; c < kMcqChoices; ++c) {
    const auto full = backend_.score(item.stem + item.choices[c]);
    if (full.token_logprobs.size() <= n) {
      throw GeneratorError(GeneratorError::Kind::kProtocol, "continuation produced no tokens");
    }
    double lp = 0.0;
    for (std::size_t t = n; t < full.token_logprobs.size(); ++t) lp += full.token_logprobs[t];
    out[c] = {lp, full.token_logprobs.size() - n};
  }
  return out;
}

std::array<double, kMcqChoices> choice_probabilities(std::span<const ChoiceScore, kMcqChoices> scores,
                                                     Normalization mode) {
  std::array<double, kMcqChoices> logits{};
  for (std::size_t c = 0; c < kMcqChoices; ++c) {
    if (scores[c].tokens == 0) throw std::invalid_argument("choice score with zero tokens");
    logits[c] = mode == Normalization::kLengthNormalized ? scores[c].logprob / static_cast<double>(scores[c].tokens)
                                                         : scores[c].logprob;
  }
  const double hi = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(hi)) throw std::invalid_argument("no choice has finite likelihood");
  double total = 0.0;
  std::array<double, kMcqChoices> p{};
  for (std::size_t c = 0; c < kMcqChoices; ++c) total += p[c] = std::exp(logits[c] - hi);
  for (auto& v : p) v /= total;
  return p;
}

std::optional<double> CalibrationBin::accuracy() const {
  if (count == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(count);
}

namespace {

CalibrationItemResult evaluate_item(const McqItem& item, ChoiceScorer& scorer, Normalization mode) {
  const auto scores = scorer.score_choices(item);
  CalibrationItemResult r;
  r.probabilities = choice_probabilities(std::span<const ChoiceScore, kMcqChoices>(scores), mode);
  r.chosen = static_cast<std::size_t>(
      std::max_element(r.probabilities.begin(), r.probabilities.end()) - r.probabilities.begin());
  r.confidence = r.probabilities[r.chosen];
  r.correct = r.chosen == item.correct_index;
  return r;
}

}  // namespace

CalibrationResult calibration_table(std::span<const McqItem> items, ChoiceScorer& scorer, Normalization mode,
                                    std::size_t workers) {
  CalibrationResult result;
  result.items.resize(items.size());
  workers = std::max<std::size_t>(1, std::min(workers, items.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < items.size(); ++i) result.items[i] = evaluate_item(items[i], scorer, mode);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < items.size(); i += workers) result.items[i] = evaluate_item(items[i], scorer, mode);
      }));
    }
    for (auto& j : jobs) j.get();
  }
  for (std::size_t b = 0; b < result.bins.size(); ++b) {
    result.bins[b].low = static_cast<double>(b) / 10.0;
    result.bins[b].high = static_cast<double>(b + 1) / 10.0;
  }
  for (const auto& r : result.items) {
    const auto b = std::min<std::size_t>(9, static_cast<std::size_t>(std::floor(r.confidence * 10.0)));
    ++result.bins[b].count;
    if (r.correct) ++result.bins[b].correct;
  }
  return result;
}

std::string calibration_to_csv(const CalibrationResult& result) {
  std::string out = "bin_low,bin_high,count,accuracy\n";
  for (const auto& b : result.bins) {
    const auto acc = b.accuracy();
    out += format_fixed2(b.low) + ',' + format_fixed2(b.high) + ',' + std::to_string(b.count) + ',' +
           (acc ? format_double(*acc) : std::string()) + '\n';
  }
  return out;
}

}  // namespace molopt
