//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <limits>
#include <set>

#include <doctest.h>

#include "molopt/calibration.hpp"
#include "support.hpp"

using namespace molopt;

namespace {

class OracleScorer final : public ChoiceScorer {
 public:
  std::array<ChoiceScore, kMcqChoices> score_choices(const McqItem& item) override {
    std::array<ChoiceScore, kMcqChoices> out;
    for (std::size_t i = 0; i < kMcqChoices; ++i) {
      out[i] = {i == item.correct_index ? 0.0 : -std::numeric_limits<double>::infinity(), 1};
    }
    return out;
  }
};

class UniformScorer final : public ChoiceScorer {
 public:
  std::array<ChoiceScore, kMcqChoices> score_choices(const McqItem&) override {
    std::array<ChoiceScore, kMcqChoices> out;
    out.fill({-3.0, 2});
    return out;
  }
};

std::string inner(const std::string& choice) {
  const auto a = choice.find(']') + 1;
  return choice.substr(a, choice.rfind('[') - a);
}

}  // namespace

TEST_CASE("build_mcq: shape, correctness and distinct choices") {
  const auto& records = test::golden_records();
  Rng rng(1);
  const auto one = build_mcq(records, "CLOGP", 1, rng);
  REQUIRE(one.size() == 1);
  CHECK(one[0].stem.starts_with("[START_SMILES]"));
  CHECK(one[0].stem.ends_with("[END_SMILES]"));
  Rng big(2);
  const auto items = build_mcq(records, "WEIGHT", 2000, big);
  CHECK(items.size() == 2000);
  std::size_t at[kMcqChoices] = {};
  for (const auto& item : items) {
    std::set<std::string> values;
    for (const auto& c : item.choices) {
      CHECK(c.starts_with("[WEIGHT]"));
      CHECK(c.ends_with("[/WEIGHT]"));
      values.insert(inner(c));
    }
    CHECK(values.size() == kMcqChoices);
    ++at[item.correct_index];
    const auto smiles = item.stem.substr(14, item.stem.size() - 14 - 12);
    bool found = false;
    for (const auto& r : records) found = found || (r.smiles == smiles && rendered_property(r.computed, "WEIGHT") == inner(item.choices[item.correct_index]));
    CHECK(found);
  }
  for (const auto n : at) CHECK(n > 300);
}

TEST_CASE("build_mcq: errors") {
  Rng rng(0);
  std::vector<MoleculeRecord> few(test::golden_records().begin(), test::golden_records().begin() + 3);
  CHECK_THROWS_AS(build_mcq(few, "WEIGHT", 1, rng), InsufficientRecords);
  CHECK_THROWS_AS(build_mcq(test::golden_records(), "BOGUS", 1, rng), std::invalid_argument);
  std::vector<MoleculeRecord> bare(10);
  CHECK_THROWS_AS(build_mcq(bare, "QED", 1, rng), InsufficientRecords);
}

TEST_CASE("choice probabilities: normalization modes") {
  const std::array<ChoiceScore, kMcqChoices> s = {{{-2.0, 1}, {-4.0, 4}, {-3.0, 1}, {-9.0, 3}, {-1.0, 2}}};
  const auto raw = choice_probabilities(s, Normalization::kRaw);
  const auto len = choice_probabilities(s, Normalization::kLengthNormalized);
  double sr = 0, sl = 0;
  for (std::size_t i = 0; i < kMcqChoices; ++i) {
    sr += raw[i];
    sl += len[i];
  }
  CHECK(std::abs(sr - 1.0) <= 1e-12);
  CHECK(std::abs(sl - 1.0) <= 1e-12);
  CHECK(raw[4] > raw[1]);
  CHECK(len[1] == doctest::Approx(len[4] * std::exp(-1.0 + 0.5)));
}

TEST_CASE("calibration: oracle and uniform scorers") {
  Rng rng(3);
  const auto items = build_mcq(test::golden_records(), "TPSA", 500, rng);
  OracleScorer oracle;
  const auto perfect = calibration_table(items, oracle);
  CHECK(perfect.bins[9].count == 500);
  CHECK(perfect.bins[9].accuracy() == 1.0);
  for (std::size_t b = 0; b < 9; ++b) CHECK(perfect.bins[b].count == 0);

  UniformScorer uniform;
  const auto flat = calibration_table(items, uniform);
  CHECK(flat.bins[2].count == 500);
  for (const auto& r : flat.items) CHECK(r.confidence == doctest::Approx(0.2));
  // Ties pick choice 0, so accuracy is the share of items whose answer is 0.
  CHECK(*flat.bins[2].accuracy() == doctest::Approx(0.2).epsilon(0.25));
}

TEST_CASE("calibration: calibrated scorer lands on the diagonal") {
  Rng rng(4);
  const auto items = build_mcq(test::golden_records(), "QED", 10000, rng);
  test::CalibratedScorer scorer(99);
  const auto t = calibration_table(items, scorer);
  std::size_t total = 0;
  for (const auto& b : t.bins) {
    total += b.count;
    if (b.count) CHECK(std::abs(*b.accuracy() - (b.low + b.high) / 2.0) <= 0.05);
  }
  CHECK(total == items.size());
  for (const auto& r : t.items) {
    double s = 0;
    for (const double p : r.probabilities) s += p;
    CHECK(std::abs(s - 1.0) <= 1e-9);
  }
}

TEST_CASE("calibration: backend scorer and parallel scoring") {
  Rng rng(5);
  const auto items = build_mcq(test::golden_records(), "NUMHDONORS", 60, rng);
  SurrogateGenerator gen;
  BackendChoiceScorer scorer(gen);
  const auto one = calibration_table(items, scorer, Normalization::kLengthNormalized, 1);
  const auto four = calibration_table(items, scorer, Normalization::kLengthNormalized, 4);
  for (std::size_t i = 0; i < items.size(); ++i) CHECK(one.items[i].probabilities == four.items[i].probabilities);

  class NoScore final : public GeneratorBackend {
   public:
    Capabilities capabilities() const override { return {true, false, false}; }
    std::string generate(const std::string&, const SamplingParams&, Rng&) override { return {}; }
  } none;
  CHECK_THROWS_AS(BackendChoiceScorer{none}, GeneratorError);
}

TEST_CASE("calibration csv") {
  CalibrationResult r;
  for (std::size_t b = 0; b < 10; ++b) {
    r.bins[b].low = b / 10.0;
    r.bins[b].high = (b + 1) / 10.0;
  }
  r.bins[3].count = 4;
  r.bins[3].correct = 1;
  const auto csv = calibration_to_csv(r);
  CHECK(csv.starts_with("bin_low,bin_high,count,accuracy\n0.00,0.10,0,\n"));
  CHECK(csv.find("0.30,0.40,4,0.25\n") != std::string::npos);
}
