//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <map>

#include <doctest.h>
#include <json.hpp>

#include "molopt/metrics.hpp"
#include "support.hpp"

using namespace molopt;

namespace {

RunTrace ramp(std::size_t n, std::size_t budget) {
  RunTrace t;
  t.budget = budget;
  for (std::size_t i = 1; i <= n; ++i) t.entries.push_back({i, "M" + std::to_string(i), static_cast<double>(i) / budget});
  return t;
}

}  // namespace

TEST_CASE("checkpoints include a trailing partial one") {
  CHECK(checkpoints(300) == std::vector<std::size_t>{100, 200, 300});
  CHECK(checkpoints(250) == std::vector<std::size_t>{100, 200, 250});
  CHECK(checkpoints(50) == std::vector<std::size_t>{50});
  CHECK(checkpoints(0).empty());
}

TEST_CASE("auc: constant and saturated traces") {
  RunTrace t;
  for (std::size_t i = 1; i <= 1000; ++i) t.entries.push_back({i, "M" + std::to_string(i), 0.5});
  CHECK(auc_top10(t, 1000) == doctest::Approx(0.5).epsilon(1e-15));
  for (auto& e : t.entries) e.score = 1.0;
  CHECK(auc_top10(t, 1000) == 1.0);
  CHECK_THROWS_AS(auc_top10(RunTrace{}, 1000), std::invalid_argument);
  CHECK_THROWS_AS(auc_top10(t, 0), std::invalid_argument);
}

TEST_CASE("auc: carry-forward versus zero padding") {
  const auto t = ramp(150, 400);  // stopped after 150 of 400 calls
  const auto carry = top10_series(t, 400);
  const auto pad = top10_series(t, 400, 100, EarlyStop::kZeroPad);
  REQUIRE(carry.size() == 4);
  CHECK(carry[2] == carry[1]);
  CHECK(carry[3] == carry[1]);
  CHECK(pad[0] == carry[0]);
  CHECK(pad[1] == 0.0);
  CHECK(pad[3] == 0.0);
  CHECK(carry[1] == doctest::Approx((150 - 4.5) / 400.0));
  CHECK(auc_top10(t, 400) > auc_top10(t, 400, 100, EarlyStop::kZeroPad));
}

TEST_CASE("ramp trace hand value") {
  // Top-10 of i/1000 at c = 100..1000 is (c - 4.5)/1000.
  const auto t = ramp(1000, 1000);
  double expect = 0.0;
  for (int c = 100; c <= 1000; c += 100) expect += (c - 4.5) / 1000.0;
  CHECK(auc_top10(t, 1000) == doctest::Approx(expect / 10.0).epsilon(1e-12));
}

TEST_CASE("metrics agree with brute force on synthetic traces") {
  Rng rng(77);
  for (int k = 0; k < 200; ++k) {
    const std::size_t budget = 1 + rng.index(1500);
    const auto t = test::random_trace(rng, budget);
    CHECK(top10_series(t, budget) == test::brute_top10_series(t, budget, 100, false));
    CHECK(top10_series(t, budget, 100, EarlyStop::kZeroPad) == test::brute_top10_series(t, budget, 100, true));
    if (!t.entries.empty()) CHECK(auc_top10(t, budget) == doctest::Approx(test::brute_auc(t, budget, 100, false)).epsilon(1e-12));
    for (const double tau : {0.0, 0.3, 0.75, 0.99}) {
      CHECK(generative_yield(t, tau) == test::brute_yield(t, tau));
      for (const std::size_t n : {1, 5, 10}) CHECK(oracle_burden(t, tau, n) == test::brute_burden(t, tau, n));
    }
  }
}

TEST_CASE("properties: series monotone, auc monotone under improvement, burden ordering") {
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const std::size_t budget = 100 + rng.index(900);
    auto t = test::random_trace(rng, budget);
    const auto s = top10_series(t, budget);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] >= s[i - 1]);
    if (t.entries.empty()) continue;
    const double before = auc_top10(t, budget);
    CHECK(before >= 0.0);
    CHECK(before <= 1.0);
    std::map<std::string, double> bump;
    for (auto& e : t.entries) {
      auto [it, fresh] = bump.emplace(e.smiles, std::min(1.0, e.score + rng.uniform(0.0, 0.2)));
      e.score = it->second;
    }
    CHECK(auc_top10(t, budget) >= before - 1e-12);
    const auto b1 = oracle_burden(t, 0.5, 1), b10 = oracle_burden(t, 0.5, 10), b100 = oracle_burden(t, 0.5, 100);
    if (b1 && b10) CHECK(*b1 <= *b10);
    if (b10 && b100) CHECK(*b10 <= *b100);
  }
}

TEST_CASE("yield and burden examples") {
  CHECK(generative_yield(RunTrace{}, 0.5) == 0);
  RunTrace t{{{1, "A", 0.9}, {2, "B", 0.2}, {3, "A", 0.9}, {4, "C", 0.6}, {5, "D", 0.5}}, 10};
  CHECK(generative_yield(t, 0.5) == 2);
  CHECK(generative_yield(t, 0.0) == 4);
  CHECK(oracle_burden(t, 0.5, 1) == 1);
  CHECK(oracle_burden(t, 0.5, 2) == 4);
  CHECK_FALSE(oracle_burden(t, 0.5, 3).has_value());
}

TEST_CASE("success rate") {
  CHECK(success_rate(99, 100) == 0.99);
  CHECK(success_rate(0, 5) == 0.0);
  std::vector<LeadAssessment> all(4);
  for (auto& a : all) a.success = true;
  CHECK(success_rate(all) == 1.0);
  CHECK_THROWS_AS(success_rate(std::vector<LeadAssessment>{}), std::invalid_argument);
}

TEST_CASE("reports and aggregation") {
  const auto empty = make_report(RunTrace{}, 0, MetricOptions{});
  CHECK(empty.auc_top10 == 0.0);
  CHECK(report_to_json(empty)["burden"][0]["calls"] == "FAILED");
  const auto r = make_report(ramp(300, 300), 300, MetricOptions{});
  CHECK(r.calls == 300);
  CHECK(report_to_csv(r).starts_with("metric,tau,n,value\nauc_top10,,,"));
  const double v[] = {1.0, 2.0, 3.0, 4.0};
  const auto a = aggregate(v);
  CHECK(a.mean == 2.5);
  CHECK(a.stddev == doctest::Approx(std::sqrt(1.25)));
  const std::vector<MetricReport> reps = {r, empty};
  const auto j = aggregate_reports(reps);
  CHECK(j["seeds"] == 2);
  CHECK(j["burden"][0]["failed"] == 1);
  CHECK(j["burden"][0]["samples"] == 1);
  CHECK(j["burden"][0]["n"] == 1);
  const std::vector<MetricReport> none = {empty};
  CHECK(aggregate_reports(none)["burden"][0]["mean"].is_null());
}
