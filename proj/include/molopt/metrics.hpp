//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "molopt/oracle.hpp"

namespace molopt {

enum class EarlyStop {
  /// Checkpoints past the end of the trace repeat the final value.
  kCarryForward,
  /// Checkpoints past the end of the trace count as zero.
  kZeroPad,
};

/// Checkpoints c = step, 2 step, ... up to budget, plus budget itself when it
/// is not a multiple of step.
std::vector<std::size_t> checkpoints(std::size_t budget, std::size_t step = 100);

/// Mean of the best min(10, seen) scores among unique molecules with
/// call_index <= c, for each checkpoint. A checkpoint with nothing seen yet
/// is 0.
std::vector<double> top10_series(const RunTrace& trace, std::size_t budget, std::size_t step = 100,
                                 EarlyStop mode = EarlyStop::kCarryForward);

/// Mean of top10_series. Throws std::invalid_argument on an empty trace or
/// a zero budget.
double auc_top10(const RunTrace& trace, std::size_t budget, std::size_t step = 100,
                 EarlyStop mode = EarlyStop::kCarryForward);

/// Unique molecules with score strictly above tau.
std::size_t generative_yield(const RunTrace& trace, double tau);

/// Smallest call index at which n unique molecules have scored above tau;
/// nullopt means FAILED.
std::optional<std::size_t> oracle_burden(const RunTrace& trace, double tau, std::size_t n);

/// Throws std::invalid_argument on empty input.
double success_rate(std::span<const LeadAssessment> outcomes);
double success_rate(std::size_t successes, std::size_t total);

struct MetricOptions {
  std::size_t checkpoint = 100;
  EarlyStop early_stop = EarlyStop::kCarryForward;
  std::vector<double> yield_thresholds = {0.8};
  std::vector<std::size_t> burden_counts = {1, 10, 100};
};

struct YieldValue {
  double tau = 0.0;
  std::size_t count = 0;
};

struct BurdenValue {
  double tau = 0.0;
  std::size_t n = 0;
  std::optional<std::size_t> calls;
};

struct MetricReport {
  std::size_t budget = 0;
  std::size_t calls = 0;
  /// 0 for an empty trace.
  double auc_top10 = 0.0;
  std::vector<std::size_t> checkpoint_calls;
  std::vector<double> checkpoint_top10;
  std::vector<YieldValue> yields;
  std::vector<BurdenValue> burdens;
  std::optional<double> success_rate;
  std::optional<double> best_score;
};

/// Empty traces and zero budgets give an all-zero / FAILED report rather
/// than an error.
MetricReport make_report(const RunTrace& trace, std::size_t budget, const MetricOptions& options);

nlohmann::json report_to_json(const MetricReport& report);
/// Long format: metric,tau,n,value (value "FAILED" for unreached burdens).
std::string report_to_csv(const MetricReport& report);

struct Aggregate {
  double mean = 0.0;
  /// Population standard deviation.
  double stddev = 0.0;
  std::size_t count = 0;
};

Aggregate aggregate(std::span<const double> values);

/// Mean and std over seeds for AUC, yields and burdens. Burdens aggregate
/// only the seeds that reached the target and report the failure count.
nlohmann::json aggregate_reports(std::span<const MetricReport> reports);

}  // namespace molopt
