//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_set>

#include "molopt/text.hpp"

namespace molopt {

std::vector<std::size_t> checkpoints(std::size_t budget, std::size_t step) {
  if (step == 0) throw std::invalid_argument("checkpoint step must be positive");
  std::vector<std::size_t> out;
  for (std::size_t c = step; c <= budget; c += step) out.push_back(c);
  if (budget % step != 0) out.push_back(budget);
  return out;
}

std::vector<double> top10_series(const RunTrace& trace, std::size_t budget, std::size_t step, EarlyStop mode) {
  const auto cps = checkpoints(budget, step);
  std::vector<double> out;
  out.reserve(cps.size());
  // Ten best scores seen so far, descending. Summed in that order at each
  // checkpoint so the result does not depend on arrival order.
  std::vector<double> best;
  std::unordered_set<std::string> seen;
  std::size_t i = 0;
  const std::size_t last_call = trace.entries.empty() ? 0 : trace.entries.back().call_index;
  for (const auto c : cps) {
    for (; i < trace.entries.size() && trace.entries[i].call_index <= c; ++i) {
      const auto& e = trace.entries[i];
      if (!seen.insert(e.smiles).second) continue;
      if (best.size() == 10 && e.score <= best.back()) continue;
      best.insert(std::upper_bound(best.begin(), best.end(), e.score, std::greater<>()), e.score);
      if (best.size() > 10) best.pop_back();
    }
    if ((mode == EarlyStop::kZeroPad && c > last_call) || best.empty()) {
      out.push_back(0.0);
    } else {
      double sum = 0.0;
      for (const double v : best) sum += v;
      out.push_back(sum / static_cast<double>(best.size()));
    }
  }
  return out;
}

double auc_top10(const RunTrace& trace, std::size_t budget, std::size_t step, EarlyStop mode) {
  if (trace.entries.empty()) throw std::invalid_argument("auc_top10 of an empty trace");
  if (budget == 0) throw std::invalid_argument("auc_top10 needs a positive budget");
  const auto series = top10_series(trace, budget, step, mode);
  double total = 0.0;
  for (const double v : series) total += v;
  return total / static_cast<double>(series.size());
}

std::size_t generative_yield(const RunTrace& trace, double tau) {
  std::unordered_set<std::string> hits;
  for (const auto& e : trace.entries) {
    if (e.score > tau) hits.insert(e.smiles);
  }
  return hits.size();
}

std::optional<std::size_t> oracle_burden(const RunTrace& trace, double tau, std::size_t n) {
  if (n == 0) return 0;
  std::unordered_set<std::string> hits;
  for (const auto& e : trace.entries) {
    if (e.score > tau && hits.insert(e.smiles).second && hits.size() == n) return e.call_index;
  }
  return std::nullopt;
}

double success_rate(std::span<const LeadAssessment> outcomes) {
  const auto successes =
      static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.success; }));
  return success_rate(successes, outcomes.size());
}

double success_rate(std::size_t successes, std::size_t total) {
  if (total == 0) throw std::invalid_argument("success_rate of no outcomes");
  if (successes > total) throw std::invalid_argument("more successes than outcomes");
  return static_cast<double>(successes) / static_cast<double>(total);
}

MetricReport make_report(const RunTrace& trace, std::size_t budget, const MetricOptions& options) {
  MetricReport r;
  r.budget = budget;
  r.calls = trace.entries.size();
  r.checkpoint_calls = checkpoints(budget, options.checkpoint);
  r.checkpoint_top10 = top10_series(trace, budget, options.checkpoint, options.early_stop);
  if (!trace.entries.empty() && budget > 0) r.auc_top10 = auc_top10(trace, budget, options.checkpoint, options.early_stop);
  for (const double tau : options.yield_thresholds) {
    r.yields.push_back({tau, generative_yield(trace, tau)});
    for (const auto n : options.burden_counts) r.burdens.push_back({tau, n, oracle_burden(trace, tau, n)});
  }
  for (const auto& e : trace.entries) {
    if (!r.best_score || e.score > *r.best_score) r.best_score = e.score;
  }
  return r;
}

nlohmann::json report_to_json(const MetricReport& r) {
  nlohmann::json j;
  j["budget"] = r.budget;
  j["calls"] = r.calls;
  j["auc_top10"] = r.auc_top10;
  j["checkpoints"] = nlohmann::json::array();
  for (std::size_t i = 0; i < r.checkpoint_calls.size(); ++i) {
    j["checkpoints"].push_back({{"calls", r.checkpoint_calls[i]}, {"top10_mean", r.checkpoint_top10[i]}});
  }
  j["yield"] = nlohmann::json::array();
  for (const auto& y : r.yields) j["yield"].push_back({{"tau", y.tau}, {"count", y.count}});
  j["burden"] = nlohmann::json::array();
  for (const auto& b : r.burdens) {
    nlohmann::json v = b.calls ? nlohmann::json(*b.calls) : nlohmann::json("FAILED");
    j["burden"].push_back({{"tau", b.tau}, {"n", b.n}, {"calls", v}});
  }
  j["success_rate"] = r.success_rate ? nlohmann::json(*r.success_rate) : nlohmann::json(nullptr);
  j["best_score"] = r.best_score ? nlohmann::json(*r.best_score) : nlohmann::json(nullptr);
  return j;
}

std::string report_to_csv(const MetricReport& r) {
  std::string out = "metric,tau,n,value\n";
  auto row = [&](std::string_view metric, std::string tau, std::string n, std::string value) {
    out += metric;
    out += ',' + tau + ',' + n + ',' + value + '\n';
  };
  row("auc_top10", "", "", format_double(r.auc_top10));
  row("calls", "", "", std::to_string(r.calls));
  for (std::size_t i = 0; i < r.checkpoint_calls.size(); ++i) {
    row("top10_mean", "", std::to_string(r.checkpoint_calls[i]), format_double(r.checkpoint_top10[i]));
  }
  for (const auto& y : r.yields) row("yield", format_double(y.tau), "", std::to_string(y.count));
  for (const auto& b : r.burdens) {
    row("burden", format_double(b.tau), std::to_string(b.n), b.calls ? std::to_string(*b.calls) : "FAILED");
  }
  if (r.success_rate) row("success_rate", "", "", format_double(*r.success_rate));
  return out;
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  a.count = values.size();
  if (values.empty()) return a;
  for (const double v : values) a.mean += v;
  a.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (const double v : values) ss += (v - a.mean) * (v - a.mean);
  a.stddev = std::sqrt(ss / static_cast<double>(values.size()));
  return a;
}

namespace {

// Statistics over zero samples are null rather than 0.
nlohmann::json to_json(const Aggregate& a) {
  if (a.count == 0) return {{"mean", nullptr}, {"std", nullptr}, {"samples", 0}};
  return {{"mean", a.mean}, {"std", a.stddev}, {"samples", a.count}};
}

}  // namespace

nlohmann::json aggregate_reports(std::span<const MetricReport> reports) {
  nlohmann::json j;
  j["seeds"] = reports.size();
  std::vector<double> auc;
  for (const auto& r : reports) auc.push_back(r.auc_top10);
  j["auc_top10"] = to_json(aggregate(auc));
  j["yield"] = nlohmann::json::array();
  j["burden"] = nlohmann::json::array();
  if (reports.empty()) return j;
  const auto& first = reports.front();
  for (std::size_t k = 0; k < first.yields.size(); ++k) {
    std::vector<double> v;
    for (const auto& r : reports) v.push_back(static_cast<double>(r.yields.at(k).count));
    auto entry = to_json(aggregate(v));
    entry["tau"] = first.yields[k].tau;
    j["yield"].push_back(entry);
  }
  for (std::size_t k = 0; k < first.burdens.size(); ++k) {
    std::vector<double> v;
    std::size_t failed = 0;
    for (const auto& r : reports) {
      const auto& b = r.burdens.at(k);
      if (b.calls) v.push_back(static_cast<double>(*b.calls));
      else ++failed;
    }
    auto entry = to_json(aggregate(v));
    entry["tau"] = first.burdens[k].tau;
    entry["n"] = first.burdens[k].n;
    entry["failed"] = failed;
    j["burden"].push_back(entry);
  }
  return j;
}

}  // namespace molopt
