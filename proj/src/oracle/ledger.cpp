//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>

#include "molopt/oracle.hpp"
#include "molopt/text.hpp"

namespace molopt {

Molecule Molecule::parse(std::string_view smiles) {
  auto g = std::make_shared<const chem::MolGraph>(chem::parse_smiles(smiles));
  return {chem::canonical(*g), std::move(g)};
}

std::string trace_to_csv(const RunTrace& trace) {
  std::string out = "call_index,smiles,score\n";
  for (const auto& e : trace.entries) {
    out += std::to_string(e.call_index);
    out += ',';
    out += e.smiles;
    out += ',';
    out += format_double(e.score);
    out += '\n';
  }
  return out;
}

RunTrace trace_from_csv(std::string_view csv, std::size_t budget) {
  RunTrace trace;
  trace.budget = budget;
  std::size_t line_no = 0;
  for (auto line : split(csv, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "call_index,smiles,score") throw std::invalid_argument("trace CSV header must be call_index,smiles,score");
      continue;
    }
    const auto fields = split(line, ',');
    auto where = [&] { return "trace CSV line " + std::to_string(line_no); };
    if (fields.size() != 3) throw std::invalid_argument(where() + ": expected 3 fields");
    const auto index = parse_int(fields[0]);
    const auto score = parse_double(fields[2]);
    if (!index || *index < 1) throw std::invalid_argument(where() + ": bad call_index");
    if (!score || !std::isfinite(*score)) throw std::invalid_argument(where() + ": bad score");
    if (!trace.entries.empty() && static_cast<std::size_t>(*index) <= trace.entries.back().call_index) {
      throw std::invalid_argument(where() + ": call_index must increase strictly");
    }
    trace.entries.push_back({static_cast<std::size_t>(*index), std::string(fields[1]), *score});
  }
  return trace;
}

BudgetLedger::BudgetLedger(std::size_t max_calls, bool count_raw_calls) : max_calls_(max_calls), raw_(count_raw_calls) { }

double BudgetLedger::evaluate(const OracleSpec& oracle, const Molecule& m) {
  const auto& key = m.smiles.text;
  std::unique_lock lock(mutex_);
  while (true) {
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      ++hits_;
      if (raw_) {
        if (trace_.size() + reserved_ >= max_calls_) throw BudgetExhausted("oracle budget of " + std::to_string(max_calls_) + " calls exhausted");
        trace_.push_back({trace_.size() + 1, key, it->second});
      }
      return it->second;
    }
    if (!inflight_.count(key)) break;
    done_.wait(lock);
  }
  if (trace_.size() + reserved_ >= max_calls_) {
    throw BudgetExhausted("oracle budget of " + std::to_string(max_calls_) + " calls exhausted");
  }
  ++reserved_;
  inflight_.insert(key);
  lock.unlock();
  double score = 0.0;
  try {
    score = oracle.evaluate(m);
    const auto range = oracle.range();
    if (!std::isfinite(score) || !range.contains(score)) {
      throw OracleError(OracleError::Kind::kRangeViolation,
                        oracle.name() + " returned " + format_double(score) + " outside [" + format_double(range.min) + ", " +
                            format_double(range.max) + "] for " + key);
    }
  } catch (...) {
    lock.lock();
    --reserved_;
    inflight_.erase(key);
    done_.notify_all();
    throw;
  }
  lock.lock();
  --reserved_;
  inflight_.erase(key);
  cache_.emplace(key, score);
  trace_.push_back({trace_.size() + 1, key, score});
  done_.notify_all();
  return score;
}

std::optional<double> BudgetLedger::cached(const std::string& canonical_smiles) const {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(canonical_smiles);
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

std::size_t BudgetLedger::used() const {
  std::lock_guard lock(mutex_);
  return trace_.size();
}

bool BudgetLedger::exhausted() const {
  std::lock_guard lock(mutex_);
  return trace_.size() + reserved_ >= max_calls_;
}

std::size_t BudgetLedger::cache_hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

RunTrace BudgetLedger::trace() const {
  std::lock_guard lock(mutex_);
  return {trace_, max_calls_};
}

}  // namespace molopt
