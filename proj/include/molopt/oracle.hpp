//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <condition_variable>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "molopt/chem/molgraph.hpp"
#include "molopt/chem/smiles.hpp"
#include "molopt/fingerprint.hpp"

namespace molopt {

struct ScoreRange {
  double min = 0.0;
  double max = 1.0;
  bool contains(double v) const noexcept { return v >= min && v <= max; }
};

/// A parsed molecule with its canonical SMILES.
struct Molecule {
  chem::CanonicalSmiles smiles;
  std::shared_ptr<const chem::MolGraph> graph;

  /// Throws chem::SmilesError.
  static Molecule parse(std::string_view smiles);
};

class OracleError : public std::runtime_error {
 public:
  enum class Kind { kTimeout, kMalformedReply, kNonzeroExit, kRangeViolation, kTransport };
  OracleError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) { }
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Raised when an uncached evaluation would exceed the budget. The
/// optimization loop treats it as normal termination.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Black-box objective. evaluate must be callable concurrently.
class OracleSpec {
 public:
  virtual ~OracleSpec() = default;
  virtual ScoreRange range() const = 0;
  virtual double evaluate(const Molecule& m) const = 0;
  virtual std::string name() const = 0;
  /// Upper end of the range; used as the top of [PROPERTY] sampling.
  double oracle_max() const { return range().max; }
};

using OraclePtr = std::shared_ptr<const OracleSpec>;

struct TraceEntry {
  std::size_t call_index = 0;
  std::string smiles;
  double score = 0.0;
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct RunTrace {
  std::vector<TraceEntry> entries;
  std::size_t budget = 0;
  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// CSV with header call_index,smiles,score; scores printed in shortest
/// round-trip form.
std::string trace_to_csv(const RunTrace& trace);
/// budget is not stored in the CSV and must be supplied.
RunTrace trace_from_csv(std::string_view csv, std::size_t budget);

/// Oracle-call accounting with a canonical-SMILES cache. A cache hit never
/// consumes budget unless raw-call counting is enabled, in which case every
/// call consumes one unit and is logged (the oracle itself still runs once
/// per molecule). The check-and-reserve step is atomic, so concurrent
/// callers can never exceed the budget; concurrent requests for the same
/// uncached molecule wait for the first one. A failed oracle call releases
/// its reservation and leaves no trace entry.
class BudgetLedger {
 public:
  explicit BudgetLedger(std::size_t max_calls, bool count_raw_calls = false);

  double evaluate(const OracleSpec& oracle, const Molecule& m);

  std::optional<double> cached(const std::string& canonical_smiles) const;
  bool contains(const std::string& canonical_smiles) const { return cached(canonical_smiles).has_value(); }
  /// Committed calls; always equals the trace length.
  std::size_t used() const;
  std::size_t max_calls() const noexcept { return max_calls_; }
  /// True when no further uncached evaluation can start.
  bool exhausted() const;
  std::size_t cache_hits() const;
  RunTrace trace() const;

 private:
  std::size_t max_calls_;
  bool raw_;
  mutable std::mutex mutex_;
  std::condition_variable done_;
  std::unordered_map<std::string, double> cache_;
  std::unordered_set<std::string> inflight_;
  std::size_t reserved_ = 0;
  std::size_t hits_ = 0;
  std::vector<TraceEntry> trace_;
};

/// score = count Tanimoto (radius 2) to the target.
OraclePtr rediscovery_oracle(const std::string& target_smiles);

struct LeadAssessment {
  double similarity = 0.0;
  double qed = 0.0;
  bool success = false;
  double score = 0.0;
};

/// success iff similarity >= 0.4 and qed >= 0.9;
/// score = 0.5 clip(sim / 0.4) + 0.5 clip(qed / 0.9).
class LeadOptimizationOracle final : public OracleSpec {
 public:
  explicit LeadOptimizationOracle(const std::string& lead_smiles);
  ScoreRange range() const override { return {0.0, 1.0}; }
  double evaluate(const Molecule& m) const override { return assess(m).score; }
  std::string name() const override { return "lead_optimization"; }
  LeadAssessment assess(const Molecule& m) const;
  const std::string& lead() const noexcept { return lead_; }

 private:
  std::string lead_;
  Fingerprint lead_fp_;
};

/// Single descriptor as an objective: qed, mw, tpsa, clogp, hbd, hba,
/// rotatable_bonds, rings, aromatic_rings.
OraclePtr descriptor_oracle(const std::string& descriptor);

OraclePtr constant_oracle(double value, ScoreRange range = {0.0, 1.0});

struct Modifier {
  enum class Kind { kIdentity, kGaussian, kThresholdClip };
  Kind kind = Kind::kIdentity;
  /// Gaussian: exp(-0.5 ((x - center) / sigma)^2).
  double center = 0.0, sigma = 1.0;
  /// Threshold clip: (clamp(x, low, high) - low) / (high - low).
  double low = 0.0, high = 1.0;

  double apply(double x) const;
  ScoreRange output_range(ScoreRange input) const;
};

struct MpoComponent {
  OraclePtr oracle;
  double weight = 1.0;
  Modifier modifier;
};

enum class MpoAggregation { kArithmetic, kGeometric };

/// Weighted arithmetic or geometric mean of modified component scores.
/// Throws std::invalid_argument for no components, negative weights, a zero
/// weight sum, or a geometric mean over components that can go negative.
OraclePtr mpo_oracle(std::vector<MpoComponent> components, MpoAggregation aggregation);

/// Runs `argv` once per molecule, writes "SMILES\n" to its stdin and reads
/// one score line from stdout.
OraclePtr command_oracle(std::vector<std::string> argv, ScoreRange range, double timeout_seconds);

/// POST {url}/score {"smiles": ...} -> {"score": ...}.
OraclePtr http_oracle(std::string url, ScoreRange range, double timeout_seconds);

/// Builds an oracle from a JSON document:
///   {"type": "rediscovery", "target": SMILES}
///   {"type": "lead_optimization", "lead": SMILES}
///   {"type": "descriptor", "name": "qed"}
///   {"type": "constant", "value": 0.5, "range": [0, 1]}
///   {"type": "mpo", "aggregation": "arithmetic"|"geometric",
///    "components": [{"oracle": {...}, "weight": 1,
///                    "modifier": {"type": "identity"|"gaussian"|"threshold_clip", ...}}]}
///   {"type": "command", "argv": [...], "range": [lo, hi], "timeout_seconds": 10}
///   {"type": "http", "url": "...", "range": [lo, hi], "timeout_seconds": 10}
/// Unknown keys and missing required keys throw std::invalid_argument.
OraclePtr make_oracle(const nlohmann::json& config);

}  // namespace molopt
