//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "molopt/chem/molgraph.hpp"
#include "molopt/calibration.hpp"
#include "molopt/corpus.hpp"
#include "molopt/oracle.hpp"
#include "molopt/rng.hpp"

namespace molopt::test {

/// Drug-like molecules from the descriptor golden file.
const std::vector<std::string>& golden_smiles();

std::vector<std::uint32_t> random_permutation(std::size_t n, Rng& rng);

/// Random record over golden molecules with a random subset of fields.
MoleculeRecord random_record(Rng& rng);

/// Sorts the list fields so records compare independently of block order.
MoleculeRecord normalized(MoleculeRecord r);

/// Synthetic trace: random length up to budget (sometimes ended early),
/// repeated molecules when raw-call counting is simulated, and scores drawn
/// from a few shapes (constant, ramp, noise, plateaus).
RunTrace random_trace(Rng& rng, std::size_t budget);

/// Straightforward recomputations used as metric oracles.
std::vector<double> brute_top10_series(const RunTrace& t, std::size_t budget, std::size_t step, bool zero_pad);
double brute_auc(const RunTrace& t, std::size_t budget, std::size_t step, bool zero_pad);
std::size_t brute_yield(const RunTrace& t, double tau);
std::optional<std::size_t> brute_burden(const RunTrace& t, double tau, std::size_t n);

/// Records with every computed property, one per golden molecule.
const std::vector<MoleculeRecord>& golden_records();

/// Scorer whose confidence c ~ U(0.2, 1) is right with probability c: the
/// chosen answer gets c and the other four share 1 - c.
class CalibratedScorer final : public ChoiceScorer {
 public:
  explicit CalibratedScorer(std::uint64_t seed) : rng_(seed) { }
  std::array<ChoiceScore, kMcqChoices> score_choices(const McqItem& item) override;

 private:
  Rng rng_;
};

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

}  // namespace molopt::test
