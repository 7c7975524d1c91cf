//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "molopt/chem/molgraph.hpp"

namespace molopt {

/// Sparse circular count fingerprint: sorted (identifier, count) pairs.
struct Fingerprint {
  int radius = 2;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> entries;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

class RadiusMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Initial atom identifier from (element, charge, heavy degree, hydrogens,
/// ring flag, aromatic flag).
std::uint64_t ecfc_atom_invariant(const chem::MolGraph& g, std::uint32_t atom);

/// Morgan-style count fingerprint over heavy atoms. Every atom contributes
/// its identifier at each iteration 0..radius. Iteration k hashes the atom's
/// previous identifier followed by the sorted (bond order, neighbour
/// identifier) pairs. radius must be in [0, 4].
Fingerprint ecfc(const chem::MolGraph& g, int radius = 2);

/// Count Tanimoto: sum of minima over sum of maxima. Two empty fingerprints
/// have similarity 1.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

/// Set Tanimoto on identifier presence, ignoring counts.
double tanimoto_binary(const Fingerprint& a, const Fingerprint& b);

}  // namespace molopt
