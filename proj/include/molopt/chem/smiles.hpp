//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "molopt/chem/molgraph.hpp"

namespace molopt::chem {

class SmilesError : public std::runtime_error {
 public:
  enum class Kind {
    kSyntax,
    kUnclosedRing,
    kUnmatchedParenthesis,
    kValence,
    kUnsupported,
    kAromaticity,
    kEmpty,
  };

  SmilesError(Kind kind, std::size_t offset, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  /// Byte offset in the input where the problem was detected.
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Parses the organic subset, bracket atoms (isotope, H count, charge),
/// branches, ring closures including %nn, and '.' separated components.
/// Stereo marks are dropped and flagged on the graph.
MolGraph parse_smiles(std::string_view smiles);

struct CanonicalSmiles {
  std::string text;

  friend bool operator==(const CanonicalSmiles&, const CanonicalSmiles&) = default;
  friend auto operator<=>(const CanonicalSmiles&, const CanonicalSmiles&) = default;
};

/// Graph-invariant atom ranks (0-based, all distinct).
std::vector<std::uint32_t> canonical_ranks(const MolGraph& g);

CanonicalSmiles canonical(const MolGraph& g);

/// Parses and canonicalizes; throws SmilesError.
CanonicalSmiles canonicalize(std::string_view smiles);

/// Writes a SMILES string visiting atoms in order of the given ranks (lowest
/// first). With canonical ranks this produces the canonical form; with any
/// other ranking it produces an equivalent non-canonical string.
std::string write_smiles(const MolGraph& g, std::span<const std::uint32_t> ranks);

}  // namespace molopt::chem
