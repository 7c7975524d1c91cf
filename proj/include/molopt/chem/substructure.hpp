//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "molopt/chem/molgraph.hpp"

namespace molopt::chem {

class SmartsError : public std::runtime_error {
 public:
  SmartsError(std::size_t offset, const std::string& message)
      : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) { }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class PatternTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Maximum atoms of a molecule pattern passed to subgraph_match.
inline constexpr std::size_t kMaxPatternAtoms = 16;
/// Maximum top-level atoms of a compiled query run through Matcher; two of
/// the shipped alert patterns need more than kMaxPatternAtoms.
inline constexpr std::size_t kMaxQueryAtoms = 32;

/// A compiled substructure query. Built from a molecule (labels: element,
/// aromaticity, bond order) or from a SMARTS subset: atom primitives * a A #n
/// symbols H D X v R r x, charges, isotopes and $() recursion; logic ! & , ;
/// bond primitives - = # : ~ @; ring closures, branches and '.'.
class Query {
 public:
  static Query from_smarts(std::string_view smarts);
  static Query from_molecule(const MolGraph& pattern);

  std::size_t num_atoms() const noexcept;
  const std::string& source() const noexcept;

  struct Impl;
  const Impl& impl() const noexcept { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

struct MatchOptions {
  /// Count embeddings covering the same atom set once.
  bool unique = false;
  /// Stop after this many matches (0 = no limit).
  std::size_t max_matches = 0;
};

/// Precomputes per-atom properties of a target so that many queries can be
/// run against it. Not thread-safe; create one per thread.
class Matcher {
 public:
  explicit Matcher(const MolGraph& target);
  ~Matcher();
  Matcher(const Matcher&) = delete;
  Matcher& operator=(const Matcher&) = delete;

  const MolGraph& target() const noexcept { return target_; }

  std::vector<std::vector<std::uint32_t>> find(const Query& q, MatchOptions opts = {});
  std::size_t count(const Query& q, MatchOptions opts = {});
  bool any(const Query& q);
  /// True if some embedding maps the query's first atom onto `atom`.
  bool matches_at(const Query& q, std::uint32_t atom);

  struct State;

 private:
  const MolGraph& target_;
  std::unique_ptr<State> state_;
};

/// Number of injective, label-consistent embeddings of pattern in target.
/// Throws PatternTooLarge when the pattern exceeds kMaxPatternAtoms.
std::size_t subgraph_match(const MolGraph& pattern, const MolGraph& target, bool unique = false);

}  // namespace molopt::chem
