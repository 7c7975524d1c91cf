//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace molopt::chem {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

/// Contribution of a bond to an atom's valence; aromatic bonds count as 1.
int valence_contribution(BondOrder order) noexcept;

struct Atom {
  int atomic_number = 6;
  int charge = 0;
  /// Hydrogens carried on the atom (implicit plus bracket-specified).
  int hydrogens = 0;
  bool aromatic = false;
  /// Mass number; 0 means natural abundance.
  int isotope = 0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Bond {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  BondOrder order = BondOrder::kSingle;

  std::uint32_t other(std::uint32_t atom) const noexcept { return atom == begin ? end : begin; }
};

struct Neighbor {
  std::uint32_t atom;
  std::uint32_t bond;
};

/// A ring from the smallest set of smallest rings, atoms in cycle order.
struct Ring {
  std::vector<std::uint32_t> atoms;
  std::vector<std::uint32_t> bonds;
};

class GraphError : public std::runtime_error {
 public:
  GraphError(const std::string& what, std::optional<std::uint32_t> atom)
      : std::runtime_error(what), atom_(atom) { }
  /// Atom the problem was found at, when there is one.
  std::optional<std::uint32_t> atom() const noexcept { return atom_; }

 private:
  std::optional<std::uint32_t> atom_;
};

/// Immutable molecular graph. Construction validates the topology, finds the
/// SSSR and ring flags, and perceives aromaticity for rings written in Kekule
/// form.
class MolGraph {
 public:
  MolGraph() = default;

  /// Throws GraphError for out-of-range endpoints, self loops, duplicate
  /// bonds, negative hydrogen counts and aromatic atoms outside rings.
  /// Aromatic bonds that end up outside any ring are stored as single.
  MolGraph(std::vector<Atom> atoms, std::vector<Bond> bonds);

  std::size_t num_atoms() const noexcept { return atoms_.size(); }
  std::size_t num_bonds() const noexcept { return bonds_.size(); }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<Bond>& bonds() const noexcept { return bonds_; }
  const Atom& atom(std::uint32_t i) const { return atoms_[i]; }
  const Bond& bond(std::uint32_t i) const { return bonds_[i]; }

  std::span<const Neighbor> neighbors(std::uint32_t atom) const {
    return {adjacency_.data() + offsets_[atom], adjacency_.data() + offsets_[atom + 1]};
  }
  std::size_t degree(std::uint32_t atom) const { return offsets_[atom + 1] - offsets_[atom]; }
  /// Neighbours that are not hydrogen.
  int heavy_degree(std::uint32_t atom) const;
  /// Hydrogens on the atom including explicit hydrogen neighbours.
  int total_hydrogens(std::uint32_t atom) const;
  /// Sum of bond valence contributions (aromatic = 1), excluding hydrogens
  /// stored as counts.
  int bond_valence(std::uint32_t atom) const;
  std::optional<std::uint32_t> bond_between(std::uint32_t a, std::uint32_t b) const;

  /// Atoms with atomic number > 1.
  std::size_t heavy_atom_count() const;
  std::size_t num_components() const noexcept { return components_; }
  /// Component id per atom, numbered by lowest atom index.
  const std::vector<std::uint32_t>& component_ids() const noexcept { return component_of_; }

  const std::vector<Ring>& rings() const noexcept { return rings_; }
  bool is_ring_atom(std::uint32_t atom) const { return ring_atom_[atom]; }
  bool is_ring_bond(std::uint32_t bond) const { return ring_bond_[bond]; }
  /// Number of SSSR rings containing the atom.
  int ring_membership(std::uint32_t atom) const { return ring_count_[atom]; }
  /// Smallest cycle through the atom (0 if acyclic).
  int smallest_ring_size(std::uint32_t atom) const { return smallest_ring_[atom]; }
  bool in_sssr_ring_of_size(std::uint32_t atom, int size) const;
  /// Ring bonds incident to the atom.
  int ring_bond_count(std::uint32_t atom) const;

  /// Set by the SMILES parser when stereo markers were dropped.
  bool stereo_dropped() const noexcept { return stereo_dropped_; }
  void set_stereo_dropped(bool v) noexcept { stereo_dropped_ = v; }

  /// Copy with every stored hydrogen count expanded into explicit H atoms,
  /// appended after the original atoms.
  MolGraph with_explicit_hydrogens() const;

  /// Copy whose atom i is this graph's atom perm[i].
  MolGraph permuted(std::span<const std::uint32_t> perm) const;

  /// Default-valence check used by the parser and by graph edits; returns the
  /// first offending atom.
  std::optional<std::uint32_t> first_valence_violation() const;

 private:
  void build_adjacency();
  void perceive_rings();
  void perceive_aromaticity();

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<std::uint32_t> component_of_;
  std::size_t components_ = 0;
  std::vector<Ring> rings_;
  std::vector<bool> ring_atom_;
  std::vector<bool> ring_bond_;
  std::vector<int> ring_count_;
  std::vector<int> smallest_ring_;
  bool stereo_dropped_ = false;
};

}  // namespace molopt::chem
