//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace molopt::chem {

struct Element {
  int atomic_number = 0;
  std::string symbol;
  double weight = 0.0;
  std::vector<int> default_valences;
};

/// Throws std::out_of_range for atomic numbers outside the shipped table.
const Element& element(int atomic_number);
std::optional<int> atomic_number(std::string_view symbol);
int max_atomic_number();

/// Monoisotopic mass for a (element, mass number) pair, if tabulated.
std::optional<double> isotope_mass(int atomic_number, int mass_number);

/// Valences allowed for a charged atom. A charge shifts the atom to its
/// isoelectronic neighbour (N+ behaves as C, O- as F); returns an empty span
/// when the element has no valence model.
std::span<const int> allowed_valences(int atomic_number, int charge);

/// Members of the SMILES organic subset (B C N O P S F Cl Br I).
bool is_organic_subset(int atomic_number);

/// Implicit hydrogens for an organic-subset atom written without brackets.
/// bond_sum counts aromatic bonds as 1. Returns nullopt when bond_sum exceeds
/// every default valence.
std::optional<int> organic_implicit_hydrogens(int atomic_number, bool aromatic, int bond_sum);

}  // namespace molopt::chem
