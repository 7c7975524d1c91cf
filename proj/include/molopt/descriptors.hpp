//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>
#include <vector>

#include "molopt/chem/molgraph.hpp"

namespace molopt {

struct DescriptorVector {
  double mw = 0.0;
  double tpsa = 0.0;
  double clogp = 0.0;
  int hbd = 0;
  int hba = 0;
  int rings = 0;
  int aromatic_rings = 0;
  int rotatable_bonds = 0;
  double qed = 0.0;

  friend bool operator==(const DescriptorVector&, const DescriptorVector&) = default;
};

/// Average atomic weights, isotope masses where given, implicit H included.
double molecular_weight(const chem::MolGraph& g);

/// Ertl topological polar surface area over N and O atoms.
double tpsa(const chem::MolGraph& g);

/// Wildman-Crippen logP: sum of atom-type contributions, hydrogens included.
double clogp(const chem::MolGraph& g);

/// Crippen atom type label per atom of g (heavy atoms only, in order).
std::vector<std::string> crippen_types(const chem::MolGraph& g);

struct HydrogenBonding {
  int hbd = 0;
  int hba = 0;
};

/// Donors: N and O atoms carrying at least one hydrogen. Acceptors: atoms
/// matching the shipped acceptor patterns, which exclude pyrrole-type and
/// amide nitrogens among others.
HydrogenBonding hbd_hba(const chem::MolGraph& g);

int rotatable_bonds(const chem::MolGraph& g);
int ring_count(const chem::MolGraph& g);
/// SSSR rings whose atoms are all aromatic.
int aromatic_ring_count(const chem::MolGraph& g);
/// Number of alert patterns with at least one match.
int structural_alerts(const chem::MolGraph& g);

struct QedProperties {
  double mw = 0.0;
  double alogp = 0.0;
  int hba = 0;
  int hbd = 0;
  double psa = 0.0;
  int rotb = 0;
  int arom = 0;
  int alerts = 0;
};

QedProperties qed_properties(const chem::MolGraph& g);
/// Weighted geometric mean of the desirability functions.
double qed_from_properties(const QedProperties& p);
double qed(const chem::MolGraph& g);

/// Asymmetric double sigmoid for one QED property, normalized to [0, 1].
double qed_desirability(std::size_t property_index, double x);

DescriptorVector compute_descriptors(const chem::MolGraph& g);

}  // namespace molopt
