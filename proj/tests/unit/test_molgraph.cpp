//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include "molopt/chem/smiles.hpp"
#include "molopt/chem/substructure.hpp"
#include "support.hpp"

using namespace molopt;
using namespace molopt::chem;

TEST_CASE("parse: counts and implicit hydrogens") {
  const auto g = parse_smiles("CC(=O)OC1=CC=CC=C1C(=O)O");
  CHECK(g.num_atoms() == 13);
  CHECK(g.num_bonds() == 13);
  CHECK(g.num_components() == 1);
  CHECK(g.total_hydrogens(0) == 3);
  CHECK(g.rings().size() == 1);
  CHECK_FALSE(g.first_valence_violation().has_value());
}

TEST_CASE("parse: bracket atoms, charges, isotopes, components") {
  const auto g = parse_smiles("[13CH3][NH3+].[Cl-]");
  REQUIRE(g.num_atoms() == 3);
  CHECK(g.atom(0).isotope == 13);
  CHECK(g.atom(1).charge == 1);
  CHECK(g.total_hydrogens(1) == 3);
  CHECK(g.atom(2).charge == -1);
  CHECK(g.num_components() == 2);
}

TEST_CASE("parse: %nn ring closures and stereo marks") {
  const auto g = parse_smiles("C%10CCCCC%10");
  CHECK(g.rings().size() == 1);
  const auto s = parse_smiles("C[C@H](N)C(=O)O");
  CHECK(s.stereo_dropped());
}

TEST_CASE("parse: errors carry a kind") {
  auto kind_of = [](const char* smi) {
    try {
      parse_smiles(smi);
    } catch (const SmilesError& e) {
      return e.kind();
    }
    FAIL("expected SmilesError for " << smi);
    return SmilesError::Kind::kSyntax;
  };
  CHECK(kind_of("C1CC") == SmilesError::Kind::kUnclosedRing);
  CHECK(kind_of("C(C") == SmilesError::Kind::kUnmatchedParenthesis);
  CHECK(kind_of("") == SmilesError::Kind::kEmpty);
  CHECK(kind_of("C(=O)(=O)(=O)C") == SmilesError::Kind::kValence);
  CHECK(kind_of("cC") == SmilesError::Kind::kAromaticity);
}

TEST_CASE("canonical: equivalent inputs agree") {
  CHECK(canonicalize("OCC").text == canonicalize("CCO").text);
  CHECK(canonicalize("C1=CC=CC=C1").text == canonicalize("c1ccccc1").text);
  CHECK(canonicalize("CC(=O)OC1=CC=CC=C1C(=O)O").text == canonicalize("OC(=O)c1ccccc1OC(C)=O").text);
  CHECK(canonicalize("CCO").text != canonicalize("COC").text);
}

TEST_CASE("canonical: invariant under atom order, idempotent, and round-trips") {
  Rng rng(11);
  const auto& all = test::golden_smiles();
  for (std::size_t i = 0; i < all.size(); i += 3) {
    const auto g = parse_smiles(all[i]);
    const auto c = canonical(g).text;
    CAPTURE(all[i]);
    CHECK(canonicalize(c).text == c);
    for (int k = 0; k < 10; ++k) {
      const auto perm = test::random_permutation(g.num_atoms(), rng);
      CHECK(canonical(g.permuted(perm)).text == c);
    }
  }
}

TEST_CASE("write_smiles: any ranking yields an equivalent string") {
  Rng rng(5);
  for (const auto* smi : {"CC(=O)Oc1ccccc1C(=O)O", "C1CC2CCC1CC2", "c1ccc2[nH]ccc2c1", "[NH4+].[O-]C=O"}) {
    const auto g = parse_smiles(smi);
    const auto ranks = test::random_permutation(g.num_atoms(), rng);
    CHECK(canonicalize(write_smiles(g, ranks)).text == canonical(g).text);
  }
}

TEST_CASE("substructure: counting embeddings") {
  const auto benzene = parse_smiles("c1ccccc1");
  // 6 rotations x 2 reflections.
  CHECK(subgraph_match(benzene, benzene) == 12);
  CHECK(subgraph_match(benzene, benzene, true) == 1);
  CHECK(subgraph_match(parse_smiles("C=O"), parse_smiles("CC(=O)OC(C)=O"), true) == 2);
  CHECK(subgraph_match(parse_smiles("N"), parse_smiles("CCO")) == 0);
}

TEST_CASE("substructure: SMARTS queries") {
  const auto aspirin = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  Matcher m(aspirin);
  CHECK(m.count(Query::from_smarts("[OX2H]"), {.unique = true}) == 1);
  CHECK(m.count(Query::from_smarts("c"), {.unique = true}) == 6);
  CHECK(m.count(Query::from_smarts("[$(C=O)]"), {.unique = true}) == 2);
  CHECK(m.any(Query::from_smarts("[R]")));
  CHECK_FALSE(m.any(Query::from_smarts("[#7]")));
  CHECK_THROWS_AS(Query::from_smarts("[C"), SmartsError);
}
