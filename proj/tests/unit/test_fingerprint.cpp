//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <map>

#include <doctest.h>

#include "molopt/chem/smiles.hpp"
#include "molopt/fingerprint.hpp"
#include "support.hpp"

using namespace molopt;

namespace {

Fingerprint fp(const std::string& smi, int radius = 2) { return ecfc(chem::parse_smiles(smi), radius); }

// Independent count Tanimoto over ordered maps.
double brute_tanimoto(const Fingerprint& a, const Fingerprint& b) {
  std::map<std::uint64_t, double> ca, cb;
  for (const auto& [k, v] : a.entries) ca[k] += v;
  for (const auto& [k, v] : b.entries) cb[k] += v;
  double lo = 0, hi = 0;
  for (const auto& [k, v] : ca) {
    const double w = cb.count(k) ? cb[k] : 0.0;
    lo += std::min(v, w);
    hi += std::max(v, w);
  }
  for (const auto& [k, v] : cb) {
    if (!ca.count(k)) hi += v;
  }
  return hi == 0 ? 1.0 : lo / hi;
}

}  // namespace

TEST_CASE("benzene radius 1 has one identifier per iteration") {
  const auto f = fp("c1ccccc1", 1);
  REQUIRE(f.entries.size() == 2);
  CHECK(f.entries[0].second == 6);
  CHECK(f.entries[1].second == 6);
}

TEST_CASE("radius bounds and mismatch") {
  CHECK_THROWS_AS(fp("CC", -1), std::invalid_argument);
  CHECK_THROWS_AS(fp("CC", 5), std::invalid_argument);
  CHECK_THROWS_AS(tanimoto(fp("CC", 1), fp("CC", 2)), RadiusMismatch);
}

TEST_CASE("heavy atoms only: explicit hydrogens do not change the fingerprint") {
  const auto g = chem::parse_smiles("CC(=O)Oc1ccccc1C(=O)O");
  CHECK(ecfc(g) == ecfc(g.with_explicit_hydrogens()));
}

TEST_CASE("aspirin vs salsalate frozen value") {
  // Count-based value. Set-based is 22/39; a folded 2048-bit vector gives 0.594.
  const auto a = fp("CC(=O)OC1=CC=CC=C1C(=O)O");
  const auto s = fp("O=C(Oc1ccccc1C(=O)O)c1ccccc1O");
  CHECK(tanimoto(a, s) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(tanimoto_binary(a, s) == doctest::Approx(22.0 / 39.0).epsilon(1e-9));
}

TEST_CASE("tanimoto: identity, symmetry, bounds, oracle agreement") {
  const auto& all = test::golden_smiles();
  std::vector<Fingerprint> fps;
  for (const auto& s : all) fps.push_back(fp(s));
  Rng rng(9);
  for (int k = 0; k < 3000; ++k) {
    const auto& a = fps[rng.index(fps.size())];
    const auto& b = fps[rng.index(fps.size())];
    const double t = tanimoto(a, b);
    CHECK(t == tanimoto(b, a));
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
    CHECK(t == doctest::Approx(brute_tanimoto(a, b)).epsilon(1e-12));
  }
  for (const auto& f : fps) CHECK(tanimoto(f, f) == 1.0);
}

TEST_CASE("atom order does not change the fingerprint") {
  Rng rng(17);
  for (const auto& s : test::golden_smiles()) {
    const auto g = chem::parse_smiles(s);
    CHECK(ecfc(g) == ecfc(g.permuted(test::random_permutation(g.num_atoms(), rng))));
  }
}
