//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/fingerprint.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "molopt/rng.hpp"

namespace molopt {

namespace {

std::uint64_t combine(std::uint64_t seed, std::uint64_t value) { return mix64(seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2))); }

}  // namespace

std::uint64_t ecfc_atom_invariant(const chem::MolGraph& g, std::uint32_t a) {
  const auto& atom = g.atom(a);
  std::uint64_t h = mix64(static_cast<std::uint64_t>(atom.atomic_number));
  h = combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(atom.charge)));
  h = combine(h, static_cast<std::uint64_t>(g.heavy_degree(a)));
  h = combine(h, static_cast<std::uint64_t>(g.total_hydrogens(a)));
  h = combine(h, g.is_ring_atom(a) ? 1 : 0);
  h = combine(h, atom.aromatic ? 1 : 0);
  return h;
}

Fingerprint ecfc(const chem::MolGraph& g, int radius) {
  if (radius < 0 || radius > 4) throw std::invalid_argument("ecfc radius must be in [0, 4], got " + std::to_string(radius));
  const auto n = static_cast<std::uint32_t>(g.num_atoms());
  std::vector<std::uint32_t> heavy;
  for (std::uint32_t a = 0; a < n; ++a) {
    if (g.atom(a).atomic_number != 1) heavy.push_back(a);
  }
  std::vector<std::uint64_t> ids(n, 0);
  std::map<std::uint64_t, std::uint32_t> counts;
  for (auto a : heavy) {
    ids[a] = ecfc_atom_invariant(g, a);
    ++counts[ids[a]];
  }
  std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
  for (int iter = 1; iter <= radius; ++iter) {
    std::vector<std::uint64_t> next(n, 0);
    for (auto a : heavy) {
      env.clear();
      for (const auto& nb : g.neighbors(a)) {
        if (g.atom(nb.atom).atomic_number == 1) continue;
        env.emplace_back(static_cast<std::uint64_t>(g.bond(nb.bond).order), ids[nb.atom]);
      }
      std::sort(env.begin(), env.end());
      std::uint64_t h = combine(static_cast<std::uint64_t>(iter), ids[a]);
      for (const auto& [order, id] : env) h = combine(combine(h, order), id);
      next[a] = h;
      ++counts[h];
    }
    ids = std::move(next);
  }
  Fingerprint fp;
  fp.radius = radius;
  fp.entries.assign(counts.begin(), counts.end());
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.radius != b.radius) {
    throw RadiusMismatch("fingerprint radii differ: " + std::to_string(a.radius) + " vs " + std::to_string(b.radius));
  }
  std::uint64_t inter = 0, uni = 0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() || j != b.entries.end()) {
    if (j == b.entries.end() || (i != a.entries.end() && i->first < j->first)) {
      uni += i->second;
      ++i;
    } else if (i == a.entries.end() || j->first < i->first) {
      uni += j->second;
      ++j;
    } else {
      inter += std::min(i->second, j->second);
      uni += std::max(i->second, j->second);
      ++i;
      ++j;
    }
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double tanimoto_binary(const Fingerprint& a, const Fingerprint& b) {
  if (a.radius != b.radius) {
    throw RadiusMismatch("fingerprint radii differ: " + std::to_string(a.radius) + " vs " + std::to_string(b.radius));
  }
  std::size_t inter = 0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() && j != b.entries.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.entries.size() + b.entries.size() - inter;
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace molopt
