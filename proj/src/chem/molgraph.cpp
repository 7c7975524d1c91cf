//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/chem/molgraph.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "molopt/chem/element.hpp"

namespace molopt::chem {

int valence_contribution(BondOrder order) noexcept {
  switch (order) {
    case BondOrder::kSingle: return 1;
    case BondOrder::kDouble: return 2;
    case BondOrder::kTriple: return 3;
    case BondOrder::kAromatic: return 1;
  }
  return 1;
}

MolGraph::MolGraph(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  const auto n = static_cast<std::uint32_t>(atoms_.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    if (atoms_[i].hydrogens < 0) throw GraphError("negative hydrogen count", i);
    if (atoms_[i].atomic_number < 1 || atoms_[i].atomic_number > max_atomic_number()) {
      throw GraphError("unknown element", i);
    }
  }
  for (const auto& b : bonds_) {
    if (b.begin >= n || b.end >= n) throw GraphError("bond endpoint out of range", std::nullopt);
    if (b.begin == b.end) throw GraphError("self loop", b.begin);
  }
  build_adjacency();
  perceive_rings();
  for (std::uint32_t b = 0; b < bonds_.size(); ++b) {
    if (bonds_[b].order == BondOrder::kAromatic && !ring_bond_[b]) bonds_[b].order = BondOrder::kSingle;
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    if (atoms_[i].aromatic && !ring_atom_[i]) throw GraphError("aromatic atom outside a ring", i);
  }
  perceive_aromaticity();
}

void MolGraph::build_adjacency() {
  const auto n = atoms_.size();
  std::vector<std::uint32_t> count(n + 1, 0);
  for (const auto& b : bonds_) {
    ++count[b.begin];
    ++count[b.end];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + count[i];
  adjacency_.assign(offsets_[n], Neighbor{0, 0});
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t bi = 0; bi < bonds_.size(); ++bi) {
    const auto& b = bonds_[bi];
    adjacency_[fill[b.begin]++] = {b.end, bi};
    adjacency_[fill[b.end]++] = {b.begin, bi};
  }
  for (std::uint32_t a = 0; a < n; ++a) {
    auto nb = neighbors(a);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        if (nb[i].atom == nb[j].atom) throw GraphError("duplicate bond", a);
      }
    }
  }
  component_of_.assign(n, UINT32_MAX);
  components_ = 0;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (component_of_[s] != UINT32_MAX) continue;
    const auto id = static_cast<std::uint32_t>(components_++);
    component_of_[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const auto a = stack.back();
      stack.pop_back();
      for (const auto& nb : neighbors(a)) {
        if (component_of_[nb.atom] == UINT32_MAX) {
          component_of_[nb.atom] = id;
          stack.push_back(nb.atom);
        }
      }
    }
  }
}

namespace {

// XOR basis over GF(2) keyed by highest set bit.
class CycleSpace {
 public:
  explicit CycleSpace(std::size_t bits) : words_((bits + 63) / 64), basis_(bits) { }

  bool insert(std::vector<std::uint64_t> v) {
    for (std::size_t w = words_; w-- > 0;) {
      while (v[w] != 0) {
        const int hi = 63 - __builtin_clzll(v[w]);
        const std::size_t bit = w * 64 + static_cast<std::size_t>(hi);
        if (basis_[bit].empty()) {
          basis_[bit] = std::move(v);
          return true;
        }
        for (std::size_t k = 0; k <= w; ++k) v[k] ^= basis_[bit][k];
      }
    }
    return false;
  }
  std::size_t words() const noexcept { return words_; }

 private:
  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> basis_;
};

}  // namespace

void MolGraph::perceive_rings() {
  const auto n = static_cast<std::uint32_t>(atoms_.size());
  const auto m = static_cast<std::uint32_t>(bonds_.size());
  ring_atom_.assign(n, false);
  ring_bond_.assign(m, false);
  ring_count_.assign(n, 0);
  smallest_ring_.assign(n, 0);
  rings_.clear();

  // Bridges by iterative low-link DFS; every other bond lies on a cycle.
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<std::uint32_t> parent_bond(n, UINT32_MAX);
  std::vector<std::size_t> cursor(n, 0);
  int timer = 0;
  std::fill(ring_bond_.begin(), ring_bond_.end(), true);
  for (std::uint32_t s = 0; s < n; ++s) {
    if (disc[s] >= 0) continue;
    std::vector<std::uint32_t> stack{s};
    disc[s] = low[s] = timer++;
    while (!stack.empty()) {
      const auto a = stack.back();
      auto nb = neighbors(a);
      if (cursor[a] < nb.size()) {
        const auto next = nb[cursor[a]++];
        if (next.bond == parent_bond[a]) continue;
        if (disc[next.atom] < 0) {
          parent_bond[next.atom] = next.bond;
          disc[next.atom] = low[next.atom] = timer++;
          stack.push_back(next.atom);
        } else {
          low[a] = std::min(low[a], disc[next.atom]);
        }
      } else {
        stack.pop_back();
        if (parent_bond[a] != UINT32_MAX) {
          const auto p = bonds_[parent_bond[a]].other(a);
          low[p] = std::min(low[p], low[a]);
          if (low[a] > disc[p]) ring_bond_[parent_bond[a]] = false;
        }
      }
    }
  }
  std::vector<std::uint32_t> ring_bond_index(m, UINT32_MAX);
  std::uint32_t n_ring_bonds = 0;
  for (std::uint32_t b = 0; b < m; ++b) {
    if (!ring_bond_[b]) continue;
    ring_bond_index[b] = n_ring_bonds++;
    ring_atom_[bonds_[b].begin] = true;
    ring_atom_[bonds_[b].end] = true;
  }
  if (n_ring_bonds == 0) return;
  const std::size_t cyclomatic = m + components_ - n;

  // Horton candidates: for each ring atom x and ring bond (u, v), the cycle
  // formed by the shortest paths x..u and v..x when they only share x.
  struct Candidate {
    std::vector<std::uint32_t> atoms;
    std::vector<std::uint32_t> bonds;
    std::vector<std::uint32_t> sorted_atoms;
  };
  std::map<std::vector<std::uint32_t>, Candidate> unique;
  std::vector<int> dist(n);
  std::vector<std::uint32_t> pred_bond(n);
  std::vector<std::uint32_t> stamp(n, UINT32_MAX);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t x = 0; x < n; ++x) {
    if (!ring_atom_[x]) continue;
    std::fill(dist.begin(), dist.end(), -1);
    queue.assign(1, x);
    dist[x] = 0;
    pred_bond[x] = UINT32_MAX;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const auto a = queue[qi];
      for (const auto& nb : neighbors(a)) {
        if (!ring_bond_[nb.bond] || dist[nb.atom] >= 0) continue;
        dist[nb.atom] = dist[a] + 1;
        pred_bond[nb.atom] = nb.bond;
        queue.push_back(nb.atom);
      }
    }
    for (std::uint32_t b = 0; b < m; ++b) {
      if (!ring_bond_[b]) continue;
      const auto u = bonds_[b].begin, v = bonds_[b].end;
      if (dist[u] < 0 || dist[v] < 0) continue;
      if (pred_bond[u] == b || pred_bond[v] == b) continue;
      std::vector<std::uint32_t> path_u, path_v;  // from the endpoint back to x
      for (auto a = u; a != x; a = bonds_[pred_bond[a]].other(a)) path_u.push_back(a);
      for (auto a = v; a != x; a = bonds_[pred_bond[a]].other(a)) path_v.push_back(a);
      bool disjoint = true;
      for (auto a : path_u) stamp[a] = x;
      for (auto a : path_v) {
        if (stamp[a] == x) disjoint = false;
      }
      for (auto a : path_u) stamp[a] = UINT32_MAX;
      if (!disjoint) continue;
      Candidate c;
      c.atoms.push_back(x);
      c.atoms.insert(c.atoms.end(), path_u.rbegin(), path_u.rend());
      c.atoms.insert(c.atoms.end(), path_v.begin(), path_v.end());
      if (c.atoms.size() < 3) continue;
      for (std::size_t i = 0; i < c.atoms.size(); ++i) {
        c.bonds.push_back(*bond_between(c.atoms[i], c.atoms[(i + 1) % c.atoms.size()]));
      }
      auto key = c.bonds;
      std::sort(key.begin(), key.end());
      if (unique.count(key)) continue;
      c.sorted_atoms = c.atoms;
      std::sort(c.sorted_atoms.begin(), c.sorted_atoms.end());
      unique.emplace(std::move(key), std::move(c));
    }
  }
  std::vector<Candidate*> order;
  for (auto& [key, c] : unique) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const Candidate* a, const Candidate* b) {
    if (a->atoms.size() != b->atoms.size()) return a->atoms.size() < b->atoms.size();
    return a->sorted_atoms < b->sorted_atoms;
  });
  for (const auto* c : order) {
    for (auto a : c->atoms) {
      const int size = static_cast<int>(c->atoms.size());
      if (smallest_ring_[a] == 0 || size < smallest_ring_[a]) smallest_ring_[a] = size;
    }
  }

  CycleSpace space(n_ring_bonds);
  for (const auto* c : order) {
    if (rings_.size() == cyclomatic) break;
    std::vector<std::uint64_t> v(space.words(), 0);
    for (auto b : c->bonds) {
      const auto k = ring_bond_index[b];
      v[k / 64] |= std::uint64_t{1} << (k % 64);
    }
    if (!space.insert(std::move(v))) continue;
    // Start each ring at its lowest atom, walking toward the lower neighbour.
    auto atoms = c->atoms;
    const auto lowest = std::min_element(atoms.begin(), atoms.end()) - atoms.begin();
    std::rotate(atoms.begin(), atoms.begin() + lowest, atoms.end());
    if (atoms.size() > 2 && atoms.back() < atoms[1]) std::reverse(atoms.begin() + 1, atoms.end());
    Ring ring;
    ring.atoms = std::move(atoms);
    for (std::size_t i = 0; i < ring.atoms.size(); ++i) {
      ring.bonds.push_back(*bond_between(ring.atoms[i], ring.atoms[(i + 1) % ring.atoms.size()]));
    }
    for (auto a : ring.atoms) ++ring_count_[a];
    rings_.push_back(std::move(ring));
  }
}

namespace {

// Pi electrons an atom donates to a ring in its written (Kekule) state, or -1
// when it cannot be part of an aromatic ring.
int pi_electrons(const MolGraph& g, std::uint32_t a) {
  const Atom& atom = g.atom(a);
  int ring_double = 0, exo_hetero = 0, exo_other = 0;
  for (const auto& nb : g.neighbors(a)) {
    const auto order = g.bond(nb.bond).order;
    if (order == BondOrder::kTriple || order == BondOrder::kAromatic) return -1;
    if (order != BondOrder::kDouble) continue;
    if (g.is_ring_bond(nb.bond)) {
      ++ring_double;
    } else {
      const int z = g.atom(nb.atom).atomic_number;
      if (z == 7 || z == 8 || z == 16) {
        ++exo_hetero;
      } else {
        ++exo_other;
      }
    }
  }
  if (ring_double + exo_hetero + exo_other > 1) return -1;
  if (ring_double == 1) return 1;
  if (exo_hetero == 1) return atom.atomic_number == 6 ? 0 : -1;
  if (exo_other == 1) return -1;
  const int connections = static_cast<int>(g.degree(a)) + atom.hydrogens;
  switch (atom.atomic_number) {
    case 6:
      if (connections != 3) return -1;
      if (atom.charge == -1) return 2;
      if (atom.charge == 1) return 0;
      return -1;
    case 7:
    case 15:
      return atom.charge == 0 && connections == 3 ? 2 : -1;
    case 8:
    case 16:
    case 34:
    case 52:
      return atom.charge == 0 && connections == 2 ? 2 : -1;
    case 5:
      return atom.charge == 0 && connections == 3 ? 0 : -1;
    default:
      return -1;
  }
}

bool huckel(int electrons) { return electrons >= 2 && electrons % 4 == 2; }

}  // namespace

void MolGraph::perceive_aromaticity() {
  if (rings_.empty()) return;
  std::vector<int> electrons(atoms_.size(), -1);
  std::vector<bool> candidate(rings_.size(), false);
  for (std::size_t r = 0; r < rings_.size(); ++r) {
    bool ok = true;
    for (auto a : rings_[r].atoms) {
      if (atoms_[a].aromatic) ok = false;
    }
    for (auto b : rings_[r].bonds) {
      if (bonds_[b].order == BondOrder::kAromatic) ok = false;
    }
    if (!ok) continue;
    for (auto a : rings_[r].atoms) {
      electrons[a] = pi_electrons(*this, a);
      if (electrons[a] < 0) ok = false;
    }
    candidate[r] = ok;
  }
  auto ring_sum = [&](const std::vector<std::uint32_t>& atoms) {
    int sum = 0;
    for (auto a : atoms) sum += electrons[a];
    return sum;
  };
  std::vector<bool> aromatic(rings_.size(), false);
  for (std::size_t r = 0; r < rings_.size(); ++r) {
    if (candidate[r] && huckel(ring_sum(rings_[r].atoms))) aromatic[r] = true;
  }
  // Fused pairs that are only aromatic as a whole (azulene-like systems).
  std::vector<std::pair<std::size_t, std::size_t>> fused;
  for (std::size_t r = 0; r < rings_.size(); ++r) {
    if (!candidate[r] || aromatic[r]) continue;
    for (std::size_t s = r + 1; s < rings_.size(); ++s) {
      if (!candidate[s] || aromatic[s]) continue;
      int shared_bonds = 0;
      for (auto b : rings_[r].bonds) {
        shared_bonds += static_cast<int>(std::count(rings_[s].bonds.begin(), rings_[s].bonds.end(), b));
      }
      if (shared_bonds == 0) continue;
      std::vector<std::uint32_t> atoms = rings_[r].atoms;
      atoms.insert(atoms.end(), rings_[s].atoms.begin(), rings_[s].atoms.end());
      std::sort(atoms.begin(), atoms.end());
      atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
      if (huckel(ring_sum(atoms))) fused.emplace_back(r, s);
    }
  }
  for (std::size_t r = 0; r < rings_.size(); ++r) {
    if (!aromatic[r]) continue;
    for (auto a : rings_[r].atoms) atoms_[a].aromatic = true;
    for (auto b : rings_[r].bonds) bonds_[b].order = BondOrder::kAromatic;
  }
  // A fused pair aromatizes its outer envelope; the shared bond keeps its
  // written order.
  for (auto [r, s] : fused) {
    const auto& rb = rings_[r].bonds;
    const auto& sb = rings_[s].bonds;
    for (auto a : rings_[r].atoms) atoms_[a].aromatic = true;
    for (auto a : rings_[s].atoms) atoms_[a].aromatic = true;
    for (auto b : rb) {
      if (std::find(sb.begin(), sb.end(), b) == sb.end()) bonds_[b].order = BondOrder::kAromatic;
    }
    for (auto b : sb) {
      if (std::find(rb.begin(), rb.end(), b) == rb.end()) bonds_[b].order = BondOrder::kAromatic;
    }
  }
}

int MolGraph::heavy_degree(std::uint32_t atom) const {
  int d = 0;
  for (const auto& nb : neighbors(atom)) {
    if (atoms_[nb.atom].atomic_number != 1) ++d;
  }
  return d;
}

int MolGraph::total_hydrogens(std::uint32_t atom) const {
  int h = atoms_[atom].hydrogens;
  for (const auto& nb : neighbors(atom)) {
    if (atoms_[nb.atom].atomic_number == 1) ++h;
  }
  return h;
}

int MolGraph::bond_valence(std::uint32_t atom) const {
  int v = 0;
  for (const auto& nb : neighbors(atom)) v += valence_contribution(bonds_[nb.bond].order);
  return v;
}

std::optional<std::uint32_t> MolGraph::bond_between(std::uint32_t a, std::uint32_t b) const {
  for (const auto& nb : neighbors(a)) {
    if (nb.atom == b) return nb.bond;
  }
  return std::nullopt;
}

std::size_t MolGraph::heavy_atom_count() const {
  return static_cast<std::size_t>(
      std::count_if(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.atomic_number != 1; }));
}

bool MolGraph::in_sssr_ring_of_size(std::uint32_t atom, int size) const {
  for (const auto& r : rings_) {
    if (static_cast<int>(r.atoms.size()) != size) continue;
    if (std::find(r.atoms.begin(), r.atoms.end(), atom) != r.atoms.end()) return true;
  }
  return false;
}

int MolGraph::ring_bond_count(std::uint32_t atom) const {
  int c = 0;
  for (const auto& nb : neighbors(atom)) {
    if (ring_bond_[nb.bond]) ++c;
  }
  return c;
}

MolGraph MolGraph::with_explicit_hydrogens() const {
  std::vector<Atom> atoms = atoms_;
  std::vector<Bond> bonds = bonds_;
  for (std::uint32_t i = 0; i < atoms_.size(); ++i) {
    for (int h = 0; h < atoms_[i].hydrogens; ++h) {
      Atom hydrogen;
      hydrogen.atomic_number = 1;
      atoms.push_back(hydrogen);
      bonds.push_back({i, static_cast<std::uint32_t>(atoms.size() - 1), BondOrder::kSingle});
    }
    atoms[i].hydrogens = 0;
  }
  MolGraph out(std::move(atoms), std::move(bonds));
  out.stereo_dropped_ = stereo_dropped_;
  return out;
}

MolGraph MolGraph::permuted(std::span<const std::uint32_t> perm) const {
  std::vector<std::uint32_t> inverse(atoms_.size());
  std::vector<Atom> atoms(atoms_.size());
  for (std::uint32_t i = 0; i < perm.size(); ++i) {
    atoms[i] = atoms_[perm[i]];
    inverse[perm[i]] = i;
  }
  std::vector<Bond> bonds = bonds_;
  for (auto& b : bonds) {
    b.begin = inverse[b.begin];
    b.end = inverse[b.end];
  }
  MolGraph out(std::move(atoms), std::move(bonds));
  out.stereo_dropped_ = stereo_dropped_;
  return out;
}

std::optional<std::uint32_t> MolGraph::first_valence_violation() const {
  for (std::uint32_t i = 0; i < atoms_.size(); ++i) {
    const auto allowed = allowed_valences(atoms_[i].atomic_number, atoms_[i].charge);
    if (allowed.empty()) continue;
    const int v = bond_valence(i) + atoms_[i].hydrogens;
    if (v > allowed.back()) return i;
  }
  return std::nullopt;
}

}  // namespace molopt::chem
