//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <map>
#include <set>
#include <numeric>
#include <tuple>

#include "molopt/chem/element.hpp"
#include "molopt/chem/smiles.hpp"

namespace molopt::chem {
namespace {

// Dense ranks of keys, ascending.
template <class Key>
std::vector<std::uint32_t> dense_ranks(const std::vector<Key>& keys) {
  std::vector<std::uint32_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });
  std::vector<std::uint32_t> ranks(keys.size());
  std::uint32_t r = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && keys[order[i - 1]] < keys[order[i]]) ++r;
    ranks[order[i]] = r;
  }
  return ranks;
}

std::size_t class_count(const std::vector<std::uint32_t>& ranks) {
  std::uint32_t mx = 0;
  for (auto r : ranks) mx = std::max(mx, r);
  return ranks.empty() ? 0 : mx + 1;
}

// Extended-connectivity refinement until the partition stops splitting.
void refine(const MolGraph& g, std::vector<std::uint32_t>& ranks) {
  const auto n = g.num_atoms();
  std::size_t classes = class_count(ranks);
  while (true) {
    std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> keys(n);
    for (std::uint32_t a = 0; a < n; ++a) {
      keys[a].first = ranks[a];
      for (const auto& nb : g.neighbors(a)) {
        keys[a].second.push_back(ranks[nb.atom] * 8 + static_cast<std::uint32_t>(g.bond(nb.bond).order));
      }
      std::sort(keys[a].second.begin(), keys[a].second.end());
    }
    auto next = dense_ranks(keys);
    const auto next_classes = class_count(next);
    ranks = std::move(next);
    if (next_classes == classes) return;
    classes = next_classes;
  }
}

}  // namespace

std::vector<std::uint32_t> canonical_ranks(const MolGraph& g) {
  const auto n = static_cast<std::uint32_t>(g.num_atoms());
  using Invariant = std::array<int, 7>;
  std::vector<Invariant> inv(n);
  for (std::uint32_t a = 0; a < n; ++a) {
    const Atom& atom = g.atom(a);
    inv[a] = {static_cast<int>(g.degree(a)), atom.atomic_number, atom.isotope, atom.charge, atom.hydrogens,
              atom.aromatic ? 1 : 0, g.is_ring_atom(a) ? 1 : 0};
  }
  auto ranks = dense_ranks(inv);
  refine(g, ranks);
  // Break remaining ties: the first atom of the lowest tied class moves
  // ahead of its class, then refinement propagates the choice.
  while (class_count(ranks) < n) {
    std::vector<std::uint32_t> size(n, 0);
    for (auto r : ranks) ++size[r];
    std::uint32_t tied = 0;
    while (size[tied] < 2) ++tied;
    std::uint32_t chosen = 0;
    while (ranks[chosen] != tied) ++chosen;
    std::vector<std::pair<std::uint32_t, int>> keys(n);
    for (std::uint32_t a = 0; a < n; ++a) keys[a] = {ranks[a], a == chosen ? 0 : 1};
    ranks = dense_ranks(keys);
    refine(g, ranks);
  }
  return ranks;
}

namespace {

std::string atom_text(const MolGraph& g, std::uint32_t a) {
  const Atom& atom = g.atom(a);
  std::string sym = element(atom.atomic_number).symbol;
  if (atom.aromatic) sym[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(sym[0])));
  if (atom.charge == 0 && atom.isotope == 0 && is_organic_subset(atom.atomic_number)) {
    int bond_sum = 0;
    for (const auto& nb : g.neighbors(a)) bond_sum += valence_contribution(g.bond(nb.bond).order);
    const auto h = organic_implicit_hydrogens(atom.atomic_number, atom.aromatic, bond_sum);
    if (h && *h == atom.hydrogens) return sym;
  }
  std::string out = "[";
  if (atom.isotope != 0) out += std::to_string(atom.isotope);
  out += sym;
  if (atom.hydrogens > 0) {
    out += 'H';
    if (atom.hydrogens > 1) out += std::to_string(atom.hydrogens);
  }
  if (atom.charge != 0) {
    out += atom.charge > 0 ? '+' : '-';
    if (std::abs(atom.charge) > 1) out += std::to_string(std::abs(atom.charge));
  }
  out += ']';
  return out;
}

std::string bond_text(const MolGraph& g, std::uint32_t bond) {
  const Bond& b = g.bond(bond);
  const bool both_aromatic = g.atom(b.begin).aromatic && g.atom(b.end).aromatic;
  switch (b.order) {
    case BondOrder::kSingle: return both_aromatic ? "-" : "";
    case BondOrder::kDouble: return "=";
    case BondOrder::kTriple: return "#";
    case BondOrder::kAromatic: return both_aromatic ? "" : ":";
  }
  return "";
}

std::string ring_label(int digit) {
  if (digit < 10) return std::string(1, static_cast<char>('0' + digit));
  return "%" + std::to_string(digit);
}

class Writer {
 public:
  Writer(const MolGraph& g, std::span<const std::uint32_t> ranks)
      : g_(g), ranks_(ranks), visited_(g.num_atoms(), false), tree_bond_(g.num_bonds(), false),
        closures_(g.num_atoms()), children_(g.num_atoms()), order_(g.num_atoms(), 0) { }

  std::string run() {
    const auto n = static_cast<std::uint32_t>(g_.num_atoms());
    std::vector<std::uint32_t> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::sort(by_rank.begin(), by_rank.end(), [&](auto a, auto b) { return ranks_[a] < ranks_[b]; });
    std::string out;
    for (auto root : by_rank) {
      if (visited_[root]) continue;
      plan(root);
      if (!out.empty()) out += '.';
      emit(root, out);
    }
    return out;
  }

 private:
  std::vector<Neighbor> sorted_neighbors(std::uint32_t a) const {
    auto nb = g_.neighbors(a);
    std::vector<Neighbor> out(nb.begin(), nb.end());
    std::sort(out.begin(), out.end(), [&](const Neighbor& x, const Neighbor& y) { return ranks_[x.atom] < ranks_[y.atom]; });
    return out;
  }

  // First pass: DFS tree and ring-closure bonds for one component.
  void plan(std::uint32_t root) {
    struct Frame {
      std::uint32_t atom;
      std::vector<Neighbor> nbs;
      std::size_t next;
    };
    std::vector<Frame> stack;
    visited_[root] = true;
    order_[root] = counter_++;
    stack.push_back({root, sorted_neighbors(root), 0});
    while (!stack.empty()) {
      auto& f = stack.back();
      if (f.next == f.nbs.size()) {
        stack.pop_back();
        continue;
      }
      const Neighbor nb = f.nbs[f.next++];
      const auto a = f.atom;
      if (tree_bond_[nb.bond]) continue;
      if (visited_[nb.atom]) {
        // Seen each ring closure bond twice; record it once.
        auto& list = closures_[nb.atom];
        bool known = std::any_of(list.begin(), list.end(), [&](const Neighbor& c) { return c.bond == nb.bond; });
        if (!known) {
          closures_[nb.atom].push_back({a, nb.bond});
          closures_[a].push_back({nb.atom, nb.bond});
        }
        continue;
      }
      tree_bond_[nb.bond] = true;
      children_[a].push_back(nb);
      visited_[nb.atom] = true;
      order_[nb.atom] = counter_++;
      stack.push_back({nb.atom, sorted_neighbors(nb.atom), 0});
    }
  }

  void emit(std::uint32_t root, std::string& out) {
    struct Frame {
      std::uint32_t atom;
      std::size_t child;
    };
    std::vector<Frame> stack;
    auto write_atom = [&](std::uint32_t a) {
      out += atom_text(g_, a);
      auto& list = closures_[a];
      // Closings (partner already written) first, in the order their digits
      // were opened; then openings in partner rank order.
      std::vector<Neighbor> closing, opening;
      for (const auto& c : list) (order_[c.atom] < order_[a] ? closing : opening).push_back(c);
      std::sort(closing.begin(), closing.end(), [&](const Neighbor& x, const Neighbor& y) {
        return digit_of_[x.bond] < digit_of_[y.bond];
      });
      std::sort(opening.begin(), opening.end(), [&](const Neighbor& x, const Neighbor& y) {
        return ranks_[x.atom] < ranks_[y.atom];
      });
      std::vector<int> freed;
      for (const auto& c : closing) {
        const int d = digit_of_[c.bond];
        out += ring_label(d);
        freed.push_back(d);
      }
      for (const auto& c : opening) {
        int d = 1;
        while (in_use_.count(d)) ++d;
        in_use_.insert(d);
        digit_of_[c.bond] = d;
        out += bond_text(g_, c.bond);
        out += ring_label(d);
      }
      for (int d : freed) in_use_.erase(d);
    };
    write_atom(root);
    stack.push_back({root, 0});
    while (!stack.empty()) {
      auto& f = stack.back();
      const auto& kids = children_[f.atom];
      if (f.child == kids.size()) {
        stack.pop_back();
        if (!stack.empty() && stack.back().child < children_[stack.back().atom].size()) out += ')';
        continue;
      }
      const auto nb = kids[f.child++];
      const bool branch = f.child < kids.size();
      if (branch) out += '(';
      out += bond_text(g_, nb.bond);
      write_atom(nb.atom);
      stack.push_back({nb.atom, 0});
    }
  }

  const MolGraph& g_;
  std::span<const std::uint32_t> ranks_;
  std::vector<bool> visited_;
  std::vector<bool> tree_bond_;
  std::vector<std::vector<Neighbor>> closures_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::uint32_t> order_;
  std::uint32_t counter_ = 0;
  std::map<std::uint32_t, int> digit_of_;
  std::set<int> in_use_;
};

}  // namespace

std::string write_smiles(const MolGraph& g, std::span<const std::uint32_t> ranks) {
  return Writer(g, ranks).run();
}

CanonicalSmiles canonical(const MolGraph& g) {
  const auto ranks = canonical_ranks(g);
  return {write_smiles(g, ranks)};
}

CanonicalSmiles canonicalize(std::string_view smiles) { return canonical(parse_smiles(smiles)); }

}  // namespace molopt::chem
