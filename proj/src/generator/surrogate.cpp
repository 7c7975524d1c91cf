//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "molopt/chem/element.hpp"
#include "molopt/chem/smiles.hpp"
#include "molopt/corpus.hpp"
#include "molopt/data.hpp"
#include "molopt/fingerprint.hpp"
#include "molopt/generator.hpp"
#include "molopt/text.hpp"

namespace molopt {

using chem::Atom;
using chem::Bond;
using chem::BondOrder;
using chem::MolGraph;

namespace {

// Mutable atom/bond lists; hydrogens are counts on the atoms.
struct EditMol {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;

  static EditMol from(const MolGraph& g) { return {g.atoms(), g.bonds()}; }

  std::size_t heavy_count() const {
    return static_cast<std::size_t>(std::count_if(atoms.begin(), atoms.end(), [](const Atom& a) { return a.atomic_number != 1; }));
  }

  int bond_sum(std::uint32_t a) const {
    int sum = 0;
    for (const auto& b : bonds) {
      if (b.begin == a || b.end == a) sum += chem::valence_contribution(b.order);
    }
    return sum;
  }

  int heavy_degree(std::uint32_t a) const {
    int n = 0;
    for (const auto& b : bonds) {
      if (b.begin == a || b.end == a) ++n;
    }
    return n;
  }

  // Atoms that can take a new single bond.
  std::vector<std::uint32_t> open_sites() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t a = 0; a < atoms.size(); ++a) {
      if (atoms[a].hydrogens > 0 && atoms[a].charge == 0) out.push_back(a);
    }
    return out;
  }
};

// Whole-graph ring flags for the bonds of an EditMol.
std::vector<bool> ring_bonds(const EditMol& m) {
  MolGraph g(m.atoms, m.bonds);
  std::vector<bool> out(m.bonds.size());
  for (std::uint32_t b = 0; b < m.bonds.size(); ++b) out[b] = g.is_ring_bond(b);
  return out;
}

std::vector<std::uint32_t> cuttable_bonds(const EditMol& m) {
  const auto ring = ring_bonds(m);
  std::vector<std::uint32_t> out;
  for (std::uint32_t b = 0; b < m.bonds.size(); ++b) {
    if (m.bonds[b].order == BondOrder::kSingle && !ring[b]) out.push_back(b);
  }
  return out;
}

// Sub-molecule induced by `keep` (sorted atom ids); returns the new index of
// `mark`.
EditMol induced(const EditMol& m, const std::vector<bool>& keep, std::uint32_t mark, std::uint32_t& mark_out) {
  std::vector<std::uint32_t> remap(m.atoms.size(), UINT32_MAX);
  EditMol out;
  for (std::uint32_t a = 0; a < m.atoms.size(); ++a) {
    if (!keep[a]) continue;
    remap[a] = static_cast<std::uint32_t>(out.atoms.size());
    out.atoms.push_back(m.atoms[a]);
  }
  for (const auto& b : m.bonds) {
    if (keep[b.begin] && keep[b.end]) out.bonds.push_back({remap[b.begin], remap[b.end], b.order});
  }
  mark_out = remap[mark];
  return out;
}

struct Piece {
  EditMol mol;
  std::uint32_t site;
};

// Removes an acyclic single bond; each side gains one hydrogen at the cut.
std::pair<Piece, Piece> split(const EditMol& m, std::uint32_t bond) {
  const auto cut = m.bonds[bond];
  std::vector<bool> side(m.atoms.size(), false);
  std::vector<std::uint32_t> stack{cut.begin};
  side[cut.begin] = true;
  while (!stack.empty()) {
    const auto a = stack.back();
    stack.pop_back();
    for (std::uint32_t bi = 0; bi < m.bonds.size(); ++bi) {
      if (bi == bond) continue;
      const auto& b = m.bonds[bi];
      if (b.begin != a && b.end != a) continue;
      const auto o = b.other(a);
      if (!side[o]) {
        side[o] = true;
        stack.push_back(o);
      }
    }
  }
  std::vector<bool> other(side.size());
  for (std::size_t i = 0; i < side.size(); ++i) other[i] = !side[i];
  Piece p, q;
  p.mol = induced(m, side, cut.begin, p.site);
  q.mol = induced(m, other, cut.end, q.site);
  p.mol.atoms[p.site].hydrogens += 1;
  q.mol.atoms[q.site].hydrogens += 1;
  return {std::move(p), std::move(q)};
}

EditMol join(const EditMol& a, std::uint32_t site_a, const EditMol& b, std::uint32_t site_b) {
  EditMol out = a;
  const auto offset = static_cast<std::uint32_t>(a.atoms.size());
  out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
  for (const auto& bond : b.bonds) out.bonds.push_back({bond.begin + offset, bond.end + offset, bond.order});
  out.atoms[site_a].hydrogens -= 1;
  out.atoms[site_b + offset].hydrogens -= 1;
  out.bonds.push_back({site_a, site_b + offset, BondOrder::kSingle});
  return out;
}

int smallest_valence_at_least(int z, int sum) {
  for (int v : chem::allowed_valences(z, 0)) {
    if (v >= sum) return v;
  }
  return -1;
}

struct Fragment {
  std::string smiles;
  EditMol mol;
  bool ring = false;
  double weight = 0.0;
  double score_sum = 0.0;
  int score_count = 0;
};

struct ParentInfo {
  EditMol mol;
  Fingerprint fp;
};

std::optional<EditMol> edit_from_smiles(std::string_view smiles) {
  try {
    return EditMol::from(chem::parse_smiles(smiles));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

struct SurrogateGenerator::State {
  ReferenceTokenizer tokenizer;
  std::vector<Fragment> library;
  std::unordered_map<std::string, std::size_t> index;
  std::unordered_map<std::uint64_t, double> bigram;
  std::vector<double> row_total;
  std::size_t tune_rounds = 0;
  mutable std::shared_mutex mutex;

  std::mutex parent_mutex;
  std::unordered_map<std::string, std::shared_ptr<const ParentInfo>> parents;

  static std::uint64_t key(std::int32_t prev, std::int32_t next) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(prev)) << 32) | static_cast<std::uint32_t>(next);
  }

  std::int32_t bos() const { return *tokenizer.special_token(tags::kBos); }

  void count_text(std::string_view text, double amount) {
    auto prev = bos();
    for (auto id : tokenizer.encode(text)) {
      bigram[key(prev, id)] += amount;
      row_total[static_cast<std::size_t>(prev)] += amount;
      prev = id;
    }
  }

  std::size_t add_fragment(const std::string& smiles, const EditMol& mol, double weight) {
    auto it = index.find(smiles);
    if (it != index.end()) {
      library[it->second].weight += weight;
      return it->second;
    }
    Fragment f;
    f.smiles = smiles;
    f.mol = mol;
    const auto ring = ring_bonds(mol);
    f.ring = std::any_of(ring.begin(), ring.end(), [](bool b) { return b; });
    f.weight = weight;
    library.push_back(std::move(f));
    index.emplace(smiles, library.size() - 1);
    return library.size() - 1;
  }

  std::shared_ptr<const ParentInfo> parent(const std::string& smiles) {
    {
      std::lock_guard lock(parent_mutex);
      auto it = parents.find(smiles);
      if (it != parents.end()) return it->second;
    }
    std::shared_ptr<const ParentInfo> info;
    try {
      const auto g = chem::parse_smiles(smiles);
      info = std::make_shared<const ParentInfo>(ParentInfo{EditMol::from(g), ecfc(g, 2)});
    } catch (const std::exception&) {
      return nullptr;
    }
    std::lock_guard lock(parent_mutex);
    if (parents.size() > 20000) parents.clear();
    parents.emplace(smiles, info);
    return info;
  }
};

namespace {

// Picks an index proportional to weight^(1/T); argmax at T = 0.
std::size_t pick(std::span<const double> weights, double temperature, Rng& rng) {
  if (weights.empty()) return 0;
  if (temperature <= 0.0) {
    return static_cast<std::size_t>(std::max_element(weights.begin(), weights.end()) - weights.begin());
  }
  std::vector<double> w(weights.begin(), weights.end());
  if (temperature != 1.0) {
    for (auto& x : w) x = x > 0.0 ? std::pow(x, 1.0 / temperature) : 0.0;
  }
  const auto i = rng.weighted(w);
  return i < w.size() ? i : 0;
}

struct Generation {
  const SurrogateGenerator::State& state;
  const SamplingParams& params;
  std::optional<double> property;
  Rng& rng;

  double fragment_weight(const Fragment& f) const {
    double w = f.weight;
    if (property && f.score_count > 0) {
      const double mean = f.score_sum / f.score_count;
      w *= 1.0 + 2.0 * std::exp(-std::abs(mean - *property) / 0.1);
    }
    return w;
  }

  const Fragment& fragment(bool ring_only) {
    std::vector<double> w(state.library.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto& f = state.library[i];
      w[i] = (!ring_only || f.ring) ? fragment_weight(f) : 0.0;
    }
    return state.library[pick(w, params.temperature, rng)];
  }

  template <class T>
  const T& any(const std::vector<T>& items) {
    return items[rng.index(items.size())];
  }

  std::optional<EditMol> attach(const EditMol& m, const EditMol& frag) {
    const auto a = m.open_sites();
    const auto b = frag.open_sites();
    if (a.empty() || b.empty()) return std::nullopt;
    return join(m, any(a), frag, any(b));
  }

  std::optional<EditMol> de_novo() {
    EditMol m = fragment(false).mol;
    const int extra = 1 + std::min(rng.poisson(1.2), 4);
    for (int i = 0; i < extra; ++i) {
      auto next = attach(m, fragment(false).mol);
      if (!next) break;
      m = std::move(*next);
    }
    return m;
  }

  std::optional<EditMol> element_swap(const EditMol& m) {
    std::vector<std::uint32_t> sites;
    for (std::uint32_t a = 0; a < m.atoms.size(); ++a) {
      if (m.atoms[a].charge == 0 && m.atoms[a].isotope == 0) sites.push_back(a);
    }
    if (sites.empty()) return std::nullopt;
    const auto a = any(sites);
    EditMol out = m;
    auto& atom = out.atoms[a];
    if (atom.aromatic) {
      const int deg = m.heavy_degree(a);
      if (atom.atomic_number == 6 && atom.hydrogens == 1 && deg == 2) {
        atom.atomic_number = 7;
        atom.hydrogens = 0;
        return out;
      }
      if (atom.atomic_number == 7 && atom.hydrogens == 0 && deg == 2) {
        atom.atomic_number = 6;
        atom.hydrogens = 1;
        return out;
      }
      return std::nullopt;
    }
    static constexpr std::array<int, 6> kElements = {6, 7, 8, 16, 9, 17};
    static constexpr std::array<double, 6> kWeights = {4.0, 2.0, 2.0, 0.5, 0.8, 0.5};
    const int sum = m.bond_sum(a);
    std::vector<double> w(kElements.size());
    for (std::size_t i = 0; i < kElements.size(); ++i) {
      const int z = kElements[i];
      const bool fits = smallest_valence_at_least(z, sum) >= 0 && z != atom.atomic_number;
      w[i] = fits ? kWeights[i] : 0.0;
    }
    const auto i = rng.weighted(w);
    if (i >= w.size()) return std::nullopt;
    atom.atomic_number = kElements[i];
    atom.hydrogens = smallest_valence_at_least(atom.atomic_number, sum) - sum;
    return out;
  }

  std::optional<EditMol> bond_toggle(const EditMol& m) {
    std::vector<std::uint32_t> sites;
    for (std::uint32_t b = 0; b < m.bonds.size(); ++b) {
      const auto& bond = m.bonds[b];
      const auto& x = m.atoms[bond.begin];
      const auto& y = m.atoms[bond.end];
      if (x.aromatic || y.aromatic || x.charge != 0 || y.charge != 0) continue;
      if (bond.order == BondOrder::kDouble ||
          (bond.order == BondOrder::kSingle && x.hydrogens > 0 && y.hydrogens > 0)) {
        sites.push_back(b);
      }
    }
    if (sites.empty()) return std::nullopt;
    EditMol out = m;
    auto& bond = out.bonds[any(sites)];
    const int delta = bond.order == BondOrder::kSingle ? -1 : 1;
    bond.order = bond.order == BondOrder::kSingle ? BondOrder::kDouble : BondOrder::kSingle;
    out.atoms[bond.begin].hydrogens += delta;
    out.atoms[bond.end].hydrogens += delta;
    return out;
  }

  std::optional<EditMol> add_atom(const EditMol& m) {
    static constexpr std::array<int, 5> kElements = {6, 7, 8, 9, 17};
    static constexpr std::array<double, 5> kWeights = {5.0, 1.5, 1.5, 0.7, 0.4};
    const auto z = kElements[rng.weighted(kWeights)];
    EditMol atom;
    atom.atoms.push_back(Atom{z, 0, chem::allowed_valences(z, 0).front(), false, 0});
    return attach(m, atom);
  }

  std::optional<EditMol> remove_atom(const EditMol& m) {
    if (m.atoms.size() < 3) return std::nullopt;
    std::vector<std::uint32_t> sites;
    for (std::uint32_t a = 0; a < m.atoms.size(); ++a) {
      if (m.heavy_degree(a) == 1) sites.push_back(a);
    }
    if (sites.empty()) return std::nullopt;
    const auto a = any(sites);
    std::uint32_t bond = 0;
    while (m.bonds[bond].begin != a && m.bonds[bond].end != a) ++bond;
    const auto nb = m.bonds[bond].other(a);
    EditMol out;
    std::vector<bool> keep(m.atoms.size(), true);
    keep[a] = false;
    std::uint32_t site = 0;
    out = induced(m, keep, nb, site);
    out.atoms[site].hydrogens += chem::valence_contribution(m.bonds[bond].order);
    return out;
  }

  std::optional<EditMol> ring_append(const EditMol& m) { return attach(m, fragment(true).mol); }

  std::optional<EditMol> graft(const EditMol& m) {
    const auto cuts = cuttable_bonds(m);
    if (cuts.empty()) return attach(m, fragment(false).mol);
    auto [p, q] = split(m, any(cuts));
    const Piece& keep = p.mol.heavy_count() >= q.mol.heavy_count() ? p : q;
    const auto& frag = fragment(false).mol;
    const auto sites = frag.open_sites();
    if (sites.empty()) return std::nullopt;
    return join(keep.mol, keep.site, frag, any(sites));
  }

  std::optional<EditMol> mutate(const EditMol& m) {
    static constexpr std::array<double, 6> kOps = {0.25, 0.10, 0.20, 0.20, 0.10, 0.15};
    switch (rng.weighted(kOps)) {
      case 0: return element_swap(m);
      case 1: return bond_toggle(m);
      case 2: return add_atom(m);
      case 3: return remove_atom(m);
      case 4: return ring_append(m);
      default: return graft(m);
    }
  }

  std::optional<EditMol> crossover(const EditMol& a, const EditMol& b) {
    const auto ca = cuttable_bonds(a);
    const auto cb = cuttable_bonds(b);
    if (cb.empty()) return std::nullopt;
    auto [b1, b2] = split(b, any(cb));
    const Piece& donor = rng.bernoulli(0.5) ? b1 : b2;
    if (ca.empty()) {
      const auto sites = a.open_sites();
      if (sites.empty()) return std::nullopt;
      return join(a, any(sites), donor.mol, donor.site);
    }
    auto [a1, a2] = split(a, any(ca));
    const bool larger_first = a1.mol.heavy_count() >= a2.mol.heavy_count();
    const bool take_larger = rng.bernoulli(0.7);
    const Piece& base = (larger_first == take_larger) ? a1 : a2;
    return join(base.mol, base.site, donor.mol, donor.site);
  }
};

}  // namespace

SurrogateGenerator::SurrogateGenerator() : SurrogateGenerator(Options{}) { }

SurrogateGenerator::SurrogateGenerator(Options options) : options_(options), state_(std::make_unique<State>()) {
  auto& s = *state_;
  s.row_total.assign(s.tokenizer.vocab_size(), 0.0);
  const auto table = TsvTable::parse(data::file("surrogate_fragments.tsv"), "surrogate_fragments.tsv");
  for (const auto& row : table.rows()) {
    const auto& smiles = row[table.column("smiles")];
    const auto g = chem::parse_smiles(smiles);
    const auto canon = chem::canonical(g).text;
    s.add_fragment(canon, EditMol::from(g), *parse_double(row[table.column("weight")]));
    s.count_text(std::string(tags::kStartSmiles) + canon + std::string(tags::kEndSmiles) + std::string(tags::kEos), 1.0);
  }
}

SurrogateGenerator::~SurrogateGenerator() = default;

std::string SurrogateGenerator::generate(const std::string& prompt, const SamplingParams& params, Rng& rng) {
  if (prompt.empty()) throw GeneratorError(GeneratorError::Kind::kInvalidArgument, "prompt must not be empty");
  params.validate();
  std::shared_lock lock(state_->mutex);
  const auto content = parse_prompt(prompt);
  std::vector<std::shared_ptr<const ParentInfo>> parents;
  double sim_sum = 0.0;
  for (const auto& [smiles, v] : content.similars) {
    // A repeated parent would leave crossover without a distinct partner.
    if (auto p = state_->parent(smiles); p && std::find(parents.begin(), parents.end(), p) == parents.end()) {
      parents.push_back(std::move(p));
      sim_sum += v;
    }
  }
  const double mean_sim = parents.empty() ? 0.0 : sim_sum / static_cast<double>(parents.size());
  Generation gen{*state_, params, content.property, rng};
  const double t = params.temperature;

  std::string candidate;
  for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
    std::optional<EditMol> mol;
    int edits = 0;
    if (parents.empty()) {
      mol = gen.de_novo();
    } else {
      const double u = rng.uniform();
      const auto& first = *gen.any(parents);
      if (parents.size() >= 2 && u < 0.4) {
        const ParentInfo* second = &first;
        while (second == &first) second = gen.any(parents).get();
        mol = gen.crossover(first.mol, second->mol);
        edits = rng.poisson(0.3 * t);
      } else {
        mol = first.mol;
        edits = 1 + rng.poisson(std::max(0.0, 0.9 - mean_sim) * 2.0 * t);
      }
    }
    for (int e = 0; e < edits && mol; ++e) {
      auto next = gen.mutate(*mol);
      if (next) mol = std::move(next);
    }
    if (!mol || mol->atoms.empty() || mol->heavy_count() > options_.max_heavy_atoms) continue;
    try {
      MolGraph g(mol->atoms, mol->bonds);
      if (g.first_valence_violation() || g.num_components() != 1) continue;
      candidate = chem::canonical(g).text;
      const auto check = chem::parse_smiles(candidate);
      if (!parents.empty()) {
        const auto fp = ecfc(check, 2);
        double best = 0.0;
        bool copy = false;
        for (const auto& p : parents) {
          const double sim = tanimoto(fp, p->fp);
          best = std::max(best, sim);
          copy = copy || sim >= 1.0;
        }
        if (best < options_.min_parent_similarity || copy) {
          candidate.clear();
          continue;
        }
      }
      break;
    } catch (const std::exception&) {
      candidate.clear();
    }
  }

  std::string text;
  if (params.cot) text += tags::kStartSmiles;
  // No valid candidate: the completion runs out of tokens without the stop
  // tag and is reported as an invalid generation.
  if (candidate.empty()) return text;
  text += candidate;
  text += params.stop_tag;
  if (static_cast<int>(state_->tokenizer.encode(text).size()) > params.max_new_tokens) {
    const auto ids = state_->tokenizer.encode(text);
    return state_->tokenizer.decode({ids.begin(), ids.begin() + params.max_new_tokens});
  }
  return text;
}

std::vector<double> SurrogateGenerator::next_token_probabilities(std::int32_t previous) const {
  std::shared_lock lock(state_->mutex);
  const auto v = state_->tokenizer.vocab_size();
  const double alpha = options_.smoothing;
  std::vector<double> p(v);
  const double denom = state_->row_total.at(static_cast<std::size_t>(previous)) + alpha * static_cast<double>(v);
  for (std::size_t i = 0; i < v; ++i) {
    auto it = state_->bigram.find(State::key(previous, static_cast<std::int32_t>(i)));
    const double c = it == state_->bigram.end() ? 0.0 : it->second;
    p[i] = (c + alpha) / denom;
  }
  return p;
}

ScoreResult SurrogateGenerator::score(std::string_view text) {
  std::shared_lock lock(state_->mutex);
  ScoreResult out;
  const auto v = static_cast<double>(state_->tokenizer.vocab_size());
  const double alpha = options_.smoothing;
  auto prev = state_->bos();
  for (auto id : state_->tokenizer.encode(text)) {
    auto it = state_->bigram.find(State::key(prev, id));
    const double c = it == state_->bigram.end() ? 0.0 : it->second;
    const double lp = std::log((c + alpha) / (state_->row_total[static_cast<std::size_t>(prev)] + alpha * v));
    out.token_logprobs.push_back(lp);
    out.total += lp;
    prev = id;
  }
  return out;
}

void SurrogateGenerator::tune(const std::vector<TrainingSample>& samples, const TuneConfig& cfg) {
  if (samples.empty()) throw GeneratorError(GeneratorError::Kind::kInvalidArgument, "tune needs at least one sample");
  cfg.validate();
  std::unique_lock lock(state_->mutex);
  auto& s = *state_;
  // The trailing validation share is held out of the fit.
  const auto held_out = static_cast<std::size_t>(std::floor(static_cast<double>(samples.size()) * cfg.validation_fraction));
  const auto fit = samples.size() - held_out;
  const double step = 0.1 * cfg.peak_lr / 1e-4;
  for (std::size_t i = 0; i < fit; ++i) {
    const auto& sample = samples[i];
    double rate = step;
    if (cfg.warmup_steps > 0 && i < static_cast<std::size_t>(cfg.warmup_steps)) {
      rate *= static_cast<double>(i + 1) / static_cast<double>(cfg.warmup_steps);
    }
    const double amount = rate * cfg.epochs;
    const auto smiles = extract_smiles(sample.prompt, sample.completion);
    if (!smiles) continue;
    auto mol = edit_from_smiles(*smiles);
    if (!mol) continue;
    const auto property = parse_prompt(sample.prompt).property;
    s.count_text(sample.completion, amount);
    // Cut every acyclic single bond; the pieces are ring systems and chain
    // atoms.
    std::vector<EditMol> pending{*mol};
    while (!pending.empty()) {
      EditMol m = std::move(pending.back());
      pending.pop_back();
      const auto cuts = cuttable_bonds(m);
      if (!cuts.empty()) {
        auto [p, q] = split(m, cuts.front());
        pending.push_back(std::move(p.mol));
        pending.push_back(std::move(q.mol));
        continue;
      }
      std::string canon;
      try {
        canon = chem::canonical(MolGraph(m.atoms, m.bonds)).text;
      } catch (const std::exception&) {
        continue;
      }
      const auto idx = s.add_fragment(canon, m, amount);
      if (property) {
        s.library[idx].score_sum += *property;
        s.library[idx].score_count += 1;
      }
    }
  }
  ++s.tune_rounds;
}

double SurrogateGenerator::fragment_weight(std::string_view canonical_smiles) const {
  std::shared_lock lock(state_->mutex);
  auto it = state_->index.find(std::string(canonical_smiles));
  return it == state_->index.end() ? 0.0 : state_->library[it->second].weight;
}

std::size_t SurrogateGenerator::tune_rounds() const {
  std::shared_lock lock(state_->mutex);
  return state_->tune_rounds;
}

}  // namespace molopt
