//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <numeric>
#include <unistd.h>

#include "molopt/io.hpp"
#include "molopt/text.hpp"

namespace molopt::test {

const std::vector<std::string>& golden_smiles() {
  static const std::vector<std::string> all = [] {
    const auto path = std::filesystem::path(MOLOPT_TEST_DATA_DIR) / "descriptor_goldens.tsv";
    const auto table = TsvTable::parse(io::read_file(path), path.string());
    const auto col = table.column("smiles");
    std::vector<std::string> out;
    for (const auto& row : table.rows()) out.push_back(row[col]);
    return out;
  }();
  return all;
}

std::vector<std::uint32_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.index(i)]);
  return p;
}

MoleculeRecord random_record(Rng& rng) {
  static const std::vector<std::string> words = {"aspirin", "acetylsalicylic acid", "Compound X-12", "zeta (beta) form",
                                                 "Solubility", "Melting Point", "LogP"};
  const auto& mols = golden_smiles();
  MoleculeRecord r;
  r.smiles = mols[rng.index(mols.size())];
  if (rng.bernoulli(0.7)) r.cid = static_cast<std::int64_t>(rng.index(100000000));
  auto real = [&](std::optional<double>& f, double lo, double hi) {
    if (rng.bernoulli(0.8)) f = rng.uniform(lo, hi);
  };
  auto integer = [&](std::optional<int>& f, int hi) {
    if (rng.bernoulli(0.8)) f = static_cast<int>(rng.index(static_cast<std::size_t>(hi) + 1));
  };
  real(r.computed.mw, 16.0, 900.0);
  real(r.computed.tpsa, 0.0, 250.0);
  real(r.computed.clogp, -6.0, 9.0);
  real(r.computed.sas, 1.0, 10.0);
  real(r.computed.qed, 0.0, 1.0);
  integer(r.computed.hbd, 8);
  integer(r.computed.hba, 15);
  integer(r.computed.rings, 7);
  integer(r.computed.aromatic_rings, 5);
  integer(r.computed.rotatable_bonds, 20);
  for (std::size_t k = rng.index(4); k > 0; --k) r.similars.push_back({mols[rng.index(mols.size())], rng.uniform(0.8, 1.0)});
  for (std::size_t k = rng.index(3); k > 0; --k) r.synonyms.push_back(words[rng.index(words.size())]);
  for (std::size_t k = rng.index(3); k > 0; --k) {
    r.experimental.push_back({words[4 + rng.index(3)], std::to_string(rng.index(500)) + ".5 deg C (est)"});
  }
  return r;
}

MoleculeRecord normalized(MoleculeRecord r) {
  auto by_text = [](const auto& a, const auto& b) { return std::tie(a.smiles, a.similarity) < std::tie(b.smiles, b.similarity); };
  std::sort(r.similars.begin(), r.similars.end(), by_text);
  std::sort(r.synonyms.begin(), r.synonyms.end());
  std::sort(r.experimental.begin(), r.experimental.end(),
            [](const auto& a, const auto& b) { return std::tie(a.name, a.value) < std::tie(b.name, b.value); });
  return r;
}

RunTrace random_trace(Rng& rng, std::size_t budget) {
  RunTrace t;
  t.budget = budget;
  const auto length = rng.bernoulli(0.3) ? rng.index(budget + 1) : budget;
  const auto shape = rng.index(4);
  const bool repeats = rng.bernoulli(0.2);
  const double level = static_cast<double>(rng.index(101)) / 100.0;
  for (std::size_t i = 1; i <= length; ++i) {
    std::string smiles = "C" + std::to_string(i);
    double score = 0.0;
    if (repeats && i > 1 && rng.bernoulli(0.3)) {
      const auto& prev = t.entries[rng.index(t.entries.size())];
      smiles = prev.smiles;
      score = prev.score;
    } else if (shape == 0) {
      score = level;
    } else if (shape == 1) {
      score = static_cast<double>(i) / static_cast<double>(budget);
    } else if (shape == 2) {
      score = static_cast<double>(rng.index(1001)) / 1000.0;
    } else {
      score = static_cast<double>(rng.index(5)) / 4.0;
    }
    t.entries.push_back({i, smiles, score});
  }
  return t;
}

std::vector<double> brute_top10_series(const RunTrace& t, std::size_t budget, std::size_t step, bool zero_pad) {
  std::vector<std::size_t> cps;
  for (std::size_t c = step; c <= budget; c += step) cps.push_back(c);
  if (budget % step) cps.push_back(budget);
  const std::size_t last = t.entries.empty() ? 0 : t.entries.back().call_index;
  std::vector<double> out;
  for (const auto c : cps) {
    if (zero_pad && c > last) {
      out.push_back(0.0);
      continue;
    }
    std::map<std::string, double> seen;
    for (const auto& e : t.entries) {
      if (e.call_index <= c) seen.emplace(e.smiles, e.score);
    }
    std::vector<double> scores;
    for (const auto& [s, v] : seen) scores.push_back(v);
    std::sort(scores.rbegin(), scores.rend());
    const auto k = std::min<std::size_t>(10, scores.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += scores[i];
    out.push_back(k ? sum / static_cast<double>(k) : 0.0);
  }
  return out;
}

double brute_auc(const RunTrace& t, std::size_t budget, std::size_t step, bool zero_pad) {
  const auto s = brute_top10_series(t, budget, step, zero_pad);
  double sum = 0.0;
  for (const double v : s) sum += v;
  return sum / static_cast<double>(s.size());
}

std::size_t brute_yield(const RunTrace& t, double tau) {
  std::set<std::string> hits;
  for (const auto& e : t.entries) {
    if (e.score > tau) hits.insert(e.smiles);
  }
  return hits.size();
}

std::optional<std::size_t> brute_burden(const RunTrace& t, double tau, std::size_t n) {
  for (const auto& e : t.entries) {
    RunTrace prefix;
    for (const auto& f : t.entries) {
      if (f.call_index <= e.call_index) prefix.entries.push_back(f);
    }
    if (brute_yield(prefix, tau) >= n) return e.call_index;
  }
  return std::nullopt;
}

const std::vector<MoleculeRecord>& golden_records() {
  static const std::vector<MoleculeRecord> all = [] {
    std::vector<MoleculeRecord> out;
    for (const auto& s : golden_smiles()) out.push_back(make_record(s));
    return out;
  }();
  return all;
}

std::array<ChoiceScore, kMcqChoices> CalibratedScorer::score_choices(const McqItem& item) {
  const double c = rng_.uniform(0.2, 1.0);
  std::size_t chosen = item.correct_index;
  if (!rng_.bernoulli(c)) chosen = (item.correct_index + 1 + rng_.index(kMcqChoices - 1)) % kMcqChoices;
  std::array<ChoiceScore, kMcqChoices> out;
  for (std::size_t i = 0; i < kMcqChoices; ++i) {
    out[i] = {std::log(i == chosen ? c : (1.0 - c) / 4.0), 1};
  }
  return out;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("molopt_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace molopt::test
