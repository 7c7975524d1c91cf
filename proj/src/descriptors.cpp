//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/descriptors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "molopt/chem/element.hpp"
#include "molopt/chem/substructure.hpp"
#include "molopt/data.hpp"
#include "molopt/text.hpp"

namespace molopt {

using chem::BondOrder;
using chem::Matcher;
using chem::MolGraph;
using chem::Query;

namespace {

std::vector<Query> load_patterns(std::string_view file) {
  std::vector<Query> out;
  const auto table = TsvTable::parse(data::file(file), file);
  const auto col = table.column("smarts");
  for (const auto& row : table.rows()) out.push_back(Query::from_smarts(row[col]));
  return out;
}

struct CrippenRow {
  std::string type;
  Query query;
  double logp;
};

const std::vector<CrippenRow>& crippen_table() {
  static const std::vector<CrippenRow> rows = [] {
    std::vector<CrippenRow> out;
    const auto table = TsvTable::parse(data::file("crippen_atoms.tsv"), "crippen_atoms.tsv");
    const auto c_type = table.column("type");
    const auto c_smarts = table.column("smarts");
    const auto c_logp = table.column("logp");
    for (const auto& row : table.rows()) {
      out.push_back({row[c_type], Query::from_smarts(row[c_smarts]), *parse_double(row[c_logp])});
    }
    return out;
  }();
  return rows;
}

struct TpsaRow {
  int element, heavy, hydrogens, charge, single, dbl, triple, aromatic;
  std::optional<int> ring3;
  double contribution;
};

struct TpsaFallback {
  int element;
  double base, per_heavy, per_hydrogen;
};

struct TpsaTables {
  std::vector<TpsaRow> rows;
  std::vector<TpsaFallback> fallback;
};

const TpsaTables& tpsa_tables() {
  static const TpsaTables t = [] {
    TpsaTables out;
    const auto table = TsvTable::parse(data::file("ertl_tpsa.tsv"), "ertl_tpsa.tsv");
    auto num = [&](const std::vector<std::string>& row, const char* name) {
      return static_cast<int>(*parse_int(row[table.column(name)]));
    };
    for (const auto& row : table.rows()) {
      TpsaRow r{};
      r.element = *chem::atomic_number(row[table.column("element")]);
      r.heavy = num(row, "heavy");
      r.hydrogens = num(row, "hydrogens");
      r.charge = num(row, "charge");
      r.single = num(row, "single");
      r.dbl = num(row, "double");
      r.triple = num(row, "triple");
      r.aromatic = num(row, "aromatic");
      const auto& ring3 = row[table.column("ring3")];
      if (ring3 != "*") r.ring3 = static_cast<int>(*parse_int(ring3));
      r.contribution = *parse_double(row[table.column("contribution")]);
      out.rows.push_back(r);
    }
    const auto fb = TsvTable::parse(data::file("ertl_tpsa_fallback.tsv"), "ertl_tpsa_fallback.tsv");
    for (const auto& row : fb.rows()) {
      out.fallback.push_back({*chem::atomic_number(row[fb.column("element")]),
                              *parse_double(row[fb.column("base")]),
                              *parse_double(row[fb.column("per_heavy")]),
                              *parse_double(row[fb.column("per_hydrogen")])});
    }
    return out;
  }();
  return t;
}

struct QedTables {
  std::array<std::array<double, 7>, 8> ads{};
  std::array<double, 8> weights{};
  std::vector<Query> acceptors;
  std::vector<Query> alerts;
  std::vector<Query> rotatable;
};

const QedTables& qed_tables() {
  static const QedTables t = [] {
    QedTables out;
    const auto table = TsvTable::parse(data::file("qed_ads.tsv"), "qed_ads.tsv");
    static constexpr std::array<const char*, 8> kOrder = {"MW", "ALOGP", "HBA", "HBD", "PSA", "ROTB", "AROM", "ALERTS"};
    static constexpr std::array<const char*, 7> kParams = {"a", "b", "c", "d", "e", "f", "dmax"};
    for (std::size_t i = 0; i < kOrder.size(); ++i) {
      const std::vector<std::string>* found = nullptr;
      for (const auto& row : table.rows()) {
        if (row[table.column("property")] == kOrder[i]) found = &row;
      }
      if (!found) throw std::runtime_error(std::string("qed_ads.tsv: missing ") + kOrder[i]);
      for (std::size_t k = 0; k < kParams.size(); ++k) out.ads[i][k] = *parse_double((*found)[table.column(kParams[k])]);
      out.weights[i] = *parse_double((*found)[table.column("weight")]);
    }
    out.acceptors = load_patterns("qed_acceptors.txt");
    out.alerts = load_patterns("qed_alerts.txt");
    out.rotatable = load_patterns("rotatable_bonds.txt");
    return out;
  }();
  return t;
}

int hbd_count(const MolGraph& g) {
  int hbd = 0;
  for (std::uint32_t a = 0; a < g.num_atoms(); ++a) {
    const int z = g.atom(a).atomic_number;
    if ((z == 7 || z == 8) && g.total_hydrogens(a) > 0) ++hbd;
  }
  return hbd;
}

int hba_count(Matcher& m) {
  int hba = 0;
  for (const auto& q : qed_tables().acceptors) hba += static_cast<int>(m.count(q, {true, 0}));
  return hba;
}

int rotatable_count(Matcher& m) {
  int n = 0;
  for (const auto& q : qed_tables().rotatable) n += static_cast<int>(m.count(q, {true, 0}));
  return n;
}

int alert_count(Matcher& m) {
  int n = 0;
  for (const auto& q : qed_tables().alerts) n += m.any(q) ? 1 : 0;
  return n;
}

}  // namespace

double molecular_weight(const MolGraph& g) {
  const double h = chem::element(1).weight;
  double mw = 0.0;
  for (const auto& atom : g.atoms()) {
    double w = chem::element(atom.atomic_number).weight;
    if (atom.isotope != 0) {
      if (auto m = chem::isotope_mass(atom.atomic_number, atom.isotope)) {
        w = *m;
      } else {
        w = atom.isotope;  // untabulated isotope: mass number approximation
      }
    }
    mw += w + atom.hydrogens * h;
  }
  return mw;
}

double tpsa(const MolGraph& g) {
  const auto& t = tpsa_tables();
  double total = 0.0;
  for (std::uint32_t a = 0; a < g.num_atoms(); ++a) {
    const auto& atom = g.atom(a);
    if (atom.atomic_number != 7 && atom.atomic_number != 8) continue;
    int heavy = 0, single = 0, dbl = 0, triple = 0, aromatic = 0;
    for (const auto& nb : g.neighbors(a)) {
      if (g.atom(nb.atom).atomic_number == 1) continue;
      ++heavy;
      switch (g.bond(nb.bond).order) {
        case BondOrder::kSingle: ++single; break;
        case BondOrder::kDouble: ++dbl; break;
        case BondOrder::kTriple: ++triple; break;
        case BondOrder::kAromatic: ++aromatic; break;
      }
    }
    const int hydrogens = g.total_hydrogens(a);
    const int ring3 = g.in_sssr_ring_of_size(a, 3) ? 1 : 0;
    std::optional<double> value;
    for (const auto& r : t.rows) {
      if (r.element == atom.atomic_number && r.heavy == heavy && r.hydrogens == hydrogens && r.charge == atom.charge &&
          r.single == single && r.dbl == dbl && r.triple == triple && r.aromatic == aromatic &&
          (!r.ring3 || *r.ring3 == ring3)) {
        value = r.contribution;
        break;
      }
    }
    if (!value) {
      for (const auto& f : t.fallback) {
        if (f.element == atom.atomic_number) value = std::max(0.0, f.base + f.per_heavy * heavy + f.per_hydrogen * hydrogens);
      }
    }
    total += value.value_or(0.0);
  }
  return total;
}

std::vector<std::string> crippen_types(const MolGraph& g) {
  const MolGraph h = g.with_explicit_hydrogens();
  Matcher m(h);
  std::vector<std::string> out;
  for (std::uint32_t a = 0; a < g.num_atoms(); ++a) {
    std::string type;
    for (const auto& row : crippen_table()) {
      if (m.matches_at(row.query, a)) {
        type = row.type;
        break;
      }
    }
    out.push_back(type);
  }
  return out;
}

double clogp(const MolGraph& g) {
  const MolGraph h = g.with_explicit_hydrogens();
  Matcher m(h);
  double total = 0.0;
  for (std::uint32_t a = 0; a < h.num_atoms(); ++a) {
    for (const auto& row : crippen_table()) {
      if (m.matches_at(row.query, a)) {
        total += row.logp;
        break;
      }
    }
  }
  return total;
}

HydrogenBonding hbd_hba(const MolGraph& g) {
  Matcher m(g);
  return {hbd_count(g), hba_count(m)};
}

int rotatable_bonds(const MolGraph& g) {
  Matcher m(g);
  return rotatable_count(m);
}

int ring_count(const MolGraph& g) { return static_cast<int>(g.rings().size()); }

int aromatic_ring_count(const MolGraph& g) {
  int n = 0;
  for (const auto& ring : g.rings()) {
    bool all = true;
    for (auto a : ring.atoms) all = all && g.atom(a).aromatic;
    if (all) ++n;
  }
  return n;
}

int structural_alerts(const MolGraph& g) {
  Matcher m(g);
  return alert_count(m);
}

QedProperties qed_properties(const MolGraph& g) {
  Matcher m(g);
  QedProperties p;
  p.mw = molecular_weight(g);
  p.alogp = clogp(g);
  p.hba = hba_count(m);
  p.hbd = hbd_count(g);
  p.psa = tpsa(g);
  p.rotb = rotatable_count(m);
  p.arom = aromatic_ring_count(g);
  p.alerts = alert_count(m);
  return p;
}

double qed_desirability(std::size_t i, double x) {
  const auto& p = qed_tables().ads.at(i);
  const double a = p[0], b = p[1], c = p[2], d = p[3], e = p[4], f = p[5], dmax = p[6];
  const double rise = 1.0 / (1.0 + std::exp(-(x - c + d / 2.0) / e));
  const double fall = 1.0 - 1.0 / (1.0 + std::exp(-(x - c - d / 2.0) / f));
  return (a + b * rise * fall) / dmax;
}

double qed_from_properties(const QedProperties& p) {
  const auto& t = qed_tables();
  const std::array<double, 8> x = {p.mw,
                                   p.alogp,
                                   static_cast<double>(p.hba),
                                   static_cast<double>(p.hbd),
                                   p.psa,
                                   static_cast<double>(p.rotb),
                                   static_cast<double>(p.arom),
                                   static_cast<double>(p.alerts)};
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = std::max(qed_desirability(i, x[i]), 1e-12);
    num += t.weights[i] * std::log(d);
    den += t.weights[i];
  }
  return std::clamp(std::exp(num / den), 0.0, 1.0);
}

double qed(const MolGraph& g) { return qed_from_properties(qed_properties(g)); }

DescriptorVector compute_descriptors(const MolGraph& g) {
  const auto p = qed_properties(g);
  DescriptorVector d;
  d.mw = p.mw;
  d.tpsa = p.psa;
  d.clogp = p.alogp;
  d.hbd = p.hbd;
  d.hba = p.hba;
  d.rings = ring_count(g);
  d.aromatic_rings = p.arom;
  d.rotatable_bonds = p.rotb;
  d.qed = qed_from_properties(p);
  return d;
}

}  // namespace molopt
