//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/chem/element.hpp"

#include <map>
#include <stdexcept>

#include "molopt/data.hpp"
#include "molopt/text.hpp"

namespace molopt::chem {
namespace {

struct Tables {
  std::vector<Element> elements;  // index = atomic number
  std::map<std::string, int, std::less<>> by_symbol;
  std::map<std::pair<int, int>, double> isotopes;
};

const Tables& tables() {
  static const Tables t = [] {
    Tables out;
    const auto table = TsvTable::parse(data::file("elements.tsv"), "elements.tsv");
    const auto c_z = table.column("atomic_number");
    const auto c_sym = table.column("symbol");
    const auto c_w = table.column("weight");
    const auto c_v = table.column("default_valences");
    for (const auto& row : table.rows()) {
      Element e;
      e.atomic_number = static_cast<int>(*parse_int(row[c_z]));
      e.symbol = row[c_sym];
      e.weight = *parse_double(row[c_w]);
      if (row[c_v] != "-") {
        for (auto v : split(row[c_v], ',')) e.default_valences.push_back(static_cast<int>(*parse_int(v)));
      }
      if (static_cast<int>(out.elements.size()) <= e.atomic_number) out.elements.resize(e.atomic_number + 1);
      out.by_symbol[e.symbol] = e.atomic_number;
      out.elements[e.atomic_number] = std::move(e);
    }
    const auto iso = TsvTable::parse(data::file("isotopes.tsv"), "isotopes.tsv");
    for (const auto& row : iso.rows()) {
      const int z = out.by_symbol.at(row[iso.column("symbol")]);
      out.isotopes[{z, static_cast<int>(*parse_int(row[iso.column("mass_number")]))}] =
          *parse_double(row[iso.column("mass")]);
    }
    return out;
  }();
  return t;
}

}  // namespace

const Element& element(int atomic_number) {
  const auto& t = tables();
  if (atomic_number < 1 || atomic_number >= static_cast<int>(t.elements.size())) {
    throw std::out_of_range("atomic number " + std::to_string(atomic_number) + " not tabulated");
  }
  return t.elements[atomic_number];
}

std::optional<int> atomic_number(std::string_view symbol) {
  const auto& t = tables();
  auto it = t.by_symbol.find(symbol);
  if (it == t.by_symbol.end()) return std::nullopt;
  return it->second;
}

int max_atomic_number() { return static_cast<int>(tables().elements.size()) - 1; }

std::optional<double> isotope_mass(int atomic_number, int mass_number) {
  const auto& t = tables();
  auto it = t.isotopes.find({atomic_number, mass_number});
  if (it == t.isotopes.end()) return std::nullopt;
  return it->second;
}

std::span<const int> allowed_valences(int atomic_number, int charge) {
  const int shifted = atomic_number - charge;
  if (shifted < 1 || shifted > max_atomic_number()) return {};
  if (charge != 0) {
    // Only shift within the same period; crossing a noble gas has no
    // meaningful isoelectronic partner in the table.
    auto period = [](int z) { return z <= 2 ? 1 : z <= 10 ? 2 : z <= 18 ? 3 : z <= 36 ? 4 : z <= 54 ? 5 : 6; };
    if (period(shifted) != period(atomic_number)) return {};
    if (element(atomic_number).default_valences.empty()) return {};
  }
  return element(shifted).default_valences;
}

bool is_organic_subset(int z) {
  switch (z) {
    case 5: case 6: case 7: case 8: case 9: case 15: case 16: case 17: case 35: case 53:
      return true;
    default:
      return false;
  }
}

std::optional<int> organic_implicit_hydrogens(int z, bool aromatic, int bond_sum) {
  const auto& valences = element(z).default_valences;
  for (int v : valences) {
    if (v >= bond_sum) {
      const int h = v - bond_sum - (aromatic ? 1 : 0);
      return h < 0 ? 0 : h;
    }
  }
  return std::nullopt;
}

}  // namespace molopt::chem
