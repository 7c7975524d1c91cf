//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cctype>
#include <map>
#include <optional>

#include "molopt/chem/element.hpp"
#include "molopt/chem/smiles.hpp"

namespace molopt::chem {

SmilesError::SmilesError(Kind kind, std::size_t offset, const std::string& message)
    : std::runtime_error(message + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) { }

namespace {

using Kind = SmilesError::Kind;

struct PendingBond {
  BondOrder order;
  std::size_t offset;
};

struct OpenRing {
  std::uint32_t atom;
  std::optional<BondOrder> order;
  std::size_t offset;
};

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) { }

  MolGraph run() {
    if (s_.empty()) throw SmilesError(Kind::kEmpty, 0, "empty SMILES");
    while (pos_ < s_.size()) step();
    if (pending_) throw SmilesError(Kind::kSyntax, pending_->offset, "bond without a following atom");
    if (!branches_.empty()) {
      throw SmilesError(Kind::kUnmatchedParenthesis, branches_.back().second, "unclosed branch");
    }
    if (!rings_.empty()) {
      const auto& [digit, open] = *rings_.begin();
      throw SmilesError(Kind::kUnclosedRing, open.offset, "unclosed ring bond " + std::to_string(digit));
    }
    if (atoms_.empty()) throw SmilesError(Kind::kSyntax, 0, "no atoms");
    for (std::uint32_t i = 0; i < atoms_.size(); ++i) {
      if (!organic_[i]) continue;
      int bond_sum = 0;
      for (const auto& b : bonds_) {
        if (b.begin == i || b.end == i) bond_sum += valence_contribution(b.order);
      }
      const auto h = organic_implicit_hydrogens(atoms_[i].atomic_number, atoms_[i].aromatic, bond_sum);
      if (!h) throw SmilesError(Kind::kValence, offsets_[i], "valence exceeded");
      atoms_[i].hydrogens = *h;
    }
    std::optional<MolGraph> graph;
    try {
      graph.emplace(atoms_, bonds_);
    } catch (const GraphError& e) {
      const std::size_t at = e.atom() ? offsets_[*e.atom()] : 0;
      const std::string what = e.what();
      if (what == "aromatic atom outside a ring") throw SmilesError(Kind::kAromaticity, at, what);
      throw SmilesError(Kind::kSyntax, at, what);
    }
    if (auto bad = graph->first_valence_violation()) {
      throw SmilesError(Kind::kValence, offsets_[*bad], "valence exceeded");
    }
    graph->set_stereo_dropped(stereo_);
    return std::move(*graph);
  }

 private:
  void step() {
    const char c = s_[pos_];
    switch (c) {
      case '(':
        if (!prev_ || pending_) throw SmilesError(Kind::kSyntax, pos_, "branch without a preceding atom");
        branches_.emplace_back(*prev_, pos_);
        ++pos_;
        return;
      case ')':
        if (branches_.empty()) throw SmilesError(Kind::kUnmatchedParenthesis, pos_, "unmatched ')'");
        if (pending_) throw SmilesError(Kind::kSyntax, pos_, "bond without a following atom");
        if (last_was_open_branch()) throw SmilesError(Kind::kSyntax, pos_, "empty branch");
        prev_ = branches_.back().first;
        branches_.pop_back();
        ++pos_;
        return;
      case '.':
        if (pending_ || !prev_) throw SmilesError(Kind::kSyntax, pos_, "misplaced '.'");
        prev_.reset();
        ++pos_;
        return;
      case '-': set_bond(BondOrder::kSingle); return;
      case '=': set_bond(BondOrder::kDouble); return;
      case '#': set_bond(BondOrder::kTriple); return;
      case ':': set_bond(BondOrder::kAromatic); return;
      case '/':
      case '\\':
        stereo_ = true;
        set_bond(BondOrder::kSingle);
        return;
      case '$': throw SmilesError(Kind::kUnsupported, pos_, "quadruple bonds are not supported");
      case '*': throw SmilesError(Kind::kUnsupported, pos_, "wildcard atoms are not supported");
      case '%': {
        if (pos_ + 2 >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) ||
            !std::isdigit(static_cast<unsigned char>(s_[pos_ + 2]))) {
          throw SmilesError(Kind::kSyntax, pos_, "'%' must be followed by two digits");
        }
        const int digit = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
        ring_closure(digit, pos_);
        pos_ += 3;
        return;
      }
      case '[': bracket_atom(); return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ring_closure(c - '0', pos_);
      ++pos_;
      return;
    }
    organic_atom();
  }

  bool last_was_open_branch() const { return !branches_.empty() && branches_.back().second + 1 == pos_; }

  void set_bond(BondOrder order) {
    if (pending_ || !prev_) throw SmilesError(Kind::kSyntax, pos_, "misplaced bond symbol");
    pending_ = PendingBond{order, pos_};
    ++pos_;
  }

  void ring_closure(int digit, std::size_t offset) {
    if (!prev_) throw SmilesError(Kind::kSyntax, offset, "ring closure without an atom");
    std::optional<BondOrder> order;
    if (pending_) order = pending_->order;
    pending_.reset();
    auto it = rings_.find(digit);
    if (it == rings_.end()) {
      rings_.emplace(digit, OpenRing{*prev_, order, offset});
      return;
    }
    const OpenRing open = it->second;
    rings_.erase(it);
    if (open.atom == *prev_) throw SmilesError(Kind::kSyntax, offset, "ring closure to the same atom");
    if (open.order && order && *open.order != *order) {
      throw SmilesError(Kind::kSyntax, offset, "conflicting ring closure bond orders");
    }
    const BondOrder resolved = order ? *order : open.order ? *open.order : implicit_order(open.atom, *prev_);
    add_bond(open.atom, *prev_, resolved, offset);
  }

  BondOrder implicit_order(std::uint32_t a, std::uint32_t b) const {
    return atoms_[a].aromatic && atoms_[b].aromatic ? BondOrder::kAromatic : BondOrder::kSingle;
  }

  void add_bond(std::uint32_t a, std::uint32_t b, BondOrder order, std::size_t offset) {
    for (const auto& existing : bonds_) {
      if ((existing.begin == a && existing.end == b) || (existing.begin == b && existing.end == a)) {
        throw SmilesError(Kind::kSyntax, offset, "duplicate bond");
      }
    }
    bonds_.push_back({a, b, order});
  }

  void push_atom(Atom atom, bool organic, std::size_t offset) {
    const auto index = static_cast<std::uint32_t>(atoms_.size());
    atoms_.push_back(atom);
    organic_.push_back(organic);
    offsets_.push_back(offset);
    if (prev_) {
      const BondOrder order = pending_ ? pending_->order : implicit_order(*prev_, index);
      add_bond(*prev_, index, order, offset);
    }
    pending_.reset();
    prev_ = index;
  }

  void organic_atom() {
    const std::size_t start = pos_;
    const char c = s_[pos_];
    Atom atom;
    std::string_view sym;
    if (c == 'C' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'l') {
      sym = "Cl";
    } else if (c == 'B' && pos_ + 1 < s_.size() && s_[pos_ + 1] == 'r') {
      sym = "Br";
    } else {
      switch (c) {
        case 'B': case 'C': case 'N': case 'O': case 'P': case 'S': case 'F': case 'I':
          sym = s_.substr(pos_, 1);
          break;
        case 'b': case 'c': case 'n': case 'o': case 'p': case 's':
          sym = s_.substr(pos_, 1);
          atom.aromatic = true;
          break;
        default:
          if (std::isalpha(static_cast<unsigned char>(c))) {
            throw SmilesError(Kind::kSyntax, pos_, std::string("element '") + c + "' must be bracketed");
          }
          throw SmilesError(Kind::kSyntax, pos_, std::string("unexpected character '") + c + "'");
      }
    }
    std::string upper(sym);
    upper[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(upper[0])));
    atom.atomic_number = *atomic_number(upper);
    pos_ += sym.size();
    push_atom(atom, true, start);
  }

  int read_number(int fallback) {
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) return fallback;
    int v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 100000) throw SmilesError(Kind::kSyntax, pos_, "number too large");
      ++pos_;
    }
    return v;
  }

  void bracket_atom() {
    const std::size_t start = pos_;
    ++pos_;
    auto at_end = [&] {
      if (pos_ >= s_.size()) throw SmilesError(Kind::kSyntax, start, "unterminated bracket atom");
    };
    Atom atom;
    at_end();
    atom.isotope = read_number(0);
    at_end();
    if (s_[pos_] == '*') throw SmilesError(Kind::kUnsupported, pos_, "wildcard atoms are not supported");
    if (!std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
      throw SmilesError(Kind::kSyntax, pos_, "expected element symbol");
    }
    const std::size_t sym_pos = pos_;
    if (std::islower(static_cast<unsigned char>(s_[pos_]))) {
      static constexpr std::string_view kAromatic[] = {"se", "as", "te", "b", "c", "n", "o", "p", "s"};
      bool found = false;
      for (auto a : kAromatic) {
        if (s_.substr(pos_, a.size()) == a) {
          std::string upper(a);
          upper[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(upper[0])));
          atom.atomic_number = *atomic_number(upper);
          atom.aromatic = true;
          pos_ += a.size();
          found = true;
          break;
        }
      }
      if (!found) throw SmilesError(Kind::kSyntax, sym_pos, "unknown aromatic element");
    } else {
      std::optional<int> z;
      if (pos_ + 1 < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
        z = atomic_number(s_.substr(pos_, 2));
        if (z) pos_ += 2;
      }
      if (!z) {
        z = atomic_number(s_.substr(pos_, 1));
        if (!z) throw SmilesError(Kind::kSyntax, sym_pos, "unknown element");
        ++pos_;
      }
      atom.atomic_number = *z;
    }
    at_end();
    if (s_[pos_] == '@') {
      stereo_ = true;
      while (pos_ < s_.size() && (s_[pos_] == '@' || std::isupper(static_cast<unsigned char>(s_[pos_])) ||
                                  std::isdigit(static_cast<unsigned char>(s_[pos_])))) {
        if (s_[pos_] == 'H' && pos_ > 0 && s_[pos_ - 1] == '@') break;
        ++pos_;
      }
      at_end();
    }
    if (s_[pos_] == 'H') {
      ++pos_;
      atom.hydrogens = read_number(1);
    }
    at_end();
    if (s_[pos_] == '+' || s_[pos_] == '-') {
      const char sign = s_[pos_];
      int magnitude = 1;
      ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        magnitude = read_number(1);
      } else {
        while (pos_ < s_.size() && s_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      if (magnitude > 8) throw SmilesError(Kind::kSyntax, pos_, "charge out of range");
      atom.charge = sign == '+' ? magnitude : -magnitude;
    }
    at_end();
    if (s_[pos_] == ':') {
      ++pos_;
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        throw SmilesError(Kind::kSyntax, pos_, "atom class must be numeric");
      }
      read_number(0);
    }
    at_end();
    if (s_[pos_] != ']') throw SmilesError(Kind::kSyntax, pos_, "expected ']'");
    ++pos_;
    push_atom(atom, false, start);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<Atom> atoms_;
  std::vector<bool> organic_;
  std::vector<std::size_t> offsets_;
  std::vector<Bond> bonds_;
  std::optional<std::uint32_t> prev_;
  std::optional<PendingBond> pending_;
  std::vector<std::pair<std::uint32_t, std::size_t>> branches_;
  std::map<int, OpenRing> rings_;
  bool stereo_ = false;
};

}  // namespace

MolGraph parse_smiles(std::string_view smiles) { return Parser(smiles).run(); }

}  // namespace molopt::chem
