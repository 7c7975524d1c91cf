//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/chem/substructure.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "molopt/chem/element.hpp"

namespace molopt::chem {

namespace {

enum class AtomOp : std::uint8_t {
  kTrue,
  kAtomicNumber,
  kAromatic,
  kAliphatic,
  kHydrogens,
  kDegree,
  kConnectivity,
  kValence,
  kRingMembership,  // value < 0: any ring
  kRingSize,        // value < 0: any ring
  kRingBonds,       // value < 0: any ring bond
  kCharge,
  kIsotope,
  kRecursive,
  kNot,
  kAnd,
  kOr,
};

enum class BondOp : std::uint8_t {
  kDefault,  // single or aromatic
  kAny,
  kSingle,
  kDouble,
  kTriple,
  kAromatic,
  kRing,
  kNot,
  kAnd,
  kOr,
};

struct AtomNode {
  AtomOp op;
  int value = 0;
  int lhs = -1;
  int rhs = -1;
};

struct BondNode {
  BondOp op;
  int lhs = -1;
  int rhs = -1;
};

struct QueryBond {
  std::uint32_t a;
  std::uint32_t b;
  int expr;
};

}  // namespace

struct Query::Impl {
  std::string source;
  std::vector<AtomNode> atom_nodes;
  std::vector<BondNode> bond_nodes;
  std::vector<std::shared_ptr<const Impl>> subs;
  std::vector<int> atom_expr;
  std::vector<QueryBond> bonds;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> adjacency;  // (atom, bond)
  // Matching order: each entry after a component root is reached through
  // anchor_bond from an earlier atom.
  std::vector<std::uint32_t> order;
  std::vector<int> anchor_bond;

  int add_atom_node(AtomNode n) {
    atom_nodes.push_back(n);
    return static_cast<int>(atom_nodes.size() - 1);
  }
  int add_bond_node(BondNode n) {
    bond_nodes.push_back(n);
    return static_cast<int>(bond_nodes.size() - 1);
  }

  void finish() {
    const auto n = atom_expr.size();
    adjacency.assign(n, {});
    for (std::uint32_t i = 0; i < bonds.size(); ++i) {
      adjacency[bonds[i].a].emplace_back(bonds[i].b, i);
      adjacency[bonds[i].b].emplace_back(bonds[i].a, i);
    }
    std::vector<bool> seen(n, false);
    for (std::uint32_t root = 0; root < n; ++root) {
      if (seen[root]) continue;
      seen[root] = true;
      order.push_back(root);
      anchor_bond.push_back(-1);
      for (std::size_t k = order.size() - 1; k < order.size(); ++k) {
        for (auto [nb, bond] : adjacency[order[k]]) {
          if (seen[nb]) continue;
          seen[nb] = true;
          order.push_back(nb);
          anchor_bond.push_back(static_cast<int>(bond));
        }
      }
    }
  }
};

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class SmartsParser {
 public:
  SmartsParser(std::string_view s, std::size_t base) : s_(s), base_(base) { }

  std::shared_ptr<Query::Impl> run() {
    q_ = std::make_shared<Query::Impl>();
    q_->source = std::string(s_);
    if (s_.empty()) fail("empty pattern");
    std::optional<std::uint32_t> prev;
    std::optional<int> bond;
    std::vector<std::uint32_t> branches;
    std::map<int, std::pair<std::uint32_t, std::optional<int>>> rings;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '(') {
        if (!prev) fail("branch without atom");
        branches.push_back(*prev);
        ++pos_;
      } else if (c == ')') {
        if (branches.empty()) fail("unmatched ')'");
        prev = branches.back();
        branches.pop_back();
        ++pos_;
      } else if (c == '.') {
        prev.reset();
        ++pos_;
      } else if (is_bond_start(c)) {
        if (!prev || bond) fail("misplaced bond");
        bond = parse_bond_or();
      } else if (is_digit(c) || c == '%') {
        if (!prev) fail("ring closure without atom");
        int digit;
        if (c == '%') {
          if (pos_ + 2 >= s_.size() || !is_digit(s_[pos_ + 1]) || !is_digit(s_[pos_ + 2])) fail("bad %nn");
          digit = (s_[pos_ + 1] - '0') * 10 + (s_[pos_ + 2] - '0');
          pos_ += 3;
        } else {
          digit = c - '0';
          ++pos_;
        }
        auto it = rings.find(digit);
        if (it == rings.end()) {
          rings[digit] = {*prev, bond};
        } else {
          auto expr = bond ? bond : it->second.second;
          if (!expr) expr = q_->add_bond_node({BondOp::kDefault});
          q_->bonds.push_back({it->second.first, *prev, *expr});
          rings.erase(it);
        }
        bond.reset();
      } else {
        const int expr = c == '[' ? parse_bracket() : parse_bare_atom();
        q_->atom_expr.push_back(expr);
        const auto index = static_cast<std::uint32_t>(q_->atom_expr.size() - 1);
        if (prev) {
          if (!bond) bond = q_->add_bond_node({BondOp::kDefault});
          q_->bonds.push_back({*prev, index, *bond});
        } else if (bond) {
          fail("bond without preceding atom");
        }
        bond.reset();
        prev = index;
      }
    }
    if (!branches.empty()) fail("unclosed branch");
    if (!rings.empty()) fail("unclosed ring");
    if (bond) fail("dangling bond");
    q_->finish();
    return q_;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SmartsError(base_ + pos_, what); }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  static bool is_bond_start(char c) {
    return c == '-' || c == '=' || c == '#' || c == ':' || c == '~' || c == '@' || c == '!' || c == '/' ||
           c == '\\';
  }

  int parse_bond_or() {
    // Low-precedence ';' binds loosest, then ',', then '&'/implicit.
    int lhs = parse_bond_comma();
    while (peek() == ';') {
      ++pos_;
      lhs = q_->add_bond_node({BondOp::kAnd, lhs, parse_bond_comma()});
    }
    return lhs;
  }
  int parse_bond_comma() {
    int lhs = parse_bond_and();
    while (peek() == ',') {
      ++pos_;
      lhs = q_->add_bond_node({BondOp::kOr, lhs, parse_bond_and()});
    }
    return lhs;
  }
  int parse_bond_and() {
    int lhs = parse_bond_unary();
    while (true) {
      if (peek() == '&') {
        ++pos_;
      } else if (!is_bond_start(peek())) {
        break;
      }
      lhs = q_->add_bond_node({BondOp::kAnd, lhs, parse_bond_unary()});
    }
    return lhs;
  }
  int parse_bond_unary() {
    const char c = peek();
    ++pos_;
    switch (c) {
      case '!': return q_->add_bond_node({BondOp::kNot, parse_bond_unary()});
      case '-': case '/': case '\\': return q_->add_bond_node({BondOp::kSingle});
      case '=': return q_->add_bond_node({BondOp::kDouble});
      case '#': return q_->add_bond_node({BondOp::kTriple});
      case ':': return q_->add_bond_node({BondOp::kAromatic});
      case '~': return q_->add_bond_node({BondOp::kAny});
      case '@': return q_->add_bond_node({BondOp::kRing});
      default: --pos_; fail("bad bond primitive");
    }
  }

  int element_node(int z, std::optional<bool> aromatic) {
    const int zn = q_->add_atom_node({AtomOp::kAtomicNumber, z});
    if (!aromatic) return zn;
    const int an = q_->add_atom_node({*aromatic ? AtomOp::kAromatic : AtomOp::kAliphatic});
    return q_->add_atom_node({AtomOp::kAnd, 0, zn, an});
  }

  int parse_bare_atom() {
    const char c = peek();
    if (c == '*') {
      ++pos_;
      return q_->add_atom_node({AtomOp::kTrue});
    }
    if (c == 'a' || c == 'A') {
      ++pos_;
      return q_->add_atom_node({c == 'a' ? AtomOp::kAromatic : AtomOp::kAliphatic});
    }
    if (s_.substr(pos_, 2) == "Cl" || s_.substr(pos_, 2) == "Br") {
      const int z = *atomic_number(s_.substr(pos_, 2));
      pos_ += 2;
      return element_node(z, false);
    }
    static constexpr std::string_view kOrganic = "BCNOPSFI";
    static constexpr std::string_view kAromatic = "bcnops";
    if (kOrganic.find(c) != std::string_view::npos) {
      ++pos_;
      return element_node(*atomic_number(std::string(1, c)), false);
    }
    if (kAromatic.find(c) != std::string_view::npos) {
      ++pos_;
      return element_node(*atomic_number(std::string(1, static_cast<char>(std::toupper(c)))), true);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_bracket() {
    ++pos_;  // '['
    bracket_start_ = pos_;
    const int expr = parse_low();
    if (peek() != ']') fail("expected ']'");
    ++pos_;
    return expr;
  }

  int parse_low() {
    int lhs = parse_or();
    while (peek() == ';') {
      ++pos_;
      lhs = q_->add_atom_node({AtomOp::kAnd, 0, lhs, parse_or()});
    }
    return lhs;
  }
  int parse_or() {
    int lhs = parse_and();
    while (peek() == ',') {
      ++pos_;
      lhs = q_->add_atom_node({AtomOp::kOr, 0, lhs, parse_and()});
    }
    return lhs;
  }
  int parse_and() {
    int lhs = parse_unary();
    while (true) {
      const char c = peek();
      if (c == '&') {
        ++pos_;
      } else if (c == ']' || c == ',' || c == ';' || c == '\0' || c == ')') {
        break;
      }
      lhs = q_->add_atom_node({AtomOp::kAnd, 0, lhs, parse_unary()});
    }
    return lhs;
  }
  int parse_unary() {
    if (peek() == '!') {
      ++pos_;
      return q_->add_atom_node({AtomOp::kNot, 0, parse_unary()});
    }
    return parse_primitive();
  }

  int read_number(int fallback) {
    if (!is_digit(peek())) return fallback;
    int v = 0;
    while (is_digit(peek())) v = v * 10 + (s_[pos_++] - '0');
    return v;
  }

  int parse_primitive() {
    const char c = peek();
    const std::size_t start = pos_;
    if (c == '\0') fail("unterminated bracket");
    if (is_digit(c)) return q_->add_atom_node({AtomOp::kIsotope, read_number(0)});
    ++pos_;
    switch (c) {
      case '*': return q_->add_atom_node({AtomOp::kTrue});
      case 'a':
        if (peek() == 's') {
          ++pos_;
          return element_node(33, true);
        }
        return q_->add_atom_node({AtomOp::kAromatic});
      case 'A':
        if (peek() != '\0' && std::islower(static_cast<unsigned char>(peek()))) break;
        return q_->add_atom_node({AtomOp::kAliphatic});
      case '#': {
        if (!is_digit(peek())) fail("'#' needs an atomic number");
        return q_->add_atom_node({AtomOp::kAtomicNumber, read_number(0)});
      }
      case 'D': return q_->add_atom_node({AtomOp::kDegree, read_number(1)});
      case 'X': return q_->add_atom_node({AtomOp::kConnectivity, read_number(1)});
      case 'v': return q_->add_atom_node({AtomOp::kValence, read_number(1)});
      case 'x': return q_->add_atom_node({AtomOp::kRingBonds, read_number(-1)});
      case 'r': return q_->add_atom_node({AtomOp::kRingSize, read_number(-1)});
      case 'R':
        if (peek() != '\0' && std::islower(static_cast<unsigned char>(peek()))) break;
        return q_->add_atom_node({AtomOp::kRingMembership, read_number(-1)});
      case 'H': {
        if (std::islower(static_cast<unsigned char>(peek()))) break;
        const char next = peek();
        if (start == bracket_start_ && (next == ']' || next == '+' || next == '-')) return element_node(1, std::nullopt);
        return q_->add_atom_node({AtomOp::kHydrogens, read_number(1)});
      }
      case '+':
      case '-': {
        int magnitude = 1;
        if (is_digit(peek())) {
          magnitude = read_number(1);
        } else {
          while (peek() == c) {
            ++magnitude;
            ++pos_;
          }
        }
        return q_->add_atom_node({AtomOp::kCharge, c == '+' ? magnitude : -magnitude});
      }
      case '@':
        while (peek() == '@') ++pos_;
        return q_->add_atom_node({AtomOp::kTrue});
      case '$': {
        if (peek() != '(') fail("expected '(' after '$'");
        ++pos_;
        const std::size_t open = pos_;
        int depth = 1;
        while (pos_ < s_.size() && depth > 0) {
          if (s_[pos_] == '(') ++depth;
          if (s_[pos_] == ')') --depth;
          ++pos_;
        }
        if (depth != 0) fail("unclosed recursive pattern");
        SmartsParser sub(s_.substr(open, pos_ - 1 - open), base_ + open);
        q_->subs.push_back(sub.run());
        return q_->add_atom_node({AtomOp::kRecursive, static_cast<int>(q_->subs.size() - 1)});
      }
      default: break;
    }
    pos_ = start;
    // Element symbols: lowercase ones are aromatic.
    if (std::islower(static_cast<unsigned char>(c))) {
      for (std::string_view sym : {"se", "te", "c", "n", "o", "s", "p", "b"}) {
        if (s_.substr(pos_, sym.size()) == sym) {
          pos_ += sym.size();
          std::string upper(sym);
          upper[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(upper[0])));
          return element_node(*atomic_number(upper), true);
        }
      }
      fail("unknown primitive");
    }
    if (pos_ + 1 < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_ + 1]))) {
      if (auto z = atomic_number(s_.substr(pos_, 2))) {
        pos_ += 2;
        return element_node(*z, false);
      }
    }
    if (auto z = atomic_number(s_.substr(pos_, 1))) {
      ++pos_;
      return element_node(*z, false);
    }
    fail("unknown primitive");
  }

  std::string_view s_;
  std::size_t base_;
  std::size_t pos_ = 0;
  std::size_t bracket_start_ = 0;
  std::shared_ptr<Query::Impl> q_;
};

}  // namespace

Query Query::from_smarts(std::string_view smarts) {
  Query q;
  q.impl_ = SmartsParser(smarts, 0).run();
  return q;
}

Query Query::from_molecule(const MolGraph& pattern) {
  auto impl = std::make_shared<Impl>();
  for (const auto& atom : pattern.atoms()) {
    const int zn = impl->add_atom_node({AtomOp::kAtomicNumber, atom.atomic_number});
    const int an = impl->add_atom_node({atom.aromatic ? AtomOp::kAromatic : AtomOp::kAliphatic});
    impl->atom_expr.push_back(impl->add_atom_node({AtomOp::kAnd, 0, zn, an}));
  }
  for (const auto& b : pattern.bonds()) {
    BondOp op = BondOp::kSingle;
    switch (b.order) {
      case BondOrder::kSingle: op = BondOp::kSingle; break;
      case BondOrder::kDouble: op = BondOp::kDouble; break;
      case BondOrder::kTriple: op = BondOp::kTriple; break;
      case BondOrder::kAromatic: op = BondOp::kAromatic; break;
    }
    impl->bonds.push_back({b.begin, b.end, impl->add_bond_node({op})});
  }
  impl->finish();
  Query q;
  q.impl_ = std::move(impl);
  return q;
}

std::size_t Query::num_atoms() const noexcept { return impl_->atom_expr.size(); }
const std::string& Query::source() const noexcept { return impl_->source; }

struct Matcher::State {
  struct Props {
    int z, aromatic, hydrogens, degree, connectivity, valence, ring_membership, ring_bonds, charge, isotope;
    bool in_ring;
  };
  std::vector<Props> props;
  std::unordered_map<const Query::Impl*, std::vector<std::int8_t>> recursive;  // -1 unknown
};

Matcher::Matcher(const MolGraph& target) : target_(target), state_(std::make_unique<State>()) {
  const auto n = static_cast<std::uint32_t>(target.num_atoms());
  state_->props.resize(n);
  for (std::uint32_t a = 0; a < n; ++a) {
    const Atom& atom = target.atom(a);
    auto& p = state_->props[a];
    p.z = atom.atomic_number;
    p.aromatic = atom.aromatic ? 1 : 0;
    p.hydrogens = target.total_hydrogens(a);
    p.degree = static_cast<int>(target.degree(a));
    p.connectivity = p.degree + atom.hydrogens;
    int valence = target.bond_valence(a) + atom.hydrogens;
    if (atom.aromatic) {
      // Aromatic bonds count 1 above; lift to the nearest allowed valence.
      for (int v : allowed_valences(atom.atomic_number, atom.charge)) {
        if (v >= valence) {
          valence = v;
          break;
        }
      }
    }
    p.valence = valence;
    p.ring_membership = target.ring_membership(a);
    p.ring_bonds = target.ring_bond_count(a);
    p.charge = atom.charge;
    p.isotope = atom.isotope;
    p.in_ring = target.is_ring_atom(a);
  }
}

Matcher::~Matcher() = default;

namespace {

class Search {
 public:
  Search(const MolGraph& g, Matcher::State& st, const Query::Impl& q) : g_(g), st_(st), q_(q) { }

  bool atom_ok(int node, std::uint32_t a) {
    const auto& n = q_.atom_nodes[node];
    const auto& p = st_.props[a];
    switch (n.op) {
      case AtomOp::kTrue: return true;
      case AtomOp::kAtomicNumber: return p.z == n.value;
      case AtomOp::kAromatic: return p.aromatic == 1;
      case AtomOp::kAliphatic: return p.aromatic == 0;
      case AtomOp::kHydrogens: return p.hydrogens == n.value;
      case AtomOp::kDegree: return p.degree == n.value;
      case AtomOp::kConnectivity: return p.connectivity == n.value;
      case AtomOp::kValence: return p.valence == n.value;
      case AtomOp::kRingMembership:
        return n.value < 0 ? p.in_ring : p.ring_membership == n.value;
      case AtomOp::kRingSize:
        if (n.value < 0) return p.in_ring;
        if (n.value == 0) return !p.in_ring;
        return g_.in_sssr_ring_of_size(a, n.value);
      case AtomOp::kRingBonds: return n.value < 0 ? p.ring_bonds > 0 : p.ring_bonds == n.value;
      case AtomOp::kCharge: return p.charge == n.value;
      case AtomOp::kIsotope: return p.isotope == n.value;
      case AtomOp::kRecursive: return recursive(*q_.subs[n.value], a);
      case AtomOp::kNot: return !atom_ok(n.lhs, a);
      case AtomOp::kAnd: return atom_ok(n.lhs, a) && atom_ok(n.rhs, a);
      case AtomOp::kOr: return atom_ok(n.lhs, a) || atom_ok(n.rhs, a);
    }
    return false;
  }

  bool bond_ok(int node, std::uint32_t b) {
    const auto& n = q_.bond_nodes[node];
    const auto order = g_.bond(b).order;
    switch (n.op) {
      case BondOp::kDefault: return order == BondOrder::kSingle || order == BondOrder::kAromatic;
      case BondOp::kAny: return true;
      case BondOp::kSingle: return order == BondOrder::kSingle;
      case BondOp::kDouble: return order == BondOrder::kDouble;
      case BondOp::kTriple: return order == BondOrder::kTriple;
      case BondOp::kAromatic: return order == BondOrder::kAromatic;
      case BondOp::kRing: return g_.is_ring_bond(b);
      case BondOp::kNot: return !bond_ok(n.lhs, b);
      case BondOp::kAnd: return bond_ok(n.lhs, b) && bond_ok(n.rhs, b);
      case BondOp::kOr: return bond_ok(n.lhs, b) || bond_ok(n.rhs, b);
    }
    return false;
  }

  bool recursive(const Query::Impl& sub, std::uint32_t a) {
    auto& cache = st_.recursive[&sub];
    if (cache.empty()) cache.assign(g_.num_atoms(), -1);
    if (cache[a] < 0) {
      Search s(g_, st_, sub);
      s.limit_ = 1;
      s.fixed_root_ = a;
      s.run();
      cache[a] = s.found_ > 0 ? 1 : 0;
    }
    return cache[a] == 1;
  }

  void run() {
    const auto n = q_.atom_expr.size();
    map_.assign(n, UINT32_MAX);
    used_.assign(g_.num_atoms(), false);
    if (n == 0) return;
    extend(0);
  }

  std::size_t limit_ = 0;
  std::optional<std::uint32_t> fixed_root_;
  bool collect_ = false;
  bool unique_ = false;
  std::size_t found_ = 0;
  std::vector<std::vector<std::uint32_t>> matches_;
  std::set<std::vector<std::uint32_t>> seen_sets_;

 private:
  bool done() const { return limit_ != 0 && found_ >= limit_; }

  bool consistent(std::uint32_t qa, std::uint32_t ta) {
    if (used_[ta] || !atom_ok(q_.atom_expr[qa], ta)) return false;
    for (auto [qn, qb] : q_.adjacency[qa]) {
      const auto mapped = map_[qn];
      if (mapped == UINT32_MAX) continue;
      const auto tb = g_.bond_between(ta, mapped);
      if (!tb || !bond_ok(q_.bonds[qb].expr, *tb)) return false;
    }
    return true;
  }

  void record() {
    if (unique_) {
      auto key = map_;
      std::sort(key.begin(), key.end());
      if (!seen_sets_.insert(key).second) return;
    }
    ++found_;
    if (collect_) matches_.push_back(map_);
  }

  void assign(std::size_t k, std::uint32_t qa, std::uint32_t ta) {
    map_[qa] = ta;
    used_[ta] = true;
    extend(k + 1);
    used_[ta] = false;
    map_[qa] = UINT32_MAX;
  }

  void extend(std::size_t k) {
    if (done()) return;
    if (k == q_.order.size()) {
      record();
      return;
    }
    const auto qa = q_.order[k];
    const int anchor = q_.anchor_bond[k];
    if (anchor < 0) {
      if (k == 0 && fixed_root_) {
        if (consistent(qa, *fixed_root_)) assign(k, qa, *fixed_root_);
        return;
      }
      for (std::uint32_t ta = 0; ta < g_.num_atoms() && !done(); ++ta) {
        if (consistent(qa, ta)) assign(k, qa, ta);
      }
      return;
    }
    const auto& qb = q_.bonds[anchor];
    const auto from = map_[qb.a == qa ? qb.b : qb.a];
    for (const auto& nb : g_.neighbors(from)) {
      if (done()) return;
      if (consistent(qa, nb.atom)) assign(k, qa, nb.atom);
    }
  }

  const MolGraph& g_;
  Matcher::State& st_;
  const Query::Impl& q_;
  std::vector<std::uint32_t> map_;
  std::vector<bool> used_;
};

void check_size(const Query& q) {
  if (q.num_atoms() > kMaxQueryAtoms) {
    throw PatternTooLarge("pattern has " + std::to_string(q.num_atoms()) + " atoms; the limit is " +
                          std::to_string(kMaxQueryAtoms));
  }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> Matcher::find(const Query& q, MatchOptions opts) {
  check_size(q);
  Search s(target_, *state_, q.impl());
  s.collect_ = true;
  s.unique_ = opts.unique;
  s.limit_ = opts.max_matches;
  s.run();
  return std::move(s.matches_);
}

std::size_t Matcher::count(const Query& q, MatchOptions opts) {
  check_size(q);
  Search s(target_, *state_, q.impl());
  s.unique_ = opts.unique;
  s.limit_ = opts.max_matches;
  s.run();
  return s.found_;
}

bool Matcher::any(const Query& q) { return count(q, {false, 1}) > 0; }

bool Matcher::matches_at(const Query& q, std::uint32_t atom) {
  check_size(q);
  Search s(target_, *state_, q.impl());
  s.limit_ = 1;
  s.fixed_root_ = atom;
  s.run();
  return s.found_ > 0;
}

std::size_t subgraph_match(const MolGraph& pattern, const MolGraph& target, bool unique) {
  if (pattern.num_atoms() > kMaxPatternAtoms) {
    throw PatternTooLarge("pattern has " + std::to_string(pattern.num_atoms()) + " atoms; the limit is " +
                          std::to_string(kMaxPatternAtoms));
  }
  Matcher m(target);
  return m.count(Query::from_molecule(pattern), {unique, 0});
}

}  // namespace molopt::chem
