//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/chem/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <optional>

#include "mhnpath/chem/canon.hpp"
#include "mhnpath/chem/elements.hpp"
#include "mhnpath/errors.hpp"

namespace mhnpath::chem {
namespace {

std::string at(std::size_t pos) { return " at position " + std::to_string(pos); }

class SmilesParser {
public:
  explicit SmilesParser(std::string_view text) : s_(text) {}

  Molecule parse() {
    if (s_.empty()) throw SyntaxError("empty SMILES");
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      switch (c) {
      case '(':
        if (prev_ < 0 || pending_) throw SyntaxError("misplaced '('" + at(pos_));
        branches_.push_back({prev_, pos_});
        ++pos_;
        break;
      case ')':
        if (branches_.empty()) throw SyntaxError("unbalanced ')'" + at(pos_));
        if (pending_ || s_[pos_ - 1] == '(')
          throw SyntaxError("empty or dangling branch" + at(pos_));
        prev_ = branches_.back().first;
        branches_.pop_back();
        ++pos_;
        break;
      case '-': case '=': case '#': case ':':
        if (pending_ || prev_ < 0) throw SyntaxError("misplaced bond symbol" + at(pos_));
        pending_ = bond_symbol(c);
        ++pos_;
        break;
      case '/': case '\\': case '@':
        throw SyntaxError(std::string("stereo descriptor '") + c +
                          "' not supported" + at(pos_));
      case '.':
        throw SyntaxError("'.' not accepted here; use parse_smiles_set" + at(pos_));
      case '[':
        parse_bracket();
        break;
      case '%':
      case '0': case '1': case '2': case '3': case '4':
      case '5': case '6': case '7': case '8': case '9':
        parse_ring_closure();
        break;
      default:
        parse_organic();
        break;
      }
    }
    if (pending_) throw SyntaxError("dangling bond symbol at end of input");
    if (!branches_.empty())
      throw SyntaxError("unbalanced '('" + at(branches_.back().second));
    if (!rings_.empty())
      throw RingError("unclosed ring " + std::to_string(rings_.begin()->first) +
                      at(rings_.begin()->second.pos));
    if (atoms_.empty()) throw SyntaxError("no atoms");

    Molecule graph(atoms_, bonds_, std::string(s_));
    for (int i = 0; i < graph.num_atoms(); ++i) {
      Atom &a = atoms_[static_cast<std::size_t>(i)];
      const int sum = graph.bond_valence_sum(i);
      if (!bracket_[static_cast<std::size_t>(i)]) {
        a.hydrogens = implicit_hydrogens(a.element, a.charge, a.aromatic, sum);
      } else {
        const auto allowed = allowed_valences(a.element, a.charge);
        if (!allowed.empty() && sum + a.hydrogens > allowed.back())
          throw ValenceError("explicit valence too high for atom " +
                             std::to_string(i) + " (" +
                             std::string(element_symbol(a.element)) + ")");
      }
    }
    return Molecule(std::move(atoms_), std::move(bonds_), std::string(s_));
  }

private:
  struct RingOpen {
    int atom;
    std::optional<BondOrder> order;
    std::size_t pos;
  };

  static BondOrder bond_symbol(char c) {
    switch (c) {
    case '=': return BondOrder::kDouble;
    case '#': return BondOrder::kTriple;
    case ':': return BondOrder::kAromatic;
    default: return BondOrder::kSingle;
    }
  }

  BondOrder implied_order(int a, int b) const {
    return atoms_[static_cast<std::size_t>(a)].aromatic &&
                   atoms_[static_cast<std::size_t>(b)].aromatic
               ? BondOrder::kAromatic
               : BondOrder::kSingle;
  }

  void add_atom(const Atom &atom, bool bracket) {
    const int idx = static_cast<int>(atoms_.size());
    atoms_.push_back(atom);
    bracket_.push_back(bracket);
    if (prev_ >= 0) {
      bonds_.push_back({prev_, idx, pending_.value_or(implied_order(prev_, idx))});
      pending_.reset();
    }
    prev_ = idx;
  }

  void parse_organic() {
    const std::size_t start = pos_;
    const auto rest = s_.substr(pos_);
    Atom atom;
    std::size_t len = 0;
    if (rest.starts_with("Cl")) {
      atom.element = 17; len = 2;
    } else if (rest.starts_with("Br")) {
      atom.element = 35; len = 2;
    } else {
      len = 1;
      switch (rest[0]) {
      case 'B': atom.element = 5; break;
      case 'C': atom.element = 6; break;
      case 'N': atom.element = 7; break;
      case 'O': atom.element = 8; break;
      case 'P': atom.element = 15; break;
      case 'S': atom.element = 16; break;
      case 'F': atom.element = 9; break;
      case 'I': atom.element = 53; break;
      case 'b': atom.element = 5; atom.aromatic = true; break;
      case 'c': atom.element = 6; atom.aromatic = true; break;
      case 'n': atom.element = 7; atom.aromatic = true; break;
      case 'o': atom.element = 8; atom.aromatic = true; break;
      case 'p': atom.element = 15; atom.aromatic = true; break;
      case 's': atom.element = 16; atom.aromatic = true; break;
      case '*':
        throw SyntaxError("wildcard atom not supported" + at(start));
      default:
        throw SyntaxError(std::string("unknown symbol '") + rest[0] + "'" + at(start));
      }
    }
    pos_ += len;
    add_atom(atom, false);
  }

  int read_number() {
    int value = 0;
    std::size_t digits = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      value = value * 10 + (s_[pos_] - '0');
      ++pos_;
      ++digits;
      if (digits > 6) throw SyntaxError("number too long" + at(pos_));
    }
    return digits == 0 ? -1 : value;
  }

  void parse_bracket() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      throw SyntaxError("isotopes not supported" + at(pos_));
    Atom atom;
    const auto rest = s_.substr(pos_);
    if (rest.empty()) throw SyntaxError("unterminated bracket atom" + at(start));
    if (rest[0] == '*') throw SyntaxError("wildcard atom not supported" + at(pos_));
    if (std::isupper(static_cast<unsigned char>(rest[0]))) {
      std::optional<int> z;
      if (rest.size() > 1 && std::islower(static_cast<unsigned char>(rest[1]))) {
        z = element_from_symbol(rest.substr(0, 2));
        if (z) pos_ += 2;
      }
      if (!z) {
        z = element_from_symbol(rest.substr(0, 1));
        if (!z) throw SyntaxError("unknown element" + at(pos_));
        pos_ += 1;
      }
      atom.element = *z;
    } else if (rest.starts_with("se")) {
      atom.element = 34; atom.aromatic = true; pos_ += 2;
    } else if (rest.starts_with("as")) {
      atom.element = 33; atom.aromatic = true; pos_ += 2;
    } else {
      atom.aromatic = true;
      switch (rest[0]) {
      case 'b': atom.element = 5; break;
      case 'c': atom.element = 6; break;
      case 'n': atom.element = 7; break;
      case 'o': atom.element = 8; break;
      case 'p': atom.element = 15; break;
      case 's': atom.element = 16; break;
      default:
        throw SyntaxError(std::string("unknown symbol '") + rest[0] + "'" + at(pos_));
      }
      ++pos_;
    }
    if (pos_ < s_.size() && s_[pos_] == '@')
      throw SyntaxError("stereo descriptor '@' not supported" + at(pos_));
    if (pos_ < s_.size() && s_[pos_] == 'H') {
      ++pos_;
      const int n = read_number();
      atom.hydrogens = n < 0 ? 1 : n;
    }
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
      const char sign = s_[pos_];
      int magnitude = 1;
      ++pos_;
      const int n = read_number();
      if (n >= 0) {
        magnitude = n;
      } else {
        while (pos_ < s_.size() && s_[pos_] == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      atom.charge = sign == '+' ? magnitude : -magnitude;
    }
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      const int n = read_number();
      if (n < 0) throw SyntaxError("missing atom map number" + at(pos_));
      atom.map_id = n;
    }
    if (pos_ >= s_.size() || s_[pos_] != ']')
      throw SyntaxError("unterminated or malformed bracket atom" + at(start));
    ++pos_;
    add_atom(atom, true);
  }

  void parse_ring_closure() {
    const std::size_t start = pos_;
    if (prev_ < 0) throw SyntaxError("ring closure before any atom" + at(pos_));
    int number = 0;
    if (s_[pos_] == '%') {
      ++pos_;
      if (pos_ + 1 >= s_.size() ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
          !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))
        throw SyntaxError("malformed %nn ring closure" + at(start));
      number = (s_[pos_] - '0') * 10 + (s_[pos_ + 1] - '0');
      pos_ += 2;
    } else {
      number = s_[pos_] - '0';
      ++pos_;
    }
    auto it = rings_.find(number);
    if (it == rings_.end()) {
      rings_[number] = {prev_, pending_, start};
      pending_.reset();
      return;
    }
    const RingOpen open = it->second;
    rings_.erase(it);
    if (open.atom == prev_) throw RingError("ring closure to itself" + at(start));
    if (pending_ && open.order && *pending_ != *open.order)
      throw RingError("conflicting ring closure bond symbols" + at(start));
    BondOrder order = pending_ ? *pending_
                      : open.order ? *open.order
                                   : implied_order(open.atom, prev_);
    for (const Bond &b : bonds_) {
      if ((b.a == open.atom && b.b == prev_) || (b.b == open.atom && b.a == prev_))
        throw RingError("ring closure duplicates an existing bond" + at(start));
    }
    bonds_.push_back({open.atom, prev_, order});
    pending_.reset();
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<bool> bracket_;
  std::optional<BondOrder> pending_;
  std::vector<std::pair<int, std::size_t>> branches_;
  std::map<int, RingOpen> rings_;
  int prev_ = -1;
};

LabeledGraph to_labeled_graph(const Molecule &m) {
  LabeledGraph g;
  g.vertex_labels.reserve(static_cast<std::size_t>(m.num_atoms()));
  g.adjacency.resize(static_cast<std::size_t>(m.num_atoms()));
  for (int i = 0; i < m.num_atoms(); ++i) {
    const Atom &a = m.atom(i);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%03d|%d|%+03d|%02d|%02d|%07d", a.element,
                  a.aromatic ? 1 : 0, a.charge, a.hydrogens, m.degree(i),
                  a.map_id.value_or(-1));
    g.vertex_labels.emplace_back(buf);
    for (const Neighbor &nb : m.neighbors(i)) {
      g.adjacency[static_cast<std::size_t>(i)].push_back(
          {nb.atom, nb.bond, static_cast<int>(m.bond(nb.bond).order)});
    }
  }
  return g;
}

std::string atom_text(const Molecule &m, int i) {
  const Atom &a = m.atom(i);
  const bool aromatic_ok = !a.aromatic || (a.element != 33 && a.element != 34);
  if (is_organic_subset(a.element) && a.charge == 0 && !a.map_id && aromatic_ok) {
    try {
      if (implicit_hydrogens(a.element, 0, a.aromatic, m.bond_valence_sum(i)) ==
          a.hydrogens) {
        std::string sym(element_symbol(a.element));
        if (a.aromatic) sym[0] = static_cast<char>(std::tolower(sym[0]));
        return sym;
      }
    } catch (const ValenceError &) {
      // fall through to a bracket atom
    }
  }
  std::string out = "[";
  std::string sym(element_symbol(a.element));
  if (a.aromatic) sym[0] = static_cast<char>(std::tolower(sym[0]));
  out += sym;
  if (a.hydrogens > 0) {
    out += 'H';
    if (a.hydrogens > 1) out += std::to_string(a.hydrogens);
  }
  if (a.charge != 0) {
    out += a.charge > 0 ? '+' : '-';
    if (std::abs(a.charge) > 1) out += std::to_string(std::abs(a.charge));
  }
  if (a.map_id) out += ":" + std::to_string(*a.map_id);
  out += ']';
  return out;
}

std::string bond_text(const Molecule &m, int bond) {
  const Bond &b = m.bond(bond);
  switch (b.order) {
  case BondOrder::kSingle:
    return m.atom(b.a).aromatic && m.atom(b.b).aromatic ? "-" : "";
  case BondOrder::kDouble: return "=";
  case BondOrder::kTriple: return "#";
  case BondOrder::kAromatic: return "";
  }
  return "";
}

std::string write_with_ranks(const Molecule &m, const LabeledGraph &g,
                             std::span<const int> ranks) {
  return write_line_notation(
      g, ranks, [&](int v) { return atom_text(m, v); },
      [&](int bond, int, int) { return bond_text(m, bond); });
}

}  // namespace

Molecule parse_smiles(std::string_view text) { return SmilesParser(text).parse(); }

std::vector<int> canonical_atom_ranks(const Molecule &m) {
  const LabeledGraph g = to_labeled_graph(m);
  return canonical_ranks(g, [&](std::span<const int> ranks) {
    return write_with_ranks(m, g, ranks);
  });
}

std::string write_canonical_smiles(const Molecule &m) {
  if (m.empty()) return {};
  const LabeledGraph g = to_labeled_graph(m);
  const std::vector<int> ranks = canonical_ranks(
      g, [&](std::span<const int> r) { return write_with_ranks(m, g, r); });
  return write_with_ranks(m, g, ranks);
}

MoleculeSet::MoleculeSet(std::vector<Molecule> members) : members_(std::move(members)) {
  if (members_.empty()) throw EmptyInput("molecule set must not be empty");
  keys_.reserve(members_.size());
  for (const Molecule &m : members_) keys_.push_back(write_canonical_smiles(m));
  std::vector<std::string> sorted = keys_;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0) canonical_key_ += '.';
    canonical_key_ += sorted[i];
  }
}

MoleculeSet parse_smiles_set(std::string_view text) {
  if (text.empty()) throw SyntaxError("empty SMILES");
  std::vector<Molecule> members;
  std::size_t start = 0;
  int index = 0;
  while (true) {
    const std::size_t dot = text.find('.', start);
    const auto piece = text.substr(start, dot == std::string_view::npos ? text.npos : dot - start);
    const std::string prefix = "component " + std::to_string(index) + ": ";
    try {
      members.push_back(parse_smiles(piece));
    } catch (const RingError &e) {
      throw RingError(prefix + e.what());
    } catch (const SyntaxError &e) {
      throw SyntaxError(prefix + e.what());
    } catch (const ValenceError &e) {
      throw ValenceError(prefix + e.what());
    }
    if (dot == std::string_view::npos) break;
    start = dot + 1;
    ++index;
  }
  return MoleculeSet(std::move(members));
}

std::vector<Molecule> split_components(const Molecule &m) {
  std::vector<Molecule> out;
  for (const auto &comp : m.components()) out.push_back(m.induced(comp));
  return out;
}

}  // namespace mhnpath::chem
