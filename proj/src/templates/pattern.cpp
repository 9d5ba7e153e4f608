//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/templates/pattern.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "mhnpath/chem/canon.hpp"
#include "mhnpath/chem/elements.hpp"
#include "mhnpath/errors.hpp"

namespace mhnpath::templates {
namespace {

std::string at(std::size_t pos) { return " at position " + std::to_string(pos); }

std::string aromatic_symbol(int element) {
  switch (element) {
  case 5: return "b";
  case 6: return "c";
  case 7: return "n";
  case 8: return "o";
  case 15: return "p";
  case 16: return "s";
  case 33: return "as";
  case 34: return "se";
  default: return {};
  }
}

template <typename T>
void constrain(std::optional<T> &slot, T value, const char *what, std::size_t pos) {
  if (slot && *slot != value)
    throw SyntaxError(std::string("conflicting ") + what + " constraints" + at(pos));
  slot = value;
}

class PatternParser {
public:
  explicit PatternParser(std::string_view text) : s_(text) {}

  PatternGraph parse() {
    if (s_.empty()) throw SyntaxError("empty pattern");
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
      case '.':
        if (pending_ || prev_ < 0 || !branches_.empty())
          throw SyntaxError("misplaced '.'" + at(pos_));
        prev_ = -1;
        ++pos_;
        break;
      case '-': case '=': case '#': case ':': case '~':
        if (pending_ || prev_ < 0) throw SyntaxError("misplaced bond symbol" + at(pos_));
        pending_ = bond_symbol(c);
        ++pos_;
        break;
      case '@': case '/': case '\\': case '!': case ',': case '$':
        unsupported(std::string(1, c));
      case '>':
        throw SyntaxError("reaction arrow inside a pattern" + at(pos_));
      case '[':
        parse_bracket();
        break;
      case '%':
      case '0': case '1': case '2': case '3': case '4':
      case '5': case '6': case '7': case '8': case '9':
        parse_ring_closure();
        break;
      default:
        parse_bare();
        break;
      }
    }
    if (pending_) throw SyntaxError("dangling bond symbol at end of pattern");
    if (!branches_.empty())
      throw SyntaxError("unbalanced '('" + at(branches_.back().second));
    if (!rings_.empty())
      throw RingError("unclosed ring " + std::to_string(rings_.begin()->first) +
                      at(rings_.begin()->second.pos));
    if (atoms_.empty()) throw SyntaxError("no atoms in pattern");
    return PatternGraph(std::move(atoms_), std::move(bonds_));
  }

private:
  struct RingOpen {
    int atom;
    std::optional<PatternBondOrder> order;
    std::size_t pos;
  };

  [[noreturn]] void unsupported(const std::string &token) const {
    throw UnsupportedPrimitive("unsupported SMARTS primitive '" + token + "'" + at(pos_));
  }

  static PatternBondOrder bond_symbol(char c) {
    switch (c) {
    case '=': return PatternBondOrder::kDouble;
    case '#': return PatternBondOrder::kTriple;
    case ':': return PatternBondOrder::kAromatic;
    case '~': return PatternBondOrder::kAny;
    default: return PatternBondOrder::kSingle;
    }
  }

  void add_atom(const AtomPattern &atom) {
    const int idx = static_cast<int>(atoms_.size());
    atoms_.push_back(atom);
    if (prev_ >= 0) {
      bonds_.push_back({prev_, idx, pending_.value_or(PatternBondOrder::kSingleOrAromatic)});
      pending_.reset();
    }
    prev_ = idx;
  }

  void parse_bare() {
    const auto rest = s_.substr(pos_);
    AtomPattern atom;
    std::size_t len = 1;
    if (rest.starts_with("Cl")) {
      atom.element = 17; len = 2;
    } else if (rest.starts_with("Br")) {
      atom.element = 35; len = 2;
    } else {
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
      case 'a': atom.aromatic = true; break;
      case 'A': atom.aromatic = false; break;
      case '*': break;
      case 'R': case 'r': case 'X': case 'x': case 'v': case 'h': case 'D': case 'H':
        unsupported(std::string(1, rest[0]));
      default:
        throw SyntaxError(std::string("unknown symbol '") + rest[0] + "'" + at(pos_));
      }
      if (atom.element && !atom.aromatic) atom.aromatic = false;
    }
    pos_ += len;
    add_atom(atom);
  }

  int read_number() {
    int value = 0;
    std::size_t digits = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      value = value * 10 + (s_[pos_] - '0');
      ++pos_;
      if (++digits > 6) throw SyntaxError("number too long" + at(pos_));
    }
    return digits == 0 ? -1 : value;
  }

  void parse_bracket() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    AtomPattern atom;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      unsupported("isotope");
    while (true) {
      if (pos_ >= s_.size()) throw SyntaxError("unterminated bracket atom" + at(start));
      const char c = s_[pos_];
      const std::size_t here = pos_;
      if (c == ']') break;
      if (c == ';' || c == '&') {
        ++pos_;
        continue;
      }
      if (c == ':') {
        ++pos_;
        const int n = read_number();
        if (n < 0) throw SyntaxError("missing atom map number" + at(pos_));
        atom.map_id = n;
        if (pos_ >= s_.size() || s_[pos_] != ']')
          throw SyntaxError("atom map must close the bracket atom" + at(pos_));
        break;
      }
      if (c == '#') {
        ++pos_;
        const int z = read_number();
        if (z < 1 || z > 118) throw SyntaxError("bad atomic number" + at(here));
        constrain(atom.element, z, "element", here);
        continue;
      }
      if (c == '*') {
        ++pos_;
        continue;
      }
      if (c == '+' || c == '-') {
        ++pos_;
        int magnitude = 1;
        const int n = read_number();
        if (n >= 0) {
          magnitude = n;
        } else {
          while (pos_ < s_.size() && s_[pos_] == c) {
            ++magnitude;
            ++pos_;
          }
        }
        constrain(atom.charge, c == '+' ? magnitude : -magnitude, "charge", here);
        continue;
      }
      if (c == '$') unsupported(pos_ + 1 < s_.size() && s_[pos_ + 1] == '(' ? "$(" : "$");
      if (c == ',' || c == '!' || c == '@' || c == '^') unsupported(std::string(1, c));
      const auto rest = s_.substr(pos_);
      if (std::isupper(static_cast<unsigned char>(c))) {
        if (rest.size() > 1 && std::islower(static_cast<unsigned char>(rest[1]))) {
          if (auto z = chem::element_from_symbol(rest.substr(0, 2))) {
            pos_ += 2;
            constrain(atom.element, *z, "element", here);
            constrain(atom.aromatic, false, "aromaticity", here);
            continue;
          }
        }
        if (c == 'H' || c == 'D') {
          ++pos_;
          const int n = read_number();
          constrain(c == 'H' ? atom.hydrogens : atom.degree, n < 0 ? 1 : n,
                    c == 'H' ? "hydrogen count" : "degree", here);
          continue;
        }
        if (c == 'A') {
          ++pos_;
          constrain(atom.aromatic, false, "aromaticity", here);
          continue;
        }
        if (c == 'R' || c == 'X') unsupported(std::string(1, c));
        if (auto z = chem::element_from_symbol(rest.substr(0, 1))) {
          ++pos_;
          constrain(atom.element, *z, "element", here);
          constrain(atom.aromatic, false, "aromaticity", here);
          continue;
        }
        throw SyntaxError("unknown element" + at(here));
      }
      if (rest.starts_with("se") || rest.starts_with("as")) {
        pos_ += 2;
        constrain(atom.element, rest[0] == 's' ? 34 : 33, "element", here);
        constrain(atom.aromatic, true, "aromaticity", here);
        continue;
      }
      int z = 0;
      switch (c) {
      case 'b': z = 5; break;
      case 'c': z = 6; break;
      case 'n': z = 7; break;
      case 'o': z = 8; break;
      case 'p': z = 15; break;
      case 's': z = 16; break;
      case 'a':
        ++pos_;
        constrain(atom.aromatic, true, "aromaticity", here);
        continue;
      case 'r': case 'x': case 'v': case 'h':
        unsupported(std::string(1, c));
      default:
        throw SyntaxError(std::string("unknown symbol '") + c + "'" + at(here));
      }
      ++pos_;
      constrain(atom.element, z, "element", here);
      constrain(atom.aromatic, true, "aromaticity", here);
    }
    ++pos_;  // ']'
    add_atom(atom);
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
    const PatternBondOrder order =
        pending_ ? *pending_ : open.order.value_or(PatternBondOrder::kSingleOrAromatic);
    bonds_.push_back({open.atom, prev_, order});
    pending_.reset();
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<AtomPattern> atoms_;
  std::vector<PatternBond> bonds_;
  std::optional<PatternBondOrder> pending_;
  std::vector<std::pair<int, std::size_t>> branches_;
  std::map<int, RingOpen> rings_;
  int prev_ = -1;
};

}  // namespace

bool AtomPattern::matches(const chem::Molecule &m, int i) const {
  const chem::Atom &a = m.atom(i);
  if (element && *element != a.element) return false;
  if (aromatic && *aromatic != a.aromatic) return false;
  if (hydrogens && *hydrogens != a.hydrogens) return false;
  if (charge && *charge != a.charge) return false;
  if (degree && *degree != m.degree(i)) return false;
  return true;
}

std::string AtomPattern::to_smarts(bool with_map) const {
  std::vector<std::string> parts;
  if (element) {
    const std::string lower = aromatic_symbol(*element);
    if (aromatic && *aromatic && !lower.empty()) {
      parts.push_back(lower);
    } else if (aromatic && !*aromatic && *element <= 86) {
      parts.emplace_back(chem::element_symbol(*element));
    } else {
      parts.push_back("#" + std::to_string(*element));
      if (aromatic) parts.emplace_back(*aromatic ? "a" : "A");
    }
  } else if (aromatic) {
    parts.emplace_back(*aromatic ? "a" : "A");
  } else {
    parts.emplace_back("*");
  }
  if (hydrogens) parts.push_back("H" + std::to_string(*hydrogens));
  if (degree) parts.push_back("D" + std::to_string(*degree));
  if (charge) {
    if (*charge == 0) {
      parts.emplace_back("+0");
    } else {
      std::string c(1, *charge > 0 ? '+' : '-');
      if (std::abs(*charge) > 1) c += std::to_string(std::abs(*charge));
      parts.push_back(c);
    }
  }
  std::string out = "[";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ';';
    out += parts[i];
  }
  if (with_map && map_id) out += ":" + std::to_string(*map_id);
  out += ']';
  return out;
}

bool bond_matches(PatternBondOrder pattern, chem::BondOrder order) {
  switch (pattern) {
  case PatternBondOrder::kAny: return true;
  case PatternBondOrder::kSingleOrAromatic:
    return order == chem::BondOrder::kSingle || order == chem::BondOrder::kAromatic;
  default: return static_cast<int>(pattern) == static_cast<int>(order);
  }
}

std::string_view bond_smarts(PatternBondOrder order) {
  switch (order) {
  case PatternBondOrder::kSingle: return "-";
  case PatternBondOrder::kDouble: return "=";
  case PatternBondOrder::kTriple: return "#";
  case PatternBondOrder::kAromatic: return ":";
  case PatternBondOrder::kAny: return "~";
  case PatternBondOrder::kSingleOrAromatic: return "";
  }
  return "";
}

PatternGraph::PatternGraph(std::vector<AtomPattern> atoms, std::vector<PatternBond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  const int n = num_atoms();
  adjacency_.resize(atoms_.size());
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < num_bonds(); ++i) {
    const PatternBond &b = bonds_[static_cast<std::size_t>(i)];
    if (b.a < 0 || b.b < 0 || b.a >= n || b.b >= n)
      throw SyntaxError("pattern bond index out of range");
    if (b.a == b.b) throw SyntaxError("pattern bond joins an atom to itself");
    if (!seen.insert(std::minmax(b.a, b.b)).second)
      throw SyntaxError("duplicate pattern bond");
    adjacency_[static_cast<std::size_t>(b.a)].push_back({b.b, i});
    adjacency_[static_cast<std::size_t>(b.b)].push_back({b.a, i});
  }
  std::set<int> maps;
  for (const AtomPattern &a : atoms_) {
    if (a.map_id && !maps.insert(*a.map_id).second)
      throw SyntaxError("duplicate atom map number " + std::to_string(*a.map_id));
  }
}

std::optional<int> PatternGraph::bond_between(int i, int j) const {
  for (const chem::Neighbor &nb : neighbors(i)) {
    if (nb.atom == j) return nb.bond;
  }
  return std::nullopt;
}

std::optional<int> PatternGraph::atom_with_map(int map_id) const {
  for (int i = 0; i < num_atoms(); ++i) {
    if (atoms_[static_cast<std::size_t>(i)].map_id == map_id) return i;
  }
  return std::nullopt;
}

std::vector<PatternGraph> PatternGraph::components() const {
  std::vector<int> comp(atoms_.size(), -1);
  std::vector<std::vector<int>> members;
  for (int start = 0; start < num_atoms(); ++start) {
    if (comp[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(members.size());
    members.emplace_back();
    std::vector<int> stack{start};
    comp[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      members.back().push_back(v);
      for (const chem::Neighbor &nb : neighbors(v)) {
        if (comp[static_cast<std::size_t>(nb.atom)] < 0) {
          comp[static_cast<std::size_t>(nb.atom)] = id;
          stack.push_back(nb.atom);
        }
      }
    }
    std::sort(members.back().begin(), members.back().end());
  }
  std::vector<PatternGraph> out;
  for (const auto &list : members) {
    std::vector<int> local(atoms_.size(), -1);
    std::vector<AtomPattern> atoms;
    for (int v : list) {
      local[static_cast<std::size_t>(v)] = static_cast<int>(atoms.size());
      atoms.push_back(atoms_[static_cast<std::size_t>(v)]);
    }
    std::vector<PatternBond> bonds;
    for (const PatternBond &b : bonds_) {
      const int la = local[static_cast<std::size_t>(b.a)];
      const int lb = local[static_cast<std::size_t>(b.b)];
      if (la >= 0 && lb >= 0) bonds.push_back({la, lb, b.order});
    }
    out.emplace_back(std::move(atoms), std::move(bonds));
  }
  return out;
}

chem::LabeledGraph labeled_graph(const PatternGraph &g, bool with_maps) {
  chem::LabeledGraph out;
  out.adjacency.resize(static_cast<std::size_t>(g.num_atoms()));
  for (int i = 0; i < g.num_atoms(); ++i) {
    out.vertex_labels.push_back(g.atom(i).to_smarts(with_maps));
    for (const chem::Neighbor &nb : g.neighbors(i)) {
      out.adjacency[static_cast<std::size_t>(i)].push_back(
          {nb.atom, nb.bond, static_cast<int>(g.bond(nb.bond).order)});
    }
  }
  return out;
}

std::string write_pattern(const PatternGraph &g, const chem::LabeledGraph &lg,
                          std::span<const int> ranks,
                          const std::function<std::string(int)> &atom_text) {
  return chem::write_line_notation(
      lg, ranks, atom_text,
      [&](int bond, int, int) { return std::string(bond_smarts(g.bond(bond).order)); });
}

std::string PatternGraph::to_smarts() const {
  if (empty()) return {};
  const chem::LabeledGraph lg = labeled_graph(*this, true);
  auto text = [&](std::span<const int> ranks) {
    return write_pattern(*this, lg, ranks,
                         [&](int v) { return atom(v).to_smarts(true); });
  };
  return text(chem::canonical_ranks(lg, text));
}

PatternGraph parse_pattern(std::string_view text) { return PatternParser(text).parse(); }

}  // namespace mhnpath::templates
