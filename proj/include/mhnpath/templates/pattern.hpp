//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_TEMPLATES_PATTERN_HPP
#define MHNPATH_TEMPLATES_PATTERN_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mhnpath/chem/canon.hpp"
#include "mhnpath/chem/molecule.hpp"

namespace mhnpath::templates {

/// Conjunction of atom constraints from the supported SMARTS subset.
struct AtomPattern {
  std::optional<int> element;
  std::optional<bool> aromatic;
  std::optional<int> hydrogens;
  std::optional<int> degree;
  std::optional<int> charge;
  std::optional<int> map_id;

  /// All five invariants (element, aromatic, H count, degree, charge) pinned.
  bool fully_pinned() const {
    return element && aromatic && hydrogens && degree && charge;
  }

  bool matches(const chem::Molecule &m, int atom) const;

  /// Canonical SMARTS text, e.g. "[c;H0;D3;+0:4]". Map id omitted when
  /// `with_map` is false.
  std::string to_smarts(bool with_map = true) const;

  friend bool operator==(const AtomPattern &, const AtomPattern &) = default;
};

enum class PatternBondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
  /// Unwritten SMARTS bond: single or aromatic.
  kSingleOrAromatic = 5,
  /// '~'
  kAny = 6,
};

bool bond_matches(PatternBondOrder pattern, chem::BondOrder order);
std::string_view bond_smarts(PatternBondOrder order);

struct PatternBond {
  int a = 0;
  int b = 0;
  PatternBondOrder order = PatternBondOrder::kSingle;

  friend bool operator==(const PatternBond &, const PatternBond &) = default;
};

/// Graph of atom patterns. Map ids, when present, are unique.
class PatternGraph {
public:
  PatternGraph() = default;
  PatternGraph(std::vector<AtomPattern> atoms, std::vector<PatternBond> bonds);

  std::span<const AtomPattern> atoms() const { return atoms_; }
  std::span<const PatternBond> bonds() const { return bonds_; }
  const AtomPattern &atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const PatternBond &bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  std::span<const chem::Neighbor> neighbors(int i) const {
    return adjacency_[static_cast<std::size_t>(i)];
  }
  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }
  std::optional<int> bond_between(int i, int j) const;
  std::optional<int> atom_with_map(int map_id) const;

  std::vector<PatternGraph> components() const;

  /// Canonical SMARTS text. Map ids are written as stored.
  std::string to_smarts() const;

  friend bool operator==(const PatternGraph &a, const PatternGraph &b) {
    return a.atoms_ == b.atoms_ && a.bonds_ == b.bonds_;
  }

private:
  std::vector<AtomPattern> atoms_;
  std::vector<PatternBond> bonds_;
  std::vector<std::vector<chem::Neighbor>> adjacency_;
};

/// Parses one pattern (no '.' or '>'). Supported primitives: element symbol
/// or #n, a/A, Hn, Dn, charge (+, -, +n, -n, +0), map :n, joined by ';' or
/// '&' or juxtaposition; bonds - = # : ~ and implicit; branches and ring
/// closures. Anything else raises UnsupportedPrimitive naming the token.
PatternGraph parse_pattern(std::string_view text);

/// Lowers a pattern to the canonicalizer's graph form; vertex labels are
/// the atoms' SMARTS text with or without map ids.
chem::LabeledGraph labeled_graph(const PatternGraph &g, bool with_maps);

/// Writes the pattern in rank order with caller-supplied atom text.
std::string write_pattern(const PatternGraph &g, const chem::LabeledGraph &lg,
                          std::span<const int> ranks,
                          const std::function<std::string(int)> &atom_text);

}  // namespace mhnpath::templates

#endif  // MHNPATH_TEMPLATES_PATTERN_HPP
