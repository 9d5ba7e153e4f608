//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_CHEM_MOLECULE_HPP
#define MHNPATH_CHEM_MOLECULE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mhnpath::chem {

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

/// Contribution of a bond to an atom's explicit valence. Aromatic bonds count
/// as one; the aromatic atom itself accounts for the extra shared electron.
constexpr int bond_valence(BondOrder order) {
  return order == BondOrder::kAromatic ? 1 : static_cast<int>(order);
}

struct Atom {
  int element = 6;
  int charge = 0;
  /// Total attached hydrogens (implicit or bracketed), never graph atoms.
  int hydrogens = 0;
  bool aromatic = false;
  std::optional<int> map_id;

  friend bool operator==(const Atom &, const Atom &) = default;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::kSingle;

  int other(int atom) const { return atom == a ? b : a; }
  friend bool operator==(const Bond &, const Bond &) = default;
};

struct Neighbor {
  int atom;
  int bond;
};

/// Attributed molecular graph. Construction validates the graph invariants
/// (simple graph, in-range indices, aromatic bonds between aromatic atoms,
/// unique map ids) and throws SyntaxError when any is violated.
class Molecule {
public:
  Molecule() = default;
  Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds,
           std::string provenance = {});

  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const Bond> bonds() const { return bonds_; }
  const Atom &atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const Bond &bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  std::span<const Neighbor> neighbors(int i) const {
    return adjacency_[static_cast<std::size_t>(i)];
  }

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }

  /// Sum of bond_valence over the atom's bonds.
  int bond_valence_sum(int i) const;

  std::optional<int> bond_between(int i, int j) const;

  const std::string &provenance() const { return provenance_; }

  /// Connected components as lists of atom indices, each sorted ascending,
  /// ordered by their smallest atom index.
  std::vector<std::vector<int>> components() const;

  /// Sub-molecule induced by the given atoms (in the given order).
  Molecule induced(std::span<const int> atom_indices) const;

  /// Copy with every map id cleared.
  Molecule without_maps() const;

  /// Atoms lying on at least one cycle.
  std::vector<bool> ring_atoms() const;

private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::string provenance_;
};

/// Hydrogen count implied for an organic-subset atom written without
/// brackets, given its current bonds. Throws ValenceError if no allowed
/// valence fits.
int implicit_hydrogens(int element, int charge, bool aromatic,
                       int bond_valence_sum);

/// True when the atom's explicit valence (bonds + hydrogens) fits one of its
/// allowed valences (elements without a valence model always fit).
bool valence_ok(const Molecule &m, int atom);

/// Checks every atom with valence_ok and that aromatic atoms carry at least
/// two aromatic bonds.
bool chemically_valid(const Molecule &m);

}  // namespace mhnpath::chem

#endif  // MHNPATH_CHEM_MOLECULE_HPP
