//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_CHEM_SMILES_HPP
#define MHNPATH_CHEM_SMILES_HPP

#include <string>
#include <string_view>
#include <vector>

#include "mhnpath/chem/molecule.hpp"

namespace mhnpath::chem {

/// Parses one SMILES string; '.' separators are rejected (see
/// parse_smiles_set).
///
/// Supported: organic-subset atoms (B C N O P S F Cl Br I and aromatic
/// b c n o p s), bracket atoms with element, hydrogen count, charge and map
/// id, bonds - = # :, branches, ring closures (digits and %nn). Stereo marks,
/// isotopes and wildcards raise SyntaxError; unclosed rings raise RingError;
/// over-valent atoms raise ValenceError.
Molecule parse_smiles(std::string_view text);

/// Canonical SMILES. Deterministic and invariant under input atom order.
/// Map ids are written when present. The empty molecule writes as "".
std::string write_canonical_smiles(const Molecule &m);

/// Canonical atom ranks used by write_canonical_smiles.
std::vector<int> canonical_atom_ranks(const Molecule &m);

/// Non-empty multiset of molecules with an order-independent key.
class MoleculeSet {
public:
  MoleculeSet() = default;
  explicit MoleculeSet(std::vector<Molecule> members);

  const std::vector<Molecule> &members() const { return members_; }
  /// Canonical SMILES of each member, in the same order as members().
  const std::vector<std::string> &member_keys() const { return keys_; }
  /// Member canonical SMILES sorted lexicographically and joined with '.'.
  const std::string &canonical_key() const { return canonical_key_; }
  std::size_t size() const { return members_.size(); }

private:
  std::vector<Molecule> members_;
  std::vector<std::string> keys_;
  std::string canonical_key_;
};

/// Parses '.'-separated SMILES into one member per component. Errors from
/// individual components are rethrown with the component index prefixed.
MoleculeSet parse_smiles_set(std::string_view text);

/// Connected components as separate molecules, ordered by lowest atom index.
std::vector<Molecule> split_components(const Molecule &m);

}  // namespace mhnpath::chem

#endif  // MHNPATH_CHEM_SMILES_HPP
