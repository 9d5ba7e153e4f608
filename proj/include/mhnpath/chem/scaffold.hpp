//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_CHEM_SCAFFOLD_HPP
#define MHNPATH_CHEM_SCAFFOLD_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mhnpath/chem/molecule.hpp"

namespace mhnpath::chem {

/// Bemis-Murcko framework: terminal non-ring atoms are stripped until only
/// ring systems and the linkers between them remain. Hydrogen counts of the
/// remaining atoms absorb the removed bonds. Acyclic input gives the empty
/// molecule (written as "").
Molecule murcko_scaffold(const Molecule &m);

/// Groups molecules by canonical scaffold and deals whole groups, largest
/// first (equal sizes in seeded-shuffle order), to the currently smallest
/// partition (lowest index on ties). Returns molecule indices per partition,
/// each ascending. Throws EmptyInput for no molecules, ConfigError for k < 2.
std::vector<std::vector<std::size_t>> scaffold_split(
    const std::vector<Molecule> &molecules, int k, std::uint64_t seed);

struct MoleculeRecord {
  std::string smiles;
  Molecule molecule;
};

/// One SMILES per line; blank lines and '#' comments are skipped. Parse
/// errors are reported with their line number.
std::vector<MoleculeRecord> read_molecule_list(const std::filesystem::path &path);

void write_molecule_list(const std::filesystem::path &path,
                         const std::vector<std::string> &smiles);

}  // namespace mhnpath::chem

#endif  // MHNPATH_CHEM_SCAFFOLD_HPP
