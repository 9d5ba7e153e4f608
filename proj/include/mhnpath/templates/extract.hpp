//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_TEMPLATES_EXTRACT_HPP
#define MHNPATH_TEMPLATES_EXTRACT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/templates/template.hpp"

namespace mhnpath::templates {

inline constexpr int kDefaultEnvRadius = 1;

/// Atom-mapped reaction "reactants>>product" (an agents field between
/// single '>' separators is accepted and ignored). The product side must
/// be one molecule.
struct MappedReaction {
  chem::MoleculeSet reactants;
  chem::Molecule product;
  std::string smiles;
};

MappedReaction parse_mapped_reaction(std::string_view reaction_smiles);

/// Retro rule from a mapped reaction. The reaction center is every mapped
/// product atom whose element, charge, H count, aromaticity or bonded
/// neighborhood differs from its reactant counterpart; the product pattern
/// adds atoms within `env_radius` bonds. Precursor patterns hold the same
/// mapped atoms plus every reactant atom that does not reach the product
/// (leaving groups) of each contributing reactant. Reactants without mapped
/// product atoms are ignored.
///
/// Throws UnmappedAtomError when a product atom has no map number or no
/// reactant counterpart, NoChangeError when nothing changes.
Template extract_template(const MappedReaction &reaction,
                          int env_radius = kDefaultEnvRadius);

/// Reactants that extract_template regenerates: contributing members with
/// map ids cleared.
chem::MoleculeSet contributing_reactants(const MappedReaction &reaction);

struct ReactionRecord {
  MappedReaction reaction;
  TemplateSource source = TemplateSource::kSynthetic;
  std::optional<int> enzyme;
};

/// Tab-separated file with header "reaction_smiles<TAB>source[<TAB>enzyme_id]".
/// Every malformed row is reported (path:line) in one SyntaxError.
std::vector<ReactionRecord> read_reactions(const std::filesystem::path &path);

}  // namespace mhnpath::templates

#endif  // MHNPATH_TEMPLATES_EXTRACT_HPP
