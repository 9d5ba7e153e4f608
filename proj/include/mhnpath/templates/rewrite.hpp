//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_TEMPLATES_REWRITE_HPP
#define MHNPATH_TEMPLATES_REWRITE_HPP

#include <vector>

#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/templates/template.hpp"

namespace mhnpath::templates {

inline constexpr int kDefaultMaxMatches = 8;

/// Subgraph embeddings of `pattern` in `m`; entry i of an embedding is the
/// molecule atom matched by pattern atom i. Embeddings with the same matched
/// atom set and the same map-id assignment are collapsed to the
/// lexicographically smallest one; the result is sorted lexicographically.
std::vector<std::vector<int>> match_pattern(const PatternGraph &pattern,
                                            const chem::Molecule &m);

/// Applies a retro rule to a product. The product is first renumbered in
/// canonical atom order, so results do not depend on the input numbering.
/// For each of the first `max_matches` embeddings the matched product atoms are rewritten into the precursor
/// patterns: bonds are changed, removed or created, introduced atoms are
/// added, and hydrogen counts follow the precursor constraint or, absent
/// one, conservation of total valence. Outcomes that fail the valence or
/// aromaticity checks are dropped. Results are deduplicated by canonical
/// key, in first-seen order; map ids are cleared.
std::vector<chem::MoleculeSet> apply_template(const Template &t, const chem::Molecule &m,
                                              int max_matches = kDefaultMaxMatches);

}  // namespace mhnpath::templates

#endif  // MHNPATH_TEMPLATES_REWRITE_HPP
