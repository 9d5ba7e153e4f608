//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_CHEM_ELEMENTS_HPP
#define MHNPATH_CHEM_ELEMENTS_HPP

#include <optional>
#include <string_view>
#include <vector>

namespace mhnpath::chem {

/// Atomic number for an element symbol ("C", "Cl", ...), case-sensitive.
std::optional<int> element_from_symbol(std::string_view symbol);

/// Element symbol for an atomic number in [1, 86]; "?" otherwise.
std::string_view element_symbol(int atomic_number);

/// True for B, C, N, O, P, S, F, Cl, Br, I: atoms that may be written
/// without brackets when their hydrogen count is implied.
bool is_organic_subset(int atomic_number);

/// Elements that may carry an aromatic (lowercase) flag.
bool can_be_aromatic(int atomic_number);

/// Allowed total valences for a main-group element at a given formal
/// charge, ascending. Empty when the element has no valence model (metals,
/// noble gases), in which case valence is not checked.
std::vector<int> allowed_valences(int atomic_number, int charge);

}  // namespace mhnpath::chem

#endif  // MHNPATH_CHEM_ELEMENTS_HPP
