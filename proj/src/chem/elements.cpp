//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/chem/elements.hpp"

#include <array>

namespace mhnpath::chem {
namespace {

constexpr std::array<std::string_view, 87> kSymbols = {
    "?",  "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
    "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
    "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
    "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
    "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn",
};

// Valence electrons for elements that have a valence model.
int valence_electrons(int z) {
  switch (z) {
  case 1: return 1;
  case 5: return 3;
  case 6: case 14: return 4;
  case 7: case 15: case 33: return 5;
  case 8: case 16: case 34: return 6;
  case 9: case 17: case 35: case 53: return 7;
  default: return -1;
  }
}

}  // namespace

std::optional<int> element_from_symbol(std::string_view symbol) {
  for (std::size_t z = 1; z < kSymbols.size(); ++z) {
    if (kSymbols[z] == symbol) return static_cast<int>(z);
  }
  return std::nullopt;
}

std::string_view element_symbol(int atomic_number) {
  if (atomic_number < 1 || atomic_number >= static_cast<int>(kSymbols.size()))
    return kSymbols[0];
  return kSymbols[static_cast<std::size_t>(atomic_number)];
}

bool is_organic_subset(int z) {
  switch (z) {
  case 5: case 6: case 7: case 8: case 9: case 15: case 16: case 17: case 35:
  case 53:
    return true;
  default:
    return false;
  }
}

bool can_be_aromatic(int z) {
  switch (z) {
  case 5: case 6: case 7: case 8: case 15: case 16: case 33: case 34:
    return true;
  default:
    return false;
  }
}

std::vector<int> allowed_valences(int z, int charge) {
  const int ve = valence_electrons(z);
  if (ve < 0) return {};
  if (z == 1) {
    if (charge == 0) return {1};
    return {0};
  }
  // Isoelectronic shift: N+ behaves like C, O- like F, C- like N, ...
  const int shifted = ve - charge;
  const bool second_period = z <= 10;
  if (shifted <= 0) return {0};
  switch (shifted) {
  case 1: return {1};
  case 2: return {2};
  case 3: return {3};
  case 4: return {4};
  case 5: return {3, 5};
  case 6:
    if (second_period) return {2};
    return {2, 4, 6};
  case 7: return {1};
  default: return {};
  }
}

}  // namespace mhnpath::chem
