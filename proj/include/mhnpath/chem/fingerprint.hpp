//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_CHEM_FINGERPRINT_HPP
#define MHNPATH_CHEM_FINGERPRINT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mhnpath/chem/molecule.hpp"

namespace mhnpath::chem {

/// Hash seed baked into fingerprint format version 1. Changing it changes
/// every fingerprint and invalidates saved models.
inline constexpr std::uint64_t kFingerprintSeed = 0x4d484e5046503031ULL;

inline constexpr int kDefaultRadius = 2;
inline constexpr int kDefaultFingerprintBits = 4096;

/// Fixed-width bit vector of folded circular environment identifiers.
class Fingerprint {
public:
  Fingerprint() = default;
  Fingerprint(int n_bits, int radius);

  int n_bits() const { return n_bits_; }
  int radius() const { return radius_; }

  bool test(int bit) const {
    return (words_[static_cast<std::size_t>(bit) / 64] >> (bit % 64)) & 1U;
  }
  void set(int bit) {
    words_[static_cast<std::size_t>(bit) / 64] |= std::uint64_t{1} << (bit % 64);
  }

  int popcount() const;
  std::vector<int> on_bits() const;
  /// True when every bit set here is also set in `other` (same width).
  bool subset_of(const Fingerprint &other) const;
  void merge(const Fingerprint &other);

  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const Fingerprint &, const Fingerprint &) = default;

private:
  int n_bits_ = 0;
  int radius_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Radius-0 atom identifier from (element, charge, degree, H count,
/// aromatic). Shared by molecule fingerprints and the template screen, which
/// relies on both producing identical values.
std::uint64_t atom_invariant_id(int element, int charge, int degree,
                                int hydrogens, bool aromatic);

struct EnvironmentEdge {
  int neighbor;
  int bond_label;
};

/// Identifiers of every (atom, r) environment for r = 0..radius, indexed
/// [r][atom]. Each iteration folds the sorted (bond label, neighbor id)
/// pairs into the previous identifier, so the result does not depend on
/// neighbor order.
std::vector<std::vector<std::uint64_t>> circular_identifiers(
    std::span<const std::uint64_t> initial,
    const std::vector<std::vector<EnvironmentEdge>> &adjacency, int radius);

/// Folds every identifier into a bit vector (identifier mod n_bits).
Fingerprint fold_identifiers(
    const std::vector<std::vector<std::uint64_t>> &identifiers, int n_bits,
    int radius);

/// Circular (ECFP-style) fingerprint. n_bits must be a power of two and
/// radius >= 0; otherwise ConfigError.
Fingerprint fingerprint(const Molecule &m, int radius = kDefaultRadius,
                        int n_bits = kDefaultFingerprintBits);

}  // namespace mhnpath::chem

#endif  // MHNPATH_CHEM_FINGERPRINT_HPP
