//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/chem/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "mhnpath/errors.hpp"
#include "mhnpath/util/hash.hpp"

namespace mhnpath::chem {

Fingerprint::Fingerprint(int n_bits, int radius)
    : n_bits_(n_bits), radius_(radius),
      words_((static_cast<std::size_t>(n_bits) + 63) / 64, 0) {
  if (n_bits <= 0 || !std::has_single_bit(static_cast<unsigned>(n_bits)))
    throw ConfigError("fingerprint width must be a power of two, got " +
                      std::to_string(n_bits));
  if (radius < 0) throw ConfigError("fingerprint radius must be >= 0");
}

int Fingerprint::popcount() const {
  int count = 0;
  for (std::uint64_t w : words_) count += std::popcount(w);
  return count;
}

std::vector<int> Fingerprint::on_bits() const {
  std::vector<int> bits;
  for (int i = 0; i < n_bits_; ++i) {
    if (test(i)) bits.push_back(i);
  }
  return bits;
}

bool Fingerprint::subset_of(const Fingerprint &other) const {
  if (other.n_bits_ != n_bits_) return false;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

void Fingerprint::merge(const Fingerprint &other) {
  if (other.n_bits_ != n_bits_)
    throw ShapeError("cannot merge fingerprints of different widths");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
}

std::uint64_t atom_invariant_id(int element, int charge, int degree,
                                int hydrogens, bool aromatic) {
  std::uint64_t h = kFingerprintSeed;
  h = util::hash_combine(h, static_cast<std::uint64_t>(element));
  h = util::hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(charge)));
  h = util::hash_combine(h, static_cast<std::uint64_t>(degree));
  h = util::hash_combine(h, static_cast<std::uint64_t>(hydrogens));
  h = util::hash_combine(h, aromatic ? 1U : 0U);
  return h;
}

std::vector<std::vector<std::uint64_t>> circular_identifiers(
    std::span<const std::uint64_t> initial,
    const std::vector<std::vector<EnvironmentEdge>> &adjacency, int radius) {
  std::vector<std::vector<std::uint64_t>> ids;
  ids.emplace_back(initial.begin(), initial.end());
  for (int r = 1; r <= radius; ++r) {
    const auto &prev = ids.back();
    std::vector<std::uint64_t> next(prev.size());
    for (std::size_t v = 0; v < prev.size(); ++v) {
      std::vector<std::pair<int, std::uint64_t>> nbrs;
      for (const EnvironmentEdge &e : adjacency[v])
        nbrs.emplace_back(e.bond_label, prev[static_cast<std::size_t>(e.neighbor)]);
      std::sort(nbrs.begin(), nbrs.end());
      std::uint64_t h = util::hash_combine(kFingerprintSeed, static_cast<std::uint64_t>(r));
      h = util::hash_combine(h, prev[v]);
      for (const auto &[label, id] : nbrs) {
        h = util::hash_combine(h, static_cast<std::uint64_t>(label));
        h = util::hash_combine(h, id);
      }
      next[v] = h;
    }
    ids.push_back(std::move(next));
  }
  return ids;
}

Fingerprint fold_identifiers(
    const std::vector<std::vector<std::uint64_t>> &identifiers, int n_bits,
    int radius) {
  Fingerprint fp(n_bits, radius);
  const auto mask = static_cast<std::uint64_t>(n_bits - 1);
  for (const auto &layer : identifiers) {
    for (std::uint64_t id : layer) fp.set(static_cast<int>(id & mask));
  }
  return fp;
}

Fingerprint fingerprint(const Molecule &m, int radius, int n_bits) {
  if (radius < 0) throw ConfigError("fingerprint radius must be >= 0");
  std::vector<std::uint64_t> initial;
  std::vector<std::vector<EnvironmentEdge>> adjacency(static_cast<std::size_t>(m.num_atoms()));
  for (int i = 0; i < m.num_atoms(); ++i) {
    const Atom &a = m.atom(i);
    initial.push_back(atom_invariant_id(a.element, a.charge, m.degree(i),
                                        a.hydrogens, a.aromatic));
    for (const Neighbor &nb : m.neighbors(i)) {
      adjacency[static_cast<std::size_t>(i)].push_back(
          {nb.atom, static_cast<int>(m.bond(nb.bond).order)});
    }
  }
  return fold_identifiers(circular_identifiers(initial, adjacency, radius),
                          n_bits, radius);
}

}  // namespace mhnpath::chem
