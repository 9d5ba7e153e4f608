//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/chem/molecule.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "mhnpath/chem/elements.hpp"
#include "mhnpath/errors.hpp"

namespace mhnpath::chem {

Molecule::Molecule(std::vector<Atom> atoms, std::vector<Bond> bonds,
                   std::string provenance)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)),
      adjacency_(atoms_.size()), provenance_(std::move(provenance)) {
  const int n = num_atoms();
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < num_bonds(); ++i) {
    const Bond &b = bonds_[static_cast<std::size_t>(i)];
    if (b.a < 0 || b.b < 0 || b.a >= n || b.b >= n)
      throw SyntaxError("bond references atom out of range");
    if (b.a == b.b) throw SyntaxError("self-loop bond on atom " + std::to_string(b.a));
    if (!seen.emplace(std::min(b.a, b.b), std::max(b.a, b.b)).second)
      throw SyntaxError("duplicate bond between atoms " + std::to_string(b.a) +
                        " and " + std::to_string(b.b));
    if (b.order == BondOrder::kAromatic &&
        !(atoms_[static_cast<std::size_t>(b.a)].aromatic &&
          atoms_[static_cast<std::size_t>(b.b)].aromatic))
      throw SyntaxError("aromatic bond between non-aromatic atoms");
    adjacency_[static_cast<std::size_t>(b.a)].push_back({b.b, i});
    adjacency_[static_cast<std::size_t>(b.b)].push_back({b.a, i});
  }
  std::set<int> maps;
  for (const Atom &a : atoms_) {
    if (a.map_id && !maps.insert(*a.map_id).second)
      throw SyntaxError("duplicate atom map id " + std::to_string(*a.map_id));
  }
}

int Molecule::bond_valence_sum(int i) const {
  int sum = 0;
  for (const Neighbor &nb : neighbors(i)) sum += bond_valence(bond(nb.bond).order);
  return sum;
}

std::optional<int> Molecule::bond_between(int i, int j) const {
  for (const Neighbor &nb : neighbors(i)) {
    if (nb.atom == j) return nb.bond;
  }
  return std::nullopt;
}

std::vector<std::vector<int>> Molecule::components() const {
  std::vector<int> comp(atoms_.size(), -1);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < num_atoms(); ++start) {
    if (comp[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> stack{start};
    comp[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      out.back().push_back(u);
      for (const Neighbor &nb : neighbors(u)) {
        if (comp[static_cast<std::size_t>(nb.atom)] < 0) {
          comp[static_cast<std::size_t>(nb.atom)] = id;
          stack.push_back(nb.atom);
        }
      }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

Molecule Molecule::induced(std::span<const int> atom_indices) const {
  std::vector<int> remap(atoms_.size(), -1);
  std::vector<Atom> atoms;
  atoms.reserve(atom_indices.size());
  for (int idx : atom_indices) {
    remap[static_cast<std::size_t>(idx)] = static_cast<int>(atoms.size());
    atoms.push_back(atom(idx));
  }
  std::vector<Bond> bonds;
  for (const Bond &b : bonds_) {
    const int a = remap[static_cast<std::size_t>(b.a)];
    const int c = remap[static_cast<std::size_t>(b.b)];
    if (a >= 0 && c >= 0) bonds.push_back({a, c, b.order});
  }
  return Molecule(std::move(atoms), std::move(bonds), provenance_);
}

Molecule Molecule::without_maps() const {
  std::vector<Atom> atoms = atoms_;
  for (Atom &a : atoms) a.map_id.reset();
  return Molecule(std::move(atoms), bonds_, provenance_);
}

std::vector<bool> Molecule::ring_atoms() const {
  // An atom is on a cycle iff it has at least one non-bridge bond.
  const int n = num_atoms();
  std::vector<int> disc(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  std::vector<bool> bridge(bonds_.size(), false);
  int timer = 0;
  struct Frame {
    int atom;
    int parent_bond;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[static_cast<std::size_t>(root)] >= 0) continue;
    std::vector<Frame> stack{{root, -1, 0}};
    disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
    while (!stack.empty()) {
      Frame &f = stack.back();
      const auto nbs = neighbors(f.atom);
      if (f.next < nbs.size()) {
        const Neighbor nb = nbs[f.next++];
        if (nb.bond == f.parent_bond) continue;
        auto &dv = disc[static_cast<std::size_t>(nb.atom)];
        if (dv < 0) {
          dv = low[static_cast<std::size_t>(nb.atom)] = timer++;
          stack.push_back({nb.atom, nb.bond, 0});
        } else {
          auto &lu = low[static_cast<std::size_t>(f.atom)];
          lu = std::min(lu, dv);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          const int p = stack.back().atom;
          auto &lp = low[static_cast<std::size_t>(p)];
          lp = std::min(lp, low[static_cast<std::size_t>(done.atom)]);
          if (low[static_cast<std::size_t>(done.atom)] >
              disc[static_cast<std::size_t>(p)])
            bridge[static_cast<std::size_t>(done.parent_bond)] = true;
        }
      }
    }
  }
  std::vector<bool> in_ring(static_cast<std::size_t>(n), false);
  for (int i = 0; i < num_bonds(); ++i) {
    if (!bridge[static_cast<std::size_t>(i)]) {
      in_ring[static_cast<std::size_t>(bond(i).a)] = true;
      in_ring[static_cast<std::size_t>(bond(i).b)] = true;
    }
  }
  return in_ring;
}

int implicit_hydrogens(int element, int charge, bool aromatic,
                       int bond_valence_sum) {
  const std::vector<int> allowed = allowed_valences(element, charge);
  if (allowed.empty()) return 0;
  if (aromatic) {
    const int used = bond_valence_sum + 1;
    if (used <= allowed.front()) return allowed.front() - used;
    if (bond_valence_sum <= allowed.back()) return 0;
  } else {
    for (int v : allowed) {
      if (v >= bond_valence_sum) return v - bond_valence_sum;
    }
  }
  throw ValenceError(std::string("explicit valence ") +
                     std::to_string(bond_valence_sum) + " too high for " +
                     std::string(element_symbol(element)));
}

bool valence_ok(const Molecule &m, int atom) {
  const Atom &a = m.atom(atom);
  if (a.hydrogens < 0) return false;
  const std::vector<int> allowed = allowed_valences(a.element, a.charge);
  if (allowed.empty()) return true;
  return m.bond_valence_sum(atom) + a.hydrogens <= allowed.back();
}

bool chemically_valid(const Molecule &m) {
  for (int i = 0; i < m.num_atoms(); ++i) {
    if (!valence_ok(m, i)) return false;
    if (m.atom(i).aromatic) {
      int aromatic_bonds = 0;
      for (const Neighbor &nb : m.neighbors(i)) {
        if (m.bond(nb.bond).order == BondOrder::kAromatic) ++aromatic_bonds;
      }
      if (aromatic_bonds < 2) return false;
    }
  }
  return true;
}

}  // namespace mhnpath::chem
