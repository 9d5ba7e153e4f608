//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/templates/rewrite.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"

namespace mhnpath::templates {
namespace {

class Matcher {
public:
  Matcher(const PatternGraph &p, const chem::Molecule &m) : p_(p), m_(m) {
    const int n = p.num_atoms();
    std::vector<bool> placed(static_cast<std::size_t>(n), false);
    // Breadth-first order per component, so every atom after a component's
    // first has an already placed neighbor to anchor its candidates.
    for (int start = 0; start < n; ++start) {
      if (placed[static_cast<std::size_t>(start)]) continue;
      std::vector<int> queue{start};
      placed[static_cast<std::size_t>(start)] = true;
      parent_.push_back(-1);
      order_.push_back(start);
      for (std::size_t q = 0; q < queue.size(); ++q) {
        for (const chem::Neighbor &nb : p.neighbors(queue[q])) {
          if (placed[static_cast<std::size_t>(nb.atom)]) continue;
          placed[static_cast<std::size_t>(nb.atom)] = true;
          queue.push_back(nb.atom);
          order_.push_back(nb.atom);
          parent_.push_back(queue[q]);
        }
      }
    }
    image_.assign(static_cast<std::size_t>(n), -1);
    used_.assign(static_cast<std::size_t>(m.num_atoms()), false);
  }

  std::vector<std::vector<int>> run() {
    if (p_.empty() || p_.num_atoms() > m_.num_atoms()) return {};
    extend(0);
    std::vector<std::vector<int>> out;
    out.reserve(best_.size());
    for (auto &[key, emb] : best_) out.push_back(std::move(emb));
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  using Key = std::pair<std::vector<int>, std::vector<std::pair<int, int>>>;

  bool consistent(int pa, int ma) const {
    if (used_[static_cast<std::size_t>(ma)] || !p_.atom(pa).matches(m_, ma)) return false;
    for (const chem::Neighbor &nb : p_.neighbors(pa)) {
      const int other = image_[static_cast<std::size_t>(nb.atom)];
      if (other < 0) continue;
      const auto bond = m_.bond_between(ma, other);
      if (!bond || !bond_matches(p_.bond(nb.bond).order, m_.bond(*bond).order)) return false;
    }
    return true;
  }

  void place(std::size_t depth, int pa, int ma) {
    image_[static_cast<std::size_t>(pa)] = ma;
    used_[static_cast<std::size_t>(ma)] = true;
    extend(depth + 1);
    used_[static_cast<std::size_t>(ma)] = false;
    image_[static_cast<std::size_t>(pa)] = -1;
  }

  void extend(std::size_t depth) {
    if (depth == order_.size()) {
      record();
      return;
    }
    const int pa = order_[depth];
    const int anchor = parent_[depth];
    if (anchor < 0) {
      for (int ma = 0; ma < m_.num_atoms(); ++ma) {
        if (consistent(pa, ma)) place(depth, pa, ma);
      }
    } else {
      for (const chem::Neighbor &nb : m_.neighbors(image_[static_cast<std::size_t>(anchor)])) {
        if (consistent(pa, nb.atom)) place(depth, pa, nb.atom);
      }
    }
  }

  void record() {
    Key key;
    key.first = image_;
    std::sort(key.first.begin(), key.first.end());
    for (int i = 0; i < p_.num_atoms(); ++i) {
      if (const auto &map = p_.atom(i).map_id)
        key.second.emplace_back(*map, image_[static_cast<std::size_t>(i)]);
    }
    std::sort(key.second.begin(), key.second.end());
    auto [it, inserted] = best_.try_emplace(std::move(key), image_);
    if (!inserted && image_ < it->second) it->second = image_;
  }

  const PatternGraph &p_;
  const chem::Molecule &m_;
  std::vector<int> order_;
  std::vector<int> parent_;
  std::vector<int> image_;
  std::vector<bool> used_;
  std::map<Key, std::vector<int>> best_;
};

struct PrecursorRef {
  int pattern;
  int atom;
};

chem::BondOrder concrete_order(PatternBondOrder order, bool aromatic_a, bool aromatic_b) {
  switch (order) {
  case PatternBondOrder::kSingle: return chem::BondOrder::kSingle;
  case PatternBondOrder::kDouble: return chem::BondOrder::kDouble;
  case PatternBondOrder::kTriple: return chem::BondOrder::kTriple;
  case PatternBondOrder::kAromatic: return chem::BondOrder::kAromatic;
  default:
    return aromatic_a && aromatic_b ? chem::BondOrder::kAromatic : chem::BondOrder::kSingle;
  }
}

bool is_specific(PatternBondOrder order) {
  return order != PatternBondOrder::kSingleOrAromatic && order != PatternBondOrder::kAny;
}

std::optional<chem::MoleculeSet> rewrite(const Template &t, const chem::Molecule &m,
                                         std::span<const int> embedding) {
  const int n = m.num_atoms();
  std::map<int, PrecursorRef> by_map;
  for (int p = 0; p < static_cast<int>(t.precursors.size()); ++p) {
    const PatternGraph &g = t.precursors[static_cast<std::size_t>(p)];
    for (int i = 0; i < g.num_atoms(); ++i) {
      if (const auto &map = g.atom(i).map_id) by_map[*map] = {p, i};
    }
  }
  auto precursor_atom = [&](const PrecursorRef &r) -> const AtomPattern & {
    return t.precursors[static_cast<std::size_t>(r.pattern)].atom(r.atom);
  };

  std::vector<chem::Atom> atoms(m.atoms().begin(), m.atoms().end());
  std::vector<bool> deleted(static_cast<std::size_t>(n), false);
  std::vector<std::optional<PrecursorRef>> ref(static_cast<std::size_t>(n));
  std::map<int, int> mol_of_map;
  for (int pa = 0; pa < t.product.num_atoms(); ++pa) {
    const int ma = embedding[static_cast<std::size_t>(pa)];
    const auto &map = t.product.atom(pa).map_id;
    if (!map || !by_map.contains(*map)) {
      deleted[static_cast<std::size_t>(ma)] = true;
      continue;
    }
    ref[static_cast<std::size_t>(ma)] = by_map.at(*map);
    mol_of_map[*map] = ma;
  }

  // Atom attributes first: concrete bond orders depend on final aromaticity.
  std::vector<bool> recompute(static_cast<std::size_t>(n), false);
  for (int ma = 0; ma < n; ++ma) {
    const auto &r = ref[static_cast<std::size_t>(ma)];
    if (!r) continue;
    const AtomPattern &pat = precursor_atom(*r);
    chem::Atom &a = atoms[static_cast<std::size_t>(ma)];
    if (pat.element && *pat.element != a.element) return std::nullopt;
    if (pat.charge && *pat.charge != a.charge) {
      a.charge = *pat.charge;
      recompute[static_cast<std::size_t>(ma)] = true;
    }
    if (pat.aromatic && *pat.aromatic != a.aromatic) {
      a.aromatic = *pat.aromatic;
      recompute[static_cast<std::size_t>(ma)] = true;
    }
  }

  std::vector<std::optional<chem::BondOrder>> bond_order(static_cast<std::size_t>(m.num_bonds()));
  for (int b = 0; b < m.num_bonds(); ++b) bond_order[static_cast<std::size_t>(b)] = m.bond(b).order;
  std::vector<chem::Bond> added;

  for (const PatternBond &pb : t.product.bonds()) {
    const int ma = embedding[static_cast<std::size_t>(pb.a)];
    const int mb = embedding[static_cast<std::size_t>(pb.b)];
    const int bond = *m.bond_between(ma, mb);
    const auto &ra = ref[static_cast<std::size_t>(ma)];
    const auto &rb = ref[static_cast<std::size_t>(mb)];
    if (!ra || !rb) continue;  // goes with the deleted atom
    std::optional<int> pre_bond;
    if (ra->pattern == rb->pattern)
      pre_bond = t.precursors[static_cast<std::size_t>(ra->pattern)].bond_between(ra->atom, rb->atom);
    if (!pre_bond) {
      bond_order[static_cast<std::size_t>(bond)].reset();
      continue;
    }
    const PatternBondOrder order =
        t.precursors[static_cast<std::size_t>(ra->pattern)].bond(*pre_bond).order;
    if (is_specific(order))
      bond_order[static_cast<std::size_t>(bond)] = concrete_order(order, false, false);
  }

  std::vector<std::optional<int>> fixed_h(static_cast<std::size_t>(n));
  for (int ma = 0; ma < n; ++ma) {
    if (const auto &r = ref[static_cast<std::size_t>(ma)])
      fixed_h[static_cast<std::size_t>(ma)] = precursor_atom(*r).hydrogens;
  }
  std::vector<std::vector<int>> local(t.precursors.size());
  for (std::size_t p = 0; p < t.precursors.size(); ++p) {
    const PatternGraph &g = t.precursors[p];
    local[p].assign(static_cast<std::size_t>(g.num_atoms()), -1);
    for (int i = 0; i < g.num_atoms(); ++i) {
      const AtomPattern &pat = g.atom(i);
      if (pat.map_id) {
        local[p][static_cast<std::size_t>(i)] = mol_of_map.at(*pat.map_id);
        continue;
      }
      chem::Atom a;
      a.element = *pat.element;
      a.charge = pat.charge.value_or(0);
      a.aromatic = pat.aromatic.value_or(false);
      local[p][static_cast<std::size_t>(i)] = static_cast<int>(atoms.size());
      atoms.push_back(a);
      deleted.push_back(false);
      recompute.push_back(true);
      fixed_h.push_back(pat.hydrogens);
    }
    for (const PatternBond &pb : g.bonds()) {
      const int a = local[p][static_cast<std::size_t>(pb.a)];
      const int b = local[p][static_cast<std::size_t>(pb.b)];
      if (a < n && b < n) {
        if (t.product.bond_between(*t.product.atom_with_map(*g.atom(pb.a).map_id),
                                   *t.product.atom_with_map(*g.atom(pb.b).map_id)))
          continue;  // handled with the product bonds
        if (const auto existing = m.bond_between(a, b)) {
          if (is_specific(pb.order))
            bond_order[static_cast<std::size_t>(*existing)] = concrete_order(pb.order, false, false);
          continue;
        }
      }
      added.push_back({a, b,
                       concrete_order(pb.order, atoms[static_cast<std::size_t>(a)].aromatic,
                                      atoms[static_cast<std::size_t>(b)].aromatic)});
    }
  }

  std::vector<chem::Bond> bonds;
  for (int b = 0; b < m.num_bonds(); ++b) {
    const chem::Bond &old = m.bond(b);
    if (!bond_order[static_cast<std::size_t>(b)]) continue;
    if (deleted[static_cast<std::size_t>(old.a)] || deleted[static_cast<std::size_t>(old.b)]) continue;
    bonds.push_back({old.a, old.b, *bond_order[static_cast<std::size_t>(b)]});
  }
  bonds.insert(bonds.end(), added.begin(), added.end());

  std::vector<int> new_sum(atoms.size(), 0);
  for (const chem::Bond &b : bonds) {
    new_sum[static_cast<std::size_t>(b.a)] += chem::bond_valence(b.order);
    new_sum[static_cast<std::size_t>(b.b)] += chem::bond_valence(b.order);
  }

  std::vector<int> index(atoms.size(), -1);
  std::vector<chem::Atom> kept;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (deleted[i]) continue;
    chem::Atom a = atoms[i];
    a.map_id.reset();
    if (fixed_h[i]) {
      a.hydrogens = *fixed_h[i];
    } else if (recompute[i]) {
      try {
        a.hydrogens = chem::implicit_hydrogens(a.element, a.charge, a.aromatic, new_sum[i]);
      } catch (const ValenceError &) {
        return std::nullopt;
      }
    } else {
      a.hydrogens += m.bond_valence_sum(static_cast<int>(i)) - new_sum[i];
      if (a.hydrogens < 0) return std::nullopt;
    }
    index[i] = static_cast<int>(kept.size());
    kept.push_back(a);
  }
  for (chem::Bond &b : bonds) {
    b.a = index[static_cast<std::size_t>(b.a)];
    b.b = index[static_cast<std::size_t>(b.b)];
  }
  if (kept.empty()) return std::nullopt;

  try {
    const chem::Molecule out(std::move(kept), std::move(bonds));
    if (!chem::chemically_valid(out)) return std::nullopt;
    return chem::MoleculeSet(chem::split_components(out));
  } catch (const SyntaxError &) {
    return std::nullopt;
  }
}

/// Atoms renumbered by canonical rank, so the embedding order (and with it
/// the max_matches cut) does not depend on how the input was numbered.
chem::Molecule canonically_ordered(const chem::Molecule &m) {
  const std::vector<int> rank = chem::canonical_atom_ranks(m);
  std::vector<chem::Atom> atoms(rank.size());
  for (int i = 0; i < m.num_atoms(); ++i) atoms[static_cast<std::size_t>(rank[static_cast<std::size_t>(i)])] = m.atom(i);
  std::vector<chem::Bond> bonds;
  for (const chem::Bond &b : m.bonds()) {
    const int a = rank[static_cast<std::size_t>(b.a)], c = rank[static_cast<std::size_t>(b.b)];
    bonds.push_back({std::min(a, c), std::max(a, c), b.order});
  }
  std::sort(bonds.begin(), bonds.end(), [](const chem::Bond &x, const chem::Bond &y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return chem::Molecule(std::move(atoms), std::move(bonds), m.provenance());
}

}  // namespace

std::vector<std::vector<int>> match_pattern(const PatternGraph &pattern,
                                            const chem::Molecule &m) {
  return Matcher(pattern, m).run();
}

std::vector<chem::MoleculeSet> apply_template(const Template &t, const chem::Molecule &input,
                                              int max_matches) {
  std::vector<chem::MoleculeSet> out;
  std::set<std::string> seen;
  const chem::Molecule m = canonically_ordered(input);
  const auto embeddings = match_pattern(t.product, m);
  const std::size_t limit =
      std::min(embeddings.size(), static_cast<std::size_t>(std::max(max_matches, 0)));
  for (std::size_t e = 0; e < limit; ++e) {
    auto result = rewrite(t, m, embeddings[e]);
    if (result && seen.insert(result->canonical_key()).second) out.push_back(std::move(*result));
  }
  return out;
}

}  // namespace mhnpath::templates
