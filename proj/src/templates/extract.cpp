//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/templates/extract.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "mhnpath/chem/elements.hpp"
#include "mhnpath/errors.hpp"
#include "mhnpath/util/text.hpp"

namespace mhnpath::templates {
namespace {

struct Site {
  int member;
  int atom;
};

using Signature = std::vector<std::pair<int, int>>;  // (neighbor map or -1, order)

Signature signature(const chem::Molecule &m, int atom, const std::set<int> &kept_maps) {
  Signature sig;
  for (const chem::Neighbor &nb : m.neighbors(atom)) {
    const auto &map = m.atom(nb.atom).map_id;
    const int key = map && kept_maps.contains(*map) ? *map : -1;
    sig.emplace_back(key, static_cast<int>(m.bond(nb.bond).order));
  }
  std::sort(sig.begin(), sig.end());
  return sig;
}

AtomPattern pinned(const chem::Molecule &m, int atom, bool with_degree) {
  const chem::Atom &a = m.atom(atom);
  AtomPattern p;
  p.element = a.element;
  p.aromatic = a.aromatic;
  p.hydrogens = a.hydrogens;
  p.charge = a.charge;
  if (with_degree) p.degree = m.degree(atom);
  p.map_id = a.map_id;
  return p;
}

PatternGraph induced_pattern(const chem::Molecule &m, const std::vector<int> &atoms,
                             bool with_degree, const std::set<int> &kept_maps) {
  std::vector<int> local(static_cast<std::size_t>(m.num_atoms()), -1);
  std::vector<AtomPattern> patterns;
  for (int a : atoms) {
    local[static_cast<std::size_t>(a)] = static_cast<int>(patterns.size());
    AtomPattern p = pinned(m, a, with_degree);
    if (p.map_id && !kept_maps.contains(*p.map_id)) p.map_id.reset();
    patterns.push_back(p);
  }
  std::vector<PatternBond> bonds;
  for (const chem::Bond &b : m.bonds()) {
    const int la = local[static_cast<std::size_t>(b.a)];
    const int lb = local[static_cast<std::size_t>(b.b)];
    if (la >= 0 && lb >= 0)
      bonds.push_back({la, lb, static_cast<PatternBondOrder>(static_cast<int>(b.order))});
  }
  return PatternGraph(std::move(patterns), std::move(bonds));
}

std::string describe(const chem::Molecule &m, int atom) {
  return "atom " + std::to_string(atom) + " (" +
         std::string(chem::element_symbol(m.atom(atom).element)) + ")";
}

std::set<int> product_maps(const MappedReaction &r) {
  std::set<int> maps;
  for (int i = 0; i < r.product.num_atoms(); ++i) {
    const auto &map = r.product.atom(i).map_id;
    if (!map) throw UnmappedAtomError("product " + describe(r.product, i) + " has no map number");
    maps.insert(*map);
  }
  return maps;
}

bool contributes(const chem::Molecule &m, const std::set<int> &maps) {
  return std::any_of(m.atoms().begin(), m.atoms().end(), [&](const chem::Atom &a) {
    return a.map_id && maps.contains(*a.map_id);
  });
}

}  // namespace

MappedReaction parse_mapped_reaction(std::string_view reaction_smiles) {
  const auto first = reaction_smiles.find('>');
  const auto last = reaction_smiles.rfind('>');
  if (first == std::string_view::npos || first == last)
    throw SyntaxError("reaction SMILES needs 'reactants>>product'");
  if (reaction_smiles.substr(first + 1, last - first - 1).find('>') != std::string_view::npos)
    throw SyntaxError("too many '>' in reaction SMILES");
  const auto lhs = reaction_smiles.substr(0, first);
  const auto rhs = reaction_smiles.substr(last + 1);
  chem::MoleculeSet product = chem::parse_smiles_set(rhs);
  if (product.size() != 1)
    throw SyntaxError("reaction must have exactly one product, got " +
                      std::to_string(product.size()));
  return {chem::parse_smiles_set(lhs), product.members().front(), std::string(reaction_smiles)};
}

Template extract_template(const MappedReaction &r, int env_radius) {
  if (env_radius < 0) throw ConfigError("env_radius must be >= 0");
  const std::set<int> kept = product_maps(r);

  std::map<int, Site> site;
  for (int mi = 0; mi < static_cast<int>(r.reactants.size()); ++mi) {
    const chem::Molecule &m = r.reactants.members()[static_cast<std::size_t>(mi)];
    for (int a = 0; a < m.num_atoms(); ++a) {
      const auto &map = m.atom(a).map_id;
      if (map && !site.try_emplace(*map, Site{mi, a}).second)
        throw SyntaxError("map number " + std::to_string(*map) + " used twice among reactants");
    }
  }

  const chem::Molecule &p = r.product;
  std::vector<bool> changed(static_cast<std::size_t>(p.num_atoms()), false);
  bool any = false;
  for (int i = 0; i < p.num_atoms(); ++i) {
    const int map = *p.atom(i).map_id;
    const auto it = site.find(map);
    if (it == site.end())
      throw UnmappedAtomError("product " + describe(p, i) + " with map " + std::to_string(map) +
                              " has no reactant counterpart");
    const chem::Molecule &m = r.reactants.members()[static_cast<std::size_t>(it->second.member)];
    const chem::Atom &ra = m.atom(it->second.atom);
    const chem::Atom &pa = p.atom(i);
    const bool differs = ra.element != pa.element || ra.charge != pa.charge ||
                         ra.hydrogens != pa.hydrogens || ra.aromatic != pa.aromatic ||
                         signature(m, it->second.atom, kept) != signature(p, i, kept);
    changed[static_cast<std::size_t>(i)] = differs;
    any = any || differs;
  }
  if (!any) throw NoChangeError("no atom changes between reactants and product");

  std::vector<int> dist(static_cast<std::size_t>(p.num_atoms()), -1);
  std::vector<int> queue;
  for (int i = 0; i < p.num_atoms(); ++i) {
    if (changed[static_cast<std::size_t>(i)]) {
      dist[static_cast<std::size_t>(i)] = 0;
      queue.push_back(i);
    }
  }
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const int v = queue[q];
    if (dist[static_cast<std::size_t>(v)] == env_radius) continue;
    for (const chem::Neighbor &nb : p.neighbors(v)) {
      if (dist[static_cast<std::size_t>(nb.atom)] >= 0) continue;
      dist[static_cast<std::size_t>(nb.atom)] = dist[static_cast<std::size_t>(v)] + 1;
      queue.push_back(nb.atom);
    }
  }
  std::vector<int> center;
  std::set<int> center_maps;
  for (int i = 0; i < p.num_atoms(); ++i) {
    if (dist[static_cast<std::size_t>(i)] < 0) continue;
    center.push_back(i);
    center_maps.insert(*p.atom(i).map_id);
  }
  const PatternGraph product_pattern = induced_pattern(p, center, true, center_maps);

  std::vector<PatternGraph> precursors;
  for (const chem::Molecule &m : r.reactants.members()) {
    if (!contributes(m, kept)) continue;
    std::vector<int> atoms;
    for (int a = 0; a < m.num_atoms(); ++a) {
      const auto &map = m.atom(a).map_id;
      if (!map || !kept.contains(*map) || center_maps.contains(*map)) atoms.push_back(a);
    }
    if (atoms.empty()) continue;
    for (PatternGraph &c : induced_pattern(m, atoms, false, center_maps).components())
      precursors.push_back(std::move(c));
  }
  return make_template(product_pattern, precursors);
}

chem::MoleculeSet contributing_reactants(const MappedReaction &r) {
  const std::set<int> kept = product_maps(r);
  std::vector<chem::Molecule> out;
  for (const chem::Molecule &m : r.reactants.members()) {
    if (contributes(m, kept)) out.push_back(m.without_maps());
  }
  if (out.empty()) throw UnmappedAtomError("no reactant contributes atoms to the product");
  return chem::MoleculeSet(std::move(out));
}

std::vector<ReactionRecord> read_reactions(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open reaction table " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw SyntaxError(path.string() + ": empty file");
  const auto header = util::split(util::trim(line), '\t');
  if (header.size() < 2 || header[0] != "reaction_smiles" || header[1] != "source" ||
      (header.size() > 2 && header[2] != "enzyme_id") || header.size() > 3)
    throw SyntaxError(path.string() +
                      ":1: header must be reaction_smiles<TAB>source[<TAB>enzyme_id]");

  std::vector<ReactionRecord> out;
  std::string errors;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    const auto fields = util::split(util::trim(line), '\t');
    try {
      if (fields.size() != header.size())
        throw SyntaxError("expected " + std::to_string(header.size()) + " fields");
      ReactionRecord rec{parse_mapped_reaction(fields[0]), parse_source(fields[1]), {}};
      if (fields.size() > 2 && !fields[2].empty()) {
        rec.enzyme = util::parse_number<int>(fields[2]);
        if (!rec.enzyme) throw SyntaxError("bad enzyme_id '" + fields[2] + "'");
      }
      out.push_back(std::move(rec));
    } catch (const Error &e) {
      errors += path.string() + ":" + std::to_string(line_no) + ": " + e.what() + "\n";
    }
  }
  if (!errors.empty()) throw SyntaxError(errors);
  return out;
}

}  // namespace mhnpath::templates
