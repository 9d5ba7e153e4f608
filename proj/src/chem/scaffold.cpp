//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/chem/scaffold.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"
#include "mhnpath/util/random.hpp"

namespace mhnpath::chem {

Molecule murcko_scaffold(const Molecule &m) {
  const std::vector<bool> ring = m.ring_atoms();
  std::vector<bool> removed(static_cast<std::size_t>(m.num_atoms()), false);
  std::vector<int> degree(static_cast<std::size_t>(m.num_atoms()));
  for (int i = 0; i < m.num_atoms(); ++i) degree[static_cast<std::size_t>(i)] = m.degree(i);
  std::vector<Atom> atoms(m.atoms().begin(), m.atoms().end());

  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < m.num_atoms(); ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (removed[ui] || ring[ui] || degree[ui] > 1) continue;
      removed[ui] = true;
      changed = true;
      for (const Neighbor &nb : m.neighbors(i)) {
        const auto un = static_cast<std::size_t>(nb.atom);
        if (removed[un]) continue;
        --degree[un];
        atoms[un].hydrogens += bond_valence(m.bond(nb.bond).order);
      }
    }
  }

  std::vector<int> keep;
  for (int i = 0; i < m.num_atoms(); ++i) {
    if (!removed[static_cast<std::size_t>(i)]) keep.push_back(i);
  }
  if (keep.empty()) return Molecule();
  Molecule adjusted(std::move(atoms), {m.bonds().begin(), m.bonds().end()},
                    m.provenance());
  return adjusted.induced(keep);
}

std::vector<std::vector<std::size_t>> scaffold_split(
    const std::vector<Molecule> &molecules, int k, std::uint64_t seed) {
  if (molecules.empty()) throw EmptyInput("scaffold_split needs at least one molecule");
  if (k < 2) throw ConfigError("scaffold_split needs k >= 2");

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < molecules.size(); ++i)
    groups[write_canonical_smiles(murcko_scaffold(molecules[i]))].push_back(i);

  std::vector<std::vector<std::size_t>> ordered;
  for (auto &[key, members] : groups) ordered.push_back(std::move(members));
  util::Rng rng(seed);
  rng.shuffle(ordered);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto &a, const auto &b) { return a.size() > b.size(); });

  std::vector<std::vector<std::size_t>> parts(static_cast<std::size_t>(k));
  for (const auto &group : ordered) {
    auto smallest = std::min_element(parts.begin(), parts.end(),
                                     [](const auto &a, const auto &b) {
                                       return a.size() < b.size();
                                     });
    smallest->insert(smallest->end(), group.begin(), group.end());
  }
  for (auto &p : parts) std::sort(p.begin(), p.end());
  return parts;
}

std::vector<MoleculeRecord> read_molecule_list(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open molecule list " + path.string());
  std::vector<MoleculeRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::string smiles = line.substr(first, last - first + 1);
    try {
      Molecule m = parse_smiles(smiles);
      out.push_back({std::move(smiles), std::move(m)});
    } catch (const Error &e) {
      throw SyntaxError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_molecule_list(const std::filesystem::path &path,
                         const std::vector<std::string> &smiles) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const std::string &s : smiles) out << s << '\n';
}

}  // namespace mhnpath::chem
