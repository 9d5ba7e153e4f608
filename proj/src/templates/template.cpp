//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/templates/template.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mhnpath/errors.hpp"
#include "mhnpath/util/hash.hpp"

namespace mhnpath::templates {
namespace {

struct Sides {
  std::string_view product;
  std::string_view precursors;
};

Sides split_arrow(std::string_view text) {
  const auto arrow = text.find(">>");
  if (arrow == std::string_view::npos) {
    if (text.find('>') != std::string_view::npos)
      throw UnsupportedPrimitive("reaction agents ('>x>') are not supported");
    throw SyntaxError("template needs exactly one '>>'");
  }
  const Sides sides{text.substr(0, arrow), text.substr(arrow + 2)};
  if (sides.product.find('>') != std::string_view::npos ||
      sides.precursors.find('>') != std::string_view::npos)
    throw SyntaxError("template needs exactly one '>>'");
  if (sides.product.empty()) throw SyntaxError("empty product side");
  if (sides.precursors.empty()) throw SyntaxError("empty precursor side");
  return sides;
}

template <typename F>
auto with_side(const char *side, F &&parse) {
  try {
    return parse();
  } catch (const UnsupportedPrimitive &e) {
    throw UnsupportedPrimitive(std::string(side) + ": " + e.what());
  } catch (const SyntaxError &e) {
    throw SyntaxError(std::string(side) + ": " + e.what());
  }
}

std::vector<int> compress(std::span<const int> ranks) {
  std::vector<int> order(ranks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return ranks[static_cast<std::size_t>(a)] < ranks[static_cast<std::size_t>(b)];
  });
  std::vector<int> out(ranks.size());
  for (std::size_t r = 0; r < order.size(); ++r) out[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  return out;
}

// Product and precursor patterns are ranked together as one graph in which
// each mapped product atom is linked to its precursor counterpart, so
// product symmetries are only collapsed when the precursors agree.
std::string canonical_text(const PatternGraph &product,
                           const std::vector<PatternGraph> &precursors) {
  constexpr int kMapLink = 100;
  chem::LabeledGraph combined;
  std::vector<int> offset;
  int bond_id = 0;
  auto append = [&](const PatternGraph &g, const char *side) {
    const int base = combined.size();
    offset.push_back(base);
    combined.adjacency.resize(static_cast<std::size_t>(base + g.num_atoms()));
    for (int i = 0; i < g.num_atoms(); ++i)
      combined.vertex_labels.push_back(side + g.atom(i).to_smarts(false));
    for (const PatternBond &b : g.bonds()) {
      const int label = static_cast<int>(b.order);
      combined.adjacency[static_cast<std::size_t>(base + b.a)].push_back({base + b.b, bond_id, label});
      combined.adjacency[static_cast<std::size_t>(base + b.b)].push_back({base + b.a, bond_id, label});
      ++bond_id;
    }
  };
  append(product, "P");
  for (const PatternGraph &p : precursors) append(p, "R");
  for (std::size_t k = 0; k < precursors.size(); ++k) {
    const PatternGraph &p = precursors[k];
    for (int i = 0; i < p.num_atoms(); ++i) {
      const auto &map = p.atom(i).map_id;
      if (!map) continue;
      const auto target = product.atom_with_map(*map);
      if (!target) continue;
      const int u = offset[k + 1] + i;
      combined.adjacency[static_cast<std::size_t>(u)].push_back({*target, bond_id, kMapLink});
      combined.adjacency[static_cast<std::size_t>(*target)].push_back({u, bond_id, kMapLink});
      ++bond_id;
    }
  }

  const chem::LabeledGraph product_lg = labeled_graph(product, false);
  std::vector<chem::LabeledGraph> precursor_lg;
  for (const PatternGraph &p : precursors) precursor_lg.push_back(labeled_graph(p, false));

  auto build = [&](std::span<const int> ranks) {
    std::map<int, int> renumber;
    const std::string head = write_pattern(
        product, product_lg, compress(ranks.subspan(0, static_cast<std::size_t>(product.num_atoms()))),
        [&](int v) {
          AtomPattern a = product.atom(v);
          if (a.map_id) {
            const int fresh = static_cast<int>(renumber.size()) + 1;
            renumber[*a.map_id] = fresh;
            a.map_id = fresh;
          }
          return a.to_smarts(true);
        });
    std::vector<std::string> parts;
    for (std::size_t k = 0; k < precursors.size(); ++k) {
      const PatternGraph &p = precursors[k];
      const auto slice = ranks.subspan(static_cast<std::size_t>(offset[k + 1]),
                                       static_cast<std::size_t>(p.num_atoms()));
      parts.push_back(write_pattern(p, precursor_lg[k], compress(slice), [&](int v) {
        AtomPattern a = p.atom(v);
        if (a.map_id) a.map_id = renumber.at(*a.map_id);
        return a.to_smarts(true);
      }));
    }
    std::sort(parts.begin(), parts.end());
    std::string out = head + ">>";
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) out += '.';
      out += parts[i];
    }
    return out;
  };
  return build(chem::canonical_ranks(combined, build));
}

std::uint64_t constraint_id(const AtomPattern &a) {
  std::uint64_t h = util::hash_combine(chem::kFingerprintSeed, 0x5054524e);  // "PTRN"
  auto field = [&](const std::optional<int> &v) {
    h = util::hash_combine(h, v ? static_cast<std::uint64_t>(*v) + 1024 : 0);
  };
  field(a.element);
  field(a.charge);
  field(a.degree);
  field(a.hydrogens);
  field(a.aromatic ? std::optional<int>(*a.aromatic ? 1 : 0) : std::nullopt);
  return h;
}

}  // namespace

std::string_view source_name(TemplateSource source) {
  return source == TemplateSource::kEnzymatic ? "enz" : "syn";
}

TemplateSource parse_source(std::string_view text) {
  if (text == "enz") return TemplateSource::kEnzymatic;
  if (text == "syn") return TemplateSource::kSynthetic;
  throw SyntaxError("source must be 'enz' or 'syn', got '" + std::string(text) + "'");
}

Template make_template(const PatternGraph &product,
                       const std::vector<PatternGraph> &precursors) {
  if (product.empty()) throw SyntaxError("empty product pattern");
  if (precursors.empty()) throw SyntaxError("template has no precursor pattern");

  std::set<int> product_maps;
  for (const AtomPattern &a : product.atoms()) {
    if (a.map_id) product_maps.insert(*a.map_id);
  }
  std::set<int> seen;
  std::vector<PatternGraph> cleaned;
  for (const PatternGraph &p : precursors) {
    std::vector<AtomPattern> atoms(p.atoms().begin(), p.atoms().end());
    for (AtomPattern &a : atoms) {
      if (a.map_id && !seen.insert(*a.map_id).second)
        throw SyntaxError("atom map " + std::to_string(*a.map_id) +
                          " used twice on the precursor side");
      if (a.map_id && !product_maps.contains(*a.map_id)) a.map_id.reset();
      if (!a.map_id && !a.element)
        throw SyntaxError("introduced precursor atom " + a.to_smarts() +
                          " must name an element");
    }
    for (PatternGraph &c :
         PatternGraph(std::move(atoms), {p.bonds().begin(), p.bonds().end()}).components())
      cleaned.push_back(std::move(c));
  }

  Template t;
  t.text = canonical_text(product, cleaned);
  const Sides sides = split_arrow(t.text);
  t.product = parse_pattern(sides.product);
  t.precursors = parse_pattern(sides.precursors).components();
  return t;
}

Template parse_template(std::string_view text) {
  const Sides sides = split_arrow(text);
  PatternGraph product = with_side("product", [&] { return parse_pattern(sides.product); });
  PatternGraph precursors =
      with_side("precursors", [&] { return parse_pattern(sides.precursors); });
  return make_template(product, precursors.components());
}

std::string serialize_template(const Template &t) {
  return canonical_text(t.product, t.precursors);
}

chem::Fingerprint template_fingerprint(const Template &t, int radius, int n_bits) {
  chem::Fingerprint fp(n_bits, radius);
  auto add = [&](const PatternGraph &g) {
    std::vector<std::uint64_t> initial;
    std::vector<std::vector<chem::EnvironmentEdge>> adjacency(
        static_cast<std::size_t>(g.num_atoms()));
    for (int i = 0; i < g.num_atoms(); ++i) {
      initial.push_back(constraint_id(g.atom(i)));
      for (const chem::Neighbor &nb : g.neighbors(i)) {
        adjacency[static_cast<std::size_t>(i)].push_back(
            {nb.atom, static_cast<int>(g.bond(nb.bond).order)});
      }
    }
    fp.merge(chem::fold_identifiers(chem::circular_identifiers(initial, adjacency, radius),
                                    n_bits, radius));
  };
  add(t.product);
  for (const PatternGraph &p : t.precursors) add(p);
  return fp;
}

std::vector<int> screen_bits(const Template &t, int n_bits) {
  std::set<int> bits;
  for (int i = 0; i < t.product.num_atoms(); ++i) {
    const AtomPattern &a = t.product.atom(i);
    if (!a.fully_pinned()) continue;
    const std::uint64_t id =
        chem::atom_invariant_id(*a.element, *a.charge, *a.degree, *a.hydrogens, *a.aromatic);
    bits.insert(static_cast<int>(id % static_cast<std::uint64_t>(n_bits)));
  }
  return {bits.begin(), bits.end()};
}

}  // namespace mhnpath::templates
