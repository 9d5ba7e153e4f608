//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_TEMPLATES_TEMPLATE_HPP
#define MHNPATH_TEMPLATES_TEMPLATE_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mhnpath/chem/fingerprint.hpp"
#include "mhnpath/templates/pattern.hpp"

namespace mhnpath::templates {

enum class TemplateSource { kEnzymatic, kSynthetic };

/// "enz" or "syn".
std::string_view source_name(TemplateSource source);
/// Inverse of source_name; SyntaxError otherwise.
TemplateSource parse_source(std::string_view text);

/// Retro rule: product pattern >> precursor patterns. Graphs are stored in
/// canonical form (map ids renumbered 1..n in product output order, one
/// pattern per connected precursor component, precursors sorted by text).
struct Template {
  int id = -1;
  PatternGraph product;
  std::vector<PatternGraph> precursors;
  TemplateSource source = TemplateSource::kSynthetic;
  /// Enzyme class label; only enzymatic rules carry one.
  std::optional<int> enzyme;
  int support = 0;
  /// Canonical text, equal to serialize_template(*this).
  std::string text;
};

/// Parses "product>>precursors" in the SMARTS subset of parse_pattern and
/// canonicalizes it. Precursor map ids absent from the product mark
/// introduced atoms and are dropped; introduced atoms must name an element.
Template parse_template(std::string_view text);

/// Builds a canonical template from graphs (same rules as parse_template).
Template make_template(const PatternGraph &product,
                       const std::vector<PatternGraph> &precursors);

/// Canonical text. Two rules that differ only by map numbering, atom order
/// or precursor order serialize identically.
std::string serialize_template(const Template &t);

/// Circular fingerprint of the rule's pattern graphs (product and every
/// precursor), using the constraint tuple of each atom as its invariant.
/// Map ids do not contribute.
chem::Fingerprint template_fingerprint(const Template &t,
                                       int radius = chem::kDefaultRadius,
                                       int n_bits = chem::kDefaultFingerprintBits);

/// Bits a product molecule's fingerprint (same n_bits) must contain for the
/// rule to match it: the radius-0 identifiers of fully pinned product
/// pattern atoms.
std::vector<int> screen_bits(const Template &t, int n_bits);

}  // namespace mhnpath::templates

#endif  // MHNPATH_TEMPLATES_TEMPLATE_HPP
