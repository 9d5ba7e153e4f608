//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_TEMPLATES_LIBRARY_HPP
#define MHNPATH_TEMPLATES_LIBRARY_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mhnpath/templates/extract.hpp"
#include "mhnpath/templates/template.hpp"

namespace mhnpath::templates {

/// Ordered rule set with dense ids 0..K-1 and unique canonical texts.
class TemplateLibrary {
public:
  /// Adds a rule and returns its id. A rule whose canonical text is already
  /// present is merged into the existing entry (support is summed).
  int add(Template t);

  const Template &at(int id) const;
  std::span<const Template> templates() const { return templates_; }
  int size() const { return static_cast<int>(templates_.size()); }
  bool empty() const { return templates_.empty(); }
  std::optional<int> find(const std::string &canonical_text) const;

  /// FNV-1a over the canonical texts in id order; binds trained models to
  /// the library they were trained against.
  std::uint64_t checksum() const;

  /// TSV with header id, rule_text, source, enzyme_id, support. Every bad
  /// row (parse error, unsupported primitive, non-dense id, duplicate rule)
  /// is collected and reported in one LibraryLoadError.
  static TemplateLibrary load(const std::filesystem::path &path);
  void save(const std::filesystem::path &path) const;

private:
  std::vector<Template> templates_;
  std::map<std::string, int> index_;
};

struct ExtractionReport {
  TemplateLibrary library;
  /// Template id per input reaction; -1 when extraction failed.
  std::vector<int> template_of;
  /// One line per failed reaction: "<row>: <reason>".
  std::vector<std::string> failures;
};

/// Extracts one rule per reaction and collects them into a library.
ExtractionReport extract_library(const std::vector<ReactionRecord> &reactions,
                                 int env_radius = kDefaultEnvRadius);

}  // namespace mhnpath::templates

#endif  // MHNPATH_TEMPLATES_LIBRARY_HPP
