//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/templates/library.hpp"

#include <fstream>

#include "mhnpath/errors.hpp"
#include "mhnpath/util/hash.hpp"
#include "mhnpath/util/text.hpp"

namespace mhnpath::templates {

int TemplateLibrary::add(Template t) {
  if (const auto it = index_.find(t.text); it != index_.end()) {
    templates_[static_cast<std::size_t>(it->second)].support += t.support;
    return it->second;
  }
  const int id = size();
  t.id = id;
  index_.emplace(t.text, id);
  templates_.push_back(std::move(t));
  return id;
}

const Template &TemplateLibrary::at(int id) const {
  if (id < 0 || id >= size())
    throw IdOutOfRange("template id " + std::to_string(id) + " outside [0, " +
                       std::to_string(size()) + ")");
  return templates_[static_cast<std::size_t>(id)];
}

std::optional<int> TemplateLibrary::find(const std::string &canonical_text) const {
  const auto it = index_.find(canonical_text);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t TemplateLibrary::checksum() const {
  std::uint64_t h = util::fnv1a64("mhnpath-library");
  for (const Template &t : templates_) {
    h = util::fnv1a64(t.text, h);
    h = util::fnv1a64("\n", h);
  }
  return h;
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open template library " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      util::trim(line) != "id\trule_text\tsource\tenzyme_id\tsupport")
    throw LibraryLoadError(path.string() +
                           ":1: header must be id, rule_text, source, enzyme_id, support");

  TemplateLibrary lib;
  std::string errors;
  int line_no = 1;
  int expected_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    const auto fields = util::split(util::trim(line), '\t');
    try {
      if (fields.size() != 5) throw SyntaxError("expected 5 fields, got " + std::to_string(fields.size()));
      const auto id = util::parse_number<int>(fields[0]);
      if (!id) throw SyntaxError("bad id '" + fields[0] + "'");
      if (*id != expected_id)
        throw SyntaxError("id " + fields[0] + " breaks the dense sequence (expected " +
                          std::to_string(expected_id) + ")");
      ++expected_id;
      Template t = parse_template(fields[1]);
      t.source = parse_source(fields[2]);
      const auto enzyme = util::parse_number<int>(fields[3]);
      if (!enzyme || *enzyme < 0) throw SyntaxError("bad enzyme_id '" + fields[3] + "'");
      if (*enzyme > 0) t.enzyme = *enzyme;
      const auto support = util::parse_number<int>(fields[4]);
      if (!support || *support < 0) throw SyntaxError("bad support '" + fields[4] + "'");
      t.support = *support;
      if (const auto dup = lib.find(t.text))
        throw SyntaxError("duplicate of rule " + std::to_string(*dup) + " (" + t.text + ")");
      if (errors.empty()) lib.add(std::move(t));
    } catch (const Error &e) {
      errors += path.string() + ":" + std::to_string(line_no) + ": " + e.what() + "\n";
    }
  }
  if (!errors.empty()) throw LibraryLoadError(errors);
  return lib;
}

void TemplateLibrary::save(const std::filesystem::path &path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "id\trule_text\tsource\tenzyme_id\tsupport\n";
  for (const Template &t : templates_) {
    out << t.id << '\t' << t.text << '\t' << source_name(t.source) << '\t'
        << t.enzyme.value_or(0) << '\t' << t.support << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

ExtractionReport extract_library(const std::vector<ReactionRecord> &reactions, int env_radius) {
  ExtractionReport report;
  for (std::size_t i = 0; i < reactions.size(); ++i) {
    const ReactionRecord &rec = reactions[i];
    try {
      Template t = extract_template(rec.reaction, env_radius);
      t.source = rec.source;
      t.enzyme = rec.enzyme;
      t.support = 1;
      report.template_of.push_back(report.library.add(std::move(t)));
    } catch (const Error &e) {
      report.template_of.push_back(-1);
      report.failures.push_back(std::to_string(i) + ": " + e.what());
    }
  }
  return report;
}

}  // namespace mhnpath::templates
