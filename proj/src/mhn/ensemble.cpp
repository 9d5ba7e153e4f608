//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/mhn/ensemble.hpp"

#include <algorithm>

#include "mhnpath/errors.hpp"
#include "mhnpath/templates/template.hpp"

namespace mhnpath::mhn {

bool substructure_screen(const chem::Fingerprint &fp, std::span<const int> required_bits) {
  return std::all_of(required_bits.begin(), required_bits.end(),
                     [&](int bit) { return bit < fp.n_bits() && fp.test(bit); });
}

bool substructure_screen(const chem::Fingerprint &fp, const templates::Template &t) {
  const std::vector<int> bits = templates::screen_bits(t, fp.n_bits());
  return substructure_screen(fp, bits);
}

Ensemble::Ensemble(std::vector<PrioritizerModel> models, const templates::TemplateLibrary &lib)
    : models_(std::move(models)) {
  if (models_.empty()) throw ConfigError("an ensemble needs at least one model");
  const ModelConfig &first = models_.front().config();
  for (PrioritizerModel &m : models_) {
    if (m.library_checksum() != lib.checksum())
      throw ChecksumError("ensemble member was trained on a different template library");
    if (m.config().fp_bits != first.fp_bits || m.config().fp_radius != first.fp_radius)
      throw ConfigError("ensemble members must share fp_bits and fp_radius");
    if (!m.cache_built()) m.build_cache();
  }
  screen_bits_.reserve(static_cast<std::size_t>(lib.size()));
  for (const templates::Template &t : lib.templates())
    screen_bits_.push_back(templates::screen_bits(t, first.fp_bits));
}

const std::vector<int> &Ensemble::screen_bits(int template_id) const {
  if (template_id < 0 || template_id >= num_templates())
    throw IdOutOfRange("template id " + std::to_string(template_id) + " outside the library");
  return screen_bits_[static_cast<std::size_t>(template_id)];
}

chem::Fingerprint Ensemble::featurize(const chem::Molecule &m) const {
  return chem::fingerprint(m, fp_radius(), fp_bits());
}

Eigen::VectorXd Ensemble::collated_scores(const chem::Fingerprint &fp) const {
  Eigen::VectorXd best = forward(models_.front(), fp);
  for (std::size_t i = 1; i < models_.size(); ++i) best = best.cwiseMax(forward(models_[i], fp));
  return best;
}

std::vector<RankedTemplate> rank_templates(const Ensemble &e, const chem::Fingerprint &fp,
                                           int top_n, bool screen) {
  if (top_n < 1) throw ConfigError("top_n must be >= 1");
  const Eigen::VectorXd scores = e.collated_scores(fp);
  std::vector<RankedTemplate> out;
  for (int k = 0; k < scores.size(); ++k)
    if (!screen || substructure_screen(fp, e.screen_bits(k))) out.push_back({k, scores(k)});
  const auto by_score = [](const RankedTemplate &a, const RankedTemplate &b) {
    return a.score != b.score ? a.score > b.score : a.template_id < b.template_id;
  };
  if (out.size() > static_cast<std::size_t>(top_n)) {
    std::partial_sort(out.begin(), out.begin() + top_n, out.end(), by_score);
    out.resize(static_cast<std::size_t>(top_n));
  } else {
    std::sort(out.begin(), out.end(), by_score);
  }
  return out;
}

std::vector<RankedTemplate> rank_templates(const Ensemble &e, const chem::Molecule &m, int top_n,
                                           bool screen) {
  return rank_templates(e, e.featurize(m), top_n, screen);
}

}  // namespace mhnpath::mhn
