//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_MHN_ENSEMBLE_HPP
#define MHNPATH_MHN_ENSEMBLE_HPP

#include <span>
#include <vector>

#include "mhnpath/chem/molecule.hpp"
#include "mhnpath/mhn/model.hpp"

namespace mhnpath::mhn {

/// True iff every required bit is set in fp. An empty requirement passes.
bool substructure_screen(const chem::Fingerprint &fp, std::span<const int> required_bits);
bool substructure_screen(const chem::Fingerprint &fp, const templates::Template &t);

/// Prioritizers sharing one template library, plus the per-template screen
/// bits of that library. Immutable after construction; concurrent ranking
/// is safe.
class Ensemble {
public:
  /// Throws ConfigError when models is empty, when members differ in
  /// fingerprint settings, or when a member was trained on another library
  /// (ChecksumError). Builds missing caches.
  Ensemble(std::vector<PrioritizerModel> models, const templates::TemplateLibrary &lib);

  std::span<const PrioritizerModel> models() const { return models_; }
  int num_templates() const { return models_.front().num_templates(); }
  int fp_bits() const { return models_.front().config().fp_bits; }
  int fp_radius() const { return models_.front().config().fp_radius; }
  const std::vector<int> &screen_bits(int template_id) const;

  chem::Fingerprint featurize(const chem::Molecule &m) const;

  /// Max over members of each template probability (length K).
  Eigen::VectorXd collated_scores(const chem::Fingerprint &fp) const;

private:
  std::vector<PrioritizerModel> models_;
  std::vector<std::vector<int>> screen_bits_;
};

struct RankedTemplate {
  int template_id = 0;
  double score = 0;
  friend bool operator==(const RankedTemplate &, const RankedTemplate &) = default;
};

/// Collated scores, optionally screened, sorted descending with ties by
/// ascending id, truncated to top_n. Throws ConfigError when top_n < 1.
std::vector<RankedTemplate> rank_templates(const Ensemble &e, const chem::Molecule &m, int top_n,
                                           bool screen);
std::vector<RankedTemplate> rank_templates(const Ensemble &e, const chem::Fingerprint &fp,
                                           int top_n, bool screen);

}  // namespace mhnpath::mhn

#endif  // MHNPATH_MHN_ENSEMBLE_HPP
