//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_SCORING_SCORING_HPP
#define MHNPATH_SCORING_SCORING_HPP

#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "mhnpath/conditions/conditions.hpp"
#include "mhnpath/pricing/pricing.hpp"

namespace mhnpath::scoring {

inline constexpr double kTempNormalizer = 300.0;
inline constexpr double kTempFloor = -100.0;

struct ScoreWeights {
  double w_cost = 1.0;
  double w_temp = 1.0;
  double w_solv = 1.0;
  /// Throws ConfigError unless all are finite, non-negative and not all zero.
  void validate() const;
};

/// Toxicity classes: -1 toxic, 0 neutral, +1 green. Unknown molecules are 0.
class ToxicityDB {
public:
  /// CSV: canonical_smiles,class,source with class in {-1,0,1} and source in
  /// {acs,supernatural,t3db,user}. Every bad row is reported in one
  /// SyntaxError.
  static ToxicityDB load(const std::filesystem::path &path);

  /// Throws DomainError for classes outside {-1, 0, 1}.
  void set(const std::string &smiles, int toxicity_class);
  int class_of(const std::string &canonical_smiles) const;
  std::size_t size() const { return classes_.size(); }

private:
  std::map<std::string, int> classes_;
};

/// -cost/cap. Throws DomainError unless 0 <= cost <= cap.
double cost_score(double cost, double cap = pricing::kNonBuyableCap);
/// -t/300 with t clamped to [-100, 300] first.
double temp_score(double temperature_c);
/// Mean class over all solvents and reagents; 0 when there are none.
double solvent_score(const conditions::ReactionConditions &c, const ToxicityDB &db);
double composite_score(double cost, double temp, double solv, const ScoreWeights &w);

/// Summed effective cost of a precursor set, clamped to the cap.
double set_cost(std::span<const double> effective_costs, double cap = pricing::kNonBuyableCap);

}  // namespace mhnpath::scoring

#endif  // MHNPATH_SCORING_SCORING_HPP
