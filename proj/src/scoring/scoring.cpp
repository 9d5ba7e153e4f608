//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/scoring/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"
#include "mhnpath/util/text.hpp"

namespace mhnpath::scoring {

void ScoreWeights::validate() const {
  for (double w : {w_cost, w_temp, w_solv})
    if (!(w >= 0) || !std::isfinite(w)) throw ConfigError("score weights must be finite and >= 0");
  if (w_cost == 0 && w_temp == 0 && w_solv == 0) throw ConfigError("score weights are all zero");
}

ToxicityDB ToxicityDB::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open toxicity table " + path.string());
  std::string line;
  if (!std::getline(in, line) || util::trim(line) != "canonical_smiles,class,source")
    throw SyntaxError(path.string() + ":1: header must be canonical_smiles,class,source");
  ToxicityDB db;
  std::string errors;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    try {
      const auto f = util::split(util::trim(line), ',');
      if (f.size() != 3) throw SyntaxError("expected 3 fields");
      const auto cls = util::parse_number<int>(f[1]);
      if (!cls) throw SyntaxError("bad class '" + f[1] + "'");
      if (f[2] != "acs" && f[2] != "supernatural" && f[2] != "t3db" && f[2] != "user")
        throw SyntaxError("unknown source '" + f[2] + "'");
      db.set(chem::write_canonical_smiles(chem::parse_smiles(f[0])), *cls);
    } catch (const Error &e) {
      errors += path.string() + ":" + std::to_string(line_no) + ": " + e.what() + "\n";
    }
  }
  if (!errors.empty()) throw SyntaxError(errors);
  return db;
}

void ToxicityDB::set(const std::string &smiles, int toxicity_class) {
  if (toxicity_class < -1 || toxicity_class > 1)
    throw DomainError("toxicity class must be -1, 0 or 1");
  classes_[smiles] = toxicity_class;
}

int ToxicityDB::class_of(const std::string &canonical_smiles) const {
  const auto it = classes_.find(canonical_smiles);
  return it == classes_.end() ? 0 : it->second;
}

double cost_score(double cost, double cap) {
  if (!(cost >= 0 && cost <= cap)) throw DomainError("cost must lie in [0, cap]");
  return -cost / cap;
}

double temp_score(double temperature_c) {
  return -std::clamp(temperature_c, kTempFloor, kTempNormalizer) / kTempNormalizer;
}

double solvent_score(const conditions::ReactionConditions &c, const ToxicityDB &db) {
  const std::size_t n = c.solvents.size() + c.reagents.size();
  if (n == 0) return 0.0;
  int sum = 0;
  for (const std::string &s : c.solvents) sum += db.class_of(s);
  for (const std::string &s : c.reagents) sum += db.class_of(s);
  return static_cast<double>(sum) / static_cast<double>(n);
}

double composite_score(double cost, double temp, double solv, const ScoreWeights &w) {
  return w.w_cost * cost + w.w_temp * temp + w.w_solv * solv;
}

double set_cost(std::span<const double> effective_costs, double cap) {
  return std::min(std::accumulate(effective_costs.begin(), effective_costs.end(), 0.0), cap);
}

}  // namespace mhnpath::scoring
