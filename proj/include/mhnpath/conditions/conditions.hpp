//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_CONDITIONS_CONDITIONS_HPP
#define MHNPATH_CONDITIONS_CONDITIONS_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mhnpath::conditions {

inline constexpr double kDefaultTemperatureC = 25.0;
inline constexpr int kDefaultTopK = 10;

enum class Provenance { kTable, kDefault, kExternal };

std::string_view provenance_name(Provenance p);

/// Temperatures are in degrees Celsius throughout.
struct ReactionConditions {
  double temperature_c = kDefaultTemperatureC;
  std::vector<std::string> solvents;
  std::vector<std::string> reagents;
  Provenance provenance = Provenance::kDefault;

  friend bool operator==(const ReactionConditions &, const ReactionConditions &) = default;
};

struct Candidate {
  ReactionConditions conditions;
  double weight = 1.0;

  friend bool operator==(const Candidate &, const Candidate &) = default;
};

inline double celsius_to_kelvin(double c) { return c + 273.15; }

/// Weighted mean temperature of the first min(k, size) candidates.
/// Throws EmptyCandidates when there are none, DomainError when k < 1 or
/// the used weights do not sum to a positive value.
double aggregate_temperature(std::span<const Candidate> candidates, int k = kDefaultTopK);

/// "precursor key>>product key" with both sides canonicalized as molecule
/// sets, so precursor order and atom order do not matter. Throws
/// SyntaxError when the text is not "precursors>>product".
std::string reaction_key(std::string_view reaction_smiles);

/// Ranked condition candidates for a reaction "precursors>>product".
class ConditionPredictor {
public:
  virtual ~ConditionPredictor() = default;
  virtual std::vector<Candidate> predict(std::string_view reaction_smiles) const = 0;
};

/// Lookup table keyed by reaction_key. Misses return the default row.
class TablePredictor : public ConditionPredictor {
public:
  explicit TablePredictor(double default_temperature_c = kDefaultTemperatureC)
      : default_temperature_c_(default_temperature_c) {}

  /// CSV: reaction_key,rank,weight,temperature_c,solvents,reagents with
  /// ';'-joined SMILES lists. Keys and SMILES are re-canonicalized; rows are
  /// ordered by rank. Every bad row is reported in one SyntaxError.
  static TablePredictor load(const std::filesystem::path &path,
                             double default_temperature_c = kDefaultTemperatureC);

  /// Appends a candidate for the reaction (canonicalized key), keeping rank
  /// order.
  void add(std::string_view reaction_smiles, int rank, Candidate candidate);
  std::size_t size() const { return rows_.size(); }

  std::vector<Candidate> predict(std::string_view reaction_smiles) const override;
  Candidate default_candidate() const;

private:
  double default_temperature_c_;
  std::map<std::string, std::vector<std::pair<int, Candidate>>> rows_;
};

/// Talks to a long-running helper process over its stdin/stdout, one JSON
/// object per line: request {"reaction": str}, response {"candidates":
/// [{"temperature_c", "weight", "solvents", "reagents"}]}. Calls are
/// serialized on the pipe. Failures raise PredictorError.
class ProcessPredictor : public ConditionPredictor {
public:
  explicit ProcessPredictor(std::vector<std::string> argv);
  ~ProcessPredictor() override;
  ProcessPredictor(const ProcessPredictor &) = delete;
  ProcessPredictor &operator=(const ProcessPredictor &) = delete;

  std::vector<Candidate> predict(std::string_view reaction_smiles) const override;

private:
  struct Pipe;
  std::unique_ptr<Pipe> pipe_;
  mutable std::mutex mutex_;
};

/// Parses one response line of the helper protocol.
std::vector<Candidate> parse_predictor_response(std::string_view line);

}  // namespace mhnpath::conditions

#endif  // MHNPATH_CONDITIONS_CONDITIONS_HPP
