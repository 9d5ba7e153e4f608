//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_EVALHARNESS_EVALHARNESS_HPP
#define MHNPATH_EVALHARNESS_EVALHARNESS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "mhnpath/chem/molecule.hpp"
#include "mhnpath/mhn/ensemble.hpp"
#include "mhnpath/search/search.hpp"
#include "mhnpath/templates/library.hpp"
#include "mhnpath/templates/rewrite.hpp"

namespace mhnpath::eval {

inline constexpr int kCutoffs[] = {1, 10, 50, 100};

struct EvalCase {
  chem::Molecule product;
  int true_template_id = 0;
};

/// Reads a dataset TSV (product_smiles, template_id). Throws IdOutOfRange
/// for ids outside the library, plus the errors of read_dataset.
std::vector<EvalCase> load_cases(const std::filesystem::path &path, const templates::TemplateLibrary &lib);

/// Fraction of cases whose true template is in the unscreened top n.
/// Throws EmptyCases.
double literature_rule_accuracy(const std::vector<EvalCase> &cases, const mhn::Ensemble &e, int n);

/// Mean number of templates in the screened top n that apply to the
/// product. Throws EmptyCases.
double avg_applicable_rules(const std::vector<EvalCase> &cases, const mhn::Ensemble &e,
                            const templates::TemplateLibrary &lib, int n,
                            int max_matches = templates::kDefaultMaxMatches);

/// Fraction of cases with at least one applicable template in the screened
/// top n. Throws EmptyCases.
double any_applicable_accuracy(const std::vector<EvalCase> &cases, const mhn::Ensemble &e,
                               const templates::TemplateLibrary &lib, int n,
                               int max_matches = templates::kDefaultMaxMatches);

struct MetricRow {
  int n = 0;
  double lit_rule_acc = 0;
  double avg_applicable = 0;
  double any_applicable = 0;
};

struct MetricReport {
  std::vector<MetricRow> rows;
  std::size_t cases = 0;
};

/// All three metrics at every cutoff from one ranking per case. Cases are
/// split over `threads` workers; sums are taken in case order.
MetricReport evaluate(const std::vector<EvalCase> &cases, const mhn::Ensemble &e,
                      const templates::TemplateLibrary &lib,
                      const std::vector<int> &cutoffs = {std::begin(kCutoffs), std::end(kCutoffs)},
                      int threads = 1, int max_matches = templates::kDefaultMaxMatches);

/// CSV: n,lit_rule_acc,avg_applicable,any_applicable,cases.
void write_report_csv(const MetricReport &report, const std::filesystem::path &path);
/// Three column groups (literature rule accuracy, average applicable rules,
/// any applicable rule) with one T<n> column per cutoff.
std::string format_report_table(const MetricReport &report);

/// Precursor canonical keys of each step, target first.
using RouteSteps = std::vector<std::string>;

RouteSteps route_steps(const search::Route &route);

/// True when some predicted route has the reference's length and the same
/// precursor key at every step.
bool route_replicated(const std::vector<RouteSteps> &predicted, const RouteSteps &reference);
bool route_replicated(const std::vector<search::Route> &predicted, const RouteSteps &reference);

enum class LengthVerdict { kShorter, kEqual, kLonger };

struct LengthComparison {
  LengthVerdict verdict = LengthVerdict::kEqual;
  /// Shortest predicted length minus the reference length.
  int delta = 0;
};

/// Throws NoRoutes when predicted is empty.
LengthComparison length_comparison(const std::vector<int> &predicted_lengths, int reference_length);
LengthComparison length_comparison(const std::vector<search::Route> &predicted, int reference_length);

}  // namespace mhnpath::eval

#endif  // MHNPATH_EVALHARNESS_EVALHARNESS_HPP
