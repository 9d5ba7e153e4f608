//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/evalharness/evalharness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <thread>

#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"
#include "mhnpath/mhn/train.hpp"

namespace mhnpath::eval {

namespace {

void require_cases(const std::vector<EvalCase> &cases) {
  if (cases.empty()) throw EmptyCases("no evaluation cases");
}

struct CaseResult {
  /// Unscreened rank of the true template, or -1 when outside the list.
  int truth_rank = -1;
  /// applicable_prefix[i]: applicable templates among the first i screened.
  std::vector<int> applicable_prefix{0};
};

CaseResult evaluate_case(const EvalCase &c, const mhn::Ensemble &e, const templates::TemplateLibrary &lib,
                         int top_n, bool need_truth, bool need_applicable, int max_matches) {
  CaseResult r;
  const chem::Fingerprint fp = e.featurize(c.product);
  if (need_truth) {
    const auto ranked = mhn::rank_templates(e, fp, top_n, false);
    for (std::size_t i = 0; i < ranked.size(); ++i)
      if (ranked[i].template_id == c.true_template_id) r.truth_rank = static_cast<int>(i);
  }
  if (need_applicable) {
    for (const mhn::RankedTemplate &t : mhn::rank_templates(e, fp, top_n, true)) {
      const bool applies = !templates::apply_template(lib.at(t.template_id), c.product, max_matches).empty();
      r.applicable_prefix.push_back(r.applicable_prefix.back() + (applies ? 1 : 0));
    }
  }
  return r;
}

int applicable_in_top(const CaseResult &r, int n) {
  return r.applicable_prefix[std::min(static_cast<std::size_t>(n), r.applicable_prefix.size() - 1)];
}

std::vector<CaseResult> evaluate_cases(const std::vector<EvalCase> &cases, const mhn::Ensemble &e,
                                       const templates::TemplateLibrary &lib, int top_n, bool need_truth,
                                       bool need_applicable, int threads, int max_matches) {
  std::vector<CaseResult> out(cases.size());
  const auto worker = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < cases.size(); i += stride)
      out[i] = evaluate_case(cases[i], e, lib, top_n, need_truth, need_applicable, max_matches);
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, threads));
  if (n_threads == 1) {
    worker(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t)
    pool.emplace_back([&, t] {
      try {
        worker(t, n_threads);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto &th : pool) th.join();
  for (const auto &err : errors)
    if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace

std::vector<EvalCase> load_cases(const std::filesystem::path &path, const templates::TemplateLibrary &lib) {
  std::vector<EvalCase> cases;
  for (const mhn::DatasetRow &row : mhn::read_dataset(path)) {
    if (row.template_id < 0 || row.template_id >= lib.size())
      throw IdOutOfRange("template id " + std::to_string(row.template_id) + " not in library");
    cases.push_back({chem::parse_smiles(row.product_smiles), row.template_id});
  }
  return cases;
}

double literature_rule_accuracy(const std::vector<EvalCase> &cases, const mhn::Ensemble &e, int n) {
  return evaluate(cases, e, templates::TemplateLibrary(), {n}).rows[0].lit_rule_acc;
}

double avg_applicable_rules(const std::vector<EvalCase> &cases, const mhn::Ensemble &e,
                            const templates::TemplateLibrary &lib, int n, int max_matches) {
  require_cases(cases);
  if (n < 1) throw ConfigError("n must be >= 1");
  int sum = 0;
  for (const CaseResult &r : evaluate_cases(cases, e, lib, n, false, true, 1, max_matches))
    sum += applicable_in_top(r, n);
  return static_cast<double>(sum) / static_cast<double>(cases.size());
}

double any_applicable_accuracy(const std::vector<EvalCase> &cases, const mhn::Ensemble &e,
                               const templates::TemplateLibrary &lib, int n, int max_matches) {
  require_cases(cases);
  if (n < 1) throw ConfigError("n must be >= 1");
  int hits = 0;
  for (const CaseResult &r : evaluate_cases(cases, e, lib, n, false, true, 1, max_matches))
    hits += applicable_in_top(r, n) > 0 ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(cases.size());
}

MetricReport evaluate(const std::vector<EvalCase> &cases, const mhn::Ensemble &e,
                      const templates::TemplateLibrary &lib, const std::vector<int> &cutoffs, int threads,
                      int max_matches) {
  require_cases(cases);
  if (cutoffs.empty()) throw ConfigError("no cutoffs");
  for (int n : cutoffs)
    if (n < 1) throw ConfigError("cutoffs must be >= 1");
  for (const EvalCase &c : cases)
    if (c.true_template_id < 0 || c.true_template_id >= e.num_templates())
      throw IdOutOfRange("template id " + std::to_string(c.true_template_id) + " not in library");
  const bool need_applicable = lib.size() > 0;
  if (need_applicable && lib.size() != e.num_templates())
    throw ConfigError("library does not match the ensemble");
  const int top_n = *std::max_element(cutoffs.begin(), cutoffs.end());
  const auto results = evaluate_cases(cases, e, lib, top_n, true, need_applicable, threads, max_matches);

  MetricReport report;
  report.cases = cases.size();
  const auto count = static_cast<double>(cases.size());
  for (int n : cutoffs) {
    int hits = 0, applicable = 0, any = 0;
    for (const CaseResult &r : results) {
      hits += r.truth_rank >= 0 && r.truth_rank < n ? 1 : 0;
      const int a = applicable_in_top(r, n);
      applicable += a;
      any += a > 0 ? 1 : 0;
    }
    report.rows.push_back({n, hits / count, applicable / count, any / count});
  }
  return report;
}

void write_report_csv(const MetricReport &report, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "n,lit_rule_acc,avg_applicable,any_applicable,cases\n";
  for (const MetricRow &r : report.rows)
    out << r.n << ',' << r.lit_rule_acc << ',' << r.avg_applicable << ',' << r.any_applicable << ','
        << report.cases << '\n';
}

std::string format_report_table(const MetricReport &report) {
  const std::size_t k = report.rows.size();
  const int group_width = static_cast<int>(k) * 8;
  char buf[64];
  std::string out;
  for (const char *title : {"Literature rule acc.", "Avg. applicable rules", "Any applicable rule"}) {
    std::snprintf(buf, sizeof buf, "| %-*s", group_width - 1, title);
    out += buf;
  }
  out += "|\n";
  for (int g = 0; g < 3; ++g) {
    out += "|";
    for (const MetricRow &r : report.rows) {
      std::snprintf(buf, sizeof buf, "%8s", ("T" + std::to_string(r.n)).c_str());
      out += buf;
    }
  }
  out += "|\n";
  for (int g = 0; g < 3; ++g) {
    out += "|";
    for (const MetricRow &r : report.rows) {
      const double v = g == 0 ? r.lit_rule_acc * 100 : g == 1 ? r.avg_applicable : r.any_applicable * 100;
      std::snprintf(buf, sizeof buf, g == 1 ? "%8.2f" : "%7.1f%%", v);
      out += buf;
    }
  }
  out += "|\n";
  out += std::to_string(report.cases) +
         " cases. Rule accuracy uses unscreened rankings; applicability columns use screened rankings.\n";
  return out;
}

RouteSteps route_steps(const search::Route &route) {
  RouteSteps steps;
  for (const search::SearchEdge *edge : route.edges)
    steps.push_back(edge->reaction_smiles.substr(0, edge->reaction_smiles.find(">>")));
  return steps;
}

bool route_replicated(const std::vector<RouteSteps> &predicted, const RouteSteps &reference) {
  return std::any_of(predicted.begin(), predicted.end(), [&](const RouteSteps &p) { return p == reference; });
}

bool route_replicated(const std::vector<search::Route> &predicted, const RouteSteps &reference) {
  std::vector<RouteSteps> steps;
  for (const search::Route &r : predicted) steps.push_back(route_steps(r));
  return route_replicated(steps, reference);
}

LengthComparison length_comparison(const std::vector<int> &predicted_lengths, int reference_length) {
  if (predicted_lengths.empty()) throw NoRoutes("no predicted routes");
  const int delta = *std::min_element(predicted_lengths.begin(), predicted_lengths.end()) - reference_length;
  return {delta < 0 ? LengthVerdict::kShorter : delta == 0 ? LengthVerdict::kEqual : LengthVerdict::kLonger,
          delta};
}

LengthComparison length_comparison(const std::vector<search::Route> &predicted, int reference_length) {
  std::vector<int> lengths;
  for (const search::Route &r : predicted) lengths.push_back(r.length);
  return length_comparison(lengths, reference_length);
}

}  // namespace mhnpath::eval
