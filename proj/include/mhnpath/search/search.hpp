//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_SEARCH_SEARCH_HPP
#define MHNPATH_SEARCH_SEARCH_HPP

#include <atomic>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/conditions/conditions.hpp"
#include "mhnpath/mhn/ensemble.hpp"
#include "mhnpath/pricing/pricing.hpp"
#include "mhnpath/scoring/scoring.hpp"
#include "mhnpath/templates/library.hpp"

namespace mhnpath::search {

/// Enzyme field of edges made by enzymatic rules that carry no enzyme id.
inline constexpr int kUnknownEnzyme = -1;

struct SearchNode;

struct SearchEdge {
  /// "precursors>>expanded member", both sides canonical.
  std::string reaction_smiles;
  double temperature_c = conditions::kDefaultTemperatureC;
  /// 0 for synthetic rules.
  int enzyme = 0;
  /// Composite score at creation; also the child's queue priority.
  double score = 0;
  std::string rule;
  /// Index of the edge among its parent's subtrees.
  int label = 0;

  // Not serialized.
  int template_id = -1;
  std::optional<templates::TemplateSource> source;
  std::optional<double> solvent_score;
  /// Canonical SMILES of the precursors that are buyable.
  std::vector<std::string> bought;
};

struct SearchNode {
  chem::MoleculeSet molecules;
  /// Summed effective cost of the members.
  double cost_usd_per_g = 0;
  int depth = 0;
  /// Every member is buyable.
  bool solved = false;
  std::vector<std::pair<SearchEdge, std::unique_ptr<SearchNode>>> subtrees;

  const std::string &key() const { return molecules.canonical_key(); }
};

/// One template prioritizer and the library its ensemble was trained on.
struct Prioritizer {
  const mhn::Ensemble *ensemble = nullptr;
  const templates::TemplateLibrary *library = nullptr;
};

struct Services {
  const pricing::PriceCatalog *catalog = nullptr;
  const conditions::ConditionPredictor *conditions = nullptr;
  const scoring::ToxicityDB *toxicity = nullptr;
};

struct SearchConfig {
  int max_depth = 5;
  /// Seconds; <= 0 disables the limit.
  double time_limit_s = 0;
  /// 0 disables the limit.
  int max_expansions = 0;
  int top_n_templates = 50;
  /// Stop after this many solved nodes; 0 disables the limit.
  int route_limit = 0;
  /// Embeddings tried per template application.
  int max_matches = 8;
  scoring::ScoreWeights weights;
  pricing::BuyabilityPolicy policy;
  /// Treat a node as done once its cost is at most this value (off when
  /// unset).
  std::optional<double> accept_cost;

  /// Throws ConfigError.
  void validate() const;
};

struct ExpansionRecord {
  int step = 0;
  double popped_priority = 0;
  std::string node_key;
  int templates_tried = 0;
  int children_added = 0;
};

struct SearchResult {
  std::unique_ptr<SearchNode> root;
  std::vector<ExpansionRecord> log;
  int expansions = 0;
  int solved_nodes = 0;
  /// "exhausted", "time_limit", "max_expansions", "route_limit" or
  /// "cancelled".
  std::string stop_reason;
};

/// Builds a node from molecules, pricing every member.
std::unique_ptr<SearchNode> make_node(chem::MoleculeSet molecules, int depth,
                                      const pricing::PriceCatalog &catalog,
                                      const pricing::BuyabilityPolicy &policy);

/// Index of the member to expand: highest effective cost among non-buyable
/// members, ties to the smallest canonical SMILES. None when solved.
std::optional<int> member_to_expand(const chem::MoleculeSet &set, const pricing::PriceCatalog &catalog,
                                    const pricing::BuyabilityPolicy &policy);

/// Children of node from expanding one member. ancestors holds the keys of
/// the node's ancestor chain (node included); results repeating one are
/// dropped. Children come in (prioritizer, template rank, result) order.
std::vector<std::pair<SearchEdge, std::unique_ptr<SearchNode>>> expand(
    const SearchNode &node, int member_index, const std::vector<Prioritizer> &prioritizers,
    const SearchConfig &cfg, const Services &services, const std::vector<std::string> &ancestors,
    int *templates_tried = nullptr);

/// Global greedy best-first search from target. Throws ConfigError for a
/// bad config or when no prioritizer is given. cancel, when set, stops the
/// search between expansions.
SearchResult run_search(const chem::Molecule &target, const std::vector<Prioritizer> &prioritizers,
                        const SearchConfig &cfg, const Services &services,
                        const std::atomic<bool> *cancel = nullptr);

void write_expansion_log(const std::vector<ExpansionRecord> &log, const std::filesystem::path &path);

struct Route {
  std::vector<const SearchEdge *> edges;
  const SearchNode *leaf = nullptr;
  int length = 0;
  double total_cost = 0;
  double max_temperature_c = 0;
  /// Minimum over edges with a known solvent score; 0 when none is known.
  double min_solvent_score = 0;
  double score = 0;
};

/// Every root-to-solved path, best composite score first (ties keep
/// depth-first order).
std::vector<Route> extract_routes(const SearchNode &root, const scoring::ScoreWeights &weights = {},
                                  const pricing::BuyabilityPolicy &policy = {});

enum class TemperatureUnit { kCelsius, kKelvin };

struct TreeStyle {
  TemperatureUnit temperature_unit = TemperatureUnit::kCelsius;
};

/// Nodes: smiles, cost_usd_per_g, depth, subtrees. Each subtrees entry is an
/// edge object (reaction_smiles, temperature, enzyme, score, rule, label)
/// holding the child under "subtree". Two-space indent.
std::string serialize_tree(const SearchNode &root, const TreeStyle &style = {});

/// Reverses serialize_tree, ignoring "type_dis" and "buyable". When catalog
/// is given, solved flags and bought lists are recomputed. Throws
/// FormatError naming the JSON path of the problem.
std::unique_ptr<SearchNode> deserialize_tree(const std::string &text, const TreeStyle &style = {},
                                             const pricing::PriceCatalog *catalog = nullptr,
                                             const pricing::BuyabilityPolicy &policy = {});

/// Graphviz text: node label = key and cost, edge label = rule id and
/// temperature.
std::string to_dot(const SearchNode &root);

}  // namespace mhnpath::search

#endif  // MHNPATH_SEARCH_SEARCH_HPP
