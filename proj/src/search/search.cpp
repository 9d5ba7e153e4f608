//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/search/search.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <iostream>
#include <queue>
#include <unordered_map>

#include "mhnpath/errors.hpp"
#include "json.hpp"
#include "mhnpath/templates/rewrite.hpp"

namespace mhnpath::search {

namespace {

const pricing::PriceCatalog &empty_catalog() {
  static const pricing::PriceCatalog catalog;
  return catalog;
}

const scoring::ToxicityDB &empty_toxicity() {
  static const scoring::ToxicityDB db;
  return db;
}

std::vector<conditions::Candidate> predict_conditions(const Services &services,
                                                      const std::string &reaction) {
  if (services.conditions) {
    try {
      auto c = services.conditions->predict(reaction);
      if (!c.empty()) return c;
    } catch (const PredictorError &e) {
      std::cerr << "warning: condition prediction failed for " << reaction << ": " << e.what()
                << '\n';
    }
  }
  return {conditions::Candidate{}};
}

struct QueueEntry {
  double priority;
  long counter;
  SearchNode *node;
};

struct PopOrder {
  bool operator()(const QueueEntry &a, const QueueEntry &b) const {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.counter > b.counter;
  }
};

}  // namespace

void SearchConfig::validate() const {
  if (max_depth < 1) throw ConfigError("max_depth must be >= 1");
  if (top_n_templates < 1) throw ConfigError("top_n_templates must be >= 1");
  if (max_expansions < 0 || route_limit < 0) throw ConfigError("limits must be >= 0");
  if (max_matches < 1) throw ConfigError("max_matches must be >= 1");
  weights.validate();
  policy.validate();
}

std::unique_ptr<SearchNode> make_node(chem::MoleculeSet molecules, int depth,
                                      const pricing::PriceCatalog &catalog,
                                      const pricing::BuyabilityPolicy &policy) {
  auto node = std::make_unique<SearchNode>();
  node->depth = depth;
  node->solved = true;
  for (const std::string &key : molecules.member_keys()) {
    const auto price = catalog.lookup(key);
    node->cost_usd_per_g += pricing::effective_cost(price, policy);
    node->solved = node->solved && pricing::is_buyable(price, policy);
  }
  node->molecules = std::move(molecules);
  return node;
}

std::optional<int> member_to_expand(const chem::MoleculeSet &set, const pricing::PriceCatalog &catalog,
                                    const pricing::BuyabilityPolicy &policy) {
  std::optional<int> best;
  double best_cost = 0;
  const auto &keys = set.member_keys();
  for (int i = 0; i < static_cast<int>(keys.size()); ++i) {
    const auto price = catalog.lookup(keys[static_cast<std::size_t>(i)]);
    if (pricing::is_buyable(price, policy)) continue;
    const double cost = pricing::effective_cost(price, policy);
    if (!best || cost > best_cost ||
        (cost == best_cost && keys[static_cast<std::size_t>(i)] < keys[static_cast<std::size_t>(*best)])) {
      best = i;
      best_cost = cost;
    }
  }
  return best;
}

std::vector<std::pair<SearchEdge, std::unique_ptr<SearchNode>>> expand(
    const SearchNode &node, int member_index, const std::vector<Prioritizer> &prioritizers,
    const SearchConfig &cfg, const Services &services, const std::vector<std::string> &ancestors,
    int *templates_tried) {
  const pricing::PriceCatalog &catalog = services.catalog ? *services.catalog : empty_catalog();
  const scoring::ToxicityDB &toxicity = services.toxicity ? *services.toxicity : empty_toxicity();
  const auto mi = static_cast<std::size_t>(member_index);
  const chem::Molecule &member = node.molecules.members().at(mi);
  const std::string &member_key = node.molecules.member_keys()[mi];
  std::vector<chem::Molecule> others;
  for (std::size_t i = 0; i < node.molecules.size(); ++i)
    if (i != mi) others.push_back(node.molecules.members()[i]);

  std::vector<std::pair<SearchEdge, std::unique_ptr<SearchNode>>> out;
  int tried = 0;
  for (const Prioritizer &p : prioritizers) {
    for (const mhn::RankedTemplate &r : mhn::rank_templates(*p.ensemble, member, cfg.top_n_templates, true)) {
      const templates::Template &t = p.library->at(r.template_id);
      ++tried;
      for (const chem::MoleculeSet &precursors : templates::apply_template(t, member, cfg.max_matches)) {
        std::vector<chem::Molecule> members = others;
        members.insert(members.end(), precursors.members().begin(), precursors.members().end());
        chem::MoleculeSet child_set(std::move(members));
        if (std::find(ancestors.begin(), ancestors.end(), child_set.canonical_key()) != ancestors.end())
          continue;

        SearchEdge edge;
        edge.reaction_smiles = precursors.canonical_key() + ">>" + member_key;
        std::vector<double> costs;
        for (const std::string &key : precursors.member_keys()) {
          const auto price = catalog.lookup(key);
          costs.push_back(pricing::effective_cost(price, cfg.policy));
          if (pricing::is_buyable(price, cfg.policy)) edge.bought.push_back(key);
        }
        const auto candidates = predict_conditions(services, edge.reaction_smiles);
        edge.temperature_c = conditions::aggregate_temperature(candidates);
        edge.solvent_score = scoring::solvent_score(candidates.front().conditions, toxicity);
        const double cap = cfg.policy.nonbuyable_cap;
        edge.score = scoring::composite_score(scoring::cost_score(scoring::set_cost(costs, cap), cap),
                                              scoring::temp_score(edge.temperature_c),
                                              *edge.solvent_score, cfg.weights);
        edge.source = t.source;
        edge.enzyme = t.source == templates::TemplateSource::kEnzymatic
                          ? t.enzyme.value_or(kUnknownEnzyme)
                          : 0;
        edge.rule = t.text;
        edge.template_id = t.id;
        edge.label = static_cast<int>(out.size());
        out.emplace_back(std::move(edge), make_node(std::move(child_set), node.depth + 1, catalog, cfg.policy));
      }
    }
  }
  if (templates_tried) *templates_tried = tried;
  return out;
}

SearchResult run_search(const chem::Molecule &target, const std::vector<Prioritizer> &prioritizers,
                        const SearchConfig &cfg, const Services &services,
                        const std::atomic<bool> *cancel) {
  cfg.validate();
  if (prioritizers.empty()) throw ConfigError("search needs at least one prioritizer");
  for (const Prioritizer &p : prioritizers)
    if (!p.ensemble || !p.library || p.ensemble->num_templates() != p.library->size())
      throw ConfigError("each prioritizer needs an ensemble bound to its library");
  const pricing::PriceCatalog &catalog = services.catalog ? *services.catalog : empty_catalog();

  SearchResult result;
  result.root = make_node(chem::MoleculeSet({target.without_maps()}), 0, catalog, cfg.policy);
  if (result.root->solved) result.solved_nodes = 1;
  std::unordered_map<const SearchNode *, const SearchNode *> parent;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, PopOrder> queue;
  long counter = 0;
  queue.push({std::numeric_limits<double>::infinity(), counter++, result.root.get()});

  const auto start = std::chrono::steady_clock::now();
  result.stop_reason = "exhausted";
  int step = 0;
  while (!queue.empty()) {
    if (cancel && cancel->load()) {
      result.stop_reason = "cancelled";
      break;
    }
    if (cfg.time_limit_s > 0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >= cfg.time_limit_s) {
      result.stop_reason = "time_limit";
      break;
    }
    if (cfg.max_expansions > 0 && result.expansions >= cfg.max_expansions) {
      result.stop_reason = "max_expansions";
      break;
    }
    const QueueEntry entry = queue.top();
    queue.pop();
    SearchNode &node = *entry.node;
    ExpansionRecord rec{++step, entry.priority, node.key(), 0, 0};
    const bool accepted = cfg.accept_cost && node.cost_usd_per_g <= *cfg.accept_cost;
    if (node.solved || node.depth >= cfg.max_depth || accepted) {
      result.log.push_back(std::move(rec));
      continue;
    }
    std::vector<std::string> ancestors;
    for (const SearchNode *n = &node; n; n = parent.count(n) ? parent.at(n) : nullptr)
      ancestors.push_back(n->key());
    const auto member = member_to_expand(node.molecules, catalog, cfg.policy);
    auto children = expand(node, *member, prioritizers, cfg, services, ancestors, &rec.templates_tried);
    ++result.expansions;
    rec.children_added = static_cast<int>(children.size());
    for (auto &[edge, child] : children) {
      parent[child.get()] = &node;
      if (child->solved) ++result.solved_nodes;
      queue.push({edge.score, counter++, child.get()});
      node.subtrees.emplace_back(std::move(edge), std::move(child));
    }
    result.log.push_back(std::move(rec));
    if (cfg.route_limit > 0 && result.solved_nodes >= cfg.route_limit) {
      result.stop_reason = "route_limit";
      break;
    }
  }
  return result;
}

void write_expansion_log(const std::vector<ExpansionRecord> &log, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "step,popped_priority,node_key,templates_tried,children_added\n";
  for (const ExpansionRecord &r : log)
    out << r.step << ',' << r.popped_priority << ',' << r.node_key << ',' << r.templates_tried << ','
        << r.children_added << '\n';
}

std::vector<Route> extract_routes(const SearchNode &root, const scoring::ScoreWeights &weights,
                                  const pricing::BuyabilityPolicy &policy) {
  std::vector<Route> routes;
  std::vector<const SearchEdge *> path;
  const auto visit = [&](const auto &self, const SearchNode &node) -> void {
    if (node.solved) {
      Route r;
      r.edges = path;
      r.leaf = &node;
      r.length = static_cast<int>(path.size());
      r.total_cost = node.cost_usd_per_g;
      bool known_solvent = false;
      for (std::size_t i = 0; i < path.size(); ++i) {
        r.max_temperature_c = i == 0 ? path[i]->temperature_c : std::max(r.max_temperature_c, path[i]->temperature_c);
        if (path[i]->solvent_score) {
          r.min_solvent_score = known_solvent ? std::min(r.min_solvent_score, *path[i]->solvent_score)
                                              : *path[i]->solvent_score;
          known_solvent = true;
        }
      }
      const double cap = policy.nonbuyable_cap;
      r.score = scoring::composite_score(scoring::cost_score(std::min(r.total_cost, cap), cap),
                                         scoring::temp_score(r.max_temperature_c), r.min_solvent_score,
                                         weights);
      routes.push_back(std::move(r));
      return;
    }
    for (const auto &[edge, child] : node.subtrees) {
      path.push_back(&edge);
      self(self, *child);
      path.pop_back();
    }
  };
  visit(visit, root);
  std::stable_sort(routes.begin(), routes.end(),
                   [](const Route &a, const Route &b) { return a.score > b.score; });
  return routes;
}

namespace {

using Json = nlohmann::ordered_json;

Json node_json(const SearchNode &node, const TreeStyle &style) {
  Json j;
  j["smiles"] = node.key();
  j["cost_usd_per_g"] = node.cost_usd_per_g;
  j["depth"] = node.depth;
  j["subtrees"] = Json::array();
  for (const auto &[edge, child] : node.subtrees) {
    Json e;
    e["reaction_smiles"] = edge.reaction_smiles;
    e["temperature"] = style.temperature_unit == TemperatureUnit::kKelvin
                           ? conditions::celsius_to_kelvin(edge.temperature_c)
                           : edge.temperature_c;
    e["enzyme"] = edge.enzyme;
    e["score"] = edge.score;
    e["rule"] = edge.rule;
    e["label"] = edge.label;
    e["subtree"] = node_json(*child, style);
    j["subtrees"].push_back(std::move(e));
  }
  return j;
}

class TreeReader {
public:
  TreeReader(const TreeStyle &style, const pricing::PriceCatalog *catalog,
             const pricing::BuyabilityPolicy &policy)
      : style_(style), catalog_(catalog), policy_(policy) {}

  std::unique_ptr<SearchNode> node(const nlohmann::json &j, const std::string &path, int expected_depth) {
    expect_keys(j, path, {"smiles", "cost_usd_per_g", "depth", "subtrees"});
    auto n = std::make_unique<SearchNode>();
    try {
      n->molecules = chem::parse_smiles_set(field<std::string>(j, path, "smiles"));
    } catch (const Error &e) {
      throw FormatError(path + ".smiles: " + e.what());
    }
    n->cost_usd_per_g = number(j, path, "cost_usd_per_g");
    n->depth = field<int>(j, path, "depth");
    if (expected_depth >= 0 && n->depth != expected_depth)
      throw FormatError(path + ".depth: expected " + std::to_string(expected_depth));
    if (catalog_) n->solved = make_node(n->molecules, 0, *catalog_, policy_)->solved;
    const auto &subtrees = j.at("subtrees");
    if (!subtrees.is_array()) throw FormatError(path + ".subtrees: expected an array");
    for (std::size_t i = 0; i < subtrees.size(); ++i) {
      const std::string ep = path + ".subtrees[" + std::to_string(i) + "]";
      const auto &e = subtrees[i];
      expect_keys(e, ep, {"reaction_smiles", "temperature", "enzyme", "score", "rule", "label", "subtree"});
      SearchEdge edge;
      edge.reaction_smiles = field<std::string>(e, ep, "reaction_smiles");
      const double t = number(e, ep, "temperature");
      edge.temperature_c = style_.temperature_unit == TemperatureUnit::kKelvin ? t - 273.15 : t;
      edge.enzyme = field<int>(e, ep, "enzyme");
      edge.score = number(e, ep, "score");
      edge.rule = field<std::string>(e, ep, "rule");
      edge.label = field<int>(e, ep, "label");
      edge.source = edge.enzyme == 0 ? templates::TemplateSource::kSynthetic
                                     : templates::TemplateSource::kEnzymatic;
      if (catalog_) {
        const auto sep = edge.reaction_smiles.find(">>");
        if (sep == std::string::npos) throw FormatError(ep + ".reaction_smiles: missing '>>'");
        try {
          const auto precursors = chem::parse_smiles_set(edge.reaction_smiles.substr(0, sep));
          for (const std::string &key : precursors.member_keys())
            if (pricing::is_buyable(catalog_->lookup(key), policy_)) edge.bought.push_back(key);
        } catch (const Error &err) {
          throw FormatError(ep + ".reaction_smiles: " + err.what());
        }
      }
      auto child = node(e.at("subtree"), ep + ".subtree", n->depth + 1);
      n->subtrees.emplace_back(std::move(edge), std::move(child));
    }
    return n;
  }

private:
  static void expect_keys(const nlohmann::json &j, const std::string &path,
                          std::initializer_list<const char *> keys) {
    if (!j.is_object()) throw FormatError(path + ": expected an object");
    for (const char *k : keys)
      if (!j.contains(k)) throw FormatError(path + ": missing key '" + k + "'");
    for (const auto &[k, v] : j.items()) {
      if (k == "type_dis" || k == "buyable") continue;
      if (std::none_of(keys.begin(), keys.end(), [&](const char *want) { return k == want; }))
        throw FormatError(path + ": unexpected key '" + k + "'");
    }
  }

  template <typename T>
  static T field(const nlohmann::json &j, const std::string &path, const char *key) {
    const auto &v = j.at(key);
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw FormatError(path + "." + key + ": expected a string");
    } else {
      if (!v.is_number_integer()) throw FormatError(path + "." + key + ": expected an integer");
    }
    return v.get<T>();
  }

  static double number(const nlohmann::json &j, const std::string &path, const char *key) {
    const auto &v = j.at(key);
    if (!v.is_number()) throw FormatError(path + "." + key + ": expected a number");
    return v.get<double>();
  }

  const TreeStyle &style_;
  const pricing::PriceCatalog *catalog_;
  const pricing::BuyabilityPolicy &policy_;
};

std::string dot_escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string serialize_tree(const SearchNode &root, const TreeStyle &style) {
  return node_json(root, style).dump(2) + "\n";
}

std::unique_ptr<SearchNode> deserialize_tree(const std::string &text, const TreeStyle &style,
                                             const pricing::PriceCatalog *catalog,
                                             const pricing::BuyabilityPolicy &policy) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw FormatError(std::string("$: ") + e.what());
  }
  return TreeReader(style, catalog, policy).node(j, "$", -1);
}

std::string to_dot(const SearchNode &root) {
  std::string out = "digraph search {\n  node [shape=box];\n";
  int next = 0;
  char buf[64];
  const auto visit = [&](const auto &self, const SearchNode &node) -> int {
    const int id = next++;
    std::snprintf(buf, sizeof buf, "%.2f", node.cost_usd_per_g);
    out += "  n" + std::to_string(id) + " [label=\"" + dot_escape(node.key()) + "\\n$" + buf + "/g\"];\n";
    for (const auto &[edge, child] : node.subtrees) {
      const int cid = self(self, *child);
      const std::string rule_id =
          edge.template_id >= 0
              ? (edge.source ? std::string(templates::source_name(*edge.source)) + ":" : std::string()) +
                    std::to_string(edge.template_id)
              : "rule";
      std::snprintf(buf, sizeof buf, "%.1f C", edge.temperature_c);
      out += "  n" + std::to_string(id) + " -> n" + std::to_string(cid) + " [label=\"" + rule_id + " " +
             buf + "\"];\n";
    }
    return id;
  };
  visit(visit, root);
  return out + "}\n";
}

}  // namespace mhnpath::search
