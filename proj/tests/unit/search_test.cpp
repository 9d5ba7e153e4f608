//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>
#include <set>

#include "json.hpp"
#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"
#include "mhnpath/search/search.hpp"
#include "mhnpath/templates/extract.hpp"
#include "mhnpath/templates/rewrite.hpp"
#include "test_support.hpp"

namespace mhnpath {
namespace {

using search::Prioritizer;
using search::SearchConfig;
using search::Services;

std::string canon(const char *s) { return chem::write_canonical_smiles(chem::parse_smiles(s)); }

/// Untrained prioritizer over a library; enough for ordering-agnostic tests
/// since top_n covers every template.
struct Planner {
  templates::TemplateLibrary lib;
  std::unique_ptr<mhn::Ensemble> ensemble;

  explicit Planner(templates::TemplateLibrary library) : lib(std::move(library)) {
    mhn::ModelConfig cfg;
    cfg.fp_bits = 64;
    cfg.fp_radius = 1;
    cfg.d_assoc = 4;
    cfg.dropout = 0;
    std::vector<mhn::PrioritizerModel> models;
    models.push_back(mhn::init_model(cfg, lib));
    ensemble = std::make_unique<mhn::Ensemble>(std::move(models), lib);
  }

  std::vector<Prioritizer> prioritizers() const { return {Prioritizer{ensemble.get(), &lib}}; }
};

Planner planner(std::initializer_list<const char *> rules) {
  templates::TemplateLibrary lib;
  for (const char *r : rules) lib.add(templates::parse_template(r));
  return Planner(std::move(lib));
}

pricing::PriceCatalog catalog(std::initializer_list<std::pair<const char *, double>> prices) {
  pricing::PriceCatalog c;
  for (const auto &[s, p] : prices) c.set(canon(s), pricing::CatalogEntry{"test", p, ""});
  return c;
}

SearchConfig wide_config(int max_depth = 5) {
  SearchConfig cfg;
  cfg.max_depth = max_depth;
  cfg.top_n_templates = 1000;
  return cfg;
}

TEST(Search, BuyableTargetNeedsNoExpansion) {
  const auto p = planner({"[C:1][O:2]>>[C:1].[O:2]"});
  const auto cat = catalog({{"CO", 3}});
  const auto r = search::run_search(chem::parse_smiles("OC"), p.prioritizers(), wide_config(), {&cat});
  EXPECT_TRUE(r.root->solved);
  EXPECT_EQ(r.expansions, 0);
  EXPECT_EQ(r.stop_reason, "exhausted");
  const auto routes = search::extract_routes(*r.root);
  ASSERT_EQ(routes.size(), 1u);
  EXPECT_EQ(routes[0].length, 0);
}

TEST(Search, OneStepUniverse) {
  const auto p = planner({"[C:1][O:2][C:3]>>[C:1][O:2].[C:3]"});
  const auto cat = catalog({{"CO", 0.5}, {"C", 0.5}});
  const auto r = search::run_search(chem::parse_smiles("COC"), p.prioritizers(), wide_config(), {&cat});
  EXPECT_FALSE(r.root->solved);
  EXPECT_EQ(r.root->cost_usd_per_g, 500.0);
  ASSERT_EQ(r.root->subtrees.size(), 1u);
  const auto &[edge, child] = r.root->subtrees[0];
  EXPECT_TRUE(child->solved);
  EXPECT_EQ(child->cost_usd_per_g, 1.0);
  EXPECT_EQ(child->depth, 1);
  EXPECT_EQ(edge.reaction_smiles, chem::parse_smiles_set("C.CO").canonical_key() + ">>" + canon("COC"));
  EXPECT_EQ(edge.enzyme, 0);
  EXPECT_EQ(edge.temperature_c, 25.0);
  EXPECT_EQ(edge.bought.size(), 2u);
  // cost -1/500, temperature -25/300, solvent 0
  EXPECT_NEAR(edge.score, -1.0 / 500 - 25.0 / 300, 1e-15);
  const auto routes = search::extract_routes(*r.root);
  ASSERT_EQ(routes.size(), 1u);
  EXPECT_EQ(routes[0].length, 1);
  EXPECT_EQ(routes[0].total_cost, 1.0);
}

TEST(Search, CheaperChildIsPoppedFirst) {
  const auto p = planner({"[C:1][O:2]>>[C:1].[O:2]", "[C:1][C:2]>>[C:1].[C:2]"});
  // Threshold 1 keeps every precursor non-buyable.
  const auto cat = catalog({{"CC", 5}, {"O", 5}, {"C", 200}, {"CO", 200}});
  auto cfg = wide_config();
  cfg.policy.buyable_threshold = 1;
  cfg.max_expansions = 2;
  const auto r = search::run_search(chem::parse_smiles("CCO"), p.prioritizers(), cfg, {&cat});
  ASSERT_EQ(r.root->subtrees.size(), 2u);
  ASSERT_GE(r.log.size(), 2u);
  EXPECT_EQ(r.log[1].node_key, chem::parse_smiles_set("CC.O").canonical_key());
  EXPECT_NEAR(r.log[1].popped_priority, -10.0 / 500 - 25.0 / 300, 1e-15);
  EXPECT_EQ(r.stop_reason, "max_expansions");
}

TEST(Search, CyclesAreDiscarded) {
  const auto p = planner({"[C:1]>>[C:1]"});
  const auto r = search::run_search(chem::parse_smiles("CC"), p.prioritizers(), wide_config(), {});
  EXPECT_EQ(r.expansions, 1);
  EXPECT_TRUE(r.root->subtrees.empty());
  EXPECT_TRUE(search::extract_routes(*r.root).empty());
}

TEST(Search, SameSetFromTwoRulesGivesTwoEdges) {
  const auto p = planner({"[C:1][O:2][C:3]>>[C:1][O:2].[C:3]", "[C:1][O:2]>>[C:1].[O:2]"});
  const auto cat = catalog({{"CO", 0.5}, {"C", 0.5}});
  const auto r = search::run_search(chem::parse_smiles("COC"), p.prioritizers(), wide_config(), {&cat});
  ASSERT_EQ(r.root->subtrees.size(), 2u);
  EXPECT_EQ(r.root->subtrees[0].second->key(), r.root->subtrees[1].second->key());
  EXPECT_NE(r.root->subtrees[0].first.rule, r.root->subtrees[1].first.rule);
  EXPECT_EQ(r.root->subtrees[0].first.label, 0);
  EXPECT_EQ(r.root->subtrees[1].first.label, 1);
  EXPECT_EQ(search::extract_routes(*r.root).size(), 2u);
}

TEST(Search, DiamondGivesTwoRoutes) {
  const auto p = planner({"[C:1][O:2]>>[C:1].[O:2]"});
  const auto cat = catalog({{"C", 1}, {"CC", 1}, {"O", 1}});
  const auto r = search::run_search(chem::parse_smiles("CCOC"), p.prioritizers(), wide_config(), {&cat});
  const auto routes = search::extract_routes(*r.root);
  ASSERT_EQ(routes.size(), 2u);
  for (const auto &route : routes) {
    EXPECT_EQ(route.length, 2);
    EXPECT_EQ(route.leaf->key(), chem::parse_smiles_set("C.CC.O").canonical_key());
    EXPECT_EQ(route.total_cost, 3.0);
  }
}

TEST(Search, ConditionsFeedEdgesAndRoutes) {
  const auto p = planner({"[C:1][O:2][C:3]>>[C:1][O:2].[C:3]"});
  const auto cat = catalog({{"CO", 0.5}, {"C", 0.5}});
  conditions::TablePredictor table;
  conditions::Candidate hot;
  hot.conditions.temperature_c = 80;
  hot.conditions.solvents = {canon("ClCCl")};
  table.add("C.CO>>COC", 1, hot);
  scoring::ToxicityDB tox;
  tox.set(canon("ClCCl"), -1);
  const auto r = search::run_search(chem::parse_smiles("COC"), p.prioritizers(), wide_config(),
                                    {&cat, &table, &tox});
  const auto &edge = r.root->subtrees.at(0).first;
  EXPECT_EQ(edge.temperature_c, 80.0);
  EXPECT_EQ(edge.solvent_score, -1.0);
  EXPECT_NEAR(edge.score, -1.0 / 500 - 80.0 / 300 - 1.0, 1e-15);
  const auto routes = search::extract_routes(*r.root);
  ASSERT_EQ(routes.size(), 1u);
  EXPECT_EQ(routes[0].max_temperature_c, 80.0);
  EXPECT_EQ(routes[0].min_solvent_score, -1.0);
  EXPECT_NEAR(routes[0].score, -1.0 / 500 - 80.0 / 300 - 1.0, 1e-15);
}

TEST(Search, CancelAndConfigErrors) {
  const auto p = planner({"[C:1][O:2]>>[C:1].[O:2]"});
  std::atomic<bool> cancel{true};
  const auto r = search::run_search(chem::parse_smiles("CCOC"), p.prioritizers(), wide_config(), {}, &cancel);
  EXPECT_EQ(r.stop_reason, "cancelled");
  EXPECT_EQ(r.expansions, 0);
  EXPECT_THROW(search::run_search(chem::parse_smiles("CC"), {}, wide_config(), {}), ConfigError);
  auto bad = wide_config();
  bad.max_depth = 0;
  EXPECT_THROW(search::run_search(chem::parse_smiles("CC"), p.prioritizers(), bad, {}), ConfigError);
}

// Universes built from the reaction fixture.

const templates::ExtractionReport &fixture() {
  static const templates::ExtractionReport report =
      templates::extract_library(templates::read_reactions(testing::data_path("reactions_100.tsv")), 1);
  return report;
}

const Planner &fixture_planner() {
  static const Planner p(fixture().library);
  return p;
}

std::vector<chem::Molecule> fixture_products() {
  std::vector<chem::Molecule> out;
  for (const auto &rec : templates::read_reactions(testing::data_path("reactions_100.tsv")))
    out.push_back(rec.reaction.product.without_maps());
  return out;
}

/// Molecules reachable from target by up to depth retro steps.
std::set<std::string> retro_closure(const chem::Molecule &target, int depth, int max_matches,
                                    const templates::TemplateLibrary &lib = fixture().library) {
  std::map<std::string, chem::Molecule> frontier{{chem::write_canonical_smiles(target), target}};
  std::set<std::string> seen{frontier.begin()->first};
  for (int d = 0; d < depth; ++d) {
    std::map<std::string, chem::Molecule> next;
    for (const auto &[key, m] : frontier)
      for (const auto &t : lib.templates())
        for (const auto &set : templates::apply_template(t, m, max_matches))
          for (std::size_t i = 0; i < set.size(); ++i)
            if (seen.insert(set.member_keys()[i]).second) next.emplace(set.member_keys()[i], set.members()[i]);
    frontier = std::move(next);
  }
  return seen;
}

/// Exhaustive: any non-buyable member may be expanded at every level.
class SolvabilityOracle {
public:
  SolvabilityOracle(const templates::TemplateLibrary &lib, const pricing::PriceCatalog &cat, int max_matches)
      : lib_(lib), cat_(cat), max_matches_(max_matches) {}

  bool solvable(const chem::MoleculeSet &set, int depth_left) {
    const auto memo_key = std::make_pair(set.canonical_key(), depth_left);
    if (const auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    bool result = true;
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < set.size(); ++i)
      if (!pricing::is_buyable(cat_.lookup(set.member_keys()[i]))) open.push_back(i);
    if (!open.empty()) {
      result = false;
      for (std::size_t i = 0; depth_left > 0 && i < open.size() && !result; ++i)
        for (const auto &t : lib_.templates()) {
          for (const auto &pre : templates::apply_template(t, set.members()[open[i]], max_matches_)) {
            std::vector<chem::Molecule> members;
            for (std::size_t j = 0; j < set.size(); ++j)
              if (j != open[i]) members.push_back(set.members()[j]);
            members.insert(members.end(), pre.members().begin(), pre.members().end());
            if (solvable(chem::MoleculeSet(std::move(members)), depth_left - 1)) {
              result = true;
              break;
            }
          }
          if (result) break;
        }
    }
    memo_[memo_key] = result;
    return result;
  }

private:
  const templates::TemplateLibrary &lib_;
  const pricing::PriceCatalog &cat_;
  int max_matches_;
  std::map<std::pair<std::string, int>, bool> memo_;
};

TEST(Search, FindsRouteWheneverOneExists) {
  const auto products = fixture_products();
  util::Rng rng(2024);
  auto cfg = wide_config(3);
  int solvable = 0, cases = 0;
  for (std::size_t i = 0; i < products.size(); i += 4) {
    const auto closure = retro_closure(products[i], cfg.max_depth, cfg.max_matches);
    const std::string target_key = chem::write_canonical_smiles(products[i]);
    for (int trial = 0; trial < 3; ++trial) {
      pricing::PriceCatalog cat;
      for (const auto &key : closure)
        if (key != target_key && rng.bernoulli(0.6))
          cat.set(key, pricing::CatalogEntry{"test", 1 + rng.uniform(0, 98), ""});
      SolvabilityOracle oracle(fixture().library, cat, cfg.max_matches);
      const bool expected = oracle.solvable(chem::MoleculeSet({products[i]}), cfg.max_depth);
      const auto r = search::run_search(products[i], fixture_planner().prioritizers(), cfg, {&cat});
      EXPECT_EQ(r.solved_nodes > 0, expected) << target_key << " trial " << trial;
      EXPECT_EQ(!search::extract_routes(*r.root).empty(), expected);
      solvable += expected;
      ++cases;
    }
  }
  // Both outcomes must be exercised.
  EXPECT_GT(solvable, 0);
  EXPECT_LT(solvable, cases);
}

TEST(Search, FindsRouteWheneverOneExistsInBranchyUniverse) {
  const auto p = planner({"[C:1][O:2]>>[C:1].[O:2]", "[C:1][C:2]>>[C:1].[C:2]", "[C:1][N:2]>>[C:1].[N:2]"});
  const char *targets[] = {"CCOCC", "OCCOC", "CC(O)CN", "NCCOCCO", "CC(C)OC"};
  util::Rng rng(99);
  auto cfg = wide_config(3);
  int solvable = 0, needs_full_depth = 0, cases = 0;
  for (const char *target : targets) {
    const auto m = chem::parse_smiles(target);
    const auto closure = retro_closure(m, cfg.max_depth, cfg.max_matches, p.lib);
    for (int trial = 0; trial < 8; ++trial) {
      pricing::PriceCatalog cat;
      // Small pieces are usually buyable, so routes tend to need several steps.
      for (const auto &key : closure)
        if (key != canon(target) &&
            rng.bernoulli(chem::parse_smiles(key).num_atoms() <= 2 ? 0.8 : 0.15))
          cat.set(key, pricing::CatalogEntry{"test", 1 + rng.uniform(0, 98), ""});
      SolvabilityOracle oracle(p.lib, cat, cfg.max_matches);
      const bool expected = oracle.solvable(chem::MoleculeSet({m}), cfg.max_depth);
      const auto r = search::run_search(m, p.prioritizers(), cfg, {&cat});
      EXPECT_EQ(r.solved_nodes > 0, expected) << target << " trial " << trial;
      solvable += expected;
      needs_full_depth += expected && !oracle.solvable(chem::MoleculeSet({m}), cfg.max_depth - 1);
      ++cases;
    }
  }
  EXPECT_GT(needs_full_depth, 0);
  EXPECT_LT(solvable, cases);
}

TEST(Search, RoutesReplay) {
  const auto products = fixture_products();
  util::Rng rng(7);
  int checked = 0;
  for (std::size_t i = 1; i < products.size(); i += 7) {
    const auto cfg = wide_config(2);
    pricing::PriceCatalog cat;
    for (const auto &key : retro_closure(products[i], 2, cfg.max_matches))
      if (rng.bernoulli(0.7)) cat.set(key, pricing::CatalogEntry{"test", 1 + rng.uniform(0, 98), ""});
    const auto r = search::run_search(products[i], fixture_planner().prioritizers(), cfg, {&cat});
    for (const auto &route : search::extract_routes(*r.root)) {
      std::multiset<std::string> current{chem::write_canonical_smiles(products[i])};
      for (const search::SearchEdge *edge : route.edges) {
        const auto sep = edge->reaction_smiles.find(">>");
        const std::string product = edge->reaction_smiles.substr(sep + 2);
        const auto precursors = chem::parse_smiles_set(edge->reaction_smiles.substr(0, sep));
        ASSERT_EQ(current.count(product), 1u);
        current.erase(current.find(product));
        current.insert(precursors.member_keys().begin(), precursors.member_keys().end());
        // The rule really produces these precursors.
        const auto results = templates::apply_template(templates::parse_template(edge->rule),
                                                       chem::parse_smiles(product), cfg.max_matches);
        EXPECT_TRUE(std::any_of(results.begin(), results.end(), [&](const chem::MoleculeSet &s) {
          return s.canonical_key() == precursors.canonical_key();
        }));
      }
      std::vector<chem::Molecule> leaf;
      for (const auto &s : current) {
        EXPECT_TRUE(pricing::is_buyable(cat.lookup(s)));
        leaf.push_back(chem::parse_smiles(s));
      }
      EXPECT_EQ(chem::MoleculeSet(std::move(leaf)).canonical_key(), route.leaf->key());
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Search, Deterministic) {
  const auto products = fixture_products();
  const auto cfg = wide_config(2);
  pricing::PriceCatalog cat;
  util::Rng rng(11);
  for (const auto &key : retro_closure(products[3], 2, cfg.max_matches))
    if (rng.bernoulli(0.5)) cat.set(key, pricing::CatalogEntry{"test", 1 + rng.uniform(0, 98), ""});
  const auto a = search::run_search(products[3], fixture_planner().prioritizers(), cfg, {&cat});
  const auto b = search::run_search(products[3], fixture_planner().prioritizers(), cfg, {&cat});
  EXPECT_EQ(search::serialize_tree(*a.root), search::serialize_tree(*b.root));
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) EXPECT_EQ(a.log[i].node_key, b.log[i].node_key);
}

TEST(Tree, JsonRoundTrip) {
  const auto p = planner({"[C:1][O:2]>>[C:1].[O:2]"});
  const auto cat = catalog({{"C", 1}, {"CC", 1}, {"O", 1}});
  const auto r = search::run_search(chem::parse_smiles("CCOC"), p.prioritizers(), wide_config(), {&cat});
  const std::string text = search::serialize_tree(*r.root);
  EXPECT_EQ(text.rfind("{\n  \"smiles\"", 0), 0u);
  const auto back = search::deserialize_tree(text, {}, &cat);
  EXPECT_EQ(search::serialize_tree(*back), text);
  EXPECT_EQ(search::extract_routes(*back).size(), 2u);

  const search::TreeStyle kelvin{search::TemperatureUnit::kKelvin};
  const std::string k = search::serialize_tree(*r.root, kelvin);
  EXPECT_NE(k.find("298.15"), std::string::npos);
  EXPECT_NEAR(search::deserialize_tree(k, kelvin)->subtrees[0].first.temperature_c, 25.0, 1e-9);

  auto j = nlohmann::json::parse(text);
  j["type_dis"] = 3;
  j["subtrees"][0]["subtree"]["buyable"] = false;
  EXPECT_EQ(search::serialize_tree(*search::deserialize_tree(j.dump())), text);
}

std::string slurp(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Tree, FixtureRoundTripsAndDropsDeprecatedKeys) {
  const std::string canonical = slurp(testing::data_path("toy/tree.json"));
  const auto cat = pricing::PriceCatalog::load(testing::data_path("toy/catalog.csv"));
  const auto tree = search::deserialize_tree(canonical, {}, &cat);
  EXPECT_EQ(search::serialize_tree(*tree), canonical);
  ASSERT_EQ(search::extract_routes(*tree).size(), 1u);
  EXPECT_EQ(tree->subtrees.at(0).first.enzyme, search::kUnknownEnzyme);

  const std::string deprecated = slurp(testing::data_path("toy/tree_deprecated.json"));
  ASSERT_NE(deprecated.find("type_dis"), std::string::npos);
  ASSERT_NE(deprecated.find("buyable"), std::string::npos);
  EXPECT_EQ(search::serialize_tree(*search::deserialize_tree(deprecated)), canonical);
}

TEST(Tree, FormatErrorsNamePath) {
  const auto p = planner({"[C:1][O:2]>>[C:1].[O:2]"});
  const auto cat = catalog({{"C", 1}, {"CC", 1}, {"O", 1}});
  const auto r = search::run_search(chem::parse_smiles("CCOC"), p.prioritizers(), wide_config(), {&cat});
  auto j = nlohmann::json::parse(search::serialize_tree(*r.root));
  j["subtrees"][1]["subtree"]["subtrees"][0].erase("rule");
  try {
    search::deserialize_tree(j.dump());
    FAIL();
  } catch (const FormatError &e) {
    EXPECT_NE(std::string(e.what()).find("$.subtrees[1].subtree.subtrees[0]"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("rule"), std::string::npos);
  }
  EXPECT_THROW(search::deserialize_tree("{"), FormatError);
  EXPECT_THROW(search::deserialize_tree(R"({"smiles":"C","cost_usd_per_g":"x","depth":0,"subtrees":[]})"),
               FormatError);
}

TEST(Tree, DotExport) {
  const auto p = planner({"[C:1][O:2][C:3]>>[C:1][O:2].[C:3]"});
  const auto cat = catalog({{"CO", 0.5}, {"C", 0.5}});
  const auto r = search::run_search(chem::parse_smiles("COC"), p.prioritizers(), wide_config(), {&cat});
  const std::string dot = search::to_dot(*r.root);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
  EXPECT_NE(dot.find("n0 -> n1 [label=\"syn:0 25.0 C\"]"), std::string::npos) << dot;
}

}  // namespace
}  // namespace mhnpath
