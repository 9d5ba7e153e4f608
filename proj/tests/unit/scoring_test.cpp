//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"
#include "mhnpath/scoring/scoring.hpp"
#include "mhnpath/util/random.hpp"

namespace mhnpath {
namespace {

using conditions::ReactionConditions;
using scoring::ScoreWeights;

std::string canon(const char *s) { return chem::write_canonical_smiles(chem::parse_smiles(s)); }

TEST(CostScore, Examples) {
  EXPECT_EQ(scoring::cost_score(500), -1.0);
  EXPECT_EQ(scoring::cost_score(0), 0.0);
  EXPECT_EQ(scoring::cost_score(250), -0.5);
  EXPECT_THROW(scoring::cost_score(500.5), DomainError);
  EXPECT_THROW(scoring::cost_score(-1), DomainError);
}

TEST(TempScore, Examples) {
  EXPECT_EQ(scoring::temp_score(300), -1.0);
  EXPECT_EQ(scoring::temp_score(0), 0.0);
  EXPECT_NEAR(scoring::temp_score(-23.81), 0.0794, 1e-4);
  EXPECT_EQ(scoring::temp_score(1000), -1.0);
  EXPECT_NEAR(scoring::temp_score(-250), 1.0 / 3.0, 1e-15);
}

TEST(SolventScore, MeanOfClasses) {
  scoring::ToxicityDB db;
  db.set(canon("ClCCl"), -1);
  db.set(canon("CCO"), 1);
  ReactionConditions c;
  c.solvents = {canon("ClCCl")};
  EXPECT_EQ(scoring::solvent_score(c, db), -1.0);
  c.solvents.push_back(canon("CCO"));
  EXPECT_EQ(scoring::solvent_score(c, db), 0.0);
  c.solvents.clear();
  EXPECT_EQ(scoring::solvent_score(c, db), 0.0);
  c.reagents = {canon("CCO"), canon("O")};
  EXPECT_EQ(scoring::solvent_score(c, db), 0.5);
  EXPECT_THROW(db.set("C", 2), DomainError);
}

TEST(SolventScore, StaysInRange) {
  scoring::ToxicityDB db;
  const char *smiles[] = {"C", "CC", "CCC", "CCCC", "CO", "CN"};
  util::Rng rng(31);
  for (const char *s : smiles) db.set(canon(s), static_cast<int>(rng.below(3)) - 1);
  for (int trial = 0; trial < 100; ++trial) {
    ReactionConditions c;
    for (int i = 0, n = static_cast<int>(rng.below(6)); i < n; ++i) c.solvents.push_back(canon(smiles[rng.below(6)]));
    for (int i = 0, n = static_cast<int>(rng.below(6)); i < n; ++i) c.reagents.push_back(canon(smiles[rng.below(6)]));
    const double s = scoring::solvent_score(c, db);
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(Composite, Examples) {
  EXPECT_EQ(scoring::composite_score(-1, -1, -1, {1, 1, 1}), -3.0);
  EXPECT_EQ(scoring::composite_score(-0.37, -0.9, 0.5, {1, 0, 0}), -0.37);
  EXPECT_NEAR(scoring::composite_score(-0.2, -0.5, 1, {2, 1, 0.5}), -0.4, 1e-15);
}

TEST(Composite, Monotone) {
  const ScoreWeights w{1.0, 0.7, 0.3};
  const scoring::ToxicityDB db;
  for (double cost = 0; cost < 500; cost += 25)
    EXPECT_LE(scoring::composite_score(scoring::cost_score(cost + 25), 0, 0, w),
              scoring::composite_score(scoring::cost_score(cost), 0, 0, w));
  for (double t = -150; t < 350; t += 10)
    EXPECT_LE(scoring::composite_score(0, scoring::temp_score(t + 10), 0, w),
              scoring::composite_score(0, scoring::temp_score(t), 0, w));
  for (double s = -1; s < 1; s += 0.25)
    EXPECT_GE(scoring::composite_score(0, 0, s + 0.25, w), scoring::composite_score(0, 0, s, w));
}

TEST(Weights, Validation) {
  EXPECT_NO_THROW(ScoreWeights{}.validate());
  EXPECT_THROW((ScoreWeights{0, 0, 0}.validate()), ConfigError);
  EXPECT_THROW((ScoreWeights{-1, 1, 1}.validate()), ConfigError);
}

TEST(SetCost, SumsThenClamps) {
  EXPECT_EQ(scoring::set_cost(std::vector<double>{10, 20}), 30.0);
  EXPECT_EQ(scoring::set_cost(std::vector<double>{400, 500}), 500.0);
  EXPECT_EQ(scoring::set_cost(std::vector<double>{}), 0.0);
}

TEST(ToxicityDB, LoadReportsBadRows) {
  const auto dir = std::filesystem::temp_directory_path() / "mhnpath_scoring_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "tox.csv";
  {
    std::ofstream out(path);
    out << "canonical_smiles,class,source\nClCCl,-1,acs\nOCC,1,user\n";
  }
  const auto db = scoring::ToxicityDB::load(path);
  EXPECT_EQ(db.class_of(canon("CCO")), 1);
  EXPECT_EQ(db.class_of(canon("C(Cl)Cl")), -1);
  EXPECT_EQ(db.class_of(canon("CCCC")), 0);
  {
    std::ofstream out(path);
    out << "canonical_smiles,class,source\nClCCl,2,acs\nOCC,1,web\n";
  }
  try {
    scoring::ToxicityDB::load(path);
    FAIL();
  } catch (const SyntaxError &e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }
}

}  // namespace
}  // namespace mhnpath
