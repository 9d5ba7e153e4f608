//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"
#include "mhnpath/mhn/ensemble.hpp"
#include "mhnpath/mhn/kernels.hpp"
#include "mhnpath/mhn/train.hpp"
#include "mhnpath/templates/extract.hpp"
#include "mhnpath/templates/rewrite.hpp"
#include "test_support.hpp"

namespace mhnpath {
namespace {

using mhn::Example;
using mhn::ModelConfig;
using mhn::PrioritizerModel;

const templates::ExtractionReport &fixture() {
  static const templates::ExtractionReport report =
      templates::extract_library(templates::read_reactions(testing::data_path("reactions_100.tsv")), 1);
  return report;
}

templates::TemplateLibrary first_templates(int k) {
  templates::TemplateLibrary lib;
  for (int i = 0; i < k; ++i) lib.add(fixture().library.at(i));
  return lib;
}

chem::Fingerprint random_fp(int n_bits, int on, util::Rng &rng) {
  chem::Fingerprint fp(n_bits, 2);
  for (int i = 0; i < on; ++i) fp.set(static_cast<int>(rng.below(static_cast<std::uint64_t>(n_bits))));
  return fp;
}

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.fp_bits = 16;
  cfg.fp_radius = 1;
  cfg.d_assoc = 4;
  cfg.dropout = 0;
  return cfg;
}

void randomize(PrioritizerModel &m, util::Rng &rng, double scale) {
  for (auto &[name, t] : m.parameters())
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-scale, scale);
}

std::filesystem::path scratch(const std::string &name) {
  const auto dir = std::filesystem::temp_directory_path() / "mhnpath_mhn_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

TEST(Config, JsonRoundTripAndValidation) {
  ModelConfig cfg;
  cfg.d_assoc = 64;
  cfg.association_activation = mhn::Activation::kIdentity;
  EXPECT_EQ(mhn::config_from_json(mhn::to_json(cfg)), cfg);
  EXPECT_THROW(mhn::config_from_json(nlohmann::json{{"d_assoc", 0}}), ConfigError);
  EXPECT_THROW(mhn::config_from_json(nlohmann::json{{"beta", 0.0}}), ConfigError);
  EXPECT_THROW(mhn::config_from_json(nlohmann::json{{"dropout", 1.0}}), ConfigError);
  EXPECT_THROW(mhn::config_from_json(nlohmann::json{{"fp_bits", 1000}}), ConfigError);
  EXPECT_THROW(mhn::config_from_json(nlohmann::json{{"depth", 2}}), ConfigError);
  EXPECT_THROW(mhn::config_from_json(nlohmann::json{{"beta", "big"}}), ConfigError);
}

TEST(Init, DeterministicAndXavierBounded) {
  const auto lib = first_templates(3);
  ModelConfig cfg;
  cfg.fp_bits = 128;
  cfg.d_assoc = 100;
  cfg.seed = 7;
  const auto a = mhn::init_model(cfg, lib);
  const auto b = mhn::init_model(cfg, lib);
  EXPECT_EQ(a.parameters(), b.parameters());
  EXPECT_FALSE(a.cache_built());

  // temp.1.w is 100 x 100.
  const auto &w = a.parameters().at("temp.1.w");
  ASSERT_EQ(w.rows(), 100);
  ASSERT_EQ(w.cols(), 100);
  EXPECT_LE(w.cwiseAbs().maxCoeff(), std::sqrt(6.0 / 200.0));
  EXPECT_GT(w.cwiseAbs().maxCoeff(), 0.9 * std::sqrt(6.0 / 200.0));
  EXPECT_TRUE(a.parameters().at("temp.1.b").isZero());

  cfg.seed = 8;
  EXPECT_NE(mhn::init_model(cfg, lib).parameters(), a.parameters());
  cfg.d_assoc = 0;
  EXPECT_THROW(mhn::init_model(cfg, lib), ConfigError);
}

TEST(Softmax, NormalizedForExtremeLogits) {
  util::Rng rng(3);
  for (double scale : {1e-12, 1.0, 1e3, 1e8}) {
    Eigen::MatrixXd logits(50, 7);
    for (Eigen::Index i = 0; i < logits.size(); ++i) logits.data()[i] = rng.uniform(-scale, scale);
    const Eigen::MatrixXd p = mhn::kernels::softmax_columns(logits);
    EXPECT_GE(p.minCoeff(), 0.0);
    for (Eigen::Index c = 0; c < p.cols(); ++c) EXPECT_NEAR(p.col(c).sum(), 1.0, 1e-9);
  }
  EXPECT_EQ(mhn::kernels::softmax_columns(Eigen::MatrixXd::Constant(1, 1, 1e300))(0, 0), 1.0);
}

TEST(Forward, SingletonSymmetryAndBetaLimit) {
  util::Rng rng(11);
  const ModelConfig cfg = tiny_config();

  auto one = mhn::init_model(cfg, first_templates(1));
  one.build_cache();
  EXPECT_EQ(mhn::forward(one, random_fp(16, 4, rng))(0), 1.0);

  // Zero template encoder: every template encodes identically.
  auto two = mhn::init_model(cfg, first_templates(2));
  for (auto &[name, t] : two.parameters())
    if (name.starts_with("temp.")) t.setZero();
  two.build_cache();
  const Eigen::VectorXd p2 = mhn::forward(two, random_fp(16, 4, rng));
  EXPECT_NEAR(p2(0), 0.5, 1e-9);
  EXPECT_NEAR(p2(1), 0.5, 1e-9);

  auto flat = mhn::init_model(cfg, first_templates(6));
  flat.set_beta(1e-12);
  flat.build_cache();
  const Eigen::VectorXd p6 = mhn::forward(flat, random_fp(16, 4, rng));
  EXPECT_LT((p6.array() - 1.0 / 6).abs().maxCoeff(), 1e-6);
}

TEST(Forward, ProbabilitiesSumToOne) {
  util::Rng rng(12);
  ModelConfig cfg = tiny_config();
  for (double beta : {1e-6, 0.035, 1.0, 50.0}) {
    cfg.beta = beta;
    auto m = mhn::init_model(cfg, first_templates(8));
    randomize(m, rng, 2.0);
    m.build_cache();
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd p = mhn::forward(m, random_fp(16, 5, rng));
      EXPECT_GE(p.minCoeff(), 0.0);
      EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    }
  }
}

TEST(Forward, Errors) {
  auto m = mhn::init_model(tiny_config(), first_templates(2));
  util::Rng rng(1);
  EXPECT_THROW(mhn::forward(m, random_fp(16, 2, rng)), ShapeError);
  m.build_cache();
  EXPECT_THROW(mhn::forward(m, random_fp(32, 2, rng)), ShapeError);
}

TEST(Loss, SingleTemplateIsZeroWithZeroGradients) {
  util::Rng rng(5);
  auto m = mhn::init_model(tiny_config(), first_templates(1));
  randomize(m, rng, 1.0);
  const std::vector<Example> batch{{random_fp(16, 3, rng), 0}, {random_fp(16, 3, rng), 0}};
  const auto r = mhn::loss_and_gradients(m, batch);
  EXPECT_EQ(r.loss, 0.0);
  for (const auto &[name, g] : r.gradients) EXPECT_TRUE(g.isZero()) << name;
}

TEST(Loss, UniformModelGivesLogK) {
  util::Rng rng(6);
  auto m = mhn::init_model(tiny_config(), first_templates(5));
  for (auto &[name, t] : m.parameters()) t.setZero();
  const std::vector<Example> batch{{random_fp(16, 3, rng), 0}, {random_fp(16, 3, rng), 4}};
  EXPECT_NEAR(mhn::loss_and_gradients(m, batch).loss, std::log(5.0), 1e-6);
}

TEST(Loss, Errors) {
  util::Rng rng(6);
  const auto m = mhn::init_model(tiny_config(), first_templates(3));
  EXPECT_THROW(mhn::loss_and_gradients(m, std::vector<Example>{}), EmptyDataset);
  EXPECT_THROW(mhn::loss_and_gradients(m, std::vector<Example>{{random_fp(16, 3, rng), 3}}), IdOutOfRange);
  EXPECT_THROW(mhn::loss_and_gradients(m, std::vector<Example>{{random_fp(8, 3, rng), 0}}), ShapeError);
}

// Central finite differences over every parameter entry.
void expect_gradients_match(const PrioritizerModel &model, const std::vector<Example> &batch,
                            bool training, const std::string &label) {
  util::Rng unused(0);
  const mhn::StepMode mode{training, &unused};
  const auto analytic = mhn::loss_and_gradients(model, batch, mode).gradients;
  const double h = 1e-5;
  int checked = 0;
  for (const auto &[name, tensor] : model.parameters()) {
    for (Eigen::Index i = 0; i < tensor.size(); ++i) {
      PrioritizerModel plus = model;
      PrioritizerModel minus = model;
      plus.parameters()[name].data()[i] += h;
      minus.parameters()[name].data()[i] -= h;
      const double numeric = (mhn::loss_and_gradients(plus, batch, mode).loss -
                              mhn::loss_and_gradients(minus, batch, mode).loss) /
                             (2 * h);
      const double a = analytic.at(name).data()[i];
      const double err = std::abs(a - numeric);
      const bool ok = err <= 1e-7 || err <= 1e-4 * std::max(std::abs(a), std::abs(numeric));
      EXPECT_TRUE(ok) << label << ' ' << name << '[' << i << "] analytic " << a << " numeric "
                      << numeric;
      ++checked;
    }
  }
  EXPECT_EQ(checked, model.parameter_count());
}

TEST(Loss, GradientsMatchFiniteDifferences) {
  util::Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    ModelConfig cfg = tiny_config();
    cfg.d_assoc = 2 + static_cast<int>(rng.below(4));
    cfg.d_mol = rng.bernoulli(0.5) ? 0 : 3 + static_cast<int>(rng.below(4));
    cfg.d_temp = rng.bernoulli(0.5) ? 0 : 3 + static_cast<int>(rng.below(4));
    cfg.mol_layers = 1 + static_cast<int>(rng.below(2));
    cfg.temp_layers = 1 + static_cast<int>(rng.below(2));
    cfg.beta = rng.uniform(0.3, 3.0);
    cfg.association_activation = rng.bernoulli(0.5) ? mhn::Activation::kTanh : mhn::Activation::kIdentity;
    cfg.association_norm = rng.bernoulli(0.7);
    cfg.input_norm = rng.bernoulli(0.4);
    cfg.hopfield_steps = 1 + static_cast<int>(rng.below(3));
    cfg.seed = trial;
    const int k = 2 + static_cast<int>(rng.below(4));
    auto m = mhn::init_model(cfg, first_templates(k));
    randomize(m, rng, 1.0);
    ASSERT_LE(m.parameter_count(), 1000);
    std::vector<Example> batch;
    const int n = 2 + static_cast<int>(rng.below(3));
    for (int i = 0; i < n; ++i)
      batch.push_back({random_fp(16, 5, rng), static_cast<int>(rng.below(static_cast<std::uint64_t>(k)))});
    const bool training = cfg.input_norm && rng.bernoulli(0.5);
    expect_gradients_match(m, batch, training, "trial " + std::to_string(trial));
  }
}

TEST(Loss, EightParameterModel) {
  // 2 bits -> 1 unit encoders, 1-dim association, identity, no norms.
  ModelConfig cfg = tiny_config();
  cfg.fp_bits = 2;
  cfg.d_assoc = 1;
  cfg.temp_layers = 1;
  cfg.association_norm = false;
  cfg.association_activation = mhn::Activation::kIdentity;
  auto m = mhn::init_model(cfg, first_templates(3));
  EXPECT_EQ(m.parameter_count(), 10);
  util::Rng rng(8);
  randomize(m, rng, 1.5);
  expect_gradients_match(m, {{random_fp(2, 1, rng), 0}, {random_fp(2, 2, rng), 2}}, false, "tiny");
}

TEST(Train, ZeroLearningRateKeepsWeightsBitExact) {
  util::Rng rng(9);
  ModelConfig cfg = tiny_config();
  cfg.dropout = 0.2;
  auto m = mhn::init_model(cfg, first_templates(4));
  const auto before = m.parameters();
  mhn::DatasetSplit split;
  for (int i = 0; i < 12; ++i) split.train.push_back({random_fp(16, 4, rng), i % 4});
  cfg.lr = 0;
  cfg.epochs = 3;
  cfg.batch_size = 5;
  const auto history = mhn::train(m, split, cfg);
  EXPECT_EQ(history.size(), 3u);
  EXPECT_EQ(m.parameters(), before);
  EXPECT_TRUE(std::isnan(history[0].val_top1));
}

TEST(Train, DecoupledDecayShrinksZeroGradientWeights) {
  util::Rng rng(10);
  mhn::TensorMap params{{"w", Eigen::MatrixXd::Random(3, 3)}};
  const mhn::TensorMap grads{{"w", Eigen::MatrixXd::Zero(3, 3)}};
  mhn::AdamW opt(0.05, 0.1);
  for (int step = 0; step < 10; ++step) {
    const Eigen::MatrixXd prev = params["w"];
    opt.step(params, grads);
    EXPECT_TRUE((params["w"].array().abs() < prev.array().abs()).all());
    EXPECT_TRUE(params["w"].isApprox(prev * (1 - 0.05 * 0.1)));
  }
}

TEST(Train, AugmentationTopsUpRareTemplates) {
  util::Rng rng(4);
  std::vector<Example> train;
  train.push_back({random_fp(64, 20, rng), 0});
  for (int i = 0; i < 2; ++i) train.push_back({random_fp(64, 20, rng), 1});
  for (int i = 0; i < 5; ++i) train.push_back({random_fp(64, 20, rng), 2});
  const auto copies = mhn::augmentation_copies(train, 3, 0.5, rng);
  std::map<int, int> count;
  for (const auto &c : copies) ++count[c.template_id];
  EXPECT_EQ(count[0], 2);
  EXPECT_EQ(count[1], 1);
  EXPECT_EQ(count[2], 0);
  for (const auto &c : copies) EXPECT_TRUE(c.fp.subset_of(train[c.template_id == 0 ? 0 : 1].fp));
  EXPECT_TRUE(mhn::augmentation_copies(train, 0, 0.5, rng).empty());
}

TEST(Train, SplitIsEightyTenTen) {
  util::Rng rng(1);
  std::vector<Example> all;
  for (int i = 0; i < 95; ++i) all.push_back({random_fp(16, 2, rng), i});
  const auto s = mhn::split_dataset(all, 3);
  EXPECT_EQ(s.train.size(), 76u);
  EXPECT_EQ(s.val.size(), 9u);
  EXPECT_EQ(s.test.size(), 10u);
  std::set<int> ids;
  for (const auto *part : {&s.train, &s.val, &s.test})
    for (const auto &e : *part) ids.insert(e.template_id);
  EXPECT_EQ(ids.size(), 95u);
  EXPECT_EQ(mhn::split_dataset(all, 3).train[0].template_id, s.train[0].template_id);
}

TEST(Train, ToySetIsMemorized) {
  // 50 distinct products, 20 templates assigned round-robin.
  std::vector<std::string> smiles;
  std::set<std::string> seen;
  for (const auto &rec : templates::read_reactions(testing::data_path("reactions_100.tsv"))) {
    const auto product = rec.reaction.product.without_maps();
    if (seen.insert(chem::write_canonical_smiles(product)).second) smiles.push_back(chem::write_canonical_smiles(product));
    if (smiles.size() == 50) break;
  }
  ASSERT_EQ(smiles.size(), 50u);
  ModelConfig cfg;
  cfg.fp_bits = 2048;
  cfg.d_assoc = 64;
  cfg.temp_layers = 1;
  cfg.beta = 0.5;
  cfg.lr = 2e-3;
  cfg.weight_decay = 0;
  cfg.dropout = 0;
  cfg.epochs = 200;
  cfg.batch_size = 10;
  cfg.concat_rand_template_threshold = 0;
  std::vector<mhn::DatasetRow> rows;
  for (std::size_t i = 0; i < smiles.size(); ++i) rows.push_back({smiles[i], static_cast<int>(i % 20)});
  mhn::DatasetSplit split;
  split.train = mhn::featurize(rows, cfg.fp_radius, cfg.fp_bits);
  split.val = split.train;

  const auto start = std::chrono::steady_clock::now();
  auto m = mhn::init_model(cfg, first_templates(20));
  const auto history = mhn::train(m, split, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(mhn::top_k_accuracy(m, split.train, 1), 0.95);
  EXPECT_LT(seconds, 120.0);
  EXPECT_LT(history.back().train_loss, history.front().train_loss);
  EXPECT_EQ(history.back().val_top100, 1.0);
}

TEST(Serialize, RoundTripIsBitExact) {
  util::Rng rng(13);
  ModelConfig cfg = tiny_config();
  cfg.input_norm = true;
  cfg.hopfield_steps = 2;
  const auto lib = first_templates(6);
  auto m = mhn::init_model(cfg, lib);
  randomize(m, rng, 1.0);
  m.buffers()["mol_bn.running_mean"].setRandom();
  m.build_cache();
  const auto path = scratch("roundtrip.mhnp");
  mhn::save_model(m, path);
  const auto loaded = mhn::load_model(path, lib);
  EXPECT_EQ(loaded.config(), cfg);
  for (int i = 0; i < 100; ++i) {
    const auto fp = random_fp(16, 1 + static_cast<int>(rng.below(8)), rng);
    EXPECT_EQ(mhn::forward(loaded, fp), mhn::forward(m, fp));
  }
}

TEST(Serialize, RejectsBadFiles) {
  const auto lib = first_templates(3);
  const auto m = mhn::init_model(tiny_config(), lib);
  const auto path = scratch("model.mhnp");
  mhn::save_model(m, path);
  const auto size = std::filesystem::file_size(path);

  const auto truncated = scratch("truncated.mhnp");
  std::filesystem::copy_file(path, truncated, std::filesystem::copy_options::overwrite_existing);
  std::filesystem::resize_file(truncated, size - 5);
  EXPECT_THROW(mhn::load_model(truncated, lib), CorruptFile);
  std::filesystem::resize_file(truncated, 2);
  EXPECT_THROW(mhn::load_model(truncated, lib), CorruptFile);

  auto bigger = lib;
  bigger.add(fixture().library.at(3));
  EXPECT_THROW(mhn::load_model(path, bigger), ChecksumError);

  const auto versioned = scratch("version.mhnp");
  std::filesystem::copy_file(path, versioned, std::filesystem::copy_options::overwrite_existing);
  {
    std::fstream f(versioned, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    f.put(2);
  }
  EXPECT_THROW(mhn::load_model(versioned, lib), VersionError);
  EXPECT_THROW(mhn::load_model(scratch("missing.mhnp"), lib), IoError);
}

TEST(Screen, Examples) {
  const auto fp = chem::fingerprint(chem::parse_smiles("CCO"));
  EXPECT_TRUE(mhn::substructure_screen(fp, templates::parse_template("[C:1]>>[C:1]")));
  const auto amine = templates::parse_template("[N;H2;D1;+0:1]>>[N;H2;D1;+0:1]");
  ASSERT_FALSE(templates::screen_bits(amine, 4096).empty());
  EXPECT_FALSE(mhn::substructure_screen(fp, amine));
  EXPECT_TRUE(mhn::substructure_screen(chem::fingerprint(chem::parse_smiles("CCN")), amine));
  EXPECT_TRUE(mhn::substructure_screen(fp, templates::parse_template("[#6][O]>>[#6].[O]")));
}

TEST(Screen, SoundOverFixture) {
  std::vector<chem::Molecule> molecules;
  for (const auto &rec : templates::read_reactions(testing::data_path("reactions_100.tsv"))) {
    molecules.push_back(rec.reaction.product.without_maps());
    for (const auto &r : rec.reaction.reactants.members()) molecules.push_back(r.without_maps());
  }
  int applied = 0;
  int violations = 0;
  for (const auto &m : molecules) {
    const auto fp = chem::fingerprint(m);
    for (const auto &t : fixture().library.templates()) {
      if (templates::apply_template(t, m).empty()) continue;
      ++applied;
      if (!mhn::substructure_screen(fp, t)) ++violations;
    }
  }
  EXPECT_GT(applied, 100);
  EXPECT_EQ(violations, 0);
}

TEST(Rank, SingleModelFollowsForwardOrder) {
  util::Rng rng(14);
  const auto lib = first_templates(10);
  auto m = mhn::init_model(tiny_config(), lib);
  randomize(m, rng, 1.0);
  m.build_cache();
  const mhn::Ensemble e({m}, lib);
  const auto fp = random_fp(16, 5, rng);
  const Eigen::VectorXd p = mhn::forward(m, fp);
  std::vector<int> order(10);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p(a) > p(b); });
  const auto ranked = mhn::rank_templates(e, fp, 10, false);
  ASSERT_EQ(ranked.size(), 10u);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(ranked[i].template_id, order[i]);
    EXPECT_EQ(ranked[i].score, p(order[i]));
  }
  EXPECT_EQ(mhn::rank_templates(e, fp, 3, false).size(), 3u);
  EXPECT_THROW(mhn::rank_templates(e, fp, 0, false), ConfigError);
}

TEST(Rank, CollatesByMaximum) {
  util::Rng rng(15);
  const auto lib = first_templates(8);
  std::vector<PrioritizerModel> members;
  for (int i = 0; i < 3; ++i) {
    auto m = mhn::init_model(tiny_config(), lib);
    randomize(m, rng, 1.5);
    members.push_back(std::move(m));
  }
  const mhn::Ensemble e(members, lib);
  for (int trial = 0; trial < 20; ++trial) {
    const auto fp = random_fp(16, 4, rng);
    const Eigen::VectorXd collated = e.collated_scores(fp);
    Eigen::VectorXd want = mhn::forward(e.models()[0], fp);
    for (int i = 1; i < 3; ++i) want = want.cwiseMax(mhn::forward(e.models()[i], fp));
    EXPECT_EQ(collated, want);
    for (const auto &m : e.models()) EXPECT_TRUE((collated.array() >= mhn::forward(m, fp).array()).all());
  }
  EXPECT_THROW(mhn::Ensemble({}, lib), ConfigError);
  EXPECT_THROW(mhn::Ensemble(members, first_templates(7)), ChecksumError);
}

TEST(Rank, BetaScalingKeepsOrder) {
  util::Rng rng(16);
  const auto lib = first_templates(12);
  auto m = mhn::init_model(tiny_config(), lib);
  randomize(m, rng, 1.0);
  m.build_cache();
  for (int trial = 0; trial < 10; ++trial) {
    const auto fp = random_fp(16, 5, rng);
    const auto base = mhn::rank_templates(mhn::Ensemble({m}, lib), fp, 12, false);
    for (double c : {0.01, 0.5, 3.0, 40.0}) {
      auto scaled = m;
      scaled.set_beta(m.config().beta * c);
      const auto ranked = mhn::rank_templates(mhn::Ensemble({scaled}, lib), fp, 12, false);
      for (std::size_t i = 0; i < ranked.size(); ++i)
        EXPECT_EQ(ranked[i].template_id, base[i].template_id) << "c=" << c;
    }
  }
}

TEST(Rank, ScreenRemovesFailingTemplates) {
  const auto &lib = fixture().library;
  ModelConfig cfg;
  cfg.d_assoc = 8;
  cfg.temp_layers = 1;
  const mhn::Ensemble e({mhn::init_model(cfg, lib)}, lib);
  const auto mol = chem::parse_smiles("CCO");
  const auto screened = mhn::rank_templates(e, mol, lib.size(), true);
  const auto all = mhn::rank_templates(e, mol, lib.size(), false);
  EXPECT_EQ(all.size(), static_cast<std::size_t>(lib.size()));
  EXPECT_LT(screened.size(), all.size());
  const auto fp = e.featurize(mol);
  for (const auto &r : screened) EXPECT_TRUE(mhn::substructure_screen(fp, e.screen_bits(r.template_id)));
}

TEST(Dataset, ReadWriteRoundTrip) {
  const auto path = scratch("train.tsv");
  const std::vector<mhn::DatasetRow> rows{{"CCO", 0}, {"c1ccccc1", 3}};
  mhn::write_dataset(rows, path);
  const auto back = mhn::read_dataset(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].product_smiles, "c1ccccc1");
  EXPECT_EQ(back[1].template_id, 3);
  {
    std::ofstream out(path);
    out << "product_smiles\ttemplate_id\nCCO\tx\nCCN\n";
  }
  try {
    mhn::read_dataset(path);
    FAIL();
  } catch (const SyntaxError &e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }
}

}  // namespace
}  // namespace mhnpath
