//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/mhn/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "mhnpath/chem/smiles.hpp"
#include "mhnpath/errors.hpp"
#include "mhnpath/util/text.hpp"

namespace mhnpath::mhn {

namespace {

constexpr std::size_t kEvalChunk = 256;
constexpr double kNormMomentum = 0.1;
constexpr std::uint64_t kTrainStream = 0x545241494e303031ULL;

/// Calls fn(probabilities, first index) per chunk of examples.
template <typename Fn>
void for_each_chunk(const PrioritizerModel &model, const std::vector<Example> &examples, Fn fn) {
  for (std::size_t start = 0; start < examples.size(); start += kEvalChunk) {
    const std::size_t end = std::min(examples.size(), start + kEvalChunk);
    std::vector<chem::Fingerprint> fps;
    for (std::size_t i = start; i < end; ++i) fps.push_back(examples[i].fp);
    fn(forward_batch(model, to_input(fps, model.config().fp_bits)), start);
  }
}

/// Position of template t when sorted by descending p, ties by id.
int rank_of(const Eigen::VectorXd &p, int t) {
  int rank = 0;
  for (int j = 0; j < p.size(); ++j)
    if (p(j) > p(t) || (p(j) == p(t) && j < t)) ++rank;
  return rank;
}

}  // namespace

std::vector<DatasetRow> read_dataset(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open training set " + path.string());
  std::string line;
  if (!std::getline(in, line) || util::trim(line) != "product_smiles\ttemplate_id")
    throw SyntaxError(path.string() + ":1: header must be product_smiles<TAB>template_id");
  std::vector<DatasetRow> rows;
  std::string errors;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (util::trim(line).empty()) continue;
    const auto fields = util::split(util::trim(line), '\t');
    const auto id = fields.size() == 2 ? util::parse_number<int>(fields[1]) : std::nullopt;
    if (fields.size() != 2 || fields[0].empty() || !id || *id < 0) {
      errors += path.string() + ":" + std::to_string(line_no) + ": expected product_smiles<TAB>template_id\n";
      continue;
    }
    rows.push_back({fields[0], *id});
  }
  if (!errors.empty()) throw SyntaxError(errors);
  return rows;
}

void write_dataset(const std::vector<DatasetRow> &rows, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "product_smiles\ttemplate_id\n";
  for (const DatasetRow &r : rows) out << r.product_smiles << '\t' << r.template_id << '\n';
}

std::vector<Example> featurize(const std::vector<DatasetRow> &rows, int radius, int n_bits) {
  std::vector<Example> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      out.push_back({chem::fingerprint(chem::parse_smiles(rows[i].product_smiles), radius, n_bits),
                     rows[i].template_id});
    } catch (const SyntaxError &e) {
      throw SyntaxError("row " + std::to_string(i + 1) + ": " + e.what());
    } catch (const ValenceError &e) {
      throw SyntaxError("row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

DatasetSplit split_dataset(std::vector<Example> examples, std::uint64_t seed) {
  util::Rng rng(seed);
  rng.shuffle(examples);
  const std::size_t n = examples.size();
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = n / 10;
  DatasetSplit s;
  const auto at = [&](std::size_t i) { return examples.begin() + static_cast<std::ptrdiff_t>(i); };
  s.train.assign(at(0), at(n_train));
  s.val.assign(at(n_train), at(n_train + n_val));
  s.test.assign(at(n_train + n_val), examples.end());
  return s;
}

void AdamW::step(TensorMap &params, const TensorMap &grads) {
  ++steps_;
  const double c1 = 1.0 - std::pow(kBeta1, steps_);
  const double c2 = 1.0 - std::pow(kBeta2, steps_);
  const double shrink = 1.0 - lr_ * weight_decay_;
  for (auto &[name, p] : params) {
    const Eigen::MatrixXd &g = grads.at(name);
    Eigen::MatrixXd &m = m_.try_emplace(name, Eigen::MatrixXd::Zero(p.rows(), p.cols())).first->second;
    Eigen::MatrixXd &v = v_.try_emplace(name, Eigen::MatrixXd::Zero(p.rows(), p.cols())).first->second;
    m = kBeta1 * m + (1.0 - kBeta1) * g;
    v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
    p *= shrink;
    p.array() -= lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
  }
}

std::vector<Example> augmentation_copies(const std::vector<Example> &train, int threshold,
                                         double drop, util::Rng &rng) {
  std::map<int, std::vector<const Example *>> by_template;
  for (const Example &e : train) by_template[e.template_id].push_back(&e);
  std::vector<Example> out;
  for (const auto &[id, members] : by_template) {
    const int count = static_cast<int>(members.size());
    for (int c = 0; c < threshold - count; ++c) {
      const Example &src = *members[static_cast<std::size_t>(c) % members.size()];
      Example copy{chem::Fingerprint(src.fp.n_bits(), src.fp.radius()), id};
      for (int bit : src.fp.on_bits())
        if (!rng.bernoulli(drop)) copy.fp.set(bit);
      out.push_back(std::move(copy));
    }
  }
  return out;
}

void write_history(const History &history, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "epoch,train_loss,val_loss,val_top1,val_top100\n";
  for (const EpochStats &s : history)
    out << s.epoch << ',' << s.train_loss << ',' << s.val_loss << ',' << s.val_top1 << ','
        << s.val_top100 << '\n';
}

double top_k_accuracy(const PrioritizerModel &model, const std::vector<Example> &examples, int k) {
  if (examples.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t hits = 0;
  for_each_chunk(model, examples, [&](const Eigen::MatrixXd &p, std::size_t start) {
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      const int t = examples[start + static_cast<std::size_t>(c)].template_id;
      if (rank_of(p.col(c), t) < k) ++hits;
    }
  });
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

double mean_nll(const PrioritizerModel &model, const std::vector<Example> &examples) {
  if (examples.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0;
  for_each_chunk(model, examples, [&](const Eigen::MatrixXd &p, std::size_t start) {
    for (Eigen::Index c = 0; c < p.cols(); ++c)
      total -= std::log(p(examples[start + static_cast<std::size_t>(c)].template_id, c));
  });
  return total / static_cast<double>(examples.size());
}

History train(PrioritizerModel &model, const DatasetSplit &split, const ModelConfig &cfg,
              const std::function<void(const EpochStats &)> &on_epoch) {
  cfg.validate();
  if (split.train.empty()) throw EmptyDataset("training split is empty");
  for (const Example &e : split.train)
    if (e.template_id < 0 || e.template_id >= model.num_templates())
      throw IdOutOfRange("template id " + std::to_string(e.template_id) + " outside the library");

  util::Rng rng(cfg.seed ^ kTrainStream);
  AdamW opt(cfg.lr, cfg.weight_decay);
  const bool track_norm = model.config().input_norm;
  History history;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<Example> pool = split.train;
    for (Example &e : augmentation_copies(split.train, cfg.concat_rand_template_threshold,
                                          cfg.augment_drop, rng))
      pool.push_back(std::move(e));
    rng.shuffle(pool);
    model.invalidate_cache();

    double loss_sum = 0;
    for (std::size_t start = 0; start < pool.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(pool.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::span<const Example> batch(pool.data() + start, end - start);
      LossResult r = loss_and_gradients(model, batch, StepMode{true, &rng});
      loss_sum += r.loss * static_cast<double>(batch.size());
      opt.step(model.parameters(), r.gradients);
      if (track_norm) {
        auto &mean = model.buffers().at("mol_bn.running_mean");
        auto &var = model.buffers().at("mol_bn.running_var");
        const double n = static_cast<double>(batch.size());
        const double unbias = n > 1 ? n / (n - 1) : 1.0;
        mean = (1 - kNormMomentum) * mean + kNormMomentum * r.batch_mean;
        var = (1 - kNormMomentum) * var + kNormMomentum * unbias * r.batch_var;
      }
    }
    model.build_cache();
    EpochStats s;
    s.epoch = epoch;
    s.train_loss = loss_sum / static_cast<double>(pool.size());
    s.val_loss = mean_nll(model, split.val);
    s.val_top1 = top_k_accuracy(model, split.val, 1);
    s.val_top100 = top_k_accuracy(model, split.val, 100);
    history.push_back(s);
    if (on_epoch) on_epoch(s);
  }
  model.build_cache();
  return history;
}

}  // namespace mhnpath::mhn
