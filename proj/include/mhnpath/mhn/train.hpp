//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_MHN_TRAIN_HPP
#define MHNPATH_MHN_TRAIN_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mhnpath/mhn/model.hpp"

namespace mhnpath::mhn {

/// One row of a training set file (TSV: product_smiles, template_id).
struct DatasetRow {
  std::string product_smiles;
  int template_id = 0;
};

/// Throws IoError, or SyntaxError listing every bad row.
std::vector<DatasetRow> read_dataset(const std::filesystem::path &path);
void write_dataset(const std::vector<DatasetRow> &rows, const std::filesystem::path &path);

/// Parses each product and fingerprints it. Throws SyntaxError naming the
/// first bad row.
std::vector<Example> featurize(const std::vector<DatasetRow> &rows, int radius, int n_bits);

struct DatasetSplit {
  std::vector<Example> train;
  std::vector<Example> val;
  std::vector<Example> test;
};

/// Shuffles with seed and cuts 80:10:10 (floor for train and val).
DatasetSplit split_dataset(std::vector<Example> examples, std::uint64_t seed);

/// Adam with decoupled weight decay: p <- p (1 - lr wd) followed by the
/// bias-corrected moment step.
class AdamW {
public:
  AdamW(double lr, double weight_decay) : lr_(lr), weight_decay_(weight_decay) {}

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  void step(TensorMap &params, const TensorMap &grads);
  int steps() const { return steps_; }

private:
  double lr_;
  double weight_decay_;
  int steps_ = 0;
  TensorMap m_;
  TensorMap v_;
};

/// Noisy copies for templates seen fewer than `threshold` times in `train`:
/// each such template gets (threshold - count) copies of its examples
/// (cycled), and every set bit of a copy is dropped with probability `drop`.
std::vector<Example> augmentation_copies(const std::vector<Example> &train, int threshold,
                                         double drop, util::Rng &rng);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0;
  double val_loss = 0;
  double val_top1 = 0;
  double val_top100 = 0;
};

using History = std::vector<EpochStats>;

/// CSV with header epoch,train_loss,val_loss,val_top1,val_top100.
void write_history(const History &history, const std::filesystem::path &path);

/// Fraction of examples whose true template is among the k most probable.
/// Needs a built cache.
double top_k_accuracy(const PrioritizerModel &model, const std::vector<Example> &examples, int k);
/// Mean negative log-likelihood in inference mode.
double mean_nll(const PrioritizerModel &model, const std::vector<Example> &examples);

/// Trains with the optimization fields of cfg (lr, weight_decay, epochs,
/// batch_size, augmentation, seed); architecture and dropout come from the
/// model's own config. Validation metrics are NaN when split.val is empty. The cache
/// is rebuilt on return. Throws EmptyDataset when split.train is empty.
History train(PrioritizerModel &model, const DatasetSplit &split, const ModelConfig &cfg,
              const std::function<void(const EpochStats &)> &on_epoch = {});

}  // namespace mhnpath::mhn

#endif  // MHNPATH_MHN_TRAIN_HPP
