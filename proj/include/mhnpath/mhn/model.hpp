//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_MHN_MODEL_HPP
#define MHNPATH_MHN_MODEL_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "mhnpath/chem/fingerprint.hpp"
#include "mhnpath/mhn/config.hpp"
#include "mhnpath/templates/library.hpp"
#include "mhnpath/util/random.hpp"

namespace mhnpath::mhn {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Named tensors; vectors are stored as n x 1 matrices.
using TensorMap = std::map<std::string, Eigen::MatrixXd>;

/// One fingerprint per column.
using InputMatrix = Eigen::SparseMatrix<double>;

/// Modern Hopfield template prioritizer bound to one template library.
///
/// Parameter names:
///   mol_bn.{gain,bias}           input batch norm (input_norm only)
///   mol.<i>.{w,b}                molecule encoder layer i
///   temp.<i>.{w,b}               template encoder layer i
///   query.{w,b}, key.{w,b}       projections into the associative space
///   query_ln.{gain,bias}, key_ln.{gain,bias}   (association_norm only)
/// Buffers (not trained): mol_bn.running_mean, mol_bn.running_var.
class PrioritizerModel {
public:
  PrioritizerModel() = default;

  const ModelConfig &config() const { return cfg_; }
  int num_templates() const { return static_cast<int>(template_inputs_.cols()); }
  std::uint64_t library_checksum() const { return library_checksum_; }

  TensorMap &parameters() { return params_; }
  const TensorMap &parameters() const { return params_; }
  TensorMap &buffers() { return buffers_; }
  const TensorMap &buffers() const { return buffers_; }
  int parameter_count() const;

  /// Template fingerprints, fp_bits x K.
  const InputMatrix &template_inputs() const { return template_inputs_; }

  /// Encodes every template into the associative space (d_assoc x K).
  /// Must be called again after the parameters change.
  void build_cache();
  void invalidate_cache() { cache_built_ = false; }
  bool cache_built() const { return cache_built_; }
  const Eigen::MatrixXd &template_cache() const { return cache_; }

  /// Replaces beta, leaving the cache valid (beta enters after encoding).
  void set_beta(double beta);

private:
  friend PrioritizerModel init_model(const ModelConfig &, const templates::TemplateLibrary &);

  ModelConfig cfg_;
  TensorMap params_;
  TensorMap buffers_;
  InputMatrix template_inputs_;
  std::uint64_t library_checksum_ = 0;
  Eigen::MatrixXd cache_;
  bool cache_built_ = false;
};

/// Xavier-uniform weights drawn from cfg.seed, zero biases, unit norm
/// gains. The template cache is left unbuilt. Throws ConfigError.
PrioritizerModel init_model(const ModelConfig &cfg, const templates::TemplateLibrary &lib);

/// Stacks fingerprints as sparse columns. Throws ShapeError when a width
/// differs from n_bits.
InputMatrix to_input(std::span<const chem::Fingerprint> fps, int n_bits);

/// Template probabilities for one fingerprint (length K). Requires a built
/// cache; throws ShapeError on width mismatch or unbuilt cache.
Eigen::VectorXd forward(const PrioritizerModel &model, const chem::Fingerprint &fp);
/// K x B probabilities for B input columns.
Eigen::MatrixXd forward_batch(const PrioritizerModel &model, const InputMatrix &inputs);

struct Example {
  chem::Fingerprint fp;
  int template_id = 0;
};

/// Training-time behavior for loss_and_gradients. With training set,
/// dropout is drawn from rng and batch norm uses batch statistics.
struct StepMode {
  bool training = false;
  util::Rng *rng = nullptr;
};

struct LossResult {
  double loss = 0;
  TensorMap gradients;
  /// Batch statistics of the input norm (training mode only).
  Eigen::VectorXd batch_mean;
  Eigen::VectorXd batch_var;
};

/// Mean negative log-likelihood of the true templates and its exact
/// gradient for every parameter. Templates are re-encoded from the current
/// parameters, so the cache is not used. Throws ShapeError, IdOutOfRange,
/// EmptyDataset.
LossResult loss_and_gradients(const PrioritizerModel &model, std::span<const Example> batch,
                              StepMode mode = {});

void save_model(const PrioritizerModel &model, const std::filesystem::path &path);

/// Throws VersionError, ChecksumError (library differs from the one the
/// model was trained on), CorruptFile, IoError. The cache is built.
PrioritizerModel load_model(const std::filesystem::path &path,
                            const templates::TemplateLibrary &lib);

}  // namespace mhnpath::mhn

#endif  // MHNPATH_MHN_MODEL_HPP
