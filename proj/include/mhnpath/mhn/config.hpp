//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_MHN_CONFIG_HPP
#define MHNPATH_MHN_CONFIG_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace mhnpath::mhn {

enum class Activation { kTanh, kIdentity };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

/// Hyperparameters of one prioritizer. Defaults follow the tuned
/// configuration (11 epochs, dropout 0.01, lr 1e-4, beta 0.035, tanh
/// association, no input norm, 2 template encoder layers, batch 32,
/// rare-template threshold 3).
struct ModelConfig {
  int fp_bits = 4096;
  int fp_radius = 2;
  int d_assoc = 512;
  /// Encoder output widths; 0 means "same as d_assoc".
  int d_mol = 0;
  int d_temp = 0;
  int mol_layers = 1;
  int temp_layers = 2;
  double beta = 0.035;
  double dropout = 0.01;
  double lr = 1e-4;
  double weight_decay = 1e-2;
  int epochs = 11;
  int batch_size = 32;
  int concat_rand_template_threshold = 3;
  /// Probability of dropping each set bit in an augmentation copy.
  double augment_drop = 0.1;
  Activation association_activation = Activation::kTanh;
  bool input_norm = false;
  bool association_norm = true;
  /// Retrieval iterations; each extra step feeds xi = X p back in.
  int hopfield_steps = 1;
  std::uint64_t seed = 0;

  int mol_width() const { return d_mol > 0 ? d_mol : d_assoc; }
  int temp_width() const { return d_temp > 0 ? d_temp : d_assoc; }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;

  friend bool operator==(const ModelConfig &, const ModelConfig &) = default;
};

/// Keys mirror the field names. Unknown keys raise ConfigError.
nlohmann::ordered_json to_json(const ModelConfig &cfg);
ModelConfig config_from_json(const nlohmann::json &j, ModelConfig base = {});

}  // namespace mhnpath::mhn

#endif  // MHNPATH_MHN_CONFIG_HPP
