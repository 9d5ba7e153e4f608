//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/mhn/config.hpp"

#include <bit>
#include <cmath>

#include "mhnpath/errors.hpp"

namespace mhnpath::mhn {

std::string_view activation_name(Activation a) {
  return a == Activation::kTanh ? "tanh" : "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw ConfigError("association_activation must be 'tanh' or 'identity', got '" +
                    std::string(name) + "'");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string &msg) { throw ConfigError(msg); };
  if (fp_bits <= 0 || !std::has_single_bit(static_cast<unsigned>(fp_bits)))
    fail("fp_bits must be a positive power of two");
  if (fp_radius < 0) fail("fp_radius must be >= 0");
  if (d_assoc < 1) fail("d_assoc must be >= 1");
  if (d_mol < 0 || d_temp < 0) fail("d_mol and d_temp must be >= 0");
  if (mol_layers < 1 || temp_layers < 1) fail("encoders need at least one layer");
  if (!(beta > 0) || !std::isfinite(beta)) fail("beta must be > 0");
  if (!(dropout >= 0 && dropout < 1)) fail("dropout must be in [0, 1)");
  if (!(lr >= 0) || !std::isfinite(lr)) fail("lr must be >= 0");
  if (!(weight_decay >= 0)) fail("weight_decay must be >= 0");
  if (epochs < 0) fail("epochs must be >= 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (concat_rand_template_threshold < 0) fail("concat_rand_template_threshold must be >= 0");
  if (!(augment_drop >= 0 && augment_drop < 1)) fail("augment_drop must be in [0, 1)");
  if (hopfield_steps < 1) fail("hopfield_steps must be >= 1");
}

nlohmann::ordered_json to_json(const ModelConfig &c) {
  nlohmann::ordered_json j;
  j["fp_bits"] = c.fp_bits;
  j["fp_radius"] = c.fp_radius;
  j["d_assoc"] = c.d_assoc;
  j["d_mol"] = c.d_mol;
  j["d_temp"] = c.d_temp;
  j["mol_layers"] = c.mol_layers;
  j["temp_layers"] = c.temp_layers;
  j["beta"] = c.beta;
  j["dropout"] = c.dropout;
  j["lr"] = c.lr;
  j["weight_decay"] = c.weight_decay;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["concat_rand_template_threshold"] = c.concat_rand_template_threshold;
  j["augment_drop"] = c.augment_drop;
  j["association_activation"] = activation_name(c.association_activation);
  j["input_norm"] = c.input_norm;
  j["association_norm"] = c.association_norm;
  j["hopfield_steps"] = c.hopfield_steps;
  j["seed"] = c.seed;
  return j;
}

ModelConfig config_from_json(const nlohmann::json &j, ModelConfig c) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  try {
    for (const auto &[key, value] : j.items()) {
      if (key == "fp_bits") c.fp_bits = value.get<int>();
      else if (key == "fp_radius") c.fp_radius = value.get<int>();
      else if (key == "d_assoc") c.d_assoc = value.get<int>();
      else if (key == "d_mol") c.d_mol = value.get<int>();
      else if (key == "d_temp") c.d_temp = value.get<int>();
      else if (key == "mol_layers") c.mol_layers = value.get<int>();
      else if (key == "temp_layers") c.temp_layers = value.get<int>();
      else if (key == "beta") c.beta = value.get<double>();
      else if (key == "dropout") c.dropout = value.get<double>();
      else if (key == "lr") c.lr = value.get<double>();
      else if (key == "weight_decay") c.weight_decay = value.get<double>();
      else if (key == "epochs") c.epochs = value.get<int>();
      else if (key == "batch_size") c.batch_size = value.get<int>();
      else if (key == "concat_rand_template_threshold") c.concat_rand_template_threshold = value.get<int>();
      else if (key == "augment_drop") c.augment_drop = value.get<double>();
      else if (key == "association_activation") c.association_activation = parse_activation(value.get<std::string>());
      else if (key == "input_norm") c.input_norm = value.get<bool>();
      else if (key == "association_norm") c.association_norm = value.get<bool>();
      else if (key == "hopfield_steps") c.hopfield_steps = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else throw ConfigError("unknown model config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("bad model config value: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace mhnpath::mhn
