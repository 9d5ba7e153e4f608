//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#include "mhnpath/mhn/model.hpp"

#include <cmath>
#include <optional>

#include "mhnpath/errors.hpp"
#include "mhnpath/mhn/kernels.hpp"
#include "mhnpath/templates/template.hpp"

namespace mhnpath::mhn {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string layer_key(const char *prefix, int layer, const char *leaf) {
  return std::string(prefix) + "." + std::to_string(layer) + "." + leaf;
}

std::string key(const char *prefix, const char *leaf) {
  return std::string(prefix) + "." + leaf;
}

VectorXd vec(const MatrixXd &m) { return m.col(0); }

void xavier(MatrixXd &w, util::Rng &rng) {
  const double bound = std::sqrt(6.0) / std::sqrt(static_cast<double>(w.rows() + w.cols()));
  // Column-major fill order is part of the seed contract.
  for (Eigen::Index c = 0; c < w.cols(); ++c)
    for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-bound, bound);
}

struct EncoderTrace {
  std::vector<MatrixXd> pre;
  std::vector<MatrixXd> mask;
  std::vector<MatrixXd> out;
};

MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, util::Rng &rng) {
  MatrixXd mask(rows, cols);
  const double keep = 1.0 / (1.0 - p);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) mask(r, c) = rng.uniform() < p ? 0.0 : keep;
  return mask;
}

template <typename In>
MatrixXd run_encoder(const TensorMap &p, const char *prefix, int layers, const In &x,
                     const StepMode &mode, double dropout, EncoderTrace *trace) {
  MatrixXd h;
  for (int i = 0; i < layers; ++i) {
    MatrixXd z = i == 0 ? MatrixXd(p.at(layer_key(prefix, i, "w")) * x)
                        : MatrixXd(p.at(layer_key(prefix, i, "w")) * h);
    z.colwise() += vec(p.at(layer_key(prefix, i, "b")));
    MatrixXd a = kernels::elu(z);
    MatrixXd mask;
    if (mode.training && dropout > 0) {
      mask = dropout_mask(a.rows(), a.cols(), dropout, *mode.rng);
      a = a.cwiseProduct(mask);
    }
    if (trace) {
      trace->pre.push_back(std::move(z));
      trace->mask.push_back(std::move(mask));
      trace->out.push_back(a);
    }
    h = std::move(a);
  }
  return h;
}

/// Returns dL/dx when want_input is set, otherwise an empty matrix.
template <typename In>
MatrixXd backward_encoder(const TensorMap &p, const char *prefix, int layers, const In &x,
                          const EncoderTrace &trace, MatrixXd g, TensorMap &grads,
                          bool want_input) {
  for (int i = layers - 1; i >= 0; --i) {
    const auto iu = static_cast<std::size_t>(i);
    if (trace.mask[iu].size() > 0) g = g.cwiseProduct(trace.mask[iu]);
    g = kernels::elu_backward(trace.pre[iu], g);
    const MatrixXd &w = p.at(layer_key(prefix, i, "w"));
    grads[layer_key(prefix, i, "b")] += g.rowwise().sum();
    if (i == 0) {
      grads[layer_key(prefix, i, "w")] += g * x.transpose();
      if (want_input) return w.transpose() * g;
      return {};
    }
    grads[layer_key(prefix, i, "w")] += g * trace.out[iu - 1].transpose();
    g = w.transpose() * g;
  }
  return {};
}

struct ProjectionTrace {
  kernels::LayerNormCache ln;
  MatrixXd out;
};

MatrixXd project(const TensorMap &p, const ModelConfig &cfg, const char *prefix,
                 const char *norm_prefix, const MatrixXd &h, ProjectionTrace *trace) {
  MatrixXd z = p.at(key(prefix, "w")) * h;
  z.colwise() += vec(p.at(key(prefix, "b")));
  if (cfg.association_norm) {
    kernels::LayerNormCache cache;
    z = kernels::layer_norm(z, vec(p.at(key(norm_prefix, "gain"))),
                            vec(p.at(key(norm_prefix, "bias"))), cache);
    if (trace) trace->ln = std::move(cache);
  }
  if (cfg.association_activation == Activation::kTanh) z = z.array().tanh().matrix();
  if (trace) trace->out = z;
  return z;
}

/// Returns dL/dh.
MatrixXd backward_projection(const TensorMap &p, const ModelConfig &cfg, const char *prefix,
                             const char *norm_prefix, const MatrixXd &h,
                             const ProjectionTrace &trace, MatrixXd g, TensorMap &grads) {
  if (cfg.association_activation == Activation::kTanh)
    g = (g.array() * (1.0 - trace.out.array().square())).matrix();
  if (cfg.association_norm) {
    VectorXd gg = VectorXd::Zero(g.rows());
    VectorXd gb = VectorXd::Zero(g.rows());
    g = kernels::layer_norm_backward(g, vec(p.at(key(norm_prefix, "gain"))), trace.ln, gg, gb);
    grads[key(norm_prefix, "gain")] += gg;
    grads[key(norm_prefix, "bias")] += gb;
  }
  grads[key(prefix, "b")] += g.rowwise().sum();
  grads[key(prefix, "w")] += g * h.transpose();
  return p.at(key(prefix, "w")).transpose() * g;
}

struct InputNormTrace {
  kernels::BatchNormCache cache;
};

/// Input batch norm. In eval mode the running statistics are used.
MatrixXd input_norm(const PrioritizerModel &model, const InputMatrix &x, const StepMode &mode,
                    InputNormTrace *trace, VectorXd *batch_mean, VectorXd *batch_var) {
  const TensorMap &p = model.parameters();
  const VectorXd gain = vec(p.at("mol_bn.gain"));
  const VectorXd bias = vec(p.at("mol_bn.bias"));
  const MatrixXd dense(x);
  kernels::BatchNormCache cache;
  MatrixXd out;
  if (mode.training) {
    VectorXd mean, var;
    out = kernels::batch_norm_train(dense, gain, bias, cache, mean, var);
    if (batch_mean) *batch_mean = std::move(mean);
    if (batch_var) *batch_var = std::move(var);
  } else {
    const VectorXd mean = vec(model.buffers().at("mol_bn.running_mean"));
    const VectorXd var = vec(model.buffers().at("mol_bn.running_var"));
    cache.inv_std = (var.array() + kernels::kNormEps).rsqrt();
    cache.normalized = (dense.colwise() - mean).array().colwise() * cache.inv_std.array();
    out = (cache.normalized.array().colwise() * gain.array()).colwise() + bias.array();
  }
  if (trace) trace->cache = std::move(cache);
  return out;
}

struct QueryTrace {
  std::optional<MatrixXd> normed;
  InputNormTrace norm;
  EncoderTrace encoder;
  MatrixXd hidden;
  ProjectionTrace projection;
};

MatrixXd encode_queries(const PrioritizerModel &model, const InputMatrix &x, const StepMode &mode,
                        QueryTrace *trace, LossResult *stats) {
  const ModelConfig &cfg = model.config();
  const TensorMap &p = model.parameters();
  EncoderTrace *et = trace ? &trace->encoder : nullptr;
  MatrixXd h;
  if (cfg.input_norm) {
    MatrixXd normed = input_norm(model, x, mode, trace ? &trace->norm : nullptr,
                                 stats ? &stats->batch_mean : nullptr,
                                 stats ? &stats->batch_var : nullptr);
    h = run_encoder(p, "mol", cfg.mol_layers, normed, mode, cfg.dropout, et);
    if (trace) trace->normed = std::move(normed);
  } else {
    h = run_encoder(p, "mol", cfg.mol_layers, x, mode, cfg.dropout, et);
  }
  MatrixXd xi = project(p, cfg, "query", "query_ln", h, trace ? &trace->projection : nullptr);
  if (trace) trace->hidden = std::move(h);
  return xi;
}

struct KeyTrace {
  EncoderTrace encoder;
  MatrixXd hidden;
  ProjectionTrace projection;
};

MatrixXd encode_keys(const PrioritizerModel &model, const StepMode &mode, KeyTrace *trace) {
  const ModelConfig &cfg = model.config();
  const TensorMap &p = model.parameters();
  MatrixXd h = run_encoder(p, "temp", cfg.temp_layers, model.template_inputs(), mode, cfg.dropout,
                           trace ? &trace->encoder : nullptr);
  MatrixXd keys = project(p, cfg, "key", "key_ln", h, trace ? &trace->projection : nullptr);
  if (trace) trace->hidden = std::move(h);
  return keys;
}

/// Hopfield retrieval: p = softmax(beta X^T xi), repeated with xi = X p.
/// Returns the logits of every step (the last one yields the output).
std::vector<MatrixXd> retrieve(const MatrixXd &keys, MatrixXd xi, double beta, int steps,
                               std::vector<MatrixXd> *states, std::vector<MatrixXd> *probs) {
  std::vector<MatrixXd> logits;
  for (int s = 0; s < steps; ++s) {
    logits.push_back(beta * (keys.transpose() * xi));
    if (states) states->push_back(xi);
    if (s + 1 < steps) {
      MatrixXd p = kernels::softmax_columns(logits.back());
      xi = keys * p;
      if (probs) probs->push_back(std::move(p));
    }
  }
  return logits;
}

void check_width(const chem::Fingerprint &fp, int n_bits) {
  if (fp.n_bits() != n_bits)
    throw ShapeError("fingerprint has " + std::to_string(fp.n_bits()) + " bits, model expects " +
                     std::to_string(n_bits));
}

}  // namespace

int PrioritizerModel::parameter_count() const {
  Eigen::Index n = 0;
  for (const auto &[name, t] : params_) n += t.size();
  return static_cast<int>(n);
}

void PrioritizerModel::build_cache() {
  cache_ = encode_keys(*this, StepMode{}, nullptr);
  cache_built_ = true;
}

void PrioritizerModel::set_beta(double beta) {
  if (!(beta > 0) || !std::isfinite(beta)) throw ConfigError("beta must be > 0");
  cfg_.beta = beta;
}

PrioritizerModel init_model(const ModelConfig &cfg, const templates::TemplateLibrary &lib) {
  cfg.validate();
  if (lib.empty()) throw ConfigError("template library is empty");
  PrioritizerModel m;
  m.cfg_ = cfg;
  m.library_checksum_ = lib.checksum();

  std::vector<Eigen::Triplet<double>> triplets;
  for (int k = 0; k < lib.size(); ++k) {
    const chem::Fingerprint fp = templates::template_fingerprint(lib.at(k), cfg.fp_radius, cfg.fp_bits);
    for (int bit : fp.on_bits()) triplets.emplace_back(bit, k, 1.0);
  }
  m.template_inputs_.resize(cfg.fp_bits, lib.size());
  m.template_inputs_.setFromTriplets(triplets.begin(), triplets.end());

  util::Rng rng(cfg.seed);
  TensorMap &p = m.params_;
  const auto ones = [](int n) { return MatrixXd::Ones(n, 1); };
  const auto zeros = [](int n) { return MatrixXd::Zero(n, 1); };
  if (cfg.input_norm) {
    p["mol_bn.gain"] = ones(cfg.fp_bits);
    p["mol_bn.bias"] = zeros(cfg.fp_bits);
    m.buffers_["mol_bn.running_mean"] = zeros(cfg.fp_bits);
    m.buffers_["mol_bn.running_var"] = ones(cfg.fp_bits);
  }
  const auto dense_stack = [&](const char *prefix, int layers, int width) {
    int in = cfg.fp_bits;
    for (int i = 0; i < layers; ++i) {
      MatrixXd w(width, in);
      xavier(w, rng);
      p[layer_key(prefix, i, "w")] = std::move(w);
      p[layer_key(prefix, i, "b")] = zeros(width);
      in = width;
    }
  };
  dense_stack("mol", cfg.mol_layers, cfg.mol_width());
  dense_stack("temp", cfg.temp_layers, cfg.temp_width());
  const auto projection = [&](const char *prefix, const char *norm_prefix, int in) {
    MatrixXd w(cfg.d_assoc, in);
    xavier(w, rng);
    p[key(prefix, "w")] = std::move(w);
    p[key(prefix, "b")] = zeros(cfg.d_assoc);
    if (cfg.association_norm) {
      p[key(norm_prefix, "gain")] = ones(cfg.d_assoc);
      p[key(norm_prefix, "bias")] = zeros(cfg.d_assoc);
    }
  };
  projection("query", "query_ln", cfg.mol_width());
  projection("key", "key_ln", cfg.temp_width());
  return m;
}

InputMatrix to_input(std::span<const chem::Fingerprint> fps, int n_bits) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t c = 0; c < fps.size(); ++c) {
    check_width(fps[c], n_bits);
    for (int bit : fps[c].on_bits()) triplets.emplace_back(bit, static_cast<int>(c), 1.0);
  }
  InputMatrix x(n_bits, static_cast<Eigen::Index>(fps.size()));
  x.setFromTriplets(triplets.begin(), triplets.end());
  return x;
}

Eigen::MatrixXd forward_batch(const PrioritizerModel &model, const InputMatrix &inputs) {
  const ModelConfig &cfg = model.config();
  if (inputs.rows() != cfg.fp_bits)
    throw ShapeError("input has " + std::to_string(inputs.rows()) + " rows, model expects " +
                     std::to_string(cfg.fp_bits));
  if (!model.cache_built()) throw ShapeError("template cache is not built");
  const MatrixXd xi = encode_queries(model, inputs, StepMode{}, nullptr, nullptr);
  const std::vector<MatrixXd> logits =
      retrieve(model.template_cache(), xi, cfg.beta, cfg.hopfield_steps, nullptr, nullptr);
  return kernels::softmax_columns(logits.back());
}

Eigen::VectorXd forward(const PrioritizerModel &model, const chem::Fingerprint &fp) {
  check_width(fp, model.config().fp_bits);
  return forward_batch(model, to_input(std::span(&fp, 1), fp.n_bits())).col(0);
}

LossResult loss_and_gradients(const PrioritizerModel &model, std::span<const Example> batch,
                              StepMode mode) {
  if (batch.empty()) throw EmptyDataset("loss_and_gradients needs a non-empty batch");
  if (mode.training && !mode.rng) throw ConfigError("training mode needs a random generator");
  const ModelConfig &cfg = model.config();
  const TensorMap &p = model.parameters();
  const int k = model.num_templates();
  std::vector<chem::Fingerprint> fps;
  fps.reserve(batch.size());
  for (const Example &e : batch) {
    if (e.template_id < 0 || e.template_id >= k)
      throw IdOutOfRange("template id " + std::to_string(e.template_id) + " outside [0, " +
                         std::to_string(k) + ")");
    fps.push_back(e.fp);
  }
  const InputMatrix x = to_input(fps, cfg.fp_bits);
  const auto n = static_cast<Eigen::Index>(batch.size());

  LossResult result;
  QueryTrace qt;
  KeyTrace kt;
  const MatrixXd xi = encode_queries(model, x, mode, &qt, &result);
  const MatrixXd keys = encode_keys(model, mode, &kt);
  std::vector<MatrixXd> states, probs;
  const std::vector<MatrixXd> logits = retrieve(keys, xi, cfg.beta, cfg.hopfield_steps, &states, &probs);

  const MatrixXd &last = logits.back();
  const MatrixXd out = kernels::softmax_columns(last);
  MatrixXd g = out;
  double loss = 0;
  for (Eigen::Index b = 0; b < n; ++b) {
    const int t = batch[static_cast<std::size_t>(b)].template_id;
    const double top = last.col(b).maxCoeff();
    const double lse = top + std::log((last.col(b).array() - top).exp().sum());
    loss += lse - last(t, b);
    g(t, b) -= 1.0;
  }
  result.loss = loss / static_cast<double>(n);
  g /= static_cast<double>(n);

  for (const auto &[name, t] : p) result.gradients[name] = MatrixXd::Zero(t.rows(), t.cols());
  TensorMap &grads = result.gradients;

  MatrixXd g_keys = MatrixXd::Zero(keys.rows(), keys.cols());
  MatrixXd g_xi;
  for (int s = cfg.hopfield_steps - 1; s >= 0; --s) {
    const auto su = static_cast<std::size_t>(s);
    g_keys += cfg.beta * (states[su] * g.transpose());
    MatrixXd g_state = cfg.beta * (keys * g);
    if (s == 0) {
      g_xi = std::move(g_state);
      break;
    }
    const MatrixXd &prev = probs[su - 1];
    g_keys += g_state * prev.transpose();
    g = kernels::softmax_columns_backward(prev, keys.transpose() * g_state);
  }

  const MatrixXd g_hq = backward_projection(p, cfg, "query", "query_ln", qt.hidden, qt.projection,
                                            std::move(g_xi), grads);
  if (cfg.input_norm) {
    const MatrixXd g_in = backward_encoder(p, "mol", cfg.mol_layers, *qt.normed, qt.encoder, g_hq,
                                           grads, true);
    VectorXd gg = VectorXd::Zero(g_in.rows());
    VectorXd gb = VectorXd::Zero(g_in.rows());
    const VectorXd gain = vec(p.at("mol_bn.gain"));
    if (mode.training) {
      kernels::batch_norm_backward(g_in, gain, qt.norm.cache, gg, gb);
    } else {
      gg = (g_in.array() * qt.norm.cache.normalized.array()).rowwise().sum().matrix();
      gb = g_in.rowwise().sum();
    }
    grads["mol_bn.gain"] += gg;
    grads["mol_bn.bias"] += gb;
  } else {
    backward_encoder(p, "mol", cfg.mol_layers, x, qt.encoder, g_hq, grads, false);
  }
  const MatrixXd g_ht = backward_projection(p, cfg, "key", "key_ln", kt.hidden, kt.projection,
                                            std::move(g_keys), grads);
  backward_encoder(p, "temp", cfg.temp_layers, model.template_inputs(), kt.encoder, g_ht, grads,
                   false);
  return result;
}

}  // namespace mhnpath::mhn
