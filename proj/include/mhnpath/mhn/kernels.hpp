//
// mhnpath - retrosynthesis planning with Hopfield template prioritization
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MHNPATH_MHN_KERNELS_HPP
#define MHNPATH_MHN_KERNELS_HPP

#include <Eigen/Dense>

// Column-wise building blocks of the prioritizer. Every matrix holds one
// sample per column.

namespace mhnpath::mhn::kernels {

inline constexpr double kNormEps = 1e-5;

/// Softmax of each column with the column maximum subtracted first, so a
/// single row gives exactly 1.
template <typename Derived>
Eigen::MatrixXd softmax_columns(const Eigen::MatrixBase<Derived> &logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double top = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - top).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

/// Backward of softmax_columns given its output p and upstream dL/dp.
template <typename DerivedP, typename DerivedG>
Eigen::MatrixXd softmax_columns_backward(const Eigen::MatrixBase<DerivedP> &p,
                                         const Eigen::MatrixBase<DerivedG> &grad) {
  const Eigen::RowVectorXd inner = (p.array() * grad.array()).colwise().sum();
  return (p.array() * (grad.array().rowwise() - inner.array())).matrix();
}

template <typename Derived>
Eigen::MatrixXd elu(const Eigen::MatrixBase<Derived> &z) {
  return z.unaryExpr([](double v) { return v > 0 ? v : std::expm1(v); });
}

/// dL/dz from dL/da where a = elu(z).
template <typename DerivedZ, typename DerivedG>
Eigen::MatrixXd elu_backward(const Eigen::MatrixBase<DerivedZ> &z,
                             const Eigen::MatrixBase<DerivedG> &grad) {
  return grad.binaryExpr(z, [](double g, double v) { return v > 0 ? g : g * std::exp(v); });
}

/// Per-column normalization to zero mean and unit variance over rows,
/// followed by a per-row affine map.
struct LayerNormCache {
  Eigen::MatrixXd normalized;
  Eigen::RowVectorXd inv_std;
};

template <typename Derived>
Eigen::MatrixXd layer_norm(const Eigen::MatrixBase<Derived> &x, const Eigen::VectorXd &gain,
                           const Eigen::VectorXd &bias, LayerNormCache &cache) {
  const double n = static_cast<double>(x.rows());
  const Eigen::RowVectorXd mean = x.colwise().sum() / n;
  Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::RowVectorXd var = centered.array().square().colwise().sum() / n;
  cache.inv_std = (var.array() + kNormEps).rsqrt();
  cache.normalized = centered.array().rowwise() * cache.inv_std.array();
  return (cache.normalized.array().colwise() * gain.array()).colwise() + bias.array();
}

/// Returns dL/dx; accumulates dL/dgain and dL/dbias.
template <typename Derived>
Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixBase<Derived> &grad,
                                    const Eigen::VectorXd &gain, const LayerNormCache &cache,
                                    Eigen::VectorXd &grad_gain, Eigen::VectorXd &grad_bias) {
  const double n = static_cast<double>(grad.rows());
  grad_gain += (grad.array() * cache.normalized.array()).rowwise().sum().matrix();
  grad_bias += grad.rowwise().sum();
  const Eigen::MatrixXd gx = grad.array().colwise() * gain.array();
  const Eigen::RowVectorXd mean_g = gx.colwise().sum() / n;
  const Eigen::RowVectorXd mean_gx = (gx.array() * cache.normalized.array()).colwise().sum() / n;
  Eigen::MatrixXd out = gx.rowwise() - mean_g;
  out -= (cache.normalized.array().rowwise() * mean_gx.array()).matrix();
  return out.array().rowwise() * cache.inv_std.array();
}

/// Per-row normalization over the columns of a batch (batch statistics).
struct BatchNormCache {
  Eigen::MatrixXd normalized;
  Eigen::VectorXd inv_std;
};

template <typename Derived>
Eigen::MatrixXd batch_norm_train(const Eigen::MatrixBase<Derived> &x, const Eigen::VectorXd &gain,
                                 const Eigen::VectorXd &bias, BatchNormCache &cache,
                                 Eigen::VectorXd &mean_out, Eigen::VectorXd &var_out) {
  const double n = static_cast<double>(x.cols());
  mean_out = x.rowwise().sum() / n;
  Eigen::MatrixXd centered = x.colwise() - mean_out;
  var_out = centered.array().square().rowwise().sum() / n;
  cache.inv_std = (var_out.array() + kNormEps).rsqrt();
  cache.normalized = centered.array().colwise() * cache.inv_std.array();
  return (cache.normalized.array().colwise() * gain.array()).colwise() + bias.array();
}

template <typename Derived>
Eigen::MatrixXd batch_norm_backward(const Eigen::MatrixBase<Derived> &grad,
                                    const Eigen::VectorXd &gain, const BatchNormCache &cache,
                                    Eigen::VectorXd &grad_gain, Eigen::VectorXd &grad_bias) {
  const double n = static_cast<double>(grad.cols());
  grad_gain += (grad.array() * cache.normalized.array()).rowwise().sum().matrix();
  grad_bias += grad.rowwise().sum();
  const Eigen::MatrixXd gx = grad.array().colwise() * gain.array();
  const Eigen::VectorXd mean_g = gx.rowwise().sum() / n;
  const Eigen::VectorXd mean_gx = (gx.array() * cache.normalized.array()).rowwise().sum() / n;
  Eigen::MatrixXd out = gx.colwise() - mean_g;
  out -= (cache.normalized.array().colwise() * mean_gx.array()).matrix();
  return out.array().colwise() * cache.inv_std.array();
}

}  // namespace mhnpath::mhn::kernels

#endif  // MHNPATH_MHN_KERNELS_HPP
