#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "lovebirds/numkit/rng.hpp"
#include "lovebirds/numkit/types.hpp"

namespace lovebirds {

enum class Mode { Train, Eval };

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

inline Mask prefix_mask(Index size, Index valid) {
  Mask m(size);
  for (Index i = 0; i < size; ++i) m(i) = i < valid;
  return m;
}

// y = x W + b, with b broadcast across the rows of x.
template <typename S>
Mat<S> affine(const Mat<S>& x, const Mat<S>& W, const Mat<S>& b) {
  if (x.cols() != W.rows()) {
    throw DimensionError("affine: input " + shape_str(x) + " does not match weight " +
                         shape_str(W));
  }
  if (b.rows() != 1 || b.cols() != W.cols()) {
    throw DimensionError("affine: bias " + shape_str(b) + " does not broadcast to output of " +
                         shape_str(W));
  }
  Mat<S> y = x * W;
  y.rowwise() += b.row(0);
  return y;
}

// Accumulates dW, db and returns dx for y = x W + b.
template <typename S>
Mat<S> affine_backward(const Mat<S>& x, const Mat<S>& W, const Mat<S>& dy, Mat<S>& dW,
                       Mat<S>& db) {
  dW.noalias() += x.transpose() * dy;
  db += dy.colwise().sum();
  return dy * W.transpose();
}

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return (S(1) / (S(1) + (-x.array()).exp())).matrix();
}

template <typename Derived>
auto tanh(const Eigen::MatrixBase<Derived>& x) {
  return x.array().tanh().matrix();
}

template <typename Derived>
auto relu(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  return x.array().max(S(0)).matrix();
}

// Softmax over the positions where mask is true. Masked positions are exactly
// zero and do not take part in the normalizer.
template <typename S>
Vec<S> masked_softmax(const Vec<S>& v, const Mask& mask) {
  if (v.size() != mask.size()) {
    throw DimensionError("masked_softmax: logits of length " + std::to_string(v.size()) +
                         " with mask of length " + std::to_string(mask.size()));
  }
  if (!mask.any()) throw EmptySupportError("masked_softmax: no valid position");
  S peak = -std::numeric_limits<S>::infinity();
  for (Index i = 0; i < v.size(); ++i)
    if (mask(i)) peak = std::max(peak, v(i));
  Vec<S> out = Vec<S>::Zero(v.size());
  S total = 0;
  for (Index i = 0; i < v.size(); ++i) {
    if (!mask(i)) continue;
    out(i) = std::exp(v(i) - peak);
    total += out(i);
  }
  out /= total;
  return out;
}

template <typename S>
Vec<S> softmax(const Vec<S>& v) {
  return masked_softmax<S>(v, Mask::Constant(v.size(), true));
}

// Gradient of the logits given the gradient of the softmax output a.
template <typename S>
Vec<S> softmax_backward(const Vec<S>& a, const Vec<S>& da) {
  return (a.array() * (da.array() - a.dot(da))).matrix();
}

// Inverted dropout. Eval mode and rate 0 return x unchanged. When keep_scale is
// given it receives the per-element multiplier (0 or 1/(1-rate)) for backward.
template <typename S>
Mat<S> dropout(const Mat<S>& x, double rate, Mode mode, Rng& rng, Mat<S>* keep_scale = nullptr) {
  if (!(rate >= 0.0) || rate >= 1.0) {
    throw ParameterError("dropout: rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (mode == Mode::Eval || rate == 0.0) {
    if (keep_scale) keep_scale->setOnes(x.rows(), x.cols());
    return x;
  }
  const S scale = S(1.0 / (1.0 - rate));
  Mat<S> mask(x.rows(), x.cols());
  for (Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng.uniform() < rate ? S(0) : scale;
  Mat<S> y = x.cwiseProduct(mask);
  if (keep_scale) *keep_scale = std::move(mask);
  return y;
}

}  // namespace lovebirds
