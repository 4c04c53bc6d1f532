#pragma once

#include <string>
#include <vector>

#include "lovebirds/encoders/gru.hpp"

namespace lovebirds::encoders {

// Single-sequence convenience: H is L x n, row t = h_t.
template <typename S>
Mat<S> gru_encode(const Mat<S>& x, int valid_len, const GruWeights<S>& p) {
  if (valid_len < 0 || valid_len > x.rows()) throw DimensionError("gru_encode: valid_len out of range");
  std::vector<Mat<S>> steps;
  for (Index t = 0; t < x.rows(); ++t) steps.push_back(x.row(t));
  auto tr = gru_forward<S>(std::move(steps), {valid_len}, p);
  Mat<S> H(x.rows(), p.hidden());
  for (Index t = 0; t < x.rows(); ++t) H.row(t) = tr.h[static_cast<std::size_t>(t)].row(0);
  return H;
}

struct AttentionNames {
  std::string W_y = "attention.W_y";
  std::string w = "attention.w";
};

template <typename S>
void declare_tweet_attention(ParamStore<S>& store, const AttentionNames& nm, Index n, double stddev, Rng& rng) {
  store.add_gaussian(nm.W_y, n, n, stddev, rng);
  store.add_gaussian(nm.w, n, 1, stddev, rng);
}

// One tweet vector r = sum_t a_t h_t with a = softmax over valid t of
// w . tanh(h_t W_y).
template <typename S>
struct TweetEncoding {
  RowVec<S> vector;
  Vec<S> attention;  // L weights, zero past valid_len
  bool empty = false;
};

// Batched over B tweets with the time-major states of a GruTrace.
template <typename S>
struct AttentionTrace {
  Mat<S> stacked_h;  // (T*B) x n, block t holds step t
  Mat<S> stacked_y;  // tanh(stacked_h W_y)
  Mat<S> weights;    // B x T
  Mat<S> out;        // B x n
  std::vector<int> lengths;
};

template <typename S>
AttentionTrace<S> tweet_attention_forward(const std::vector<Mat<S>>& h, const std::vector<int>& lengths,
                                          const Mat<S>& W_y, const Mat<S>& w) {
  const Index B = static_cast<Index>(lengths.size());
  const Index T = static_cast<Index>(h.size());
  const Index n = W_y.rows();
  if (W_y.cols() != n || w.rows() != n || w.cols() != 1)
    throw DimensionError("tweet_attention: W_y " + shape_str(W_y) + ", w " + shape_str(w));
  AttentionTrace<S> tr;
  tr.lengths = lengths;
  tr.stacked_h.resize(T * B, n);
  for (Index t = 0; t < T; ++t) {
    if (h[static_cast<std::size_t>(t)].cols() != n)
      throw DimensionError("tweet_attention: state width " + std::to_string(h[static_cast<std::size_t>(t)].cols()) +
                           " vs W_y " + shape_str(W_y));
    tr.stacked_h.middleRows(t * B, B) = h[static_cast<std::size_t>(t)];
  }
  tr.stacked_y = (tr.stacked_h * W_y).array().tanh();
  Vec<S> logits = tr.stacked_y * w;
  tr.weights = Mat<S>::Zero(B, T);
  tr.out = Mat<S>::Zero(B, n);
  for (Index b = 0; b < B; ++b) {
    const int len = std::min<int>(lengths[static_cast<std::size_t>(b)], static_cast<int>(T));
    if (len <= 0) continue;  // empty slot: zero vector, zero weights
    Vec<S> e(T);
    for (Index t = 0; t < T; ++t) e(t) = logits(t * B + b);
    Vec<S> a = masked_softmax<S>(e, prefix_mask(T, len));
    tr.weights.row(b) = a.transpose();
    for (Index t = 0; t < len; ++t) tr.out.row(b) += a(t) * tr.stacked_h.row(t * B + b);
  }
  return tr;
}

// Returns d(h_t) per step and accumulates dW_y, dw.
template <typename S>
std::vector<Mat<S>> tweet_attention_backward(const AttentionTrace<S>& tr, const Mat<S>& d_out, const Mat<S>& W_y,
                                             const Mat<S>& w, Mat<S>& dW_y, Mat<S>& dw) {
  const Index B = static_cast<Index>(tr.lengths.size());
  const Index T = tr.weights.cols();
  const Index n = W_y.rows();
  Mat<S> d_stacked = Mat<S>::Zero(T * B, n);
  Vec<S> d_logits = Vec<S>::Zero(T * B);
  for (Index b = 0; b < B; ++b) {
    const int len = std::min<int>(tr.lengths[static_cast<std::size_t>(b)], static_cast<int>(T));
    if (len <= 0) continue;
    Vec<S> a = tr.weights.row(b).transpose();
    Vec<S> da = Vec<S>::Zero(T);
    for (Index t = 0; t < len; ++t) {
      d_stacked.row(t * B + b) += a(t) * d_out.row(b);
      da(t) = tr.stacked_h.row(t * B + b).dot(d_out.row(b));
    }
    Vec<S> de = softmax_backward<S>(a, da);
    for (Index t = 0; t < len; ++t) d_logits(t * B + b) = de(t);
  }
  dw.noalias() += tr.stacked_y.transpose() * d_logits;
  Mat<S> d_pre = (d_logits * w.transpose()).array() * (S(1) - tr.stacked_y.array().square());
  dW_y.noalias() += tr.stacked_h.transpose() * d_pre;
  d_stacked.noalias() += d_pre * W_y.transpose();
  std::vector<Mat<S>> d_h(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) d_h[static_cast<std::size_t>(t)] = d_stacked.middleRows(t * B, B);
  return d_h;
}

// Single tweet, H is L x n.
template <typename S>
TweetEncoding<S> tweet_attention(const Mat<S>& H, int valid_len, const Mat<S>& W_y, const Mat<S>& w) {
  std::vector<Mat<S>> steps;
  for (Index t = 0; t < H.rows(); ++t) steps.push_back(H.row(t));
  auto tr = tweet_attention_forward<S>(steps, {valid_len}, W_y, w);
  TweetEncoding<S> enc;
  enc.vector = tr.out.row(0);
  enc.attention = tr.weights.row(0).transpose();
  enc.empty = valid_len <= 0;
  return enc;
}

}  // namespace lovebirds::encoders
