#pragma once

#include <string>
#include <vector>

#include "lovebirds/numkit/ops.hpp"
#include "lovebirds/numkit/param_store.hpp"

namespace lovebirds::couplenet {

struct CoupledNames {
  std::string W_c = "coupled.W_c";  // 2n x 1
  std::string b_c = "coupled.b_c";  // 1 x 1
};

template <typename S>
void declare_coupled(ParamStore<S>& store, const CoupledNames& nm, Index n, double stddev, Rng& rng) {
  store.add_gaussian(nm.W_c, 2 * n, 1, stddev, rng);
  store.add_gaussian(nm.b_c, 1, 1, stddev, rng);
}

class EmptyProfileError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Rows index user-1 tweets, columns user-2 tweets. Cells outside the valid
// rows/columns are zero and never enter a reduction.
template <typename S>
struct SimilarityGrid {
  Mat<S> S_;
  Index valid_rows = 0;
  Index valid_cols = 0;

  const Mat<S>& values() const { return S_; }
  S operator()(Index i, Index j) const { return S_(i, j); }
};

namespace detail {
template <typename S>
void check_grid_inputs(const Mat<S>& T1, Index v1, const Mat<S>& T2, Index v2, const Mat<S>& W_c) {
  if (T1.cols() != T2.cols()) throw DimensionError("similarity_grid: tweet widths differ");
  if (W_c.rows() != 2 * T1.cols() || W_c.cols() != 1)
    throw DimensionError("similarity_grid: W_c is " + shape_str(W_c) + ", expected (" +
                         std::to_string(2 * T1.cols()) + "x1)");
  if (v1 <= 0 || v2 <= 0) throw EmptyProfileError("similarity_grid: a user has no valid tweets");
  if (v1 > T1.rows() || v2 > T2.rows()) throw DimensionError("similarity_grid: valid count exceeds rows");
}
}  // namespace detail

// S[i][j] = W_c . [t1_i ; t2_j] + b_c
template <typename S>
SimilarityGrid<S> similarity_grid(const Mat<S>& T1, Index valid1, const Mat<S>& T2, Index valid2,
                                  const Mat<S>& W_c, S b_c) {
  detail::check_grid_inputs(T1, valid1, T2, valid2, W_c);
  const Index n = T1.cols();
  Vec<S> p = T1.topRows(valid1) * W_c.topRows(n);
  Vec<S> q = T2.topRows(valid2) * W_c.bottomRows(n);
  SimilarityGrid<S> g;
  g.S_ = Mat<S>::Zero(T1.rows(), T2.rows());
  for (Index i = 0; i < valid1; ++i)
    for (Index j = 0; j < valid2; ++j) g.S_(i, j) = p(i) + q(j) + b_c;
  g.valid_rows = valid1;
  g.valid_cols = valid2;
  return g;
}

// Orientation-free grid: the average of scoring (t1_i, t2_j) and (t2_j, t1_i)
// with the same feed-forward layer, so that swapping the two users transposes
// the grid. Equals similarity_grid whenever both halves of W_c are equal.
template <typename S>
SimilarityGrid<S> symmetric_similarity_grid(const Mat<S>& T1, Index valid1, const Mat<S>& T2, Index valid2,
                                            const Mat<S>& W_c, S b_c) {
  detail::check_grid_inputs(T1, valid1, T2, valid2, W_c);
  const Index n = T1.cols();
  Vec<S> w_bar = S(0.5) * (W_c.topRows(n) + W_c.bottomRows(n));
  Vec<S> p = T1.topRows(valid1) * w_bar;
  Vec<S> q = T2.topRows(valid2) * w_bar;
  SimilarityGrid<S> g;
  g.S_ = Mat<S>::Zero(T1.rows(), T2.rows());
  for (Index i = 0; i < valid1; ++i)
    for (Index j = 0; j < valid2; ++j) g.S_(i, j) = p(i) + q(j) + b_c;
  g.valid_rows = valid1;
  g.valid_cols = valid2;
  return g;
}

template <typename S>
struct CoupledWeights {
  Vec<S> a1;  // over user-1 tweets: softmax of each row's max
  Vec<S> a2;  // over user-2 tweets: softmax of each column's max
  std::vector<Index> row_argmax;
  std::vector<Index> col_argmax;
};

// a1[i] = softmax_i(max_j S[i][j]), a2[j] = softmax_j(max_i S[i][j]) over valid
// cells; invalid positions get weight 0.
template <typename S>
CoupledWeights<S> coupled_attention(const SimilarityGrid<S>& g) {
  if (g.valid_rows <= 0 || g.valid_cols <= 0) throw EmptyProfileError("coupled_attention: empty grid");
  const Index R = g.S_.rows(), C = g.S_.cols();
  const auto valid = g.S_.topLeftCorner(g.valid_rows, g.valid_cols);
  CoupledWeights<S> w;
  Vec<S> row_max = Vec<S>::Zero(R), col_max = Vec<S>::Zero(C);
  w.row_argmax.assign(static_cast<std::size_t>(g.valid_rows), 0);
  w.col_argmax.assign(static_cast<std::size_t>(g.valid_cols), 0);
  for (Index i = 0; i < g.valid_rows; ++i) row_max(i) = valid.row(i).maxCoeff(&w.row_argmax[static_cast<std::size_t>(i)]);
  for (Index j = 0; j < g.valid_cols; ++j) col_max(j) = valid.col(j).maxCoeff(&w.col_argmax[static_cast<std::size_t>(j)]);
  w.a1 = masked_softmax<S>(row_max, prefix_mask(R, g.valid_rows));
  w.a2 = masked_softmax<S>(col_max, prefix_mask(C, g.valid_cols));
  return w;
}

// Gradient w.r.t. the grid from gradients of a1 and a2 (max routes to argmax).
template <typename S>
Mat<S> coupled_attention_backward(const SimilarityGrid<S>& g, const CoupledWeights<S>& w, const Vec<S>& da1,
                                  const Vec<S>& da2) {
  Mat<S> dS = Mat<S>::Zero(g.S_.rows(), g.S_.cols());
  Vec<S> d_row = softmax_backward<S>(w.a1, da1);
  Vec<S> d_col = softmax_backward<S>(w.a2, da2);
  for (Index i = 0; i < g.valid_rows; ++i) dS(i, w.row_argmax[static_cast<std::size_t>(i)]) += d_row(i);
  for (Index j = 0; j < g.valid_cols; ++j) dS(w.col_argmax[static_cast<std::size_t>(j)], j) += d_col(j);
  return dS;
}

// Gradient of symmetric_similarity_grid. b_c receives sum(dS).
template <typename S>
void symmetric_grid_backward(const Mat<S>& T1, const Mat<S>& T2, const Mat<S>& W_c, const Mat<S>& dS,
                             Mat<S>& dT1, Mat<S>& dT2, Mat<S>& dW_c, Mat<S>& db_c) {
  const Index n = T1.cols();
  const Index v1 = T1.rows(), v2 = T2.rows();
  const auto dS_valid = dS.topLeftCorner(v1, v2);
  Vec<S> dp = dS_valid.rowwise().sum();
  Vec<S> dq = dS_valid.colwise().sum().transpose();
  Vec<S> w_bar = S(0.5) * (W_c.topRows(n) + W_c.bottomRows(n));
  dT1.noalias() += dp * w_bar.transpose();
  dT2.noalias() += dq * w_bar.transpose();
  Vec<S> d_wbar = T1.transpose() * dp + T2.transpose() * dq;
  dW_c.topRows(n) += S(0.5) * d_wbar;
  dW_c.bottomRows(n) += S(0.5) * d_wbar;
  db_c(0, 0) += dS_valid.sum();
}

// u1 = sum_i a1[i] t1_i, u2 = sum_j a2[j] t2_j
template <typename S>
std::pair<RowVec<S>, RowVec<S>> user_representations(const Mat<S>& T1, const Mat<S>& T2, const Vec<S>& a1,
                                                     const Vec<S>& a2) {
  if (a1.size() != T1.rows() || a2.size() != T2.rows())
    throw DimensionError("user_representations: weights do not match tweet counts");
  return {a1.transpose() * T1, a2.transpose() * T2};
}

}  // namespace lovebirds::couplenet
