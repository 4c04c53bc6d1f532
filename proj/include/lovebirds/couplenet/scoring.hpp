#pragma once

#include <algorithm>
#include <cmath>

#include "lovebirds/numkit/types.hpp"

namespace lovebirds::couplenet {

template <typename S>
struct CosineResult {
  S score = 0;
  bool degenerate = false;  // a zero-norm input; score is 0
};

// Cosine similarity clamped to [-1, 1]. A zero vector yields 0.
template <typename S>
CosineResult<S> cosine_score(const RowVec<S>& u1, const RowVec<S>& u2) {
  if (u1.size() != u2.size())
    throw DimensionError("cosine_score: lengths " + std::to_string(u1.size()) + " and " + std::to_string(u2.size()));
  const S n1 = u1.norm(), n2 = u2.norm();
  if (n1 == S(0) || n2 == S(0)) return {S(0), true};
  S c = u1.dot(u2) / (n1 * n2);
  return {std::clamp(c, S(-1), S(1)), false};
}

// Gradients of cos(u1, u2) scaled by d_score.
template <typename S>
void cosine_backward(const RowVec<S>& u1, const RowVec<S>& u2, S d_score, RowVec<S>& du1, RowVec<S>& du2) {
  const S n1 = u1.norm(), n2 = u2.norm();
  du1 = RowVec<S>::Zero(u1.size());
  du2 = RowVec<S>::Zero(u2.size());
  if (n1 == S(0) || n2 == S(0)) return;
  const S c = u1.dot(u2) / (n1 * n2);
  du1 = d_score * (u2 / (n1 * n2) - c * u1 / (n1 * n1));
  du2 = d_score * (u1 / (n1 * n2) - c * u2 / (n2 * n2));
}

// max(0, margin - s_pos + s_neg)
template <typename S>
S hinge_loss(S s_pos, S s_neg, S margin) {
  return std::max(S(0), margin - s_pos + s_neg);
}

template <typename S>
bool hinge_active(S s_pos, S s_neg, S margin) {
  return margin - s_pos + s_neg > S(0);
}

}  // namespace lovebirds::couplenet
