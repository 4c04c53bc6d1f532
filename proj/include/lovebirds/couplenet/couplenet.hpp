#pragma once

#include <vector>

#include "lovebirds/couplenet/coupled_attention.hpp"
#include "lovebirds/couplenet/scoring.hpp"
#include "lovebirds/encoders/embedding.hpp"
#include "lovebirds/encoders/tweet_attention.hpp"
#include "lovebirds/pair_model.hpp"

namespace lovebirds::couplenet {

// Everything computed while scoring one pair, for inspection and explanations.
// Row/column i of the grid and entry i of a1/a2 refer to tweet slot slots1[i]
// (slots2[i]) of the profile.
template <typename S>
struct PairScore {
  S score = 0;
  bool degenerate = false;
  SimilarityGrid<S> grid;  // includes b_c
  Vec<S> a1, a2;
  RowVec<S> u1, u2;
  std::vector<int> slots1, slots2;
  Mat<S> word_attention1, word_attention2;  // rows follow slots, L columns
};

// GRU + tweet attention per tweet, coupled attention across the two users'
// tweets, cosine score.
template <typename S>
class CoupleNet final : public PairModel<S> {
 public:
  explicit CoupleNet(const ModelConfig& cfg);

  UserState<S> encode_user(const corpus::UserProfile& user) const override;
  S score(const UserState<S>& a, const UserState<S>& b) const override;
  S triplet_loss(const corpus::UserProfile& anchor, const corpus::UserProfile& pos, const corpus::UserProfile& neg,
                 S margin, Mode mode, Rng& rng, bool with_grad, S grad_scale = S(1)) override;

  PairScore<S> forward_pair(const corpus::UserProfile& u1, const corpus::UserProfile& u2) const;
  PairScore<S> forward_pair(const corpus::UserProfile& u1, const corpus::UserProfile& u2, Mode mode, Rng& rng) const;

  static const encoders::GruNames& gru_names();
  static const encoders::AttentionNames& attention_names();
  static const CoupledNames& coupled_names();

 private:
  struct Batch;
  struct PairTrace;

  Batch encode(const std::vector<const corpus::UserProfile*>& users, Mode mode, Rng& rng) const;
  void encode_backward(const Batch& b, const Mat<S>& dT);
  PairTrace pair_forward(const Mat<S>& T1, const Mat<S>& T2, Mode mode, Rng& rng) const;
  void pair_backward(const PairTrace& tr, const Mat<S>& T1, const Mat<S>& T2, S d_score, Mat<S>& dT1, Mat<S>& dT2);
};

extern template class CoupleNet<float>;
extern template class CoupleNet<double>;

}  // namespace lovebirds::couplenet
