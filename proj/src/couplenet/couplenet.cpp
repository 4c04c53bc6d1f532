#include "lovebirds/couplenet/couplenet.hpp"

#include <algorithm>

namespace lovebirds::couplenet {

using corpus::TokenizedTweet;
using corpus::UserProfile;
using encoders::kEmbedding;

template <typename S>
struct CoupleNet<S>::Batch {
  std::vector<const TokenizedTweet*> tweets;
  std::vector<int> lengths;
  std::vector<int> slots;
  std::vector<Index> offset, count;
  encoders::GruTrace<S> gru;
  encoders::AttentionTrace<S> att;
  Mat<S> keep;
  Mat<S> T;  // one row per tweet, after dropout

  Mat<S> user_rows(std::size_t u) const { return T.middleRows(offset[u], count[u]); }
};

template <typename S>
struct CoupleNet<S>::PairTrace {
  SimilarityGrid<S> grid;  // without b_c
  CoupledWeights<S> w;
  RowVec<S> u1, u2;
  Mat<S> keep1, keep2;
  CosineResult<S> cos;
};

template <typename S>
const encoders::GruNames& CoupleNet<S>::gru_names() {
  static const auto nm = encoders::GruNames::with_prefix("gru");
  return nm;
}

template <typename S>
const encoders::AttentionNames& CoupleNet<S>::attention_names() {
  static const encoders::AttentionNames nm;
  return nm;
}

template <typename S>
const CoupledNames& CoupleNet<S>::coupled_names() {
  static const CoupledNames nm;
  return nm;
}

template <typename S>
CoupleNet<S>::CoupleNet(const ModelConfig& cfg) : PairModel<S>(cfg) {
  Rng rng(cfg.seed);
  auto& p = this->params_;
  encoders::declare_embedding(p, cfg.vocab_size, cfg.embed_dim, cfg.init_std, rng);
  encoders::declare_gru(p, gru_names(), cfg.embed_dim, cfg.hidden, cfg.init_std, rng);
  encoders::declare_tweet_attention(p, attention_names(), cfg.hidden, cfg.init_std, rng);
  declare_coupled(p, coupled_names(), cfg.hidden, cfg.init_std, rng);
}

template <typename S>
typename CoupleNet<S>::Batch CoupleNet<S>::encode(const std::vector<const UserProfile*>& users, Mode mode,
                                                  Rng& rng) const {
  const auto& p = this->params_;
  Batch b;
  int steps = 0;
  for (const auto* u : users) {
    b.offset.push_back(static_cast<Index>(b.tweets.size()));
    const int n = std::min(u->tweet_valid_count, u->K());
    for (int k = 0; k < n; ++k) {
      const auto& t = u->tweets[static_cast<std::size_t>(k)];
      if (t.valid_len <= 0) continue;
      b.tweets.push_back(&t);
      b.lengths.push_back(t.valid_len);
      b.slots.push_back(k);
      steps = std::max(steps, t.valid_len);
    }
    b.count.push_back(static_cast<Index>(b.tweets.size()) - b.offset.back());
    if (b.count.back() == 0) throw EmptyProfileError("user " + u->user_id + " has no valid tweets");
  }
  auto xs = encoders::embed_batch<S>(b.tweets, p.value(kEmbedding), steps);
  encoders::GruWeights<S> gw(p, gru_names());
  b.gru = encoders::gru_forward<S>(std::move(xs), b.lengths, gw);
  const auto& an = attention_names();
  b.att = encoders::tweet_attention_forward<S>(b.gru.h, b.lengths, p.value(an.W_y), p.value(an.w));
  b.T = dropout<S>(b.att.out, this->cfg_.tweet_dropout, mode, rng, &b.keep);
  return b;
}

template <typename S>
void CoupleNet<S>::encode_backward(const Batch& b, const Mat<S>& dT) {
  auto& p = this->params_;
  const auto& an = attention_names();
  Mat<S> d_out = dT.cwiseProduct(b.keep);
  auto d_h = encoders::tweet_attention_backward<S>(b.att, d_out, p.value(an.W_y), p.value(an.w), p.grad(an.W_y),
                                                   p.grad(an.w));
  encoders::GruWeights<S> gw(p, gru_names());
  encoders::GruGrads<S> gg(p, gru_names());
  auto d_x = encoders::gru_backward<S>(b.gru, d_h, gw, gg);
  encoders::embed_batch_backward<S>(b.tweets, d_x, p.grad(kEmbedding));
}

// b_c shifts every cell equally and cannot move either softmax, so the
// reductions run on the grid without it.
template <typename S>
typename CoupleNet<S>::PairTrace CoupleNet<S>::pair_forward(const Mat<S>& T1, const Mat<S>& T2, Mode mode,
                                                            Rng& rng) const {
  const Mat<S>& W_c = this->params_.value(coupled_names().W_c);
  PairTrace tr;
  tr.grid = symmetric_similarity_grid<S>(T1, T1.rows(), T2, T2.rows(), W_c, S(0));
  tr.w = coupled_attention(tr.grid);
  auto [u1, u2] = user_representations<S>(T1, T2, tr.w.a1, tr.w.a2);
  const double rate = this->cfg_.user_dropout;
  tr.u1 = dropout<S>(u1, rate, mode, rng, &tr.keep1);
  tr.u2 = dropout<S>(u2, rate, mode, rng, &tr.keep2);
  tr.cos = cosine_score<S>(tr.u1, tr.u2);
  return tr;
}

template <typename S>
void CoupleNet<S>::pair_backward(const PairTrace& tr, const Mat<S>& T1, const Mat<S>& T2, S d_score, Mat<S>& dT1,
                                 Mat<S>& dT2) {
  RowVec<S> du1, du2;
  cosine_backward<S>(tr.u1, tr.u2, d_score, du1, du2);
  du1 = du1.cwiseProduct(RowVec<S>(tr.keep1));
  du2 = du2.cwiseProduct(RowVec<S>(tr.keep2));
  Vec<S> da1 = T1 * du1.transpose();
  Vec<S> da2 = T2 * du2.transpose();
  dT1.noalias() += tr.w.a1 * du1;
  dT2.noalias() += tr.w.a2 * du2;
  Mat<S> dS = coupled_attention_backward<S>(tr.grid, tr.w, da1, da2);
  auto& p = this->params_;
  Mat<S> db_unused = Mat<S>::Zero(1, 1);
  symmetric_grid_backward<S>(T1, T2, p.value(coupled_names().W_c), dS, dT1, dT2, p.grad(coupled_names().W_c),
                             db_unused);
}

template <typename S>
UserState<S> CoupleNet<S>::encode_user(const UserProfile& user) const {
  Rng unused(0);
  UserState<S> st;
  st.rows = encode({&user}, Mode::Eval, unused).T;
  return st;
}

template <typename S>
S CoupleNet<S>::score(const UserState<S>& a, const UserState<S>& b) const {
  Rng unused(0);
  return pair_forward(a.rows, b.rows, Mode::Eval, unused).cos.score;
}

template <typename S>
S CoupleNet<S>::triplet_loss(const UserProfile& anchor, const UserProfile& pos, const UserProfile& neg, S margin,
                             Mode mode, Rng& rng, bool with_grad, S grad_scale) {
  if (with_grad) this->touch_all();
  Batch b = encode({&anchor, &pos, &neg}, mode, rng);
  Mat<S> Ta = b.user_rows(0), Tp = b.user_rows(1), Tn = b.user_rows(2);
  PairTrace tp = pair_forward(Ta, Tp, mode, rng);
  PairTrace tn = pair_forward(Ta, Tn, mode, rng);
  const S loss = hinge_loss(tp.cos.score, tn.cos.score, margin);
  if (!with_grad || !hinge_active(tp.cos.score, tn.cos.score, margin)) return loss;

  Mat<S> dT = Mat<S>::Zero(b.T.rows(), b.T.cols());
  Mat<S> dTa = Mat<S>::Zero(Ta.rows(), Ta.cols());
  Mat<S> dTp = Mat<S>::Zero(Tp.rows(), Tp.cols());
  Mat<S> dTn = Mat<S>::Zero(Tn.rows(), Tn.cols());
  pair_backward(tp, Ta, Tp, -grad_scale, dTa, dTp);
  pair_backward(tn, Ta, Tn, grad_scale, dTa, dTn);
  dT.middleRows(b.offset[0], b.count[0]) = dTa;
  dT.middleRows(b.offset[1], b.count[1]) = dTp;
  dT.middleRows(b.offset[2], b.count[2]) = dTn;
  encode_backward(b, dT);
  return loss;
}

template <typename S>
PairScore<S> CoupleNet<S>::forward_pair(const UserProfile& u1, const UserProfile& u2) const {
  Rng unused(0);
  return forward_pair(u1, u2, Mode::Eval, unused);
}

template <typename S>
PairScore<S> CoupleNet<S>::forward_pair(const UserProfile& u1, const UserProfile& u2, Mode mode, Rng& rng) const {
  Batch b = encode({&u1, &u2}, mode, rng);
  Mat<S> T1 = b.user_rows(0), T2 = b.user_rows(1);
  PairTrace tr = pair_forward(T1, T2, mode, rng);
  PairScore<S> out;
  out.score = tr.cos.score;
  out.degenerate = tr.cos.degenerate;
  out.grid = tr.grid;
  out.grid.S_.topLeftCorner(T1.rows(), T2.rows()).array() += this->params_.value(coupled_names().b_c)(0, 0);
  out.a1 = tr.w.a1;
  out.a2 = tr.w.a2;
  out.u1 = tr.u1;
  out.u2 = tr.u2;
  const Index L = std::max(u1.L(), u2.L());
  out.word_attention1 = Mat<S>::Zero(T1.rows(), L);
  out.word_attention2 = Mat<S>::Zero(T2.rows(), L);
  const Index steps = b.att.weights.cols();
  for (Index i = 0; i < T1.rows(); ++i) {
    out.slots1.push_back(b.slots[static_cast<std::size_t>(b.offset[0] + i)]);
    out.word_attention1.row(i).head(steps) = b.att.weights.row(b.offset[0] + i);
  }
  for (Index j = 0; j < T2.rows(); ++j) {
    out.slots2.push_back(b.slots[static_cast<std::size_t>(b.offset[1] + j)]);
    out.word_attention2.row(j).head(steps) = b.att.weights.row(b.offset[1] + j);
  }
  return out;
}

template class CoupleNet<float>;
template class CoupleNet<double>;

}  // namespace lovebirds::couplenet
