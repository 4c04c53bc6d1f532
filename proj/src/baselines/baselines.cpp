#include "lovebirds/baselines/baselines.hpp"

#include <algorithm>
#include <set>

#include "lovebirds/couplenet/coupled_attention.hpp"
#include "lovebirds/couplenet/scoring.hpp"

namespace lovebirds::baselines {

using corpus::TokenizedTweet;
using corpus::UserProfile;
using couplenet::cosine_backward;
using couplenet::cosine_score;
using couplenet::hinge_active;
using couplenet::hinge_loss;
using encoders::kEmbedding;

namespace {

const encoders::GruNames& gru_names() {
  static const auto nm = encoders::GruNames::with_prefix("gru");
  return nm;
}

// Empty profiles encode to zero vectors (cosine then scores them 0).
std::vector<std::int32_t> user_tokens(const UserProfile& u) { return concatenated_tokens(u); }

}  // namespace

// ---- CosineModel ----

template <typename S>
UserState<S> CosineModel<S>::encode_user(const UserProfile& user) const {
  Rng unused(0);
  UserState<S> st;
  st.rows = encode_users({&user}, Mode::Eval, unused, nullptr);
  return st;
}

template <typename S>
S CosineModel<S>::score(const UserState<S>& a, const UserState<S>& b) const {
  return cosine_score<S>(a.rows.row(0), b.rows.row(0)).score;
}

template <typename S>
S CosineModel<S>::triplet_loss(const UserProfile& anchor, const UserProfile& pos, const UserProfile& neg, S margin,
                               Mode mode, Rng& rng, bool with_grad, S grad_scale) {
  if (with_grad) this->touch_all();
  std::unique_ptr<Trace> trace;
  Mat<S> U = encode_users({&anchor, &pos, &neg}, mode, rng, with_grad ? &trace : nullptr);
  RowVec<S> a = U.row(0), p = U.row(1), n = U.row(2);
  const S s_pos = cosine_score<S>(a, p).score;
  const S s_neg = cosine_score<S>(a, n).score;
  const S loss = hinge_loss(s_pos, s_neg, margin);
  if (!with_grad || !hinge_active(s_pos, s_neg, margin)) return loss;
  Mat<S> dU = Mat<S>::Zero(3, U.cols());
  RowVec<S> da, dp, dn;
  cosine_backward<S>(a, p, -grad_scale, da, dp);
  dU.row(0) += da;
  dU.row(1) += dp;
  cosine_backward<S>(a, n, grad_scale, da, dn);
  dU.row(0) += da;
  dU.row(2) += dn;
  backward(*trace, dU);
  return loss;
}

// ---- HierarchicalGru ----

template <typename S>
struct HierarchicalGru<S>::Tr : CosineModel<S>::Trace {
  std::vector<const TokenizedTweet*> tweets;
  std::vector<int> lengths;
  std::vector<Index> owner;
  encoders::GruTrace<S> gru;
  Mat<S> keep;
};

template <typename S>
HierarchicalGru<S>::HierarchicalGru(const ModelConfig& cfg) : CosineModel<S>(cfg) {
  Rng rng(cfg.seed);
  encoders::declare_embedding(this->params_, cfg.vocab_size, cfg.embed_dim, cfg.init_std, rng);
  encoders::declare_gru(this->params_, gru_names(), cfg.embed_dim, cfg.hidden, cfg.init_std, rng);
}

template <typename S>
Mat<S> HierarchicalGru<S>::encode_users(const std::vector<const UserProfile*>& users, Mode mode, Rng& rng,
                                        std::unique_ptr<typename CosineModel<S>::Trace>* trace) const {
  auto tr = std::make_unique<Tr>();
  int steps = 1;
  for (std::size_t u = 0; u < users.size(); ++u) {
    for (const auto* t : valid_tweets(*users[u])) {
      tr->tweets.push_back(t);
      tr->lengths.push_back(t->valid_len);
      tr->owner.push_back(static_cast<Index>(u));
      steps = std::max(steps, t->valid_len);
    }
  }
  const auto& p = this->params_;
  encoders::GruWeights<S> gw(p, gru_names());
  tr->gru = encoders::gru_forward<S>(encoders::embed_batch<S>(tr->tweets, p.value(kEmbedding), steps), tr->lengths, gw);
  Mat<S> last = dropout<S>(tr->gru.h.back(), this->cfg_.tweet_dropout, mode, rng, &tr->keep);
  Mat<S> U = Mat<S>::Zero(static_cast<Index>(users.size()), this->cfg_.hidden);
  for (std::size_t i = 0; i < tr->owner.size(); ++i) U.row(tr->owner[i]) += last.row(static_cast<Index>(i));
  if (trace) *trace = std::move(tr);
  return U;
}

template <typename S>
void HierarchicalGru<S>::backward(const typename CosineModel<S>::Trace& trace, const Mat<S>& dU) {
  const auto& tr = static_cast<const Tr&>(trace);
  auto& p = this->params_;
  Mat<S> d_last(static_cast<Index>(tr.owner.size()), dU.cols());
  for (std::size_t i = 0; i < tr.owner.size(); ++i) d_last.row(static_cast<Index>(i)) = dU.row(tr.owner[i]);
  d_last = d_last.cwiseProduct(tr.keep);
  std::vector<Mat<S>> d_h(tr.gru.h.size());
  d_h.back() = d_last;
  encoders::GruWeights<S> gw(p, gru_names());
  encoders::GruGrads<S> gg(p, gru_names());
  auto d_x = encoders::gru_backward<S>(tr.gru, d_h, gw, gg);
  encoders::embed_batch_backward<S>(tr.tweets, d_x, p.grad(kEmbedding));
}

// ---- ConcatGru ----

template <typename S>
struct ConcatGru<S>::Tr : CosineModel<S>::Trace {
  std::vector<TokenizedTweet> seqs;
  std::vector<const TokenizedTweet*> ptrs;
  encoders::GruTrace<S> gru;
  Mat<S> keep;
};

template <typename S>
ConcatGru<S>::ConcatGru(const ModelConfig& cfg) : CosineModel<S>(cfg) {
  Rng rng(cfg.seed);
  encoders::declare_embedding(this->params_, cfg.vocab_size, cfg.embed_dim, cfg.init_std, rng);
  encoders::declare_gru(this->params_, gru_names(), cfg.embed_dim, cfg.hidden, cfg.init_std, rng);
}

template <typename S>
Mat<S> ConcatGru<S>::encode_users(const std::vector<const UserProfile*>& users, Mode mode, Rng& rng,
                                  std::unique_ptr<typename CosineModel<S>::Trace>* trace) const {
  auto tr = std::make_unique<Tr>();
  std::vector<int> lengths;
  int steps = 1;
  for (const auto* u : users) {
    TokenizedTweet seq;
    seq.token_ids = user_tokens(*u);
    seq.valid_len = static_cast<int>(seq.token_ids.size());
    steps = std::max(steps, seq.valid_len);
    lengths.push_back(seq.valid_len);
    tr->seqs.push_back(std::move(seq));
  }
  for (const auto& s : tr->seqs) tr->ptrs.push_back(&s);
  const auto& p = this->params_;
  encoders::GruWeights<S> gw(p, gru_names());
  tr->gru = encoders::gru_forward<S>(encoders::embed_batch<S>(tr->ptrs, p.value(kEmbedding), steps), lengths, gw);
  Mat<S> U = dropout<S>(tr->gru.h.back(), this->cfg_.tweet_dropout, mode, rng, &tr->keep);
  if (trace) *trace = std::move(tr);
  return U;
}

template <typename S>
void ConcatGru<S>::backward(const typename CosineModel<S>::Trace& trace, const Mat<S>& dU) {
  const auto& tr = static_cast<const Tr&>(trace);
  auto& p = this->params_;
  std::vector<Mat<S>> d_h(tr.gru.h.size());
  d_h.back() = dU.cwiseProduct(tr.keep);
  encoders::GruWeights<S> gw(p, gru_names());
  encoders::GruGrads<S> gg(p, gru_names());
  auto d_x = encoders::gru_backward<S>(tr.gru, d_h, gw, gg);
  encoders::embed_batch_backward<S>(tr.ptrs, d_x, p.grad(kEmbedding));
}

// ---- DeepConn ----

template <typename S>
struct DeepConn<S>::Tr : CosineModel<S>::Trace {
  std::vector<std::vector<std::int32_t>> ids;
  std::vector<encoders::CnnTrace<S>> cnn;
  Mat<S> keep;
};

template <typename S>
DeepConn<S>::DeepConn(const ModelConfig& cfg) : CosineModel<S>(cfg) {
  Rng rng(cfg.seed);
  encoders::declare_embedding(this->params_, cfg.vocab_size, cfg.embed_dim, cfg.init_std, rng);
  encoders::declare_cnn(this->params_, encoders::CnnNames{}, cfg.embed_dim, cfg.hidden, cfg.init_std, rng);
}

template <typename S>
Mat<S> DeepConn<S>::encode_users(const std::vector<const UserProfile*>& users, Mode mode, Rng& rng,
                                 std::unique_ptr<typename CosineModel<S>::Trace>* trace) const {
  auto tr = std::make_unique<Tr>();
  const auto& p = this->params_;
  const encoders::CnnNames nm;
  Mat<S> out(static_cast<Index>(users.size()), this->cfg_.hidden);
  for (std::size_t u = 0; u < users.size(); ++u) {
    tr->ids.push_back(user_tokens(*users[u]));
    if (tr->ids.back().empty()) {
      tr->cnn.emplace_back();
      out.row(static_cast<Index>(u)).setZero();
      continue;
    }
    Mat<S> x = encoders::embed_ids<S>(tr->ids.back(), p.value(kEmbedding));
    tr->cnn.push_back(encoders::cnn_forward<S>(x, p.value(nm.F), p.value(nm.b)));
    out.row(static_cast<Index>(u)) = tr->cnn.back().out;
  }
  Mat<S> U = dropout<S>(out, this->cfg_.tweet_dropout, mode, rng, &tr->keep);
  if (trace) *trace = std::move(tr);
  return U;
}

template <typename S>
void DeepConn<S>::backward(const typename CosineModel<S>::Trace& trace, const Mat<S>& dU) {
  const auto& tr = static_cast<const Tr&>(trace);
  auto& p = this->params_;
  const encoders::CnnNames nm;
  Mat<S> d_out = dU.cwiseProduct(tr.keep);
  for (std::size_t u = 0; u < tr.ids.size(); ++u) {
    if (tr.ids[u].empty()) continue;
    Mat<S> dx = encoders::cnn_backward<S>(tr.cnn[u], d_out.row(static_cast<Index>(u)),
                                          static_cast<Index>(tr.ids[u].size()), p.value(nm.F), p.grad(nm.F),
                                          p.grad(nm.b));
    encoders::embed_ids_backward<S>(tr.ids[u], dx, p.grad(kEmbedding));
  }
}

// ---- MlpEmbed ----

namespace {
const char* const kW1 = "mlp.W1";
const char* const kB1 = "mlp.b1";
const char* const kW2 = "mlp.W2";
const char* const kB2 = "mlp.b2";
}  // namespace

template <typename S>
struct MlpEmbed<S>::Tr : CosineModel<S>::Trace {
  std::vector<Mat<S>> x, pre1, h1, pre2;
};

template <typename S>
MlpEmbed<S>::MlpEmbed(const ModelConfig& cfg) : CosineModel<S>(cfg) {
  Rng rng(cfg.seed);
  auto& p = this->params_;
  encoders::declare_embedding(p, cfg.vocab_size, cfg.embed_dim, cfg.init_std, rng, /*trainable=*/false);
  p.add_gaussian(kW1, cfg.embed_dim, cfg.hidden, cfg.init_std, rng);
  p.add_gaussian(kB1, 1, cfg.hidden, cfg.init_std, rng);
  p.add_gaussian(kW2, cfg.hidden, cfg.hidden, cfg.init_std, rng);
  p.add_gaussian(kB2, 1, cfg.hidden, cfg.init_std, rng);
}

template <typename S>
Mat<S> MlpEmbed<S>::encode_users(const std::vector<const UserProfile*>& users, Mode, Rng&,
                                 std::unique_ptr<typename CosineModel<S>::Trace>* trace) const {
  auto tr = std::make_unique<Tr>();
  const auto& p = this->params_;
  Mat<S> U(static_cast<Index>(users.size()), this->cfg_.hidden);
  for (std::size_t u = 0; u < users.size(); ++u) {
    Mat<S> x = encoders::embed_ids<S>(user_tokens(*users[u]), p.value(kEmbedding));
    if (x.rows() == 0) x = Mat<S>::Zero(0, this->cfg_.embed_dim);
    Mat<S> pre1 = affine<S>(x, p.value(kW1), p.value(kB1));
    Mat<S> h1 = relu(pre1);
    Mat<S> pre2 = affine<S>(h1, p.value(kW2), p.value(kB2));
    U.row(static_cast<Index>(u)) = relu(pre2).colwise().sum();
    tr->x.push_back(std::move(x));
    tr->pre1.push_back(std::move(pre1));
    tr->h1.push_back(std::move(h1));
    tr->pre2.push_back(std::move(pre2));
  }
  if (trace) *trace = std::move(tr);
  return U;
}

template <typename S>
void MlpEmbed<S>::backward(const typename CosineModel<S>::Trace& trace, const Mat<S>& dU) {
  const auto& tr = static_cast<const Tr&>(trace);
  auto& p = this->params_;
  for (std::size_t u = 0; u < tr.x.size(); ++u) {
    Mat<S> d2 = (tr.pre2[u].array() > S(0)).template cast<S>().rowwise() * dU.row(static_cast<Index>(u)).array();
    Mat<S> dh1 = affine_backward<S>(tr.h1[u], p.value(kW2), d2, p.grad(kW2), p.grad(kB2));
    Mat<S> d1 = dh1.array() * (tr.pre1[u].array() > S(0)).template cast<S>();
    affine_backward<S>(tr.x[u], p.value(kW1), d1, p.grad(kW1), p.grad(kB1));
  }
}

// ---- LinearRanker ----

namespace {
const char* const kRankW = "rank.w";
}

template <typename S>
S LinearRanker<S>::score(const UserState<S>& a, const UserState<S>& b) const {
  const Mat<S>& w = this->params_.value(kRankW);
  S s = 0;
  for (const auto& [i, v] : features(a, b)) s += w(i, 0) * v;
  return s;
}

template <typename S>
S LinearRanker<S>::triplet_loss(const UserProfile& anchor, const UserProfile& pos, const UserProfile& neg, S margin,
                                Mode, Rng&, bool with_grad, S grad_scale) {
  if (with_grad) this->touch_all();
  UserState<S> a = this->encode_user(anchor), p = this->encode_user(pos), n = this->encode_user(neg);
  const S s_pos = score(a, p), s_neg = score(a, n);
  const S loss = hinge_loss(s_pos, s_neg, margin);
  if (!with_grad || !hinge_active(s_pos, s_neg, margin)) return loss;
  Mat<S>& gw = this->params_.grad(kRankW);
  for (const auto& [i, v] : features(a, p)) gw(i, 0) -= grad_scale * v;
  for (const auto& [i, v] : features(a, n)) gw(i, 0) += grad_scale * v;
  return loss;
}

template <typename S>
RankSvmTfidf<S>::RankSvmTfidf(const ModelConfig& cfg) : LinearRanker<S>(cfg) {
  Rng rng(cfg.seed);
  this->params_.add_gaussian(kRankW, 2 * cfg.tfidf_top_k, 1, cfg.init_std, rng);
}

template <typename S>
void RankSvmTfidf<S>::fit(const corpus::Dataset& ds) {
  std::set<std::string> ids;
  for (const auto& pr : ds.pairs_in(corpus::Split::Train)) {
    ids.insert(pr.user_a);
    ids.insert(pr.user_b);
  }
  std::vector<const UserProfile*> docs;
  for (const auto& id : ids) docs.push_back(&ds.user(id));
  tfidf_.fit(docs, this->cfg_.tfidf_top_k, this->cfg_.ngram_max);
  fitted_ = true;
}

template <typename S>
nlohmann::json RankSvmTfidf<S>::extra_state() const {
  return {{"tfidf", tfidf_.to_json()}};
}

template <typename S>
void RankSvmTfidf<S>::load_extra_state(const nlohmann::json& j) {
  tfidf_ = TfidfFeaturizer::from_json(j.at("tfidf"));
  fitted_ = true;
}

template <typename S>
UserState<S> RankSvmTfidf<S>::encode_user(const UserProfile& user) const {
  if (!fitted_) throw std::logic_error("ranksvm_tfidf: featurizer used before fit");
  UserState<S> st;
  for (const auto& [i, v] : tfidf_.transform(user)) st.sparse.emplace_back(i, static_cast<S>(v));
  return st;
}

template <typename S>
std::vector<std::pair<Index, S>> RankSvmTfidf<S>::features(const UserState<S>& a, const UserState<S>& b) const {
  SparseVec sa, sb;
  for (const auto& [i, v] : a.sparse) sa.emplace_back(i, static_cast<double>(v));
  for (const auto& [i, v] : b.sparse) sb.emplace_back(i, static_cast<double>(v));
  std::vector<std::pair<Index, S>> out;
  for (const auto& [i, v] : pair_features(sa, sb, this->cfg_.tfidf_top_k)) out.emplace_back(i, static_cast<S>(v));
  return out;
}

template <typename S>
RankSvmEmbed<S>::RankSvmEmbed(const ModelConfig& cfg) : LinearRanker<S>(cfg) {
  Rng rng(cfg.seed);
  encoders::declare_embedding(this->params_, cfg.vocab_size, cfg.embed_dim, cfg.init_std, rng, /*trainable=*/false);
  this->params_.add_gaussian(kRankW, cfg.embed_dim, 1, cfg.init_std, rng);
}

template <typename S>
UserState<S> RankSvmEmbed<S>::encode_user(const UserProfile& user) const {
  UserState<S> st;
  const Mat<S>& table = this->params_.value(kEmbedding);
  st.rows = Mat<S>::Zero(1, table.cols());
  for (auto id : user_tokens(user)) {
    encoders::check_ids({id}, table.rows());
    st.rows.row(0) += table.row(id);
  }
  return st;
}

template <typename S>
std::vector<std::pair<Index, S>> RankSvmEmbed<S>::features(const UserState<S>& a, const UserState<S>& b) const {
  std::vector<std::pair<Index, S>> out;
  for (Index i = 0; i < a.rows.cols(); ++i) out.emplace_back(i, a.rows(0, i) + b.rows(0, i));
  return out;
}

template class CosineModel<float>;
template class CosineModel<double>;
template class HierarchicalGru<float>;
template class HierarchicalGru<double>;
template class ConcatGru<float>;
template class ConcatGru<double>;
template class DeepConn<float>;
template class DeepConn<double>;
template class MlpEmbed<float>;
template class MlpEmbed<double>;
template class LinearRanker<float>;
template class LinearRanker<double>;
template class RankSvmTfidf<float>;
template class RankSvmTfidf<double>;
template class RankSvmEmbed<float>;
template class RankSvmEmbed<double>;

}  // namespace lovebirds::baselines
