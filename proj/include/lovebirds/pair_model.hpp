#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovebirds/corpus/dataset.hpp"
#include "lovebirds/numkit/ops.hpp"
#include "lovebirds/numkit/param_store.hpp"

namespace lovebirds {

// Architecture hyperparameters shared by every model. Unused fields are
// ignored by models that do not need them.
struct ModelConfig {
  std::string model = "couplenet";
  Index vocab_size = 0;
  Index embed_dim = 100;   // d
  Index hidden = 100;      // n (GRU state, CNN filters, MLP width)
  int K = 0;
  int L = 0;
  double init_std = 0.1;
  double tweet_dropout = 0.5;  // after recurrent / convolutional layers
  double user_dropout = 0.2;   // rate on user representations before scoring
  Index tfidf_top_k = 5000;
  int ngram_max = 3;
  std::uint64_t seed = 7;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

// Partner-independent encoding of one user, cached during evaluation.
template <typename S>
struct UserState {
  Mat<S> rows;                                  // tweet encodings or a 1 x dim vector
  std::vector<std::pair<Index, S>> sparse;      // sorted (feature, value), tf-idf models
};

template <typename S>
class PairModel {
 public:
  explicit PairModel(ModelConfig cfg) : cfg_(std::move(cfg)) {}
  virtual ~PairModel() = default;
  PairModel(const PairModel&) = delete;
  PairModel& operator=(const PairModel&) = delete;

  const ModelConfig& config() const { return cfg_; }
  const std::string& name() const { return cfg_.model; }
  ParamStore<S>& params() { return params_; }
  const ParamStore<S>& params() const { return params_; }

  // Fits data-dependent state that is not learned by gradient descent.
  virtual void fit(const corpus::Dataset&) {}
  virtual nlohmann::json extra_state() const { return nlohmann::json::object(); }
  virtual void load_extra_state(const nlohmann::json&) {}

  virtual UserState<S> encode_user(const corpus::UserProfile& user) const = 0;
  virtual S score(const UserState<S>& a, const UserState<S>& b) const = 0;
  S score_pair(const corpus::UserProfile& a, const corpus::UserProfile& b) const {
    return score(encode_user(a), encode_user(b));
  }

  // Hinge loss max(0, margin - s(anchor, pos) + s(anchor, neg)). With
  // with_grad, grad_scale * dloss is accumulated into params() and every
  // trainable parameter is marked as reached, active hinge or not.
  virtual S triplet_loss(const corpus::UserProfile& anchor, const corpus::UserProfile& pos,
                         const corpus::UserProfile& neg, S margin, Mode mode, Rng& rng, bool with_grad,
                         S grad_scale = S(1)) = 0;

 protected:
  void touch_all() {
    for (auto& [n, e] : params_.entries()) params_.grad(n);
  }

  ModelConfig cfg_;
  ParamStore<S> params_;
};

// Valid tweets of a profile (the first tweet_valid_count slots with tokens).
inline std::vector<const corpus::TokenizedTweet*> valid_tweets(const corpus::UserProfile& u) {
  std::vector<const corpus::TokenizedTweet*> out;
  const int n = std::min(u.tweet_valid_count, u.K());
  for (int k = 0; k < n; ++k)
    if (u.tweets[static_cast<std::size_t>(k)].valid_len > 0) out.push_back(&u.tweets[static_cast<std::size_t>(k)]);
  return out;
}

// All valid tokens of a profile, newest tweet first.
inline std::vector<std::int32_t> concatenated_tokens(const corpus::UserProfile& u) {
  std::vector<std::int32_t> out;
  for (const auto* t : valid_tweets(u))
    out.insert(out.end(), t->token_ids.begin(), t->token_ids.begin() + t->valid_len);
  return out;
}

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"couplenet", "hgru",          "gru",          "deepconn",
                                                 "mlp_embed", "ranksvm_tfidf", "ranksvm_embed"};
  return names;
}

class UnknownModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Declares and initializes parameters from cfg.seed.
template <typename S>
std::unique_ptr<PairModel<S>> make_model(const ModelConfig& cfg);

}  // namespace lovebirds
