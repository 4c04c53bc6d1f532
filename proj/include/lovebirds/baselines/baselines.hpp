#pragma once

#include <memory>
#include <vector>

#include "lovebirds/baselines/tfidf.hpp"
#include "lovebirds/encoders/cnn.hpp"
#include "lovebirds/encoders/embedding.hpp"
#include "lovebirds/encoders/gru.hpp"
#include "lovebirds/pair_model.hpp"

namespace lovebirds::baselines {

// Models that map each user to one vector and score pairs by cosine.
template <typename S>
class CosineModel : public PairModel<S> {
 public:
  using PairModel<S>::PairModel;

  UserState<S> encode_user(const corpus::UserProfile& user) const override;
  S score(const UserState<S>& a, const UserState<S>& b) const override;
  S triplet_loss(const corpus::UserProfile& anchor, const corpus::UserProfile& pos, const corpus::UserProfile& neg,
                 S margin, Mode mode, Rng& rng, bool with_grad, S grad_scale = S(1)) override;

 protected:
  struct Trace {
    virtual ~Trace() = default;
  };
  // One row per user.
  virtual Mat<S> encode_users(const std::vector<const corpus::UserProfile*>& users, Mode mode, Rng& rng,
                              std::unique_ptr<Trace>* trace) const = 0;
  virtual void backward(const Trace& trace, const Mat<S>& dU) = 0;
};

// Per-tweet GRU, last state, summed over tweets.
template <typename S>
class HierarchicalGru final : public CosineModel<S> {
 public:
  explicit HierarchicalGru(const ModelConfig& cfg);

 protected:
  struct Tr;
  Mat<S> encode_users(const std::vector<const corpus::UserProfile*>& users, Mode mode, Rng& rng,
                      std::unique_ptr<typename CosineModel<S>::Trace>* trace) const override;
  void backward(const typename CosineModel<S>::Trace& trace, const Mat<S>& dU) override;
};

// One GRU over the profile's tokens concatenated newest tweet first, last state.
template <typename S>
class ConcatGru final : public CosineModel<S> {
 public:
  explicit ConcatGru(const ModelConfig& cfg);

 protected:
  struct Tr;
  Mat<S> encode_users(const std::vector<const corpus::UserProfile*>& users, Mode mode, Rng& rng,
                      std::unique_ptr<typename CosineModel<S>::Trace>* trace) const override;
  void backward(const typename CosineModel<S>::Trace& trace, const Mat<S>& dU) override;
};

// Width-3 convolution, ReLU, max over time on the concatenated tokens.
template <typename S>
class DeepConn final : public CosineModel<S> {
 public:
  explicit DeepConn(const ModelConfig& cfg);

 protected:
  struct Tr;
  Mat<S> encode_users(const std::vector<const corpus::UserProfile*>& users, Mode mode, Rng& rng,
                      std::unique_ptr<typename CosineModel<S>::Trace>* trace) const override;
  void backward(const typename CosineModel<S>::Trace& trace, const Mat<S>& dU) override;
};

// Frozen word embeddings through a two-layer ReLU MLP, summed over tokens.
template <typename S>
class MlpEmbed final : public CosineModel<S> {
 public:
  explicit MlpEmbed(const ModelConfig& cfg);

 protected:
  struct Tr;
  Mat<S> encode_users(const std::vector<const corpus::UserProfile*>& users, Mode mode, Rng& rng,
                      std::unique_ptr<typename CosineModel<S>::Trace>* trace) const override;
  void backward(const typename CosineModel<S>::Trace& trace, const Mat<S>& dU) override;
};

// Linear pairwise ranker s = w . phi(a, b) trained with the triplet hinge.
template <typename S>
class LinearRanker : public PairModel<S> {
 public:
  using PairModel<S>::PairModel;

  S score(const UserState<S>& a, const UserState<S>& b) const override;
  S triplet_loss(const corpus::UserProfile& anchor, const corpus::UserProfile& pos, const corpus::UserProfile& neg,
                 S margin, Mode mode, Rng& rng, bool with_grad, S grad_scale = S(1)) override;

 protected:
  virtual std::vector<std::pair<Index, S>> features(const UserState<S>& a, const UserState<S>& b) const = 0;
};

// phi = [|a - b|, a * b] of tf-idf n-gram vectors.
template <typename S>
class RankSvmTfidf final : public LinearRanker<S> {
 public:
  explicit RankSvmTfidf(const ModelConfig& cfg);

  void fit(const corpus::Dataset& ds) override;
  nlohmann::json extra_state() const override;
  void load_extra_state(const nlohmann::json& j) override;
  UserState<S> encode_user(const corpus::UserProfile& user) const override;
  const TfidfFeaturizer& featurizer() const { return tfidf_; }

 protected:
  std::vector<std::pair<Index, S>> features(const UserState<S>& a, const UserState<S>& b) const override;

 private:
  TfidfFeaturizer tfidf_;
  bool fitted_ = false;
};

// phi = e_a + e_b with e the summed frozen word embeddings of a profile.
template <typename S>
class RankSvmEmbed final : public LinearRanker<S> {
 public:
  explicit RankSvmEmbed(const ModelConfig& cfg);
  UserState<S> encode_user(const corpus::UserProfile& user) const override;

 protected:
  std::vector<std::pair<Index, S>> features(const UserState<S>& a, const UserState<S>& b) const override;
};

}  // namespace lovebirds::baselines
