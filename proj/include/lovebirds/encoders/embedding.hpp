#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lovebirds/corpus/types.hpp"
#include "lovebirds/corpus/vocab.hpp"
#include "lovebirds/numkit/param_store.hpp"

namespace lovebirds::encoders {

inline const std::string kEmbedding = "embedding.W";

class VocabularyMismatch : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// |V| x d table; row 0 (PAD) is zero and stays zero.
template <typename S>
Mat<S>& declare_embedding(ParamStore<S>& store, Index vocab_size, Index d, double stddev, Rng& rng,
                          bool trainable = true) {
  Mat<S>& W = store.add_gaussian(kEmbedding, vocab_size, d, stddev, rng, trainable);
  W.row(corpus::kPadId).setZero();
  return W;
}

inline void check_ids(const std::vector<std::int32_t>& ids, Index vocab_size) {
  for (auto id : ids)
    if (id < 0 || id >= vocab_size)
      throw VocabularyMismatch("token id " + std::to_string(id) + " outside embedding table of " +
                               std::to_string(vocab_size) + " rows");
}

// L x d; row i is table[token_ids[i]] (zero for PAD).
template <typename S>
Mat<S> embed(const corpus::TokenizedTweet& tweet, const Mat<S>& table) {
  check_ids(tweet.token_ids, table.rows());
  Mat<S> out(static_cast<Index>(tweet.token_ids.size()), table.cols());
  for (std::size_t i = 0; i < tweet.token_ids.size(); ++i) {
    if (tweet.token_ids[i] == corpus::kPadId)
      out.row(static_cast<Index>(i)).setZero();
    else
      out.row(static_cast<Index>(i)) = table.row(tweet.token_ids[i]);
  }
  return out;
}

// Sequence of arbitrary length (used for concatenated profiles).
template <typename S>
Mat<S> embed_ids(const std::vector<std::int32_t>& ids, const Mat<S>& table) {
  check_ids(ids, table.rows());
  Mat<S> out(static_cast<Index>(ids.size()), table.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == corpus::kPadId)
      out.row(static_cast<Index>(i)).setZero();
    else
      out.row(static_cast<Index>(i)) = table.row(ids[i]);
  }
  return out;
}

template <typename S>
void embed_ids_backward(const std::vector<std::int32_t>& ids, const Mat<S>& d_rows, Mat<S>& d_table) {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] != corpus::kPadId) d_table.row(ids[i]) += d_rows.row(static_cast<Index>(i));
}

// Time-major batch of K tweets: step t is a K x d matrix whose row k is the
// embedding of tweet k's t-th token.
template <typename S>
std::vector<Mat<S>> embed_batch(const std::vector<const corpus::TokenizedTweet*>& tweets, const Mat<S>& table,
                                int L) {
  std::vector<Mat<S>> steps(static_cast<std::size_t>(L), Mat<S>::Zero(static_cast<Index>(tweets.size()), table.cols()));
  for (std::size_t k = 0; k < tweets.size(); ++k) {
    check_ids(tweets[k]->token_ids, table.rows());
    for (int t = 0; t < L && t < static_cast<int>(tweets[k]->token_ids.size()); ++t) {
      auto id = tweets[k]->token_ids[static_cast<std::size_t>(t)];
      if (id != corpus::kPadId) steps[static_cast<std::size_t>(t)].row(static_cast<Index>(k)) = table.row(id);
    }
  }
  return steps;
}

template <typename S>
void embed_batch_backward(const std::vector<const corpus::TokenizedTweet*>& tweets,
                          const std::vector<Mat<S>>& d_steps, Mat<S>& d_table) {
  for (std::size_t k = 0; k < tweets.size(); ++k)
    for (std::size_t t = 0; t < d_steps.size() && t < tweets[k]->token_ids.size(); ++t) {
      auto id = tweets[k]->token_ids[t];
      if (id != corpus::kPadId) d_table.row(id) += d_steps[t].row(static_cast<Index>(k));
    }
}

// Text vectors, one "token v1 ... vd" per line. Returns token -> values for
// tokens present in vocab; *dim receives d.
struct PretrainedVectors {
  Index dim = 0;
  std::vector<std::pair<std::int32_t, std::vector<double>>> rows;  // (vocab id, values)
};
PretrainedVectors load_pretrained(const std::filesystem::path& path, const corpus::Vocabulary& vocab);

// Copies pretrained rows into the table; other rows keep their Gaussian init.
template <typename S>
std::size_t apply_pretrained(const PretrainedVectors& vecs, Mat<S>& table) {
  if (vecs.dim != table.cols())
    throw DimensionError("pretrained width " + std::to_string(vecs.dim) + " vs table " + shape_str(table));
  for (const auto& [id, values] : vecs.rows) {
    if (id == corpus::kPadId) continue;
    for (Index j = 0; j < table.cols(); ++j) table(id, j) = static_cast<S>(values[static_cast<std::size_t>(j)]);
  }
  return vecs.rows.size();
}

}  // namespace lovebirds::encoders
