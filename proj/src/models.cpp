#include <algorithm>

#include "lovebirds/baselines/baselines.hpp"
#include "lovebirds/couplenet/couplenet.hpp"
#include "lovebirds/pair_model.hpp"

namespace lovebirds {

nlohmann::json ModelConfig::to_json() const {
  return {{"model", model},
          {"vocab_size", vocab_size},
          {"embed_dim", embed_dim},
          {"hidden", hidden},
          {"K", K},
          {"L", L},
          {"init_std", init_std},
          {"tweet_dropout", tweet_dropout},
          {"user_dropout", user_dropout},
          {"tfidf_top_k", tfidf_top_k},
          {"ngram_max", ngram_max},
          {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.model = j.at("model").get<std::string>();
  c.vocab_size = j.at("vocab_size").get<Index>();
  c.embed_dim = j.at("embed_dim").get<Index>();
  c.hidden = j.at("hidden").get<Index>();
  c.K = j.at("K").get<int>();
  c.L = j.at("L").get<int>();
  c.init_std = j.at("init_std").get<double>();
  c.tweet_dropout = j.at("tweet_dropout").get<double>();
  c.user_dropout = j.at("user_dropout").get<double>();
  c.tfidf_top_k = j.at("tfidf_top_k").get<Index>();
  c.ngram_max = j.at("ngram_max").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

template <typename S>
std::unique_ptr<PairModel<S>> make_model(const ModelConfig& cfg) {
  if (cfg.vocab_size < 2 && cfg.model != "ranksvm_tfidf")
    throw ParameterError("make_model: vocabulary of " + std::to_string(cfg.vocab_size) + " rows");
  if (cfg.embed_dim <= 0 || cfg.hidden <= 0) throw ParameterError("make_model: dimensions must be positive");
  const auto& m = cfg.model;
  if (m == "couplenet") return std::make_unique<couplenet::CoupleNet<S>>(cfg);
  if (m == "hgru") return std::make_unique<baselines::HierarchicalGru<S>>(cfg);
  if (m == "gru") return std::make_unique<baselines::ConcatGru<S>>(cfg);
  if (m == "deepconn") return std::make_unique<baselines::DeepConn<S>>(cfg);
  if (m == "mlp_embed") return std::make_unique<baselines::MlpEmbed<S>>(cfg);
  if (m == "ranksvm_tfidf") return std::make_unique<baselines::RankSvmTfidf<S>>(cfg);
  if (m == "ranksvm_embed") return std::make_unique<baselines::RankSvmEmbed<S>>(cfg);
  std::string known;
  for (const auto& n : model_names()) known += (known.empty() ? "" : ", ") + n;
  throw UnknownModelError("unknown model '" + m + "' (known: " + known + ")");
}

template std::unique_ptr<PairModel<float>> make_model<float>(const ModelConfig&);
template std::unique_ptr<PairModel<double>> make_model<double>(const ModelConfig&);

}  // namespace lovebirds
