#include "lovebirds/evalkit/evalkit.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "lovebirds/couplenet/couplenet.hpp"

namespace lovebirds::evalkit {

using corpus::Dataset;
using corpus::UserProfile;
using nlohmann::json;

json RankingResult::to_json() const {
  return {{"anchor", anchor},     {"golden", golden},       {"golden_rank", golden_rank},
          {"golden_score", golden_score}, {"negatives", negatives}, {"negative_scores", negative_scores},
          {"seed", seed}};
}

int golden_rank(double golden_score, const std::vector<double>& negative_scores) {
  int rank = 1;
  for (double s : negative_scores)
    if (s >= golden_score) ++rank;
  return rank;
}

std::vector<std::string> sample_negatives(const std::vector<std::string>& pool, const std::string& anchor,
                                          const std::string& golden, int count, Rng& rng) {
  std::vector<const std::string*> eligible;
  for (const auto& id : pool)
    if (id != anchor && id != golden) eligible.push_back(&id);
  if (count < 0 || static_cast<std::size_t>(count) > eligible.size())
    throw InsufficientPoolError("need " + std::to_string(count) + " negatives but only " +
                                std::to_string(eligible.size()) + " candidate users exist; lower --negatives");
  // partial Fisher-Yates
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(eligible.size() - static_cast<std::size_t>(i));
    std::swap(eligible[static_cast<std::size_t>(i)], eligible[j]);
    out.push_back(*eligible[static_cast<std::size_t>(i)]);
  }
  return out;
}

json MetricsReport::to_json() const {
  json hr = json::object();
  for (const auto& [n, v] : hr_at) hr[std::to_string(n)] = v;
  return {{"hr_at", hr}, {"accuracy", accuracy}, {"mrr", mrr}, {"mean_rank", mean_rank}, {"n_test", n_test}};
}

MetricsReport compute_metrics(const std::vector<int>& ranks) {
  if (ranks.empty()) throw std::invalid_argument("compute_metrics: no ranking results");
  MetricsReport m;
  const double n = static_cast<double>(ranks.size());
  for (int N : {1, 3, 5, 10})
    m.hr_at[N] = static_cast<double>(std::count_if(ranks.begin(), ranks.end(), [N](int r) { return r <= N; })) / n;
  m.accuracy = m.hr_at[1];
  double rr = 0, total = 0;
  for (int r : ranks) {
    if (r < 1) throw std::invalid_argument("compute_metrics: rank below 1");
    rr += 1.0 / r;
    total += r;
  }
  m.mrr = rr / n;
  m.mean_rank = total / n;
  m.n_test = ranks.size();
  return m;
}

MetricsReport compute_metrics(const std::vector<RankingResult>& results) {
  std::vector<int> ranks;
  for (const auto& r : results) ranks.push_back(r.golden_rank);
  return compute_metrics(ranks);
}

template <typename S>
const UserState<S>& EncodingCache<S>::get(const UserProfile& user) {
  auto it = states_.find(user.user_id);
  if (it == states_.end()) it = states_.emplace(user.user_id, model_.encode_user(user)).first;
  return it->second;
}

namespace {
std::vector<std::string> user_pool(const Dataset& ds) {
  std::vector<std::string> pool;
  for (const auto& u : ds.users) pool.push_back(u.user_id);
  return pool;
}

template <typename S>
RankingResult rank_with_pool(const PairModel<S>& model, const Dataset& ds, const std::vector<std::string>& pool,
                             const std::string& anchor, const std::string& golden, int negatives,
                             std::uint64_t case_seed, EncodingCache<S>& cache) {
  Rng rng(case_seed);
  RankingResult r;
  r.anchor = anchor;
  r.golden = golden;
  r.seed = case_seed;
  r.negatives = sample_negatives(pool, anchor, golden, negatives, rng);
  const auto& a = cache.get(ds.user(anchor));
  r.golden_score = static_cast<double>(model.score(a, cache.get(ds.user(golden))));
  for (const auto& id : r.negatives) r.negative_scores.push_back(static_cast<double>(model.score(a, cache.get(ds.user(id)))));
  r.golden_rank = golden_rank(r.golden_score, r.negative_scores);
  return r;
}
}  // namespace

template <typename S>
RankingResult rank_candidates(const PairModel<S>& model, const Dataset& ds, const std::string& anchor,
                              const std::string& golden, int negatives, std::uint64_t case_seed,
                              EncodingCache<S>* cache) {
  EncodingCache<S> local(model);
  return rank_with_pool(model, ds, user_pool(ds), anchor, golden, negatives, case_seed, cache ? *cache : local);
}

template <typename S>
std::vector<RankingResult> evaluate(const PairModel<S>& model, const Dataset& ds, corpus::Split split,
                                    const EvalConfig& cfg) {
  const auto pool = user_pool(ds);
  EncodingCache<S> cache(model);
  std::vector<RankingResult> out;
  std::uint64_t c = 0;
  for (const auto& pr : ds.pairs_in(split)) {
    out.push_back(rank_with_pool(model, ds, pool, pr.user_a, pr.user_b, cfg.negatives, Rng::derive(cfg.seed, c++), cache));
    if (cfg.both_directions)
      out.push_back(
          rank_with_pool(model, ds, pool, pr.user_b, pr.user_a, cfg.negatives, Rng::derive(cfg.seed, c++), cache));
  }
  return out;
}

json metrics_document(const MetricsReport& m, const std::string& model, const std::string& split, int K,
                      const EvalConfig& cfg) {
  json doc = m.to_json();
  doc["model"] = model;
  doc["split"] = split;
  doc["K"] = K;
  doc["protocol"] = {{"negatives", cfg.negatives},
                     {"negative_pool", "all_users"},
                     {"ties", "pessimistic"},
                     {"both_directions", cfg.both_directions},
                     {"seed", cfg.seed}};
  return doc;
}

void write_rankings(const std::filesystem::path& path, const std::vector<RankingResult>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : results) out << r.to_json().dump() << '\n';
}

namespace {
template <typename S>
json user_explanation(const UserProfile& u, const Vec<S>& weights, const std::vector<int>& slots,
                      const Mat<S>& word_attention, const corpus::Vocabulary& vocab, int top_m) {
  std::vector<Index> order(static_cast<std::size_t>(weights.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return weights(a) > weights(b); });
  json tweets = json::array();
  for (std::size_t k = 0; k < order.size() && static_cast<int>(k) < top_m; ++k) {
    const Index i = order[k];
    const auto& t = u.tweets[static_cast<std::size_t>(slots[static_cast<std::size_t>(i)])];
    json words = json::array();
    for (int w = 0; w < t.valid_len; ++w)
      words.push_back({{"token", vocab.token(t.token_ids[static_cast<std::size_t>(w)])},
                       {"weight", static_cast<double>(word_attention(i, w))}});
    tweets.push_back({{"slot", slots[static_cast<std::size_t>(i)]},
                      {"weight", static_cast<double>(weights(i))},
                      {"words", words}});
  }
  return {{"user_id", u.user_id}, {"valid_tweets", weights.size()}, {"top_tweets", tweets}};
}
}  // namespace

template <typename S>
json explain(const PairModel<S>& model, const Dataset& ds, const std::string& user_a, const std::string& user_b,
             int top_m) {
  const auto* cn = dynamic_cast<const couplenet::CoupleNet<S>*>(&model);
  if (!cn) throw CapabilityError("model '" + model.name() + "' has no attention weights to explain");
  if (top_m < 1) throw std::invalid_argument("explain: top_m must be at least 1");
  const auto& a = ds.user(user_a);
  const auto& b = ds.user(user_b);
  auto ps = cn->forward_pair(a, b);
  return {{"user_a", user_a},
          {"user_b", user_b},
          {"score", static_cast<double>(ps.score)},
          {"users",
           {user_explanation<S>(a, ps.a1, ps.slots1, ps.word_attention1, ds.vocab, top_m),
            user_explanation<S>(b, ps.a2, ps.slots2, ps.word_attention2, ds.vocab, top_m)}}};
}

template class EncodingCache<float>;
template class EncodingCache<double>;
template RankingResult rank_candidates<float>(const PairModel<float>&, const Dataset&, const std::string&,
                                              const std::string&, int, std::uint64_t, EncodingCache<float>*);
template RankingResult rank_candidates<double>(const PairModel<double>&, const Dataset&, const std::string&,
                                               const std::string&, int, std::uint64_t, EncodingCache<double>*);
template std::vector<RankingResult> evaluate<float>(const PairModel<float>&, const Dataset&, corpus::Split,
                                                    const EvalConfig&);
template std::vector<RankingResult> evaluate<double>(const PairModel<double>&, const Dataset&, corpus::Split,
                                                     const EvalConfig&);
template json explain<float>(const PairModel<float>&, const Dataset&, const std::string&, const std::string&, int);
template json explain<double>(const PairModel<double>&, const Dataset&, const std::string&, const std::string&, int);

}  // namespace lovebirds::evalkit
