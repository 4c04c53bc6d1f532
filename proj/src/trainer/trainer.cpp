#include "lovebirds/trainer/trainer.hpp"

#include <chrono>
#include <cmath>
#include <map>

#include "lovebirds/evalkit/evalkit.hpp"

namespace lovebirds::trainer {

using corpus::Dataset;
using nlohmann::json;

NegativeSampler::NegativeSampler(const std::vector<corpus::CouplePair>& train_pairs) {
  std::set<std::string> users;
  for (const auto& p : train_pairs) {
    users.insert(p.user_a);
    users.insert(p.user_b);
    partners_[p.user_a].insert(p.user_b);
    partners_[p.user_b].insert(p.user_a);
  }
  users_.assign(users.begin(), users.end());
}

std::string NegativeSampler::sample(const std::string& anchor, Rng& rng) const {
  std::size_t excluded = 0;
  auto it = partners_.find(anchor);
  if (it != partners_.end()) excluded = it->second.size() + 1;
  if (users_.size() <= excluded)
    throw ConfigError("negative sampling: no training user is eligible for '" + anchor + "'");
  for (;;) {
    const std::string& u = users_[static_cast<std::size_t>(rng.below(users_.size()))];
    if (u == anchor) continue;
    if (it != partners_.end() && it->second.count(u)) continue;
    return u;
  }
}

json TrainResult::to_json(bool with_timing) const {
  json ep = json::array();
  for (const auto& e : epochs) {
    json j = {{"epoch", e.epoch}, {"mean_loss", e.mean_loss}, {"active_fraction", e.active_fraction},
              {"triplets", e.triplets}};
    if (e.has_dev) {
      j["dev_hr10"] = e.dev_hr10;
      j["dev_mrr"] = e.dev_mrr;
    }
    if (with_timing) j["seconds"] = e.seconds;
    ep.push_back(j);
  }
  return {{"epochs", ep}, {"best_epoch", best_epoch}, {"best_dev_hr10", best_dev_hr10}, {"warnings", warnings}};
}

namespace {

template <typename S>
std::map<std::string, Mat<S>> snapshot(const ParamStore<S>& store) {
  std::map<std::string, Mat<S>> out;
  for (const auto& [name, e] : store.entries()) out.emplace(name, e.value);
  return out;
}

template <typename S>
void restore(ParamStore<S>& store, const std::map<std::string, Mat<S>>& snap) {
  for (auto& [name, e] : store.entries()) e.value = snap.at(name);
}

}  // namespace

template <typename S>
TrainResult train(PairModel<S>& model, const Dataset& ds, const TrainConfig& cfg, const TrainHooks& hooks) {
  TrainResult result;
  result.warnings = cfg.validate();
  const auto train_pairs = ds.pairs_in(corpus::Split::Train);
  if (train_pairs.empty()) throw ConfigError("training split is empty");
  NegativeSampler sampler(train_pairs);
  if (sampler.users().size() < 3) throw ConfigError("negative sampling needs at least 3 training users");

  std::vector<std::pair<std::string, std::string>> positives;
  for (const auto& p : train_pairs) {
    positives.emplace_back(p.user_a, p.user_b);
    if (cfg.both_directions) positives.emplace_back(p.user_b, p.user_a);
  }

  const auto dev_pairs = ds.pairs_in(corpus::Split::Dev);
  evalkit::EvalConfig dev_cfg;
  dev_cfg.negatives = cfg.dev_negatives;
  dev_cfg.seed = Rng::derive(cfg.seed, 0xde5);
  dev_cfg.both_directions = cfg.both_directions;
  const int max_negatives = static_cast<int>(ds.users.size()) - 2;
  if (!dev_pairs.empty() && dev_cfg.negatives > max_negatives) {
    result.warnings.push_back("dev_negatives lowered to " + std::to_string(max_negatives) + " (user pool size)");
    dev_cfg.negatives = max_negatives;
  }

  AdamConfig adam;
  adam.lr = cfg.lr;
  adam.l2 = cfg.l2;
  const S margin = static_cast<S>(cfg.margin);
  std::map<std::string, Mat<S>> best;
  double best_hr = -1;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng order_rng(Rng::derive(cfg.seed, 1000 + static_cast<std::uint64_t>(epoch)));
    Rng rng(Rng::derive(cfg.seed, 2000 + static_cast<std::uint64_t>(epoch)));
    auto order = positives;
    order_rng.shuffle(order);

    double loss_sum = 0;
    std::size_t active = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const S scale = S(1) / static_cast<S>(end - start);
      std::vector<Triplet> batch;
      model.params().zero_grad();
      for (std::size_t i = start; i < end; ++i) {
        Triplet t{order[i].first, order[i].second, sampler.sample(order[i].first, rng)};
        const S loss = model.triplet_loss(ds.user(t.anchor), ds.user(t.positive), ds.user(t.negative), margin,
                                          Mode::Train, rng, true, scale);
        batch.push_back(t);
        if (!std::isfinite(static_cast<double>(loss))) {
          json diag = {{"epoch", epoch}, {"batch_start", start}, {"triplets", json::array()}};
          for (const auto& b : batch) diag["triplets"].push_back({b.anchor, b.positive, b.negative});
          throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch), diag);
        }
        loss_sum += static_cast<double>(loss);
        if (loss > S(0)) ++active;
      }
      if (cfg.clip_norm > 0) model.params().clip_grad_norm(cfg.clip_norm);
      adam_step(model.params(), adam);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.triplets = order.size();
    rec.mean_loss = loss_sum / static_cast<double>(order.size());
    rec.active_fraction = static_cast<double>(active) / static_cast<double>(order.size());
    if (!dev_pairs.empty()) {
      auto m = evalkit::compute_metrics(evalkit::evaluate(model, ds, corpus::Split::Dev, dev_cfg));
      rec.has_dev = true;
      rec.dev_hr10 = m.hr_at.at(10);
      rec.dev_mrr = m.mrr;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.epochs.push_back(rec);

    const double selector = rec.has_dev ? rec.dev_hr10 : static_cast<double>(epoch);
    if (selector > best_hr) {
      best_hr = selector;
      best = snapshot(model.params());
      result.best_epoch = epoch;
      result.best_dev_hr10 = rec.dev_hr10;
    }
    if (hooks.progress) {
      *hooks.progress << "epoch " << epoch << "  loss " << rec.mean_loss << "  active " << rec.active_fraction;
      if (rec.has_dev) *hooks.progress << "  dev HR@10 " << rec.dev_hr10 << "  dev MRR " << rec.dev_mrr;
      *hooks.progress << "  (" << rec.seconds << " s)\n";
    }
    if (hooks.on_epoch) hooks.on_epoch(rec);
  }
  restore(model.params(), best);
  return result;
}

template <typename S>
std::unique_ptr<PairModel<S>> train_model(const Dataset& ds, const TrainConfig& cfg, TrainResult* result,
                                          const TrainHooks& hooks) {
  const Dataset view = ds.K == cfg.K ? ds : ds.with_K(cfg.K);
  auto model = make_model<S>(cfg.model_config(view.vocab.size()));
  model->fit(view);
  TrainResult r = train(*model, view, cfg, hooks);
  if (result) *result = std::move(r);
  return model;
}

template <typename S>
void save_model(const std::filesystem::path& path, const PairModel<S>& model, const TrainConfig& cfg) {
  json header = {{"kind", "lovebirds-model"},
                 {"version", LOVEBIRDS_VERSION},
                 {"model", model.config().to_json()},
                 {"train", cfg.to_json()},
                 {"seed", cfg.seed},
                 {"extra", model.extra_state()}};
  write_checkpoint(path, make_checkpoint(model.params(), header));
}

template <typename S>
std::unique_ptr<PairModel<S>> load_model(const Checkpoint& ckpt, TrainConfig* cfg) {
  if (ckpt.header.value("kind", "") != "lovebirds-model")
    throw CheckpointError("checkpoint does not hold a lovebirds model");
  auto model = make_model<S>(ModelConfig::from_json(ckpt.header.at("model")));
  load_into(ckpt, model->params());
  model->load_extra_state(ckpt.header.at("extra"));
  if (cfg) *cfg = TrainConfig::from_json(ckpt.header.at("train"));
  return model;
}

template TrainResult train<float>(PairModel<float>&, const Dataset&, const TrainConfig&, const TrainHooks&);
template TrainResult train<double>(PairModel<double>&, const Dataset&, const TrainConfig&, const TrainHooks&);
template std::unique_ptr<PairModel<float>> train_model<float>(const Dataset&, const TrainConfig&, TrainResult*,
                                                              const TrainHooks&);
template std::unique_ptr<PairModel<double>> train_model<double>(const Dataset&, const TrainConfig&, TrainResult*,
                                                                const TrainHooks&);
template void save_model<float>(const std::filesystem::path&, const PairModel<float>&, const TrainConfig&);
template void save_model<double>(const std::filesystem::path&, const PairModel<double>&, const TrainConfig&);
template std::unique_ptr<PairModel<float>> load_model<float>(const Checkpoint&, TrainConfig*);
template std::unique_ptr<PairModel<double>> load_model<double>(const Checkpoint&, TrainConfig*);

}  // namespace lovebirds::trainer
