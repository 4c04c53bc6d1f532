#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovebirds/corpus/dataset.hpp"
#include "lovebirds/numkit/checkpoint.hpp"
#include "lovebirds/pair_model.hpp"
#include "lovebirds/trainer/config.hpp"

namespace lovebirds::trainer {

struct Triplet {
  std::string anchor;
  std::string positive;
  std::string negative;
};

// Uniform over training users, excluding the anchor and its partners.
class NegativeSampler {
 public:
  explicit NegativeSampler(const std::vector<corpus::CouplePair>& train_pairs);

  std::string sample(const std::string& anchor, Rng& rng) const;
  const std::vector<std::string>& users() const { return users_; }

 private:
  std::vector<std::string> users_;  // sorted
  std::unordered_map<std::string, std::set<std::string>> partners_;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, nlohmann::json diagnostic)
      : std::runtime_error(what), diagnostic_(std::move(diagnostic)) {}
  const nlohmann::json& diagnostic() const { return diagnostic_; }

 private:
  nlohmann::json diagnostic_;
};

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0;
  double active_fraction = 0;  // triplets with a nonzero hinge
  std::size_t triplets = 0;
  bool has_dev = false;
  double dev_hr10 = 0;
  double dev_mrr = 0;
  double seconds = 0;
};

struct TrainResult {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_dev_hr10 = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json(bool with_timing = true) const;
};

struct TrainHooks {
  std::ostream* progress = nullptr;
  std::function<void(const EpochRecord&)> on_epoch;
};

// Shuffles the training triplets each epoch, draws fresh negatives, takes one
// Adam step per batch, evaluates dev HR@10 after each epoch and leaves the
// model holding the parameters of the best epoch (earliest on ties).
template <typename S>
TrainResult train(PairModel<S>& model, const corpus::Dataset& ds, const TrainConfig& cfg, const TrainHooks& hooks = {});

// Builds and fits the model named in cfg, then trains it.
template <typename S>
std::unique_ptr<PairModel<S>> train_model(const corpus::Dataset& ds, const TrainConfig& cfg, TrainResult* result,
                                          const TrainHooks& hooks = {});

template <typename S>
void save_model(const std::filesystem::path& path, const PairModel<S>& model, const TrainConfig& cfg);

// Rebuilds the model from a checkpoint header and its tensors.
template <typename S>
std::unique_ptr<PairModel<S>> load_model(const Checkpoint& ckpt, TrainConfig* cfg = nullptr);

}  // namespace lovebirds::trainer
