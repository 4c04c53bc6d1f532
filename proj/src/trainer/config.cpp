#include "lovebirds/trainer/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lovebirds::trainer {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  std::from_chars_result res;
  if constexpr (std::is_floating_point_v<T>) {
    res = std::from_chars(first, last, out, std::chars_format::general);
  } else {
    res = std::from_chars(first, last, out);
  }
  if (res.ec != std::errc() || res.ptr != last || value.empty())
    throw ConfigError("config key '" + key + "': cannot parse '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  std::string v = value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

std::set<std::string> parse_list(const std::string& value) {
  std::set<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.insert(item);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

std::pair<std::string, std::string> parse_override(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + arg + "' is not key=value");
  return {trim(arg.substr(0, eq)), trim(arg.substr(eq + 1))};
}

bool TrainConfig::set(const std::string& key, const std::string& v) {
  if (key == "model") {
    if (std::find(model_names().begin(), model_names().end(), v) == model_names().end())
      throw ConfigError("unknown model '" + v + "'");
    model = v;
  } else if (key == "epochs") epochs = parse_number<int>(key, v);
  else if (key == "batch_size") batch_size = parse_number<int>(key, v);
  else if (key == "margin") margin = parse_number<double>(key, v);
  else if (key == "lr") lr = parse_number<double>(key, v);
  else if (key == "K") K = parse_number<int>(key, v);
  else if (key == "L") L = parse_number<int>(key, v);
  else if (key == "init_std") init_std = parse_number<double>(key, v);
  else if (key == "l2") l2 = parse_number<double>(key, v);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, v);
  else if (key == "clip_norm") clip_norm = parse_number<double>(key, v);
  else if (key == "embed_dim") embed_dim = parse_number<Index>(key, v);
  else if (key == "hidden") hidden = parse_number<Index>(key, v);
  else if (key == "tweet_dropout") tweet_dropout = parse_number<double>(key, v);
  else if (key == "user_dropout") user_dropout = parse_number<double>(key, v);
  else if (key == "tfidf_top_k") tfidf_top_k = parse_number<Index>(key, v);
  else if (key == "ngram_max") ngram_max = parse_number<int>(key, v);
  else if (key == "precision") {
    precision = parse_number<int>(key, v);
    if (precision != 32 && precision != 64) throw ConfigError("precision must be 32 or 64");
  } else if (key == "dev_negatives") dev_negatives = parse_number<int>(key, v);
  else if (key == "both_directions") both_directions = parse_bool(key, v);
  else return false;
  return true;
}

std::vector<std::string> TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(margin > 0)) throw ConfigError("margin must be positive");
  if (!(lr > 0)) throw ConfigError("lr must be positive");
  if (K < 1 || L < 1) throw ConfigError("K and L must be positive");
  if (embed_dim < 1 || hidden < 1) throw ConfigError("embed_dim and hidden must be positive");
  if (tweet_dropout < 0 || tweet_dropout >= 1 || user_dropout < 0 || user_dropout >= 1)
    throw ConfigError("dropout rates must lie in [0, 1)");
  if (dev_negatives < 1) throw ConfigError("dev_negatives must be positive");
  std::vector<std::string> warnings;
  auto in = [](auto v, std::initializer_list<decltype(v)> grid) {
    return std::find(grid.begin(), grid.end(), v) != grid.end();
  };
  if (!in(batch_size, {16, 32, 64})) warnings.push_back("batch_size " + std::to_string(batch_size) + " outside {16,32,64}");
  if (!in(margin, {0.1, 0.2, 0.5})) warnings.push_back("margin " + std::to_string(margin) + " outside {0.1,0.2,0.5}");
  if (!in(K, {10, 20, 50, 100, 150, 200})) warnings.push_back("K " + std::to_string(K) + " outside {10,20,50,100,150,200}");
  if (L != 10) warnings.push_back("L " + std::to_string(L) + " differs from 10");
  if (lr != 1e-3) warnings.push_back("lr " + std::to_string(lr) + " differs from 1e-3");
  return warnings;
}

nlohmann::json TrainConfig::to_json() const {
  return {{"model", model},
          {"epochs", epochs},
          {"batch_size", batch_size},
          {"margin", margin},
          {"lr", lr},
          {"K", K},
          {"L", L},
          {"init_std", init_std},
          {"l2", l2},
          {"seed", seed},
          {"clip_norm", clip_norm},
          {"embed_dim", embed_dim},
          {"hidden", hidden},
          {"tweet_dropout", tweet_dropout},
          {"user_dropout", user_dropout},
          {"tfidf_top_k", tfidf_top_k},
          {"ngram_max", ngram_max},
          {"precision", precision},
          {"dev_negatives", dev_negatives},
          {"both_directions", both_directions}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  for (const auto& [k, v] : j.items()) {
    const std::string text = v.is_string() ? v.get<std::string>() : v.dump();
    if (!c.set(k, text)) throw ConfigError("unknown train config key '" + k + "'");
  }
  return c;
}

ModelConfig TrainConfig::model_config(Index vocab_size) const {
  ModelConfig m;
  m.model = model;
  m.vocab_size = vocab_size;
  m.embed_dim = embed_dim;
  m.hidden = hidden;
  m.K = K;
  m.L = L;
  m.init_std = init_std;
  m.tweet_dropout = tweet_dropout;
  m.user_dropout = user_dropout;
  m.tfidf_top_k = tfidf_top_k;
  m.ngram_max = ngram_max;
  m.seed = seed;
  return m;
}

void apply(TrainConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv)
    if (!cfg.set(k, v)) throw ConfigError("unknown train config key '" + k + "'");
}

bool set_build_key(corpus::BuildConfig& cfg, const std::string& key, const std::string& v) {
  if (key == "max_followers") cfg.filter.max_followers = parse_number<std::uint64_t>(key, v);
  else if (key == "require_single_mention") cfg.filter.require_single_mention = parse_bool(key, v);
  else if (key == "heart_emojis") cfg.filter.heart_emojis = parse_list(v);
  else if (key == "ban_words") cfg.filter.ban_words = parse_list(v);
  else if (key == "music_words") cfg.filter.music_words = parse_list(v);
  else if (key == "affection_words") cfg.affection_lexicon = parse_list(v);
  else if (key == "min_count") cfg.min_count = parse_number<int>(key, v);
  else if (key == "K") cfg.K = parse_number<int>(key, v);
  else if (key == "L") cfg.L = parse_number<int>(key, v);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "train_ratio") cfg.train_ratio = parse_number<double>(key, v);
  else if (key == "dev_ratio") cfg.dev_ratio = parse_number<double>(key, v);
  else if (key == "test_ratio") cfg.test_ratio = parse_number<double>(key, v);
  else return false;
  return true;
}

void apply(corpus::BuildConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv)
    if (!set_build_key(cfg, k, v)) throw ConfigError("unknown corpus config key '" + k + "'");
}

std::optional<std::uint64_t> seed_from_env() {
  const char* s = std::getenv("LOVEBIRDS_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    return parse_number<std::uint64_t>("LOVEBIRDS_SEED", s);
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}

}  // namespace lovebirds::trainer
