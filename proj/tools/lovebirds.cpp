// lovebirds: corpus construction, synthetic data, training, evaluation,
// explanation and reporting from one binary.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "lovebirds/cli/manifest.hpp"
#include "lovebirds/corpus/pipeline.hpp"
#include "lovebirds/corpus/synthetic.hpp"
#include "lovebirds/encoders/embedding.hpp"
#include "lovebirds/evalkit/evalkit.hpp"
#include "lovebirds/trainer/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lovebirds;

namespace {

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return json::parse(in);
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config, std::uint64_t dflt) {
  if (flag) return *flag;
  if (config) return *config;
  if (auto env = trainer::seed_from_env()) return *env;
  return dflt;
}

// ---- build-corpus ----

struct BuildArgs {
  std::string candidates, timelines, followers, manifest, fetched, config, heart_emojis, out;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

int run_build(const BuildArgs& a) {
  Clock clock;
  corpus::BuildConfig cfg;
  std::map<std::string, std::string> kv;
  if (!a.config.empty()) kv = trainer::read_key_values(a.config);
  for (const auto& o : a.overrides) kv.insert_or_assign(trainer::parse_override(o).first, trainer::parse_override(o).second);
  std::optional<std::uint64_t> cfg_seed;
  if (kv.count("seed")) {
    trainer::set_build_key(cfg, "seed", kv["seed"]);
    cfg_seed = cfg.seed;
    kv.erase("seed");
  }
  trainer::apply(cfg, kv);
  cfg.seed = resolve_seed(a.seed, cfg_seed, cfg.seed);
  if (!a.heart_emojis.empty()) cfg.filter.heart_emojis = corpus::load_emoji_list(a.heart_emojis);

  cli::RunManifest man;
  man.command = "build-corpus";
  std::vector<corpus::RawTweet> candidates, timelines;
  if (!a.manifest.empty()) {
    if (a.fetched.empty()) throw std::invalid_argument("--manifest needs --fetched");
    auto imported = corpus::import_manifest(a.manifest, corpus::read_tweets_jsonl(a.fetched));
    candidates = std::move(imported.candidates);
    timelines = std::move(imported.timelines);
    man.add_input(a.manifest);
    man.add_input(a.fetched);
    if (imported.missing) std::cerr << imported.missing << " manifest tweets were not in the fetched file\n";
  } else {
    if (a.candidates.empty() || a.timelines.empty())
      throw std::invalid_argument("give --candidates and --timelines, or --manifest and --fetched");
    candidates = corpus::read_tweets_jsonl(a.candidates);
    timelines = corpus::read_tweets_jsonl(a.timelines);
    man.add_input(a.candidates);
    man.add_input(a.timelines);
  }
  corpus::FollowerIndex followers;
  if (!a.followers.empty()) {
    followers = corpus::read_followers_jsonl(a.followers);
    man.add_input(a.followers);
  }
  auto built = corpus::build_corpus(candidates, timelines, followers, cfg);
  fs::create_directories(a.out);
  corpus::save_dataset(a.out, built.dataset);
  write_json(fs::path(a.out) / "audit.json", built.audit);

  man.config = {{"K", cfg.K}, {"L", cfg.L}, {"min_count", cfg.min_count}, {"max_followers", cfg.filter.max_followers},
                {"train_ratio", cfg.train_ratio}, {"dev_ratio", cfg.dev_ratio}, {"test_ratio", cfg.test_ratio}};
  man.seed = cfg.seed;
  man.version = LOVEBIRDS_VERSION;
  for (const char* f : {"profiles.tsv", "pairs.tsv", "vocab.tsv", "audit.json"}) man.add_output(fs::path(a.out) / f);
  man.wall_clock_seconds = clock.seconds();
  man.write(fs::path(a.out) / "manifest.json");
  std::cout << built.dataset.pairs.size() << " couples, " << built.dataset.users.size() << " users, vocabulary "
            << built.dataset.vocab.size() << " -> " << a.out << '\n';
  return 0;
}

// ---- synth ----

struct SynthArgs {
  corpus::SynthConfig synth;
  int K = 50, L = 10, min_count = 5;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  Clock clock;
  const std::uint64_t seed = resolve_seed(a.seed, std::nullopt, 7);
  auto synth = corpus::synthesize_dataset(a.synth, a.K, a.L, a.min_count, seed);
  const auto& sc = synth.raw;
  const auto& built = synth.built;
  const fs::path out(a.out), raw = out / "raw";
  fs::create_directories(raw);
  corpus::write_tweets_jsonl(raw / "candidates.jsonl", sc.candidates);
  corpus::write_tweets_jsonl(raw / "timelines.jsonl", sc.timelines);
  corpus::write_followers_jsonl(raw / "followers.jsonl", sc.followers);

  corpus::save_dataset(out, built.dataset);
  write_json(out / "audit.json", built.audit);
  json truth = json::array();
  for (std::size_t i = 0; i < sc.truth.size(); ++i)
    truth.push_back({{"user_a", sc.truth[i].user_a}, {"user_b", sc.truth[i].user_b}, {"planted", static_cast<bool>(sc.planted[i])},
                     {"topic_a", sc.dominant_topic.at(sc.truth[i].user_a)}, {"topic_b", sc.dominant_topic.at(sc.truth[i].user_b)}});
  write_json(out / "truth.json", {{"couples", truth}, {"token_topic", sc.token_topic}});

  cli::RunManifest man;
  man.command = "synth";
  man.config = {{"users", a.synth.users},       {"topics", a.synth.topics},   {"signal", a.synth.signal},
                {"tweets_per_user", a.synth.tweets_per_user}, {"dirichlet_alpha", a.synth.dirichlet_alpha},
                {"chatter_prob", a.synth.chatter_prob}, {"personal_words", a.synth.personal_words},
                {"K", a.K}, {"L", a.L}, {"min_count", a.min_count}};
  man.seed = seed;
  man.version = LOVEBIRDS_VERSION;
  for (const char* f : {"raw/candidates.jsonl", "raw/timelines.jsonl", "raw/followers.jsonl", "profiles.tsv", "pairs.tsv",
                        "vocab.tsv", "audit.json", "truth.json"})
    man.add_output(out / f);
  man.wall_clock_seconds = clock.seconds();
  man.write(out / "manifest.json");
  std::cout << built.dataset.pairs.size() << " couples, " << built.dataset.users.size() << " users, vocabulary "
            << built.dataset.vocab.size() << " -> " << a.out << '\n';
  return 0;
}

// ---- train ----

struct TrainArgs {
  std::string data, model, config, pretrained, out;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

template <typename S>
int train_impl(const TrainArgs& a, const trainer::TrainConfig& cfg, const corpus::Dataset& ds, cli::RunManifest& man,
               Clock& clock) {
  const corpus::Dataset view = ds.K == cfg.K ? ds : ds.with_K(cfg.K);
  auto model = make_model<S>(cfg.model_config(view.vocab.size()));
  if (!a.pretrained.empty()) {
    auto vecs = encoders::load_pretrained(a.pretrained, view.vocab);
    encoders::apply_pretrained(vecs, model->params().value(encoders::kEmbedding));
    man.add_input(a.pretrained);
  }
  model->fit(view);
  trainer::TrainHooks hooks;
  if (!a.quiet) hooks.progress = &std::cerr;
  auto result = trainer::train(*model, view, cfg, hooks);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  const fs::path out(a.out);
  trainer::save_model(out / "model.ckpt", *model, cfg);
  json log = result.to_json();
  log["config"] = cfg.to_json();
  write_json(out / "train_log.json", log);
  man.add_output(out / "model.ckpt");
  man.add_output(out / "train_log.json");
  man.wall_clock_seconds = clock.seconds();
  man.write(out / "manifest.json");
  std::cout << "best epoch " << result.best_epoch << ", dev HR@10 " << result.best_dev_hr10 << " -> " << a.out << '\n';
  return 0;
}

int run_train(const TrainArgs& a) {
  Clock clock;
  trainer::TrainConfig cfg;
  std::map<std::string, std::string> kv;
  if (!a.config.empty()) kv = trainer::read_key_values(a.config);
  for (const auto& o : a.overrides) {
    auto [k, v] = trainer::parse_override(o);
    kv.insert_or_assign(k, v);
  }
  if (!a.model.empty()) kv["model"] = a.model;
  std::optional<std::uint64_t> cfg_seed;
  trainer::apply(cfg, kv);
  if (kv.count("seed")) cfg_seed = cfg.seed;
  cfg.seed = resolve_seed(a.seed, cfg_seed, cfg.seed);

  auto ds = corpus::load_dataset(a.data);
  if (!kv.count("K")) cfg.K = ds.K;
  fs::create_directories(a.out);
  cli::RunManifest man;
  man.command = "train";
  man.config = cfg.to_json();
  man.seed = cfg.seed;
  man.version = LOVEBIRDS_VERSION;
  man.add_input(a.data);
  if (!a.config.empty()) man.add_input(a.config);
  if (cfg.precision == 64) return train_impl<double>(a, cfg, ds, man, clock);
  return train_impl<float>(a, cfg, ds, man, clock);
}

// ---- evaluate ----

struct EvalArgs {
  std::string data, checkpoint, split = "test", out;
  int negatives = 100;
  std::optional<std::uint64_t> seed;
  bool rankings = false;
  bool one_direction = false;
};

template <typename S>
int evaluate_impl(const EvalArgs& a, const Checkpoint& ckpt) {
  Clock clock;
  trainer::TrainConfig tcfg;
  auto model = trainer::load_model<S>(ckpt, &tcfg);
  auto ds = corpus::load_dataset(a.data);
  const corpus::Dataset view = ds.K == model->config().K ? ds : ds.with_K(model->config().K);
  evalkit::EvalConfig cfg;
  cfg.negatives = a.negatives;
  cfg.seed = resolve_seed(a.seed, std::nullopt, 7);
  cfg.both_directions = !a.one_direction;
  auto results = evalkit::evaluate(*model, view, corpus::parse_split(a.split), cfg);
  auto metrics = evalkit::compute_metrics(results);
  const fs::path out(a.out);
  fs::create_directories(out);
  write_json(out / "metrics.json", evalkit::metrics_document(metrics, model->name(), a.split, model->config().K, cfg));

  cli::RunManifest man;
  man.command = "evaluate";
  man.config = {{"split", a.split}, {"negatives", a.negatives}, {"both_directions", cfg.both_directions}};
  man.seed = cfg.seed;
  man.version = LOVEBIRDS_VERSION;
  man.add_input(a.data);
  man.add_input(a.checkpoint);
  man.add_output(out / "metrics.json");
  if (a.rankings) {
    evalkit::write_rankings(out / "rankings.jsonl", results);
    man.add_output(out / "rankings.jsonl");
  }
  man.wall_clock_seconds = clock.seconds();
  man.write(out / "manifest.json");
  std::cout << std::fixed << std::setprecision(4) << model->name() << " K=" << model->config().K << "  n=" << metrics.n_test
            << "  HR@3 " << metrics.hr_at[3] << "  HR@5 " << metrics.hr_at[5] << "  HR@10 " << metrics.hr_at[10]
            << "  acc " << metrics.accuracy << "  MRR " << metrics.mrr << "  mean rank " << metrics.mean_rank << '\n';
  return 0;
}

int run_evaluate(const EvalArgs& a) {
  auto ckpt = read_checkpoint(a.checkpoint);
  return ckpt.precision() == 64 ? evaluate_impl<double>(a, ckpt) : evaluate_impl<float>(a, ckpt);
}

// ---- explain ----

struct ExplainArgs {
  std::string data, checkpoint, split = "test", user_a, user_b, out;
  int top_m = 3;
  int limit = 20;
};

template <typename S>
int explain_impl(const ExplainArgs& a, const Checkpoint& ckpt) {
  Clock clock;
  auto model = trainer::load_model<S>(ckpt);
  auto ds = corpus::load_dataset(a.data);
  const corpus::Dataset view = ds.K == model->config().K ? ds : ds.with_K(model->config().K);
  json reports = json::array();
  if (!a.user_a.empty() || !a.user_b.empty()) {
    if (a.user_a.empty() || a.user_b.empty()) throw std::invalid_argument("--user-a and --user-b go together");
    reports.push_back(evalkit::explain(*model, view, a.user_a, a.user_b, a.top_m));
  } else {
    int n = 0;
    for (const auto& p : view.pairs_in(corpus::parse_split(a.split))) {
      if (n++ >= a.limit) break;
      reports.push_back(evalkit::explain(*model, view, p.user_a, p.user_b, a.top_m));
    }
  }
  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_json(out, {{"model", model->name()}, {"top_m", a.top_m}, {"pairs", reports}});
  cli::RunManifest man;
  man.command = "explain";
  man.config = {{"split", a.split}, {"top_m", a.top_m}, {"limit", a.limit}};
  man.version = LOVEBIRDS_VERSION;
  man.add_input(a.data);
  man.add_input(a.checkpoint);
  man.add_output(out);
  man.wall_clock_seconds = clock.seconds();
  man.write(out.parent_path() / (out.stem().string() + ".manifest.json"));
  std::cout << reports.size() << " explanations -> " << a.out << '\n';
  return 0;
}

int run_explain(const ExplainArgs& a) {
  auto ckpt = read_checkpoint(a.checkpoint);
  return ckpt.precision() == 64 ? explain_impl<double>(a, ckpt) : explain_impl<float>(a, ckpt);
}

// ---- report ----

struct ReportArgs {
  std::string in, out;
};

int run_report(const ReportArgs& a) {
  Clock clock;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(a.in))
    if (e.is_regular_file() && e.path().filename() == "metrics.json") files.push_back(e.path());
  if (files.empty()) throw std::runtime_error("no metrics.json below " + a.in);
  std::sort(files.begin(), files.end());
  struct Row {
    std::string model;
    int K;
    json m;
    std::string source;
  };
  std::vector<Row> rows;
  for (const auto& f : files) {
    json m = read_json(f);
    rows.push_back({m.at("model").get<std::string>(), m.at("K").get<int>(), m, fs::relative(f, a.in).generic_string()});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    return std::tie(x.model, x.K) < std::tie(y.model, y.K);
  });
  const fs::path out = a.out.empty() ? fs::path(a.in) / "report.csv" : fs::path(a.out);
  std::ofstream csv(out);
  if (!csv) throw std::runtime_error("cannot write " + out.string());
  csv << "model,K,split,n_test,hr3,hr5,hr10,accuracy,mrr,mean_rank,source\n";
  std::cout << std::left << std::setw(15) << "model" << std::setw(6) << "K" << std::setw(8) << "n" << std::setw(9) << "HR@3"
            << std::setw(9) << "HR@5" << std::setw(9) << "HR@10" << std::setw(9) << "acc" << std::setw(9) << "MRR"
            << "mean rank\n";
  std::cout << std::fixed << std::setprecision(4);
  for (const auto& r : rows) {
    const auto& m = r.m;
    const auto& hr = m.at("hr_at");
    csv << r.model << ',' << r.K << ',' << m.value("split", "") << ',' << m.at("n_test").get<std::size_t>() << ','
        << hr.at("3").get<double>() << ',' << hr.at("5").get<double>() << ',' << hr.at("10").get<double>() << ','
        << m.at("accuracy").get<double>() << ',' << m.at("mrr").get<double>() << ',' << m.at("mean_rank").get<double>()
        << ',' << r.source << '\n';
    std::cout << std::setw(15) << r.model << std::setw(6) << r.K << std::setw(8) << m.at("n_test").get<std::size_t>()
              << std::setw(9) << hr.at("3").get<double>() << std::setw(9) << hr.at("5").get<double>() << std::setw(9)
              << hr.at("10").get<double>() << std::setw(9) << m.at("accuracy").get<double>() << std::setw(9)
              << m.at("mrr").get<double>() << m.at("mean_rank").get<double>() << '\n';
  }
  csv.close();
  cli::RunManifest man;
  man.command = "report";
  man.version = LOVEBIRDS_VERSION;
  for (const auto& f : files) man.add_input(f);
  man.add_output(out);
  man.wall_clock_seconds = clock.seconds();
  man.write(out.parent_path() / "report.manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lovebirds: couple recommendation from tweet histories"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(LOVEBIRDS_VERSION));

  BuildArgs build;
  auto* b = app.add_subcommand("build-corpus", "filter candidate tweets into couples and encode profiles");
  b->add_option("--candidates", build.candidates, "heart-emoji candidate tweets (JSONL)");
  b->add_option("--timelines", build.timelines, "user timelines (JSONL, newest first per author)");
  b->add_option("--followers", build.followers, "follower counts (JSONL)");
  b->add_option("--manifest", build.manifest, "tweet-id manifest (tweet_id<TAB>couple|timeline)");
  b->add_option("--fetched", build.fetched, "tweets fetched for the manifest (JSONL)");
  b->add_option("--config", build.config, "key = value corpus config");
  b->add_option("--override", build.overrides, "key=value, repeatable");
  b->add_option("--heart-emojis", build.heart_emojis, "emoji list file, one per line");
  b->add_option("--seed", build.seed, "split seed");
  b->add_option("--out", build.out, "output directory")->required();

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic raw corpus and build it");
  s->add_option("--users", synth.synth.users, "number of users (even)");
  s->add_option("--topics", synth.synth.topics, "number of latent topics");
  s->add_option("--signal", synth.synth.signal, "probability a couple shares its topic mixture");
  s->add_option("--tweets-per-user", synth.synth.tweets_per_user);
  s->add_option("--alpha", synth.synth.dirichlet_alpha, "Dirichlet concentration of user mixtures");
  s->add_option("--chatter", synth.synth.chatter_prob, "probability a tweet is personal chatter");
  s->add_option("--personal-words", synth.synth.personal_words, "hobby words per user");
  s->add_option("--K", synth.K, "tweets kept per profile");
  s->add_option("--L", synth.L, "tokens kept per tweet");
  s->add_option("--min-count", synth.min_count, "vocabulary frequency threshold");
  s->add_option("--seed", synth.seed);
  s->add_option("--out", synth.out, "output directory")->required();

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train a model");
  t->add_option("--data", train.data, "corpus directory")->required();
  t->add_option("--model", train.model)
      ->check(CLI::IsMember({"couplenet", "deepconn", "gru", "hgru", "mlp_embed", "ranksvm_tfidf", "ranksvm_embed"}));
  t->add_option("--config", train.config, "key = value train config");
  t->add_option("--override", train.overrides, "key=value, repeatable");
  t->add_option("--pretrained", train.pretrained, "word vectors, 'token v1 ... vd' per line");
  t->add_option("--seed", train.seed);
  t->add_option("--out", train.out, "output directory")->required();
  t->add_flag("--quiet", train.quiet, "no per-epoch progress");

  EvalArgs ev;
  auto* e = app.add_subcommand("evaluate", "rank partners against sampled negatives");
  e->add_option("--data", ev.data, "corpus directory")->required();
  e->add_option("--checkpoint", ev.checkpoint)->required();
  e->add_option("--split", ev.split)->check(CLI::IsMember({"test", "dev", "train"}));
  e->add_option("--negatives", ev.negatives);
  e->add_option("--seed", ev.seed);
  e->add_option("--out", ev.out, "output directory")->required();
  e->add_flag("--rankings", ev.rankings, "also write rankings.jsonl");
  e->add_flag("--one-direction", ev.one_direction, "rank only user_b for user_a");

  ExplainArgs ex;
  auto* x = app.add_subcommand("explain", "export coupled-attention explanations");
  x->add_option("--data", ex.data, "corpus directory")->required();
  x->add_option("--checkpoint", ex.checkpoint)->required();
  x->add_option("--split", ex.split)->check(CLI::IsMember({"test", "dev", "train"}));
  x->add_option("--user-a", ex.user_a);
  x->add_option("--user-b", ex.user_b);
  x->add_option("--top-m", ex.top_m);
  x->add_option("--limit", ex.limit, "pairs from the split");
  x->add_option("--out", ex.out, "explanations.json path")->required();

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "tabulate metrics.json files into a table and CSV");
  r->add_option("--in", rep.in, "directory searched for metrics.json")->required();
  r->add_option("--out", rep.out, "CSV path (default <in>/report.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  }

  try {
    if (b->parsed()) return run_build(build);
    if (s->parsed()) return run_synth(synth);
    if (t->parsed()) return run_train(train);
    if (e->parsed()) return run_evaluate(ev);
    if (x->parsed()) return run_explain(ex);
    if (r->parsed()) return run_report(rep);
  } catch (const trainer::TrainingDiverged& err) {
    std::cerr << json{{"error", "training_diverged"}, {"message", err.what()}, {"diagnostic", err.diagnostic()}}.dump()
              << '\n';
    return 1;
  } catch (const std::exception& err) {
    std::cerr << json{{"error", "failure"}, {"message", err.what()}}.dump() << '\n';
    return 1;
  }
  return 1;
}
