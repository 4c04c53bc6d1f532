#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lovebirds/cli/manifest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(LOVEBIRDS_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "lovebirds_cli_test";
    fs::remove_all(root_);
    fs::create_directories(root_);
    synth_status_ = run("synth --users 240 --K 10 --seed 3 --out " + (root_ / "data").string());
    train_status_ = run("train --data " + (root_ / "data").string() +
                        " --model hgru --override epochs=2 --override embed_dim=16 --override hidden=16"
                        " --override K=10 --override dev_negatives=50 --seed 4 --quiet --out " +
                        (root_ / "run").string());
  }
  static fs::path root_;
  static int synth_status_, train_status_;
};

fs::path CliPipeline::root_;
int CliPipeline::synth_status_ = -1;
int CliPipeline::train_status_ = -1;

}  // namespace

TEST_F(CliPipeline, SynthWritesCorpusAndManifest) {
  ASSERT_EQ(synth_status_, 0);
  for (const char* f : {"profiles.tsv", "pairs.tsv", "vocab.tsv", "audit.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(root_ / "data" / f)) << f;
  auto man = read_json(root_ / "data" / "manifest.json");
  EXPECT_EQ(man["command"], "synth");
  EXPECT_EQ(man["seed"], 3);
  for (const auto& o : man["outputs"])
    EXPECT_EQ(o["fnv1a64"], lovebirds::cli::file_digest(o["path"].get<std::string>())) << o["path"];
}

TEST_F(CliPipeline, TrainWritesCheckpointAndLog) {
  ASSERT_EQ(train_status_, 0);
  EXPECT_TRUE(fs::exists(root_ / "run" / "model.ckpt"));
  auto log = read_json(root_ / "run" / "train_log.json");
  EXPECT_EQ(log["epochs"].size(), 2u);
  auto man = read_json(root_ / "run" / "manifest.json");
  EXPECT_EQ(man["config"]["model"], "hgru");
  EXPECT_EQ(man["config"]["hidden"], 16);
  EXPECT_FALSE(man["inputs"].empty());
}

TEST_F(CliPipeline, EvaluateIsReproducible) {
  ASSERT_EQ(train_status_, 0);
  const std::string base = "evaluate --data " + (root_ / "data").string() + " --checkpoint " +
                           (root_ / "run" / "model.ckpt").string() + " --negatives 50 --seed 9 --rankings --out ";
  ASSERT_EQ(run(base + (root_ / "eval1").string()), 0);
  ASSERT_EQ(run(base + (root_ / "eval2").string()), 0);
  EXPECT_EQ(slurp(root_ / "eval1" / "metrics.json"), slurp(root_ / "eval2" / "metrics.json"));
  EXPECT_EQ(slurp(root_ / "eval1" / "rankings.jsonl"), slurp(root_ / "eval2" / "rankings.jsonl"));
  auto m = read_json(root_ / "eval1" / "metrics.json");
  EXPECT_EQ(m["model"], "hgru");
  EXPECT_EQ(m["protocol"]["negatives"], 50);
  EXPECT_LE(m["hr_at"]["3"].get<double>(), m["hr_at"]["10"].get<double>());
}

TEST_F(CliPipeline, ExplainNeedsCoupleNet) {
  ASSERT_EQ(train_status_, 0);
  EXPECT_EQ(run("explain --data " + (root_ / "data").string() + " --checkpoint " +
                (root_ / "run" / "model.ckpt").string() + " --out " + (root_ / "x.json").string()),
            1);
}

TEST_F(CliPipeline, ReportTabulatesMetrics) {
  ASSERT_EQ(train_status_, 0);
  ASSERT_EQ(run("evaluate --data " + (root_ / "data").string() + " --checkpoint " +
                (root_ / "run" / "model.ckpt").string() + " --negatives 50 --out " + (root_ / "runs" / "a").string()),
            0);
  ASSERT_EQ(run("report --in " + (root_ / "runs").string()), 0);
  const auto csv = slurp(root_ / "runs" / "report.csv");
  EXPECT_NE(csv.find("hgru"), std::string::npos);
}

TEST_F(CliPipeline, TooManyNegativesFails) {
  ASSERT_EQ(train_status_, 0);
  EXPECT_EQ(run("evaluate --data " + (root_ / "data").string() + " --checkpoint " +
                (root_ / "run" / "model.ckpt").string() + " --negatives 100000 --out " + (root_ / "big").string()),
            1);
}

TEST(CliErrors, UsageErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("fly"), 2);
  EXPECT_EQ(run("train --model couplenet"), 2);
  EXPECT_EQ(run("evaluate --data x --checkpoint y --out z --split holdout"), 2);
}

TEST(CliErrors, RuntimeErrorsExitOne) {
  const auto missing = fs::temp_directory_path() / "lovebirds_no_such_dir";
  EXPECT_EQ(run("train --data " + missing.string() + " --out " + missing.string() + "_out"), 1);
  EXPECT_EQ(run("synth --users 7 --out " + (fs::temp_directory_path() / "lovebirds_odd").string()), 1);
}

TEST(CliErrors, UnknownOverrideKeyIsRejected) {
  EXPECT_EQ(run("train --data x --out y --override nonsense=1"), 1);
}

TEST(RunManifest, DigestsAreStable) {
  EXPECT_EQ(lovebirds::cli::hex64(lovebirds::cli::fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(lovebirds::cli::hex64(lovebirds::cli::fnv1a64("a")), "af63dc4c8601ec8c");
  const auto dir = fs::temp_directory_path() / "lovebirds_digest";
  fs::remove_all(dir);
  fs::create_directories(dir / "sub");
  std::ofstream(dir / "a.txt") << "hello";
  std::ofstream(dir / "sub" / "b.txt") << "world";
  const auto d1 = lovebirds::cli::tree_digest(dir);
  EXPECT_EQ(d1, lovebirds::cli::tree_digest(dir));
  std::ofstream(dir / "sub" / "b.txt") << "world!";
  EXPECT_NE(d1, lovebirds::cli::tree_digest(dir));
}
