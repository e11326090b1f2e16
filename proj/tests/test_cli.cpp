#include "debias/cli.hpp"
#include "debias/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace debias;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "debiasrank");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const fs::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("debias_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }
  std::string out_flag(const std::string& sub) const { return "--out=" + at(sub); }

  fs::path dir_;
};

}  // namespace

TEST(Config, DumpListsEveryKeyWithDefaults) {
  const auto r = run({"--dump-config"});
  EXPECT_EQ(r.code, 0);
  for (const auto& k : config_keys()) {
    EXPECT_NE(r.out.find(k.name + "="), std::string::npos) << k.name;
  }
  EXPECT_NE(r.out.find("rrf_c=60\n"), std::string::npos);
  EXPECT_NE(r.out.find("augmentation_n=10\n"), std::string::npos);
}

TEST(Config, SetGetRoundTrip) {
  ExperimentConfig cfg;
  for (const auto& k : config_keys()) {
    const auto v = get_config_value(cfg, k.name);
    set_config_value(cfg, k.name, v);
    EXPECT_EQ(get_config_value(cfg, k.name), v) << k.name;
  }
  EXPECT_THROW(set_config_value(cfg, "no_such_key", "1"), UsageError);
  EXPECT_THROW(set_config_value(cfg, "epochs", "ten"), UsageError);
  EXPECT_THROW(set_config_value(cfg, "loss", "pairwise"), UsageError);
}

TEST(Config, FileThenFlagPrecedence) {
  std::istringstream file("# comment\nepochs = 3\nloss=first  # trailing\n\n");
  ExperimentConfig cfg;
  apply_config_file(cfg, file, "cfg.txt");
  EXPECT_EQ(get_config_value(cfg, "epochs"), "3");
  EXPECT_EQ(get_config_value(cfg, "loss"), "first");

  std::istringstream bad("epochs=3\nnot a pair\n");
  try {
    apply_config_file(cfg, bad, "cfg.txt");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.txt:2"), std::string::npos) << e.what();
  }
}

TEST_F(Cli, ConfigFileAndFlagOverride) {
  {
    std::ofstream f(at("c.txt"));
    f << "epochs=3\nlearning_rate=0.2\n";
  }
  const auto r = run({"--config", at("c.txt"), "--epochs", "5", "--dump-config"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("epochs=5\n"), std::string::npos);
  EXPECT_NE(r.out.find("learning_rate=0.2\n"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"--epochs=abc", "synth"}).code, 1);
  EXPECT_EQ(run({"--config", at("missing.txt"), "synth"}).code, 1);
  EXPECT_EQ(run({"train", out_flag("o")}).code, 1);  // no candidates
  EXPECT_EQ(run({"train", "--candidates", at("nope.jsonl"), out_flag("o")}).code, 2);
  {
    std::ofstream f(at("bad.jsonl"));
    f << "{\"query_id\": 1}\n";
  }
  const auto r = run({"train", "--candidates", at("bad.jsonl"), out_flag("o")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.jsonl:1"), std::string::npos) << r.err;
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, SynthIsDeterministicAndSized) {
  ASSERT_EQ(run({"synth", out_flag("a")}).code, 0);
  ASSERT_EQ(run({"synth", out_flag("b")}).code, 0);
  EXPECT_EQ(count_lines(at("a/candidates.jsonl")), 100u);
  EXPECT_GE(count_lines(at("a/qrels.txt")), 100u);
  EXPECT_EQ(slurp(at("a/candidates.jsonl")), slurp(at("b/candidates.jsonl")));
  EXPECT_EQ(slurp(at("a/qrels.txt")), slurp(at("b/qrels.txt")));
}

TEST_F(Cli, SkewShowsInDiagnose) {
  auto first_bucket = [&](const std::string& skew, const std::string& sub) {
    EXPECT_EQ(run({"synth", "--skew", skew, out_flag(sub)}).code, 0);
    EXPECT_EQ(run({"diagnose", "--candidates", at(sub + "/candidates.jsonl"),
                   "--qrels", at(sub + "/qrels.txt"), out_flag(sub)}).code, 0);
    std::ifstream is(at(sub + "/relevant_positions.csv"));
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    return std::stoi(row.substr(row.find(',') + 1));
  };
  EXPECT_GT(first_bucket("1", "hi"), 3 * first_bucket("0", "lo"));
}

TEST_F(Cli, IdentityPropensityIsDiagonal) {
  ASSERT_EQ(run({"synth", out_flag("s")}).code, 0);
  const auto r = run({"estimate-propensity", "--candidates", at("s/candidates.jsonl"),
                      "--propensity_queries", "50", out_flag("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("row sums"), std::string::npos);
  const auto w = load_propensity(at("s/propensity.csv"));
  const double floor = 1.0 / (50.0 * 20 * 10);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) EXPECT_DOUBLE_EQ(w(i, j), i == j ? 1.0 / 20 : floor);
  }
}

TEST_F(Cli, EvalLabelsBothOrderModes) {
  ASSERT_EQ(run({"synth", "--num_queries", "20", out_flag("s")}).code, 0);
  ASSERT_EQ(run({"train", "--candidates", at("s/candidates.jsonl"), "--loss", "first",
                 "--epochs", "1", out_flag("s")}).code, 0);
  const std::vector<std::string> base{"--candidates", at("s/candidates.jsonl"), "--qrels",
                                      at("s/qrels.txt"), "--params", at("s/params.csv"),
                                      out_flag("s")};
  auto args = base;
  args.insert(args.begin(), "eval");
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(slurp(at("s/eval_original.csv")).rfind("# command=eval order_mode=original", 0), 0u);
  EXPECT_EQ(slurp(at("s/eval_shuffled.csv")).rfind("# command=eval order_mode=shuffled", 0), 0u);
  EXPECT_EQ(count_lines(at("s/run_original.txt")), 20u * 20u);
}

TEST_F(Cli, AggregateNotBelowWorstInput) {
  ASSERT_EQ(run({"synth", "--num_queries", "30", out_flag("s")}).code, 0);
  ASSERT_EQ(run({"train", "--candidates", at("s/candidates.jsonl"), "--epochs", "2",
                 "--augmentation", "none", "--loss", "first", out_flag("s")}).code, 0);
  ASSERT_EQ(run({"eval", "--candidates", at("s/candidates.jsonl"), "--qrels", at("s/qrels.txt"),
                 "--params", at("s/params.csv"), "--order_mode", "shuffled",
                 "--shuffled_runs", "20", out_flag("s")}).code, 0);
  std::string runs;
  for (int r = 1; r <= 20; ++r) {
    runs += (r > 1 ? "," : "") + at("s/run_shuffled_" + std::string(r < 10 ? "0" : "") +
                                      std::to_string(r) + ".txt");
  }
  const auto r = run({"aggregate", "--runs", runs, "--qrels", at("s/qrels.txt"), out_flag("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto judgments = load_qrels(at("s/qrels.txt"));
  const double fused = mean_of(evaluate_run(load_run(at("s/aggregated_run.txt")), judgments));
  double lo = 1.0;
  std::stringstream ss(runs);
  for (std::string p; std::getline(ss, p, ',');) {
    lo = std::min(lo, mean_of(evaluate_run(load_run(p), judgments)));
  }
  EXPECT_GE(fused, lo);
}
