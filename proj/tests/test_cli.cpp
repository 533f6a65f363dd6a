#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "trackadapt/cli.hpp"
#include "trackadapt/config.hpp"
#include "trackadapt/fileio.hpp"

using namespace trackadapt;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("trackadapt_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    return run_cli(args, out_);
  }
  std::string p(const std::string& rel) const { return (dir_ / rel).string(); }

  fs::path dir_;
  std::ostringstream out_;
};

std::string slurp(const fs::path& f) { return read_file(f); }

}  // namespace

TEST_F(Cli, HelpExitsZero) {
  EXPECT_EQ(run({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("simulate"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--help"}), kExitOk);
}

TEST_F(Cli, UnknownFlagIsUsageError) {
  EXPECT_EQ(run({"simulate", "--bogus"}), kExitUsage);
  EXPECT_EQ(run({}), kExitUsage);
}

TEST_F(Cli, TrainRejectsMissingDataAndShortContext) {
  EXPECT_EQ(run({"train-mp", "--data", p("nowhere"), "--out", p("w.txt")}), kExitUsage);
  ASSERT_EQ(run({"synth-corpus", "--kind", "linear", "--count", "3", "--frames", "30", "--out", p("corpus")}), kExitOk);
  EXPECT_EQ(run({"train-mp", "--data", p("corpus"), "--out", p("w.txt"), "--context", "1"}), kExitUsage);
  EXPECT_FALSE(fs::exists(p("w.txt")));
}

TEST_F(Cli, TrainWritesWeightsAndLoss) {
  ASSERT_EQ(run({"synth-corpus", "--kind", "linear", "--count", "4", "--frames", "40", "--out", p("corpus")}), kExitOk);
  ASSERT_EQ(run({"train-mp", "--data", p("corpus"), "--out", p("w.txt"), "--arch", "mlp", "--epochs", "3"}), kExitOk);
  EXPECT_TRUE(fs::exists(p("w.txt")));
  const std::string loss = slurp(p("w.txt.loss.tsv"));
  EXPECT_EQ(std::count(loss.begin(), loss.end(), '\n'), 4);
  // weights of the wrong architecture are refused
  EXPECT_EQ(run({"simulate", "--standard-suite", "--predictor", "lstm", "--weights", p("w.txt"), "--out", p("sim")}),
            kExitUsage);
}

TEST_F(Cli, UnknownCorruptionKindIsUsageError) {
  std::ofstream(p("bad.json")) << R"({"id": "b", "frames": 30,
    "target": {"type": "linear", "start": [60, 80], "size": [30, 30], "velocity": [1, 0]},
    "corruptions": [{"begin": 5, "end": 9, "kind": "blizzard", "magnitude": 1}]})";
  EXPECT_EQ(run({"simulate", "--scenario", p("bad.json"), "--out", p("sim")}), kExitUsage);
  EXPECT_EQ(run({"simulate", "--scenario", p("missing.json"), "--out", p("sim")}), kExitUsage);
}

TEST_F(Cli, SplitOfEmptyDirectoryWritesEmptyLists) {
  fs::create_directories(p("empty"));
  ASSERT_EQ(run({"split", "--annotations", p("empty"), "--out-linear", p("lin.txt"), "--out-nonlinear", p("nl.txt")}),
            kExitOk);
  EXPECT_EQ(slurp(p("lin.txt")), "");
  EXPECT_EQ(slurp(p("nl.txt")), "");
}

TEST_F(Cli, SplitThresholdOverride) {
  // one steady track and one that reverses every frame
  std::string steady, zig;
  for (int t = 0; t < 30; ++t) {
    steady += std::to_string(10 + 2 * t) + ",40,20,20\n";
    zig += std::to_string(t % 2 ? 40 : 20) + ",40,20,20\n";
  }
  write_file_atomic(dir_ / "c" / "steady" / "groundtruth.txt", steady);
  write_file_atomic(dir_ / "c" / "zig" / "groundtruth.txt", zig);
  ASSERT_EQ(run({"split", "--annotations", p("c"), "--out-linear", p("l.txt"), "--out-nonlinear", p("n.txt")}), kExitOk);
  EXPECT_EQ(slurp(p("l.txt")), "steady\n");
  EXPECT_EQ(slurp(p("n.txt")), "zig\n");
  ASSERT_EQ(run({"split", "--annotations", p("c"), "--out-linear", p("l.txt"), "--out-nonlinear", p("n.txt"), "--accel",
                 "1e6", "--jerk", "1e6", "--angle", "3.2"}),
            kExitOk);
  EXPECT_EQ(slurp(p("l.txt")), "steady\nzig\n");
  EXPECT_EQ(slurp(p("n.txt")), "");
  EXPECT_EQ(run({"split", "--annotations", p("c"), "--out-linear", p("l.txt"), "--out-nonlinear", p("n.txt"), "--frac",
                 "1.5"}),
            kExitUsage);
}

TEST_F(Cli, EvalPerfectPredictionsScoreHundred) {
  ASSERT_EQ(run({"synth-corpus", "--kind", "linear", "--count", "2", "--frames", "30", "--prefix", "v", "--out", p("gt")}),
            kExitOk);
  fs::create_directories(p("pred"));
  for (const auto& e : fs::directory_iterator(p("gt"))) {
    fs::copy_file(e.path() / "groundtruth.txt", dir_ / "pred" / (e.path().filename().string() + ".txt"));
  }
  ASSERT_EQ(run({"eval", "--predictions", p("pred"), "--annotations", p("gt")}), kExitOk);
  const std::string table = out_.str();
  EXPECT_NE(table.find("ALL\t100.0000\t100.0000\t100.0000\t100.0000\t60"), std::string::npos) << table;

  std::ofstream(p("split.txt")) << "v_000\nnot_there\n";
  ASSERT_EQ(run({"eval", "--predictions", p("pred"), "--annotations", p("gt"), "--split", p("split.txt"), "--out", p("ev")}),
            kExitOk);
  const std::string m = slurp(p("ev/metrics.tsv"));
  EXPECT_EQ(std::count(m.begin(), m.end(), '\n'), 3);  // header, v_000, ALL
  EXPECT_TRUE(fs::exists(p("ev/success_plot.csv")));
  EXPECT_EQ(run({"eval", "--predictions", p("pred"), "--annotations", p("nothing")}), kExitUsage);
}

TEST_F(Cli, ConfigDumpRoundTrips) {
  ASSERT_EQ(run({"simulate", "--dump-config", "--no-tamb", "--predictor", "ekf"}), kExitOk);
  const std::string dumped = out_.str();
  const TrackerConfig c = parse_tracker_config(dumped);
  EXPECT_FALSE(c.enable.tamb);
  EXPECT_EQ(c.predictor, PredictorArch::ekf);
  EXPECT_EQ(to_json_string(c), dumped);
  write_file_atomic(p("cfg.json"), dumped);
  ASSERT_EQ(run({"simulate", "--dump-config", "--config", p("cfg.json")}), kExitOk);
  EXPECT_EQ(out_.str(), dumped);
  write_file_atomic(p("typo.json"), R"({"predictr": "kf"})");
  EXPECT_EQ(run({"simulate", "--dump-config", "--config", p("typo.json")}), kExitUsage);
}

TEST_F(Cli, SimulateSuiteIsFastAndByteIdentical) {
  const auto t0 = std::chrono::steady_clock::now();
  ASSERT_EQ(run({"simulate", "--standard-suite", "--out", p("a")}), kExitOk);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 60.0);
  ASSERT_EQ(run({"simulate", "--standard-suite", "--out", p("b"), "--jobs", "3"}), kExitOk);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(p("a"))) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), p("a"));
    ASSERT_TRUE(fs::exists(dir_ / "b" / rel)) << rel;
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / rel)) << rel;
    ++files;
  }
  EXPECT_GE(files, 13u * 3);
}
