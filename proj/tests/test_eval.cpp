#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "trackadapt/errors.hpp"
#include "trackadapt/eval/annotations.hpp"
#include "trackadapt/eval/metrics.hpp"
#include "trackadapt/eval/report.hpp"
#include "trackadapt/fileio.hpp"

using namespace trackadapt;
using namespace trackadapt::eval;
namespace fs = std::filesystem;

namespace {

SequenceResult constant(double iou_value, int n) {
  // same height, width chosen so the overlap ratio is iou_value
  SequenceResult r;
  r.id = "c";
  for (int t = 0; t < n; ++t) {
    const BoundingBox g(100, 100, 40, 20);
    const double w = 40 * iou_value;
    r.ground_truth.emplace_back(g);
    r.predictions.emplace_back(BoundingBox(g.left() + w / 2, 100, w, 20));
  }
  return r;
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << s;
}

}  // namespace

TEST(Auc, PerfectAndHalf) {
  const auto perfect = constant(1.0, 10);
  EXPECT_DOUBLE_EQ(success_auc(perfect), 100.0);
  const auto half = constant(0.5, 10);
  EXPECT_DOUBLE_EQ(iou(*half.predictions[0], *half.ground_truth[0]), 0.5);
  EXPECT_NEAR(success_auc(half), 50.0, 1e-12);
  SequenceResult empty = perfect;
  for (auto& p : empty.predictions) p.reset();
  EXPECT_EQ(success_auc(empty), 0.0);
  const auto curve = success_curve(perfect);
  EXPECT_EQ(curve[99], 1.0);
  EXPECT_EQ(curve[100], 0.0);
}

TEST(Precision, Examples) {
  SequenceResult r = constant(1.0, 5);
  EXPECT_EQ(precision(r), 100.0);
  EXPECT_EQ(norm_precision(r), 100.0);
  SequenceResult far = r;
  for (auto& p : far.predictions) p = p->translated(25, 0);
  EXPECT_EQ(precision(far), 0.0);
  SequenceResult tenth = r;
  for (std::size_t t = 0; t < tenth.size(); ++t) {
    const auto& g = *tenth.ground_truth[t];
    tenth.predictions[t] = g.translated(0.1 * g.w(), 0.1 * g.h());
  }
  EXPECT_EQ(norm_precision(tenth), 100.0);
}

TEST(Acc, HandExample) {
  SequenceResult r;
  for (int t = 0; t < 5; ++t) {
    const BoundingBox g(100, 100, 40, 20);
    r.ground_truth.emplace_back(g);
    r.predictions.emplace_back(BoundingBox(g.left() + 16, 100, 32, 20));  // IoU 0.8
  }
  for (int t = 0; t < 5; ++t) {
    r.ground_truth.emplace_back(std::nullopt);
    r.predictions.emplace_back(t < 3 ? MaybeBox() : MaybeBox(BoundingBox(5, 5, 5, 5)));
  }
  EXPECT_DOUBLE_EQ(acc(r), 70.0);
  EXPECT_DOUBLE_EQ(acc(constant(1.0, 4)), 100.0);
}

TEST(Metrics, MatchBruteForce) {
  Rng rng(909);
  std::vector<SequenceResult> all;
  for (int i = 0; i < 50; ++i) {
    const auto r = oracle::random_result(rng, i);
    EXPECT_NEAR(success_auc(r), oracle::auc(r), 1e-9);
    EXPECT_NEAR(precision(r), oracle::precision(r, false), 1e-9);
    EXPECT_NEAR(norm_precision(r), oracle::precision(r, true), 1e-9);
    EXPECT_NEAR(acc(r), oracle::acc(r), 1e-9);
    const auto m = evaluate(r);
    for (double v : {m.acc, m.precision, m.norm_precision, m.auc}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 100.0);
    }
    all.push_back(r);
  }
  // aggregate is the mean of per-sequence scores, whatever the order
  double mean_auc = 0;
  for (const auto& r : all) mean_auc += oracle::auc(r);
  EXPECT_NEAR(success_auc(all), mean_auc / 50, 1e-9);
  auto reversed = all;
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_NEAR(acc(reversed), acc(all), 1e-12);
}

TEST(Metrics, PureAndValidated) {
  Rng rng(1);
  const auto r = oracle::random_result(rng, 0);
  EXPECT_EQ(success_auc(r), success_auc(r));
  SequenceResult bad = r;
  bad.predictions.pop_back();
  EXPECT_THROW(acc(bad), DomainError);
  SequenceResult hidden;
  hidden.ground_truth = {std::nullopt};
  hidden.predictions = {std::nullopt};
  EXPECT_THROW(success_auc(hidden), DomainError);
  EXPECT_EQ(acc(hidden), 100.0);
}

TEST(Report, TableAndPlot) {
  std::vector<SequenceMetrics> rows{{"a", 70, 80, 90, 60, 10}, {"b", 30, 40, 50, 20, 5}};
  const std::string t = format_metrics_table(rows);
  EXPECT_EQ(t,
            "id\tAcc\tP\tP_norm\tAUC\tframes\n"
            "a\t70.0000\t80.0000\t90.0000\t60.0000\t10\n"
            "b\t30.0000\t40.0000\t50.0000\t20.0000\t5\n"
            "ALL\t50.0000\t60.0000\t70.0000\t40.0000\t15\n");
  const std::string p = format_success_plot(success_curve(constant(1.0, 3)));
  EXPECT_EQ(p.substr(0, 14), "tau,success\n0.");
  EXPECT_EQ(std::count(p.begin(), p.end(), '\n'), 102);
}

TEST(Lasot, ParsesBoxesAndFlags) {
  TempDir d("trackadapt_lasot");
  write(d.path() / "seq" / "groundtruth.txt", "10,20,30,40\n11,21,30,40\n0,0,0,0\n12\t22\t30\t40\n");
  write(d.path() / "seq" / "full_occlusion.txt", "0,1,0,0\n");
  const auto t = parse_annotations(d.path() / "seq", AnnotationFormat::lasot);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t.frames[0], MaybeBox(BoundingBox(25, 40, 30, 40)));
  EXPECT_FALSE(t.frames[1].has_value());
  EXPECT_FALSE(t.frames[2].has_value());
  EXPECT_EQ(t.frames[3], MaybeBox(BoundingBox(27, 42, 30, 40)));
  EXPECT_EQ(t.id, "seq");
}

TEST(Lasot, ErrorsNameTheLine) {
  TempDir d("trackadapt_lasot_bad");
  write(d.path() / "a" / "groundtruth.txt", "10,20,30,40\n10,20,30\n");
  try {
    parse_lasot(d.path() / "a");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  write(d.path() / "b" / "groundtruth.txt", "10,20,30,40\n10,20,30,40\n");
  write(d.path() / "b" / "out_of_view.txt", "0,0,0\n");
  EXPECT_THROW(parse_lasot(d.path() / "b"), ParseError);
  EXPECT_THROW(parse_lasot(d.path() / "missing"), ConfigError);
}

TEST(AntiUav, ParsesExistFlags) {
  TempDir d("trackadapt_antiuav");
  write(d.path() / "v1" / "IR_label.json", R"({"exist": [1, 0, 1], "gt_rect": [[10, 20, 30, 40], [], [12, 20, 30, 40]]})");
  const auto t = parse_annotations(d.path() / "v1", AnnotationFormat::antiuav);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.frames[0], MaybeBox(BoundingBox(25, 40, 30, 40)));
  EXPECT_FALSE(t.frames[1].has_value());
  const auto all = load_annotation_dir(d.path(), AnnotationFormat::antiuav);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].id, "v1");
  write(d.path() / "v2" / "IR_label.json", R"({"exist": [1, 1], "gt_rect": [[10, 20, 30, 40]]})");
  EXPECT_THROW(parse_antiuav(d.path() / "v2"), ParseError);
}

TEST(Lasot, WriteReadRoundTrip) {
  TempDir d("trackadapt_lasot_rt");
  TrajectoryAnnotation t;
  t.id = "rt";
  t.image = {300, 200};
  t.frames = {BoundingBox(25.5, 40.25, 30, 40), std::nullopt, BoundingBox(27, 42, 31, 39)};
  write_lasot(d.path(), t);
  const auto back = parse_lasot(d.path() / "rt");
  ASSERT_EQ(back.size(), 3u);
  EXPECT_FALSE(back.frames[1].has_value());
  EXPECT_NEAR(back.frames[0]->cx(), 25.5, 1e-6);
  EXPECT_NEAR(back.frames[2]->h(), 39, 1e-6);
}

TEST(Predictions, FormatAndRead) {
  TempDir d("trackadapt_pred");
  std::vector<MaybeBox> boxes{BoundingBox(25, 40, 30, 40), std::nullopt};
  const std::string text = format_predictions(boxes);
  EXPECT_EQ(text, "10.000000,20.000000,30.000000,40.000000\n0,0,0,0\n");
  write_file_atomic(d.path() / "p.txt", text);
  EXPECT_EQ(read_predictions(d.path() / "p.txt"), boxes);
  write_file_atomic(d.path() / "bad.txt", "1,2,3\n");
  EXPECT_THROW(read_predictions(d.path() / "bad.txt"), ParseError);
}
