#include <gtest/gtest.h>

#include "oracles.hpp"
#include "trackadapt/errors.hpp"
#include "trackadapt/selector.hpp"

using namespace trackadapt;

namespace {

Candidate cand(MaybeBox box, double s_iou, double s_obj = 1.0) {
  Candidate c;
  c.box = box;
  c.s_iou = s_iou;
  c.s_obj = s_obj;
  return c;
}

std::vector<Candidate> random_triple(Rng& rng) {
  std::vector<Candidate> cs;
  for (int i = 0; i < 3; ++i) {
    MaybeBox b;
    if (rng.uniform() > 0.1) b = oracle::random_box(rng, 80.0, 2.0, 40.0);
    // coarse scores make exact ties common
    const double s = rng.uniform() < 0.3 ? 0.5 : rng.uniform();
    cs.push_back(cand(b, s));
  }
  return cs;
}

}  // namespace

TEST(GeometricScore, Examples) {
  const SelectorWeights w;
  const BoundingBox p(10, 10, 4, 6);
  EXPECT_DOUBLE_EQ(geometric_score(p, p, w), 0.25);
  EXPECT_NEAR(geometric_score(p, BoundingBox(10, 10, 8, 12), w), 0.15 + 0.10 * 0.25, 1e-15);
  EXPECT_EQ(geometric_score(p, std::nullopt, w), 0.0);
  EXPECT_EQ(geometric_score(p, BoundingBox(1, 1, 0, 3), w), 0.0);
}

TEST(MotionScore, Examples) {
  const BoundingBox p(1, 1, 2, 2);
  EXPECT_DOUBLE_EQ(motion_score(p, p), 1.0);
  EXPECT_EQ(motion_score(p, BoundingBox(50, 50, 2, 2)), 0.0);
  EXPECT_NEAR(motion_score(p, BoundingBox(2, 2, 2, 2)), 1.0 / 7.0, 1e-15);
  EXPECT_EQ(motion_score(p, std::nullopt), 0.0);
}

TEST(SelectMask, PureSiouWithoutPrediction) {
  std::vector<Candidate> cs{cand(BoundingBox(1, 1, 1, 1), 0.9), cand(BoundingBox(5, 5, 9, 9), 0.5),
                            cand(std::nullopt, 0.2)};
  const auto s = select_mask(cs, std::nullopt, SelectorWeights{});
  EXPECT_EQ(s.index, 0u);
  ASSERT_EQ(s.scores.size(), 3u);
  EXPECT_DOUBLE_EQ(s.scores[1], 0.5);
}

TEST(SelectMask, SingleCandidateAndErrors) {
  std::vector<Candidate> one{cand(std::nullopt, 0.0)};
  EXPECT_EQ(select_mask(one, BoundingBox(1, 1, 1, 1), SelectorWeights{}).index, 0u);
  EXPECT_THROW(select_mask({}, std::nullopt, SelectorWeights{}), DomainError);
}

TEST(SelectMask, MotionCorrectsSiouRanking) {
  const BoundingBox pred(100, 100, 40, 40);
  // the distractor wins on S_IoU alone but loses once shape and motion count
  std::vector<Candidate> cs{cand(BoundingBox(102, 101, 40, 41), 0.80), cand(BoundingBox(160, 60, 24, 26), 0.90)};
  SelectorWeights none{0.85, 0, 0, 0};
  EXPECT_EQ(select_mask(cs, pred, none).index, 1u);
  EXPECT_EQ(select_mask(cs, pred, SelectorWeights{}).index, 0u);
}

TEST(SelectMask, TiesGoToLowestIndex) {
  std::vector<Candidate> cs{cand(BoundingBox(1, 1, 2, 2), 0.5), cand(BoundingBox(1, 1, 2, 2), 0.5),
                            cand(BoundingBox(1, 1, 2, 2), 0.5)};
  EXPECT_EQ(select_mask(cs, BoundingBox(1, 1, 2, 2), SelectorWeights{}).index, 0u);
}

TEST(SelectMask, MatchesBruteForceAndScaleInvariant) {
  Rng rng(101);
  for (int i = 0; i < 2000; ++i) {
    const auto cs = random_triple(rng);
    std::optional<BoundingBox> pred;
    if (rng.uniform() > 0.2) pred = oracle::random_box(rng, 80.0, 2.0, 40.0);
    SelectorWeights w{rng.uniform(0, 1), rng.uniform(0, 0.5), rng.uniform(0, 0.5), rng.uniform(0, 0.5)};
    const auto got = select_mask(cs, pred, w);
    EXPECT_EQ(got.index, oracle::select(cs, pred, w));
    for (double c : {0.001, 0.5, 3.0, 1000.0}) {
      EXPECT_EQ(select_mask(cs, pred, w.scaled(c)).index, got.index) << "scale " << c;
    }
  }
}

TEST(SelectMask, ZeroShapeWeightsReduceToSiou) {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto cs = random_triple(rng);
    const auto a = select_mask(cs, oracle::random_box(rng), SelectorWeights{0.85, 0, 0, 0});
    const auto b = select_mask(cs, std::nullopt, SelectorWeights{});
    EXPECT_EQ(a.index, b.index);
  }
}

TEST(SelectMask, RaisingWinnerSiouKeepsIt) {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    auto cs = random_triple(rng);
    const auto pred = oracle::random_box(rng, 80.0, 2.0, 40.0);
    const auto first = select_mask(cs, pred, SelectorWeights{}).index;
    cs[first].s_iou = std::min(1.0, cs[first].s_iou + rng.uniform(0, 0.5));
    EXPECT_EQ(select_mask(cs, pred, SelectorWeights{}).index, first);
  }
}

TEST(SelectorWeights, Validation) {
  EXPECT_THROW((SelectorWeights{-0.1, 0, 0, 0}.validate()), ConfigError);
  EXPECT_THROW((SelectorWeights{0, 0, 0, 0}.validate()), ConfigError);
  EXPECT_NO_THROW(SelectorWeights{}.validate());
}
