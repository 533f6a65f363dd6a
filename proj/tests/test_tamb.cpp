#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "trackadapt/errors.hpp"
#include "trackadapt/tamb.hpp"

using namespace trackadapt;

namespace {

MemoryEntry entry(std::int64_t f, double s_iou, double s_obj, double s_m, bool prompted = false) {
  return {f, BoundingBox(10, 10, 5, 5), s_iou, s_obj, s_m, prompted};
}

std::vector<MemoryEntry> random_history(Rng& rng, std::size_t n) {
  std::vector<MemoryEntry> h;
  std::int64_t f = static_cast<std::int64_t>(rng.below(3));
  for (std::size_t i = 0; i < n; ++i) {
    MemoryEntry e;
    e.frame = f;
    f += 1 + static_cast<std::int64_t>(rng.below(3));
    e.prompted = i == 0;
    if (rng.uniform() > 0.1) e.box = BoundingBox(10, 10, 5, 5);
    // quarter steps give exact score ties
    e.s_iou = std::floor(rng.uniform(0, 5)) / 4;
    e.s_obj = std::floor(rng.uniform(-8, 9)) / 4;
    e.s_m = std::floor(rng.uniform(0, 5)) / 4;
    h.push_back(e);
  }
  return h;
}

}  // namespace

TEST(TambScore, Examples) {
  const TambConfig c;
  EXPECT_DOUBLE_EQ(tamb_score(entry(0, 1, 0, 1), c), 2.5);
  TambConfig w;
  w.delta = 3;
  w.epsilon = 0.7;
  w.zeta = 2;
  EXPECT_DOUBLE_EQ(tamb_score(entry(0, 0, 0, 0), w), 0.35);
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto e = entry(0, rng.uniform(), rng.uniform(-5, 5), rng.uniform());
    EXPECT_NEAR(tamb_score(e, w), oracle::tamb_score(e, w), 1e-12);
  }
}

TEST(Admissible, ThresholdsAndEmptyBoxes) {
  const TambConfig c;
  EXPECT_TRUE(admissible(entry(1, 0.5, 0.0, 0.0), c));
  EXPECT_FALSE(admissible(entry(1, 0.49, 3, 1), c));
  EXPECT_FALSE(admissible(entry(1, 0.9, -0.01, 1), c));
  MemoryEntry empty = entry(1, 1, 5, 1);
  empty.box.reset();
  EXPECT_FALSE(admissible(empty, c));
}

TEST(SelectMemories, SmallHistoryReturnsEverything) {
  std::vector<MemoryEntry> h{entry(0, 1, 10, 1, true), entry(1, 0.9, 2, 0.8), entry(2, 0.9, 2, 0.8)};
  EXPECT_EQ(select_memories(h, TambConfig{}), (std::vector<std::int64_t>{0, 1, 2}));
  std::vector<MemoryEntry> only{entry(0, 1, 10, 1, true)};
  EXPECT_EQ(select_memories(only, TambConfig{}), (std::vector<std::int64_t>{0}));
}

TEST(SelectMemories, AllFailingGivesPromptAndRecent) {
  std::vector<MemoryEntry> h{entry(0, 1, 10, 1, true)};
  for (int t = 1; t < 40; ++t) h.push_back(entry(t, 0.1, -3, 0));
  EXPECT_EQ(select_memories(h, TambConfig{}), (std::vector<std::int64_t>{0, 39}));
}

TEST(SelectMemories, FiftyEntriesTopFive) {
  Rng rng(6);
  std::vector<MemoryEntry> h{entry(0, 1, 10, 1, true)};
  for (int t = 1; t < 50; ++t) h.push_back(entry(t, rng.uniform(0.6, 1.0), rng.uniform(0.5, 3), rng.uniform(0.2, 1)));
  const TambConfig c;
  const auto got = select_memories(h, c);
  EXPECT_EQ(got.size(), 7u);
  EXPECT_EQ(got, oracle::select_memories(h, c));
}

TEST(SelectMemories, PoolStopsAtMAdmissions) {
  // a strong frame older than the M most recent admissible ones is never reached
  std::vector<MemoryEntry> h{entry(0, 1, 10, 1, true), entry(1, 1, 10, 1)};
  for (int t = 2; t < 40; ++t) h.push_back(entry(t, 0.6, 0.5, 0.1));
  TambConfig c;
  c.pool_size = 10;
  const auto got = select_memories(h, c);
  EXPECT_EQ(std::count(got.begin(), got.end(), 1), 0);
  c.pool_size = 38;
  const auto wide = select_memories(h, c);
  EXPECT_EQ(std::count(wide.begin(), wide.end(), 1), 1);
}

TEST(SelectMemories, TiesPreferLaterFrames) {
  std::vector<MemoryEntry> h{entry(0, 1, 10, 1, true)};
  for (int t = 1; t <= 20; ++t) h.push_back(entry(t, 0.8, 1, 0.5));
  TambConfig c;
  c.slots = 3;
  EXPECT_EQ(select_memories(h, c), (std::vector<std::int64_t>{0, 18, 19, 20}));
}

TEST(SelectMemories, Errors) {
  EXPECT_THROW(select_memories({}, TambConfig{}), DomainError);
  std::vector<MemoryEntry> none{entry(0, 1, 1, 1), entry(1, 1, 1, 1)};
  EXPECT_THROW(select_memories(none, TambConfig{}), StateError);
  std::vector<MemoryEntry> two{entry(0, 1, 1, 1, true), entry(1, 1, 1, 1, true)};
  EXPECT_THROW(select_memories(two, TambConfig{}), StateError);
  std::vector<MemoryEntry> unordered{entry(3, 1, 1, 1, true), entry(2, 1, 1, 1)};
  EXPECT_THROW(select_memories(unordered, TambConfig{}), DomainError);
}

TEST(SelectMemories, MatchesExhaustiveSearch) {
  Rng rng(2024);
  for (int trial = 0; trial < 120; ++trial) {
    TambConfig c;
    c.slots = 2 + static_cast<int>(rng.below(6));
    c.pool_size = c.slots + static_cast<int>(rng.below(static_cast<std::uint64_t>(25 - c.slots)));
    c.mu_iou = std::floor(rng.uniform(0, 4)) / 4;
    c.mu_obj = rng.uniform(0.2, 0.8);
    c.mu_m = std::floor(rng.uniform(0, 3)) / 4;
    c.delta = std::floor(rng.uniform(0, 3));
    c.epsilon = std::floor(rng.uniform(0, 3));
    c.zeta = std::floor(rng.uniform(0, 3));
    const auto h = random_history(rng, 1 + rng.below(60));
    const auto got = select_memories(h, c);
    ASSERT_EQ(got, oracle::select_memories(h, c)) << "trial " << trial;
    // structural properties
    EXPECT_LE(got.size(), static_cast<std::size_t>(c.slots + 1));
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
    EXPECT_EQ(got.front(), h.front().frame);
    EXPECT_EQ(got.back(), h.back().frame);
    for (const auto& e : h) {
      if (e.prompted || e.frame == h.back().frame) continue;
      if (std::find(got.begin(), got.end(), e.frame) != got.end()) {
        EXPECT_TRUE(admissible(e, c));
      }
    }
  }
}

TEST(SelectMemories, RaisingAdmittedScoreKeepsIt) {
  Rng rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    auto h = random_history(rng, 20 + rng.below(30));
    const TambConfig c;
    const auto got = select_memories(h, c);
    for (auto& e : h) {
      if (e.prompted || e.frame == h.back().frame) continue;
      if (std::find(got.begin(), got.end(), e.frame) == got.end()) continue;
      e.s_iou = 1.0;
      const auto again = select_memories(h, c);
      EXPECT_NE(std::find(again.begin(), again.end(), e.frame), again.end());
      break;
    }
  }
}

TEST(BaselineFifo, Examples) {
  std::vector<MemoryEntry> h;
  for (int t = 0; t <= 10; ++t) h.push_back(entry(t, 0.1, -9, 0, t == 0));
  EXPECT_EQ(baseline_fifo(h, 6), (std::vector<std::int64_t>{0, 5, 6, 7, 8, 9, 10}));
  std::vector<MemoryEntry> short_h(h.begin(), h.begin() + 4);
  EXPECT_EQ(baseline_fifo(short_h, 6), (std::vector<std::int64_t>{0, 1, 2, 3}));
}

TEST(BaselineFifo, DiffersFromTargetAwarePolicy) {
  // recent frames are unreliable, older ones strong: FIFO keeps the recent ones
  std::vector<MemoryEntry> h{entry(0, 1, 10, 1, true)};
  for (int t = 1; t <= 10; ++t) h.push_back(entry(t, 0.95, 4, 0.9));
  for (int t = 11; t <= 20; ++t) h.push_back(entry(t, 0.2, -4, 0.0));
  EXPECT_EQ(baseline_fifo(h, 6), (std::vector<std::int64_t>{0, 15, 16, 17, 18, 19, 20}));
  EXPECT_EQ(select_memories(h, TambConfig{}), (std::vector<std::int64_t>{0, 6, 7, 8, 9, 10, 20}));
}

TEST(TambConfig, Validation) {
  TambConfig c;
  c.slots = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.pool_size = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.mu_iou = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
}
