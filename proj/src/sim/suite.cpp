#include "trackadapt/sim/suite.hpp"

namespace trackadapt::sim {

namespace {

constexpr int kFrames = 150;

MotionScript linear(double x, double y, double vx, double vy, double w = 40.0, double h = 40.0) {
  MotionScript m;
  m.x0 = x;
  m.y0 = y;
  m.vx = vx;
  m.vy = vy;
  m.w0 = w;
  m.h0 = h;
  return m;
}

MotionScript sinusoid(double x, double y, double vx, double vy, double amp, double period, double w = 40.0,
                      double h = 40.0) {
  MotionScript m = linear(x, y, vx, vy, w, h);
  m.type = MotionType::sinusoid;
  m.amplitude = amp;
  m.period = period;
  return m;
}

Scenario make(const std::string& id, std::uint64_t seed, MotionScript target, std::vector<MotionScript> distractors = {},
              std::vector<Corruption> corruptions = {}) {
  Scenario sc;
  sc.id = id;
  sc.frames = kFrames;
  sc.seed = seed;
  sc.target = target;
  sc.distractors = std::move(distractors);
  sc.corruptions = std::move(corruptions);
  return sc;
}

// Small distractor, well below the area-similarity thresholds of the target.
MotionScript small_distractor(double x, double y, double vx, double vy) { return linear(x, y, vx, vy, 24.0, 26.0); }

}  // namespace

bool is_clean(const Scenario& sc) { return sc.corruptions.empty(); }

Scenario reappearance_scenario(std::uint64_t seed) {
  Scenario sc = make("occlusion_reappear", seed, linear(50, 128, 1.0, 0.2),
                     {small_distractor(200, 60, -0.4, 0.3)}, {{60, 80, CorruptionKind::occlusion, 1.0}});
  sc.build();
  return sc;
}

std::vector<Scenario> standard_suite(std::uint64_t seed) {
  std::vector<Scenario> s;
  auto seed_of = [&](std::uint64_t i) { return seed * 1000 + i; };

  // Clean motion.
  s.push_back(make("linear_clean", seed_of(1), linear(40, 60, 1.1, 0.9), {small_distractor(210, 200, -0.3, -0.2)}));
  s.push_back(make("sinusoid_clean", seed_of(2), sinusoid(40, 128, 1.2, 0.0, 35.0, 40.0)));
  {
    MotionScript m = linear(128, 100, 3.0, 0.5);
    m.type = MotionType::reversal;
    m.period = 20.0;
    s.push_back(make("reversal_clean", seed_of(3), m));
  }
  {
    MotionScript m = linear(40, 200, 0.2, -0.1);
    m.type = MotionType::ramp;
    m.ax = 0.012;
    m.ay = -0.012;
    s.push_back(make("ramp_clean", seed_of(4), m, {small_distractor(200, 50, 0.0, 0.2)}));
  }
  {
    MotionScript m = linear(128, 60, 2.0, 0.0, 36.0, 44.0);
    m.type = MotionType::turn;
    m.turn_rate = 0.045;
    s.push_back(make("turn_clean", seed_of(5), m));
  }

  // Distractor swaps: the distractor's S_IoU is pushed above the target's for a while.
  s.push_back(make("linear_swap", seed_of(6), linear(40, 80, 1.0, 0.5), {small_distractor(200, 190, -0.6, -0.3)},
                   {{40, 60, CorruptionKind::swap_bias, 0.7}, {100, 110, CorruptionKind::swap_bias, 0.7}}));
  s.push_back(make("sinusoid_swap", seed_of(7), sinusoid(40, 110, 1.2, 0.2, 30.0, 50.0),
                   {small_distractor(190, 210, -0.5, -0.2)}, {{50, 75, CorruptionKind::swap_bias, 0.7}}));
  s.push_back(make("crossing_swap", seed_of(8), linear(40, 128, 1.2, 0.0),
                   {small_distractor(220, 140, -1.0, 0.0)}, {{70, 90, CorruptionKind::swap_bias, 0.6}}));

  // Occlusions.
  {
    Scenario sc = make("occlusion_reappear", seed_of(9), linear(50, 128, 1.0, 0.2),
                       {small_distractor(200, 60, -0.4, 0.3)}, {{60, 80, CorruptionKind::occlusion, 1.0}});
    s.push_back(sc);
  }
  {
    Scenario sc = make("occlusion_lure", seed_of(10), sinusoid(60, 90, 0.9, 0.6, 25.0, 60.0),
                       {small_distractor(190, 190, -0.3, -0.4)}, {{50, 75, CorruptionKind::occlusion, 1.0}});
    sc.segmenter.occlusion_lure = 1.5;
    s.push_back(sc);
  }
  {
    Scenario sc = make("long_occlusion", seed_of(11), linear(40, 170, 1.1, -0.4),
                       {small_distractor(200, 60, -0.5, 0.3)}, {{40, 90, CorruptionKind::occlusion, 1.0}});
    sc.segmenter.occlusion_lure = 1.5;
    s.push_back(sc);
  }

  // Score noise and jitter.
  s.push_back(make("score_noise", seed_of(12), sinusoid(50, 128, 1.0, 0.3, 25.0, 45.0),
                   {small_distractor(190, 60, -0.4, 0.4)}, {{20, 130, CorruptionKind::score_noise, 0.25}}));
  s.push_back(make("jitter_heavy", seed_of(13), linear(50, 60, 1.0, 0.9), {small_distractor(200, 200, -0.3, -0.3)},
                   {{30, 120, CorruptionKind::jitter, 0.08}}));

  for (auto& sc : s) sc.build();
  return s;
}

}  // namespace trackadapt::sim
