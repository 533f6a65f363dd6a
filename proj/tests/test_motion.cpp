#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "trackadapt/errors.hpp"
#include "trackadapt/history_bank.hpp"
#include "trackadapt/kalman.hpp"
#include "trackadapt/predictor.hpp"
#include "trackadapt/recurrent.hpp"
#include "trackadapt/sim/motion_script.hpp"
#include "trackadapt/training.hpp"
#include "trackadapt/weights_io.hpp"

using namespace trackadapt;

namespace {

double center_error(const BoundingBox& a, const BoundingBox& b) { return std::hypot(a.cx() - b.cx(), a.cy() - b.cy()); }

std::vector<BoundingBox> linear_track(int n, double x0, double y0, double vx, double vy, double w = 30, double h = 20) {
  std::vector<BoundingBox> out;
  for (int t = 0; t < n; ++t) out.emplace_back(x0 + vx * t, y0 + vy * t, w, h);
  return out;
}

TrajectoryAnnotation as_traj(const std::vector<BoundingBox>& boxes, std::string id = "t") {
  TrajectoryAnnotation t;
  t.id = std::move(id);
  t.image = {256, 256};
  for (const auto& b : boxes) t.frames.emplace_back(b);
  return t;
}

}  // namespace

TEST(KalmanPredict, ConstantVelocityTransition) {
  StateVector s{10, 10, 4, 4, 2, 0, 0, 0};
  EXPECT_EQ(kf_predict(s), BoundingBox(12, 10, 4, 4));
  StateVector still{10, 10, 4, 4, 0, 0, 0, 0};
  EXPECT_EQ(kf_predict(still), BoundingBox(10, 10, 4, 4));
  StateVector shrink{10, 10, 1, 1, 0, 0, -3, -3};
  EXPECT_EQ(kf_predict(shrink), BoundingBox(10, 10, 0, 0));
}

TEST(KalmanFilter, UninitializedPredictThrows) {
  KalmanBoxFilter kf;
  EXPECT_THROW(kf.predict(), StateError);
  EXPECT_THROW(kf.update(BoundingBox(1, 1, 1, 1)), StateError);
}

TEST(KalmanFilter, ConvergesOnExactLinearTrack) {
  const auto track = linear_track(40, 20, 30, 3.5, -1.25);
  KalmanBoxFilter kf;
  kf.initiate(track[0]);
  double prev = 1e9;
  for (int t = 1; t < 40; ++t) {
    const BoundingBox p = kf.predict();
    const double e = center_error(p, track[static_cast<std::size_t>(t)]);
    if (t > 10) {
      EXPECT_LT(e, 1e-6) << "frame " << t;
      EXPECT_LE(e, prev + 1e-9);
    }
    prev = e;
    kf.update(track[static_cast<std::size_t>(t)]);
  }
}

TEST(ExtendedKalman, ConstantVelocityModelMatchesKf) {
  Rng rng(9);
  KalmanBoxFilter kf;
  ExtendedKalmanFilter ekf(std::make_shared<ConstantVelocityModel>());
  BoundingBox b(50, 60, 20, 30);
  kf.initiate(b);
  ekf.initiate(b);
  for (int t = 0; t < 30; ++t) {
    const BoundingBox p = kf.predict(), q = ekf.predict();
    EXPECT_NEAR(p.cx(), q.cx(), 1e-9);
    EXPECT_NEAR(p.cy(), q.cy(), 1e-9);
    EXPECT_NEAR(p.w(), q.w(), 1e-9);
    EXPECT_NEAR(p.h(), q.h(), 1e-9);
    b = BoundingBox(b.cx() + rng.uniform(0, 4), b.cy() + rng.uniform(-2, 2), b.w() + rng.uniform(-0.5, 0.5),
                    b.h() + rng.uniform(-0.5, 0.5));
    kf.update(b);
    ekf.update(b);
  }
}

TEST(ExtendedKalman, TurnModelBeatsKfOnCoordinatedTurn) {
  sim::MotionScript m;
  m.type = sim::MotionType::turn;
  m.x0 = 128;
  m.y0 = 80;
  m.vx = 4;
  m.turn_rate = 0.1;
  const auto track = sim::render(m, 120);
  const auto traj = as_traj(track);
  FilterPredictor kf(PredictorArch::kf), ekf(PredictorArch::ekf);
  const auto a = one_step_accuracy(kf, std::span(&traj, 1));
  const auto b = one_step_accuracy(ekf, std::span(&traj, 1));
  EXPECT_LT(b.mean_center_error, a.mean_center_error);
}

TEST(ExtendedKalman, NoiselessExactModelTracksTruth) {
  const double rate = 0.08;
  sim::MotionScript m;
  m.type = sim::MotionType::turn;
  m.x0 = 128;
  m.y0 = 128;
  m.vx = 3;
  m.turn_rate = rate;
  const auto track = sim::render(m, 80);
  KalmanNoise noise;
  noise.process_scale = 0.0;
  ExtendedKalmanFilter ekf(std::make_shared<CoordinatedTurnModel>(rate), noise);
  ekf.initiate(track[0]);
  for (std::size_t t = 1; t < track.size(); ++t) {
    const BoundingBox p = ekf.predict();
    if (t > 10) {
      EXPECT_LT(center_error(p, track[t]), 1e-6) << "frame " << t;
    }
    ekf.update(track[t]);
  }
}

TEST(HistoryBank, FifoAndAbsentFrames) {
  HistoryBank bank(5, {100, 100});
  for (int t = 0; t < 6; ++t) bank.push(t, BoundingBox(t, t, 2, 2));
  ASSERT_EQ(bank.size(), 5u);
  EXPECT_EQ(bank.entries().front().frame, 1);
  bank.push(6, std::nullopt);
  EXPECT_EQ(bank.size(), 5u);
  EXPECT_EQ(bank.entries().back().frame, 5);
  EXPECT_THROW(bank.push(6, BoundingBox(1, 1, 1, 1)), StateError);
  EXPECT_THROW(bank.push(3, BoundingBox(1, 1, 1, 1)), StateError);
}

TEST(Features, NormalizationRoundTrip) {
  Rng rng(4);
  const ImageSize img{320, 240};
  for (int i = 0; i < 100; ++i) {
    const BoundingBox b(rng.uniform(20, 300), rng.uniform(20, 220), rng.uniform(1, 40), rng.uniform(1, 40));
    const BoundingBox r = denormalize_box(normalize_box(b, img), img);
    EXPECT_NEAR(r.cx(), b.cx(), 1e-9);
    EXPECT_NEAR(r.cy(), b.cy(), 1e-9);
    EXPECT_NEAR(r.w(), b.w(), 1e-9);
    EXPECT_NEAR(r.h(), b.h(), 1e-9);
    const BoundingBox n(b.cx() + 3, b.cy() - 2, b.w() + 1, b.h());
    const auto d = delta_between(b, n, img);
    const BoundingBox back = apply_delta(b, d, img);
    EXPECT_NEAR(back.cx(), n.cx(), 1e-9);
    EXPECT_NEAR(back.w(), n.w(), 1e-9);
  }
}

TEST(Features, LeftPaddingRepeatsOldest) {
  const ImageSize img{100, 100};
  std::vector<BoundingBox> two{BoundingBox(10, 10, 5, 5), BoundingBox(12, 10, 5, 5)};
  const auto f = window_features(two, 4, img);
  ASSERT_EQ(f.size(), 32u);
  for (int c = 0; c < 4; ++c) {
    EXPECT_EQ(f[static_cast<std::size_t>(c)], f[static_cast<std::size_t>(8 + c)]);
    EXPECT_EQ(f[static_cast<std::size_t>(c)], f[static_cast<std::size_t>(16 + c)]);
  }
  EXPECT_NEAR(f[24], 0.12, 1e-12);
  EXPECT_NEAR(f[28], 0.02 * kVelocityGain, 1e-12);
}

TEST(Networks, ParameterCounts) {
  EXPECT_EQ(LstmPredictor(5).parameter_count(), 119044u);
  EXPECT_NEAR(static_cast<double>(LstmPredictor(5).parameter_count()), 119300.0, 0.02 * 119300.0);
  EXPECT_EQ(MlpPredictor(5).parameter_count(), 7044u);
  EXPECT_NEAR(static_cast<double>(MlpPredictor(5).parameter_count()), 7300.0, 0.05 * 7300.0);
  EXPECT_EQ(LstmPredictor::count_parameters(4, 64), 119044u);
}

TEST(Networks, ZeroWeightsReturnLastBox) {
  const ImageSize img{200, 200};
  for (PredictorArch a : {PredictorArch::lstm, PredictorArch::mlp}) {
    TrainingConfig cfg;
    cfg.arch = a;
    std::shared_ptr<SequenceNet> net = make_network(cfg);
    std::vector<double> zeros(net->parameter_count(), 0.0);
    net->set_parameters(zeros);
    LearnedPredictor p(net, img);
    for (int t = 0; t < 4; ++t) p.observe(t, BoundingBox(50 + 3 * t, 60, 20, 10));
    EXPECT_EQ(p.predict(), MaybeBox(BoundingBox(59, 60, 20, 10))) << to_string(a);
  }
}

TEST(Networks, DeterministicInitAndForward) {
  LstmPredictor a(5), b(5);
  a.initialize(42);
  b.initialize(42);
  ASSERT_TRUE(std::equal(a.parameters().begin(), a.parameters().end(), b.parameters().begin()));
  const auto w = window_features(linear_track(5, 40, 40, 2, 1), 5, {128, 128});
  EXPECT_EQ(a.predict_delta(w), b.predict_delta(w));
  LstmPredictor c(5);
  c.initialize(43);
  EXPECT_NE(a.predict_delta(w), c.predict_delta(w));
}

TEST(Networks, BatchedForwardMatchesSingle) {
  MlpPredictor m(5);
  m.initialize(1);
  LstmPredictor l(5, 2, 16);
  l.initialize(2);
  Rng rng(1);
  Eigen::MatrixXd in(40, 3);
  for (Eigen::Index i = 0; i < in.size(); ++i) in.data()[i] = rng.uniform(-1, 1);
  for (const SequenceNet* net : {static_cast<const SequenceNet*>(&m), static_cast<const SequenceNet*>(&l)}) {
    const Eigen::MatrixXd out = net->forward(in);
    for (Eigen::Index j = 0; j < 3; ++j) {
      std::vector<double> col(in.col(j).data(), in.col(j).data() + 40);
      const auto d = net->predict_delta(col);
      for (int c = 0; c < 4; ++c) EXPECT_NEAR(out(c, j), d[static_cast<std::size_t>(c)], 1e-12);
    }
  }
}

namespace {

std::vector<TrainingSample> random_windows(int count, int k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TrajectoryAnnotation> trajs;
  for (int i = 0; i < count; ++i) {
    std::vector<BoundingBox> boxes;
    double x = rng.uniform(60, 190), y = rng.uniform(60, 190), w = rng.uniform(15, 40), h = rng.uniform(15, 40);
    for (int t = 0; t <= k; ++t) {
      boxes.emplace_back(x, y, w, h);
      x += rng.uniform(-6, 6);
      y += rng.uniform(-6, 6);
      w = std::max(5.0, w + rng.uniform(-2, 2));
      h = std::max(5.0, h + rng.uniform(-2, 2));
    }
    trajs.push_back(as_traj(boxes));
  }
  auto all = build_training_set(trajs, k);
  std::vector<TrainingSample> last;
  // one window per trajectory: the one with the full context
  for (std::size_t i = 0; i < all.size(); ++i) {
    if ((i + 1) % static_cast<std::size_t>(k - 1) == 0) last.push_back(all[i]);
  }
  return last;
}

void check_gradient(SequenceNet& net, const TrainingConfig& cfg, std::span<const TrainingSample> samples,
                    std::size_t probes) {
  const auto alphas = ciou_alphas(net, samples);
  std::vector<double> grad(net.parameter_count(), 0.0);
  regression_loss(net, samples, cfg, grad, alphas);
  Rng rng(77);
  auto p = net.parameters();
  for (std::size_t n = 0; n < probes; ++n) {
    const std::size_t j = rng.below(p.size());
    const double orig = p[j];
    const double h = 1e-6;
    p[j] = orig + h;
    const double up = regression_loss(net, samples, cfg, {}, alphas);
    p[j] = orig - h;
    const double dn = regression_loss(net, samples, cfg, {}, alphas);
    p[j] = orig;
    const double fd = (up - dn) / (2 * h);
    const double scale = std::max({std::abs(fd), std::abs(grad[j]), 1e-6});
    EXPECT_LT(std::abs(fd - grad[j]) / scale, 1e-3) << "param " << j << " fd " << fd << " analytic " << grad[j];
  }
}

}  // namespace

TEST(Training, LstmGradientMatchesFiniteDifferences) {
  const auto samples = random_windows(20, 5, 3);
  ASSERT_EQ(samples.size(), 20u);
  TrainingConfig cfg;
  for (BoxLoss loss : {BoxLoss::ciou, BoxLoss::diou, BoxLoss::iou}) {
    cfg.box_loss = loss;
    LstmPredictor net(5, 2, 12);
    net.initialize(5);
    check_gradient(net, cfg, samples, 40);
  }
  LstmPredictor full(5);
  full.initialize(8);
  check_gradient(full, TrainingConfig{}, samples, 20);
}

TEST(Training, MlpGradientMatchesFiniteDifferences) {
  const auto samples = random_windows(20, 5, 4);
  MlpPredictor net(5);
  net.initialize(6);
  TrainingConfig cfg;
  cfg.arch = PredictorArch::mlp;
  check_gradient(net, cfg, samples, 40);
}

TEST(Training, ConfigValidation) {
  TrainingConfig cfg;
  cfg.lambda1 = 0;
  cfg.lambda2 = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.context = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.arch = PredictorArch::kf;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  EXPECT_THROW(train_mp({}, cfg), ConfigError);
  EXPECT_THROW(parse_box_loss("giou"), ConfigError);
}

TEST(Training, WindowsNeverSpanGaps) {
  TrajectoryAnnotation t = as_traj(linear_track(10, 50, 50, 2, 0));
  t.frames[4].reset();
  const auto s = build_training_set(std::span(&t, 1), 5);
  // visible runs 0..3 and 5..9: targets at 2,3 and 7,8,9
  ASSERT_EQ(s.size(), 5u);
  EXPECT_EQ(s[0].target, *t.frames[2]);
  EXPECT_EQ(s[2].target, *t.frames[7]);
  EXPECT_EQ(s[2].last, *t.frames[6]);
}

TEST(Training, LinearCorpusLearnedAndDeterministic) {
  const auto corpus = sim::synthetic_corpus(sim::CorpusKind::linear, 16, 40, 21);
  TrainingConfig cfg;
  cfg.arch = PredictorArch::mlp;
  cfg.epochs = 40;
  cfg.batch_size = 32;
  const auto samples = build_training_set(corpus, cfg.context);
  const auto a = train_mp(samples, cfg);
  const auto b = train_mp(samples, cfg);
  ASSERT_TRUE(std::equal(a.net->parameters().begin(), a.net->parameters().end(), b.net->parameters().begin()));
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  // mini-batch losses are noisy; compare 5-epoch windows
  auto window = [&](std::size_t from) {
    return std::accumulate(a.epoch_loss.begin() + from, a.epoch_loss.begin() + from + 5, 0.0) / 5;
  };
  EXPECT_LT(window(a.epoch_loss.size() - 5), 0.5 * window(0));
  EXPECT_LT(a.epoch_loss.back(), a.epoch_loss.front());
  const auto held_out = sim::synthetic_corpus(sim::CorpusKind::linear, 8, 40, 22);
  LearnedPredictor p(std::shared_ptr<const SequenceNet>(a.net->clone()));
  EXPECT_GT(one_step_accuracy(p, held_out).mean_iou, 0.95);
}

TEST(Training, FullBatchLossNonIncreasingOnLinearTracks) {
  const auto corpus = sim::synthetic_corpus(sim::CorpusKind::linear, 6, 30, 5);
  TrainingConfig cfg;
  cfg.arch = PredictorArch::mlp;
  cfg.epochs = 30;
  cfg.learning_rate = 2e-4;
  const auto samples = build_training_set(corpus, cfg.context);
  cfg.batch_size = static_cast<int>(samples.size());
  const auto r = train_mp(samples, cfg);
  for (std::size_t e = 1; e < r.epoch_loss.size(); ++e) EXPECT_LE(r.epoch_loss[e], r.epoch_loss[e - 1]);
}

TEST(Predictors, WarmUpContract) {
  for (PredictorArch a : {PredictorArch::kf, PredictorArch::ekf}) {
    FilterPredictor p(a);
    p.reset({100, 100});
    EXPECT_FALSE(p.predict().has_value());
    p.observe(0, BoundingBox(10, 10, 4, 4));
    EXPECT_EQ(p.predict(), MaybeBox(BoundingBox(10, 10, 4, 4)));
    EXPECT_THROW(p.observe(0, BoundingBox(1, 1, 1, 1)), StateError);
  }
  EXPECT_THROW(make_predictor(PredictorArch::lstm), ConfigError);
  MlpPredictor mlp(5);
  EXPECT_THROW(make_predictor(PredictorArch::lstm, std::make_shared<MlpPredictor>(mlp)), ConfigError);
}

TEST(Predictors, OutputsNeverNegativeSize) {
  Rng rng(12);
  LstmPredictor net(5);
  net.initialize(3);
  auto shared = std::make_shared<LstmPredictor>(net);
  // large random weights push the deltas far out
  for (double& v : shared->parameters()) v *= 30;
  LearnedPredictor lp(shared, {100, 100});
  FilterPredictor kf(PredictorArch::kf);
  kf.reset({100, 100});
  for (int t = 0; t < 30; ++t) {
    const BoundingBox b(rng.uniform(10, 90), rng.uniform(10, 90), rng.uniform(0.5, 3), rng.uniform(0.5, 3));
    lp.observe(t, b);
    kf.observe(t, b);
    for (const MaybeBox& p : {lp.predict(), kf.predict()}) {
      ASSERT_TRUE(p.has_value());
      EXPECT_GE(p->w(), 0.0);
      EXPECT_GE(p->h(), 0.0);
    }
  }
}

TEST(Predictors, KfCoastsOverMissingFrames) {
  FilterPredictor p(PredictorArch::kf);
  p.reset({300, 300});
  for (int t = 0; t < 15; ++t) p.observe(t, BoundingBox(10 + 2 * t, 50, 10, 10));
  p.observe(15, std::nullopt);
  p.observe(16, std::nullopt);
  const MaybeBox b = p.predict();
  ASSERT_TRUE(b.has_value());
  EXPECT_NEAR(b->cx(), 10 + 2 * 17, 1e-3);
}

TEST(WeightsFile, RoundTripsExactly) {
  for (PredictorArch a : {PredictorArch::mlp, PredictorArch::lstm}) {
    TrainingConfig cfg;
    cfg.arch = a;
    cfg.context = 4;
    WeightsFile w{a, 4, true, make_network(cfg)};
    w.net->initialize(99);
    std::stringstream ss;
    write_weights(ss, w);
    const WeightsFile r = read_weights(ss);
    EXPECT_EQ(r.arch, a);
    EXPECT_EQ(r.context, 4);
    EXPECT_TRUE(r.normalized);
    ASSERT_TRUE(r.net);
    ASSERT_TRUE(std::equal(w.net->parameters().begin(), w.net->parameters().end(), r.net->parameters().begin(),
                           r.net->parameters().end()));
  }
  std::stringstream kf;
  write_weights(kf, WeightsFile{PredictorArch::kf, 5, true, nullptr});
  EXPECT_EQ(read_weights(kf).net, nullptr);
}

TEST(WeightsFile, MalformedInputNamesLine) {
  std::stringstream bad("TRKW 1\narch lstm\ncontext 5\nnormalized 1\nlayers 4\nhidden 64\nparams 3\n0x1p+0\nzzz\n");
  try {
    read_weights(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
  }
  MlpPredictor m(5);
  std::stringstream good;
  write_weights(good, WeightsFile{PredictorArch::mlp, 5, true, std::make_shared<MlpPredictor>(m)});
  std::string text = good.str();
  std::size_t pos = 0;
  for (int i = 0; i < 9; ++i) pos = text.find('\n', pos) + 1;
  text.replace(pos, text.find('\n', pos) - pos, "zzz");
  std::stringstream corrupt(text);
  try {
    read_weights(corrupt);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 10u);
  }
  std::stringstream wrong_magic("NOPE 1\n");
  EXPECT_THROW(read_weights(wrong_magic), ParseError);
  EXPECT_THROW(load_weights("/nonexistent/weights.txt"), ConfigError);
}

TEST(WeightsFile, SaveAndLoadFile) {
  const auto dir = std::filesystem::temp_directory_path() / "trackadapt_weights_test";
  std::filesystem::create_directories(dir);
  MlpPredictor m(5);
  m.initialize(1);
  save_weights(dir / "w.txt", WeightsFile{PredictorArch::mlp, 5, true, std::make_shared<MlpPredictor>(m)});
  const auto r = load_weights(dir / "w.txt");
  EXPECT_EQ(r.net->predict_delta(std::vector<double>(40, 0.1)), m.predict_delta(std::vector<double>(40, 0.1)));
  EXPECT_FALSE(std::filesystem::exists(dir / "w.txt.tmp"));
  std::filesystem::remove_all(dir);
}
