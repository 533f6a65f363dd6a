#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "trackadapt/geometry.hpp"
#include "trackadapt/history_bank.hpp"
#include "trackadapt/kalman.hpp"
#include "trackadapt/recurrent.hpp"
#include "trackadapt/trajectory.hpp"

namespace trackadapt {

// Per-sequence motion predictor driven by the tracker's selected outputs.
// observe() is called once per frame (nullopt when nothing was selected) and
// predict() gives the box expected at the next frame.
class MotionPredictor {
 public:
  virtual ~MotionPredictor() = default;
  virtual PredictorArch arch() const = 0;
  virtual void reset(ImageSize image) = 0;
  // StateError if frame does not increase.
  virtual void observe(std::int64_t frame, const MaybeBox& box) = 0;
  // nullopt before the first observation; the last box while fewer than two are known.
  virtual MaybeBox predict() const = 0;
};

// Kalman-family predictor (kf, or ekf with an estimated turn rate). Frames
// without a measurement coast on the motion model.
class FilterPredictor final : public MotionPredictor {
 public:
  explicit FilterPredictor(PredictorArch arch, KalmanNoise noise = {});
  PredictorArch arch() const override { return arch_; }
  void reset(ImageSize image) override;
  void observe(std::int64_t frame, const MaybeBox& box) override;
  MaybeBox predict() const override;

 private:
  PredictorArch arch_;
  KalmanNoise noise_;
  ExtendedKalmanFilter filter_;
  std::optional<std::int64_t> last_frame_;
  int observed_ = 0;
  MaybeBox last_box_;
};

// Learned predictor over a HistoryBank of the last k selected boxes.
class LearnedPredictor final : public MotionPredictor {
 public:
  explicit LearnedPredictor(std::shared_ptr<const SequenceNet> net, ImageSize image = {1.0, 1.0});
  PredictorArch arch() const override { return net_->arch(); }
  void reset(ImageSize image) override;
  void observe(std::int64_t frame, const MaybeBox& box) override;
  MaybeBox predict() const override;
  const HistoryBank& history() const { return bank_; }

 private:
  std::shared_ptr<const SequenceNet> net_;
  HistoryBank bank_;
};

// kf/ekf need no network; mlp/lstm require one with a matching arch (ConfigError otherwise).
std::unique_ptr<MotionPredictor> make_predictor(PredictorArch arch, std::shared_ptr<const SequenceNet> net = nullptr,
                                                KalmanNoise noise = {});

struct OneStepStats {
  double mean_iou = 0.0;
  double mean_center_error = 0.0;
  std::size_t frames = 0;
};

// Feeds each trajectory's ground truth to the predictor and scores the
// prediction for every visible frame preceded by at least two visible frames.
OneStepStats one_step_accuracy(MotionPredictor& predictor, std::span<const TrajectoryAnnotation> trajectories);

}  // namespace trackadapt
