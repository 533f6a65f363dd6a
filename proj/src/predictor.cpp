#include "trackadapt/predictor.hpp"

#include <cmath>
#include <string>

#include "trackadapt/errors.hpp"

namespace trackadapt {

namespace {

std::shared_ptr<const TransitionModel> model_for(PredictorArch arch) {
  switch (arch) {
    case PredictorArch::kf: return std::make_shared<ConstantVelocityModel>();
    case PredictorArch::ekf: return std::make_shared<AdaptiveTurnModel>();
    default: throw ConfigError("filter predictor needs arch kf or ekf, got " + to_string(arch));
  }
}

}  // namespace

FilterPredictor::FilterPredictor(PredictorArch arch, KalmanNoise noise)
    : arch_(arch), noise_(noise), filter_(model_for(arch), noise) {}

void FilterPredictor::reset(ImageSize) {
  filter_ = ExtendedKalmanFilter(model_for(arch_), noise_);
  last_frame_.reset();
  observed_ = 0;
  last_box_.reset();
}

void FilterPredictor::observe(std::int64_t frame, const MaybeBox& box) {
  if (last_frame_ && frame <= *last_frame_) {
    throw StateError("predictor frame index " + std::to_string(frame) + " is not after " +
                     std::to_string(*last_frame_));
  }
  const std::int64_t steps = last_frame_ ? frame - *last_frame_ : 1;
  last_frame_ = frame;
  if (!filter_.initialized()) {
    if (box) {
      filter_.initiate(*box);
      last_box_ = box;
      observed_ = 1;
    }
    return;
  }
  for (std::int64_t i = 0; i < steps; ++i) filter_.predict();
  if (box) {
    filter_.update(*box);
    last_box_ = box;
    ++observed_;
  }
}

MaybeBox FilterPredictor::predict() const {
  if (!filter_.initialized()) return std::nullopt;
  if (observed_ < 2) return last_box_;
  const Eigen::VectorXd next = filter_.model().apply(filter_.mean());
  return box_of_state(next(0), next(1), next(2), next(3));
}

LearnedPredictor::LearnedPredictor(std::shared_ptr<const SequenceNet> net, ImageSize image)
    : net_(std::move(net)), bank_(net_ ? static_cast<std::size_t>(net_->context()) : 1, image) {
  if (!net_) throw ConfigError("learned predictor needs a network");
}

void LearnedPredictor::reset(ImageSize image) {
  bank_ = HistoryBank(static_cast<std::size_t>(net_->context()), image);
}

void LearnedPredictor::observe(std::int64_t frame, const MaybeBox& box) { bank_.push(frame, box); }

MaybeBox LearnedPredictor::predict() const {
  if (bank_.empty()) return std::nullopt;
  if (bank_.size() < 2) return bank_.last();
  const auto boxes = bank_.boxes();
  const auto features = window_features(boxes, net_->context(), bank_.image());
  const auto delta = net_->predict_delta(features);
  return apply_delta(boxes.back(), delta, bank_.image());
}

std::unique_ptr<MotionPredictor> make_predictor(PredictorArch arch, std::shared_ptr<const SequenceNet> net,
                                                KalmanNoise noise) {
  switch (arch) {
    case PredictorArch::kf:
    case PredictorArch::ekf: return std::make_unique<FilterPredictor>(arch, noise);
    case PredictorArch::mlp:
    case PredictorArch::lstm:
      if (!net) throw ConfigError(to_string(arch) + " predictor needs trained weights");
      if (net->arch() != arch) {
        throw ConfigError("weights are for " + to_string(net->arch()) + ", not " + to_string(arch));
      }
      return std::make_unique<LearnedPredictor>(std::move(net));
  }
  throw ConfigError("unknown predictor arch");
}

OneStepStats one_step_accuracy(MotionPredictor& predictor, std::span<const TrajectoryAnnotation> trajectories) {
  OneStepStats s;
  double iou_sum = 0.0, err_sum = 0.0;
  for (const auto& traj : trajectories) {
    predictor.reset(traj.image);
    int run = 0;
    for (std::size_t t = 0; t < traj.frames.size(); ++t) {
      const MaybeBox& gt = traj.frames[t];
      if (gt && run >= 2) {
        const MaybeBox pred = predictor.predict();
        iou_sum += iou(pred, gt);
        if (pred) err_sum += std::hypot(pred->cx() - gt->cx(), pred->cy() - gt->cy());
        ++s.frames;
      }
      run = gt ? run + 1 : 0;
      predictor.observe(static_cast<std::int64_t>(t), gt);
    }
  }
  if (s.frames > 0) {
    s.mean_iou = iou_sum / static_cast<double>(s.frames);
    s.mean_center_error = err_sum / static_cast<double>(s.frames);
  }
  return s;
}

}  // namespace trackadapt
