#include "trackadapt/nonlinearity.hpp"

#include <cmath>
#include <numbers>

#include "trackadapt/errors.hpp"

namespace trackadapt {

void NonlinConfig::validate() const {
  if (!(accel_mag_thresh > 0.0) || !(angle_dev_thresh > 0.0) || !(jerk_thresh > 0.0)) {
    throw ConfigError("nonlinearity thresholds must be positive");
  }
  if (!(video_frac_thresh > 0.0 && video_frac_thresh < 1.0)) {
    throw ConfigError("video fraction threshold must lie in (0, 1)");
  }
}

namespace {

constexpr double kMinAccel = 1e-6;

struct Vec2 {
  double x, y;
};

Vec2 second_difference(const BoundingBox& c0, const BoundingBox& c1, const BoundingBox& c2) {
  // c0 = c_t, c1 = c_{t-1}, c2 = c_{t-2}
  return {c0.cx() - 2.0 * c1.cx() + c2.cx(), c0.cy() - 2.0 * c1.cy() + c2.cy()};
}

}  // namespace

FrameIndicators frame_nonlinearity(const TrajectoryAnnotation& traj, std::size_t t, const NonlinConfig& cfg) {
  FrameIndicators f;
  if (t < 3 || t >= traj.frames.size()) return f;
  for (std::size_t i = t - 3; i <= t; ++i) {
    if (!traj.frames[i]) return f;
  }
  const auto& b = traj.frames;
  const Vec2 a = second_difference(*b[t], *b[t - 1], *b[t - 2]);
  const Vec2 a_prev = second_difference(*b[t - 1], *b[t - 2], *b[t - 3]);
  f.labeled = true;
  f.accel = std::hypot(a.x, a.y);
  f.jerk = std::hypot(a.x - a_prev.x, a.y - a_prev.y);
  if (f.accel >= kMinAccel && std::hypot(a_prev.x, a_prev.y) >= kMinAccel) {
    double d = std::atan2(a.y, a.x) - std::atan2(a_prev.y, a_prev.x);
    d = std::remainder(d, 2.0 * std::numbers::pi);
    f.angle = std::fabs(d);
  }
  f.nonlinear = f.accel > cfg.accel_mag_thresh || f.angle > cfg.angle_dev_thresh || f.jerk > cfg.jerk_thresh;
  return f;
}

VideoLabel classify_video(const TrajectoryAnnotation& traj, const NonlinConfig& cfg) {
  VideoLabel v;
  std::size_t nonlinear = 0;
  for (std::size_t t = 0; t < traj.frames.size(); ++t) {
    const FrameIndicators f = frame_nonlinearity(traj, t, cfg);
    if (!f.labeled) continue;
    ++v.labeled_frames;
    if (f.nonlinear) ++nonlinear;
  }
  if (v.labeled_frames < 4) {
    throw DomainError("sequence '" + traj.id + "' has " + std::to_string(v.labeled_frames) +
                      " labeled frames, at least 4 are needed");
  }
  v.nonlinear_fraction = static_cast<double>(nonlinear) / static_cast<double>(v.labeled_frames);
  v.label = v.nonlinear_fraction > cfg.video_frac_thresh ? MotionLabel::nonlinear : MotionLabel::linear;
  return v;
}

DatasetSplit split_dataset(std::span<const TrajectoryAnnotation> trajs, const NonlinConfig& cfg) {
  cfg.validate();
  DatasetSplit s;
  for (const auto& t : trajs) {
    bool nonlinear = false;
    try {
      nonlinear = classify_video(t, cfg).label == MotionLabel::nonlinear;
    } catch (const DomainError&) {
      nonlinear = false;
    }
    (nonlinear ? s.nonlinear : s.linear).push_back(t.id);
  }
  return s;
}

}  // namespace trackadapt
