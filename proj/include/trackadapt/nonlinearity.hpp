#pragma once

#include <span>
#include <string>
#include <vector>

#include "trackadapt/trajectory.hpp"

namespace trackadapt {

struct NonlinConfig {
  double accel_mag_thresh = 20.0;   // px / frame^2
  double angle_dev_thresh = 3.0;    // rad / frame
  double jerk_thresh = 20.0;        // px / frame^3
  double video_frac_thresh = 0.45;  // fraction of labeled frames

  void validate() const;  // ConfigError
};

struct FrameIndicators {
  bool labeled = false;
  bool nonlinear = false;
  double accel = 0.0;  // |c_t - 2 c_{t-1} + c_{t-2}|
  double angle = 0.0;  // change of acceleration direction, [0, pi]
  double jerk = 0.0;   // |a_t - a_{t-1}|
};

// Indicators on box centers. A frame is labeled only when it and its three
// predecessors all carry a box; anything else (start of sequence, gap) is unlabeled.
FrameIndicators frame_nonlinearity(const TrajectoryAnnotation& traj, std::size_t t, const NonlinConfig& cfg);

enum class MotionLabel { linear, nonlinear };

struct VideoLabel {
  MotionLabel label = MotionLabel::linear;
  double nonlinear_fraction = 0.0;
  std::size_t labeled_frames = 0;
};

// Nonlinear iff strictly more than video_frac_thresh of the labeled frames are.
// DomainError with fewer than 4 labeled frames.
VideoLabel classify_video(const TrajectoryAnnotation& traj, const NonlinConfig& cfg);

struct DatasetSplit {
  std::vector<std::string> linear;
  std::vector<std::string> nonlinear;
};

// Partition by classify_video, preserving input order. Videos too short to
// classify go to the linear side.
DatasetSplit split_dataset(std::span<const TrajectoryAnnotation> trajs, const NonlinConfig& cfg);

}  // namespace trackadapt
