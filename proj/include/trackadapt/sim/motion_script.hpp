#pragma once

#include <string>
#include <vector>

#include "trackadapt/geometry.hpp"
#include "trackadapt/rng.hpp"
#include "trackadapt/trajectory.hpp"

namespace trackadapt::sim {

enum class MotionType { linear, sinusoid, reversal, ramp, turn };

std::string to_string(MotionType t);
MotionType parse_motion_type(const std::string& name);  // ConfigError

// Closed-form or recursively integrated center path plus a linearly changing size.
//  linear:   p_t = p_0 + v t
//  sinusoid: linear plus amplitude * sin(2 pi t / period + phase) across the direction of v
//  reversal: velocity sign flips every `period` frames
//  ramp:     p_t = p_0 + v t + a t^2 / 2
//  turn:     v_{t+1} = R(turn_rate) v_t, p_{t+1} = p_t + v_{t+1}
struct MotionScript {
  MotionType type = MotionType::linear;
  double x0 = 0.0, y0 = 0.0;
  double w0 = 40.0, h0 = 40.0;
  double vx = 0.0, vy = 0.0;
  double dw = 0.0, dh = 0.0;
  double amplitude = 0.0;
  double period = 0.0;
  double phase = 0.0;
  double ax = 0.0, ay = 0.0;
  double turn_rate = 0.0;

  void validate() const;  // ConfigError
};

// Sizes are floored at 1 px.
std::vector<BoundingBox> render(const MotionScript& m, int frames);

// True if every rendered box lies inside the image.
bool inside(const std::vector<BoundingBox>& boxes, ImageSize image);

// Random script of the given type whose rendered path stays inside the image.
MotionScript random_script(MotionType type, Rng& rng, ImageSize image, int frames);

enum class CorpusKind { linear, nonlinear, mixed };

// Labelled trajectories "<prefix>_<nnn>". nonlinear cycles sinusoid, reversal, ramp;
// mixed alternates linear with those.
std::vector<TrajectoryAnnotation> synthetic_corpus(CorpusKind kind, int count, int frames, std::uint64_t seed,
                                                   ImageSize image = {256.0, 256.0},
                                                   const std::string& prefix = "seq");

}  // namespace trackadapt::sim
