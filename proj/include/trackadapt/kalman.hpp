#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>

#include "trackadapt/geometry.hpp"

namespace trackadapt {

// [x, y, w, h, dx, dy, dw, dh]: box center/size in pixels and their per-frame displacements.
struct StateVector {
  double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
  double dx = 0.0, dy = 0.0, dw = 0.0, dh = 0.0;

  static StateVector from_box(const BoundingBox& b) { return {b.cx(), b.cy(), b.w(), b.h(), 0, 0, 0, 0}; }
  Eigen::Matrix<double, 8, 1> as_vector() const;
  static StateVector from_vector(const Eigen::Matrix<double, 8, 1>& v);
};

// Box part of F * s under the constant-velocity transition, with w, h clamped at 0.
BoundingBox kf_predict(const StateVector& state);

// Noise model scaled by the current box height. Defaults follow the usual
// pedestrian-tracking convention (1/20 position, 1/160 velocity); the initial
// velocity spread is wide so an exact linear track is locked onto after two frames.
struct KalmanNoise {
  double std_weight_position = 1.0 / 20.0;
  double std_weight_velocity = 1.0 / 160.0;
  double initial_velocity_scale = 1.0e4;
  double process_scale = 1.0;  // multiplies Q; 0 gives a noiseless transition
  // Std of the turn-rate state (rad/frame) for models that estimate it.
  double turn_rate_std = 0.01;
  double initial_turn_rate_std = 0.5;
};

// Linear constant-velocity Kalman filter over StateVector.
class KalmanBoxFilter {
 public:
  explicit KalmanBoxFilter(KalmanNoise noise = {}) : noise_(noise) {}

  void initiate(const BoundingBox& box);
  bool initialized() const { return initialized_; }

  // Advances the state one frame and returns the predicted box. StateError if not initiated.
  BoundingBox predict();
  // Standard KF correction with a box measurement.
  void update(const BoundingBox& measurement);

  StateVector state() const;
  const Eigen::Matrix<double, 8, 8>& covariance() const { return cov_; }

 private:
  KalmanNoise noise_;
  bool initialized_ = false;
  Eigen::Matrix<double, 8, 1> mean_ = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 8> cov_ = Eigen::Matrix<double, 8, 8>::Zero();
};

// Nonlinear transition for the EKF. The first 8 state entries always follow the
// StateVector layout; models may append extra states (e.g. a turn rate).
class TransitionModel {
 public:
  virtual ~TransitionModel() = default;
  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual Eigen::VectorXd apply(const Eigen::VectorXd& s) const = 0;
  virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& s) const = 0;
  virtual Eigen::VectorXd process_std(const Eigen::VectorXd& s, const KalmanNoise& noise) const;
  virtual Eigen::VectorXd initial_std(const BoundingBox& b, const KalmanNoise& noise) const;
};

// x' = x + dx, velocities unchanged. The EKF with this model is the KF.
class ConstantVelocityModel : public TransitionModel {
 public:
  std::string name() const override { return "constant_velocity"; }
  int dim() const override { return 8; }
  Eigen::VectorXd apply(const Eigen::VectorXd& s) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& s) const override;
};

// Planar velocity rotates by a known rate each frame: v' = R(rate) v, p' = p + v'.
class CoordinatedTurnModel : public TransitionModel {
 public:
  explicit CoordinatedTurnModel(double rate) : rate_(rate) {}
  std::string name() const override { return "coordinated_turn"; }
  int dim() const override { return 8; }
  Eigen::VectorXd apply(const Eigen::VectorXd& s) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& s) const override;

 private:
  double rate_;
};

// Coordinated turn with the rate appended as a ninth, estimated state.
class AdaptiveTurnModel : public TransitionModel {
 public:
  std::string name() const override { return "adaptive_turn"; }
  int dim() const override { return 9; }
  Eigen::VectorXd apply(const Eigen::VectorXd& s) const override;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& s) const override;
  Eigen::VectorXd process_std(const Eigen::VectorXd& s, const KalmanNoise& noise) const override;
  Eigen::VectorXd initial_std(const BoundingBox& b, const KalmanNoise& noise) const override;
};

class ExtendedKalmanFilter {
 public:
  ExtendedKalmanFilter(std::shared_ptr<const TransitionModel> model, KalmanNoise noise = {});

  void initiate(const BoundingBox& box);
  bool initialized() const { return initialized_; }
  BoundingBox predict();
  // NumericalError if the innovation covariance is not positive definite.
  void update(const BoundingBox& measurement);

  StateVector state() const;
  const Eigen::VectorXd& mean() const { return mean_; }
  const TransitionModel& model() const { return *model_; }

 private:
  std::shared_ptr<const TransitionModel> model_;
  KalmanNoise noise_;
  bool initialized_ = false;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
};

// Box of the first 8 state entries with w, h clamped to >= 0.
BoundingBox box_of_state(double x, double y, double w, double h);

}  // namespace trackadapt
