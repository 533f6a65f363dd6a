#include "trackadapt/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trackadapt/errors.hpp"

namespace trackadapt {

namespace {

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat4x8 = Eigen::Matrix<double, 4, 8>;

// Noise scales follow the box height; a floor keeps collapsed boxes from zeroing the covariance.
double noise_height(double h) { return std::max(h, 1.0); }

Mat8 cv_transition() {
  Mat8 f = Mat8::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;
  return f;
}

Eigen::Vector4d measurement_std(double h, const KalmanNoise& n) {
  return Eigen::Vector4d::Constant(n.std_weight_position * noise_height(h));
}

Eigen::Vector4d box_vector(const BoundingBox& b) { return {b.cx(), b.cy(), b.w(), b.h()}; }

}  // namespace

Eigen::Matrix<double, 8, 1> StateVector::as_vector() const {
  Vec8 v;
  v << x, y, w, h, dx, dy, dw, dh;
  return v;
}

StateVector StateVector::from_vector(const Eigen::Matrix<double, 8, 1>& v) {
  return {v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7)};
}

BoundingBox box_of_state(double x, double y, double w, double h) {
  return BoundingBox(x, y, std::max(w, 0.0), std::max(h, 0.0));
}

BoundingBox kf_predict(const StateVector& s) {
  const Vec8 next = cv_transition() * s.as_vector();
  return box_of_state(next(0), next(1), next(2), next(3));
}

// ---- KalmanBoxFilter ----

void KalmanBoxFilter::initiate(const BoundingBox& box) {
  mean_.setZero();
  mean_.head<4>() = box_vector(box);
  const double h = noise_height(box.h());
  Vec8 std;
  std.head<4>().setConstant(2.0 * noise_.std_weight_position * h);
  std.tail<4>().setConstant(noise_.initial_velocity_scale * noise_.std_weight_velocity * h);
  cov_ = std.array().square().matrix().asDiagonal();
  initialized_ = true;
}

BoundingBox KalmanBoxFilter::predict() {
  if (!initialized_) throw StateError("Kalman filter used before initiate()");
  const double h = noise_height(mean_(3));
  Vec8 std;
  std.head<4>().setConstant(noise_.std_weight_position * h);
  std.tail<4>().setConstant(noise_.std_weight_velocity * h);
  const Mat8 q = (noise_.process_scale * std.array().square()).matrix().asDiagonal();
  const Mat8 f = cv_transition();
  mean_ = f * mean_;
  cov_ = f * cov_ * f.transpose() + q;
  return box_of_state(mean_(0), mean_(1), mean_(2), mean_(3));
}

void KalmanBoxFilter::update(const BoundingBox& measurement) {
  if (!initialized_) throw StateError("Kalman filter used before initiate()");
  const Mat4x8 hm = Mat4x8::Identity();
  const Eigen::Matrix4d r = measurement_std(mean_(3), noise_).array().square().matrix().asDiagonal();
  const Eigen::Matrix4d s = hm * cov_ * hm.transpose() + r;
  const Eigen::LLT<Eigen::Matrix4d> llt(s);
  if (llt.info() != Eigen::Success) throw NumericalError("Kalman innovation covariance is not positive definite");
  const Eigen::Matrix<double, 8, 4> gain = llt.solve(hm * cov_).transpose();
  mean_ += gain * (box_vector(measurement) - hm * mean_);
  cov_ = (Mat8::Identity() - gain * hm) * cov_;
}

StateVector KalmanBoxFilter::state() const {
  if (!initialized_) throw StateError("Kalman filter used before initiate()");
  return StateVector::from_vector(mean_);
}

// ---- transition models ----

Eigen::VectorXd TransitionModel::process_std(const Eigen::VectorXd& s, const KalmanNoise& noise) const {
  Eigen::VectorXd std = Eigen::VectorXd::Zero(dim());
  const double h = noise_height(s(3));
  std.head<4>().setConstant(noise.std_weight_position * h);
  std.segment<4>(4).setConstant(noise.std_weight_velocity * h);
  return std;
}

Eigen::VectorXd TransitionModel::initial_std(const BoundingBox& b, const KalmanNoise& noise) const {
  Eigen::VectorXd std = Eigen::VectorXd::Zero(dim());
  const double h = noise_height(b.h());
  std.head<4>().setConstant(2.0 * noise.std_weight_position * h);
  std.segment<4>(4).setConstant(noise.initial_velocity_scale * noise.std_weight_velocity * h);
  return std;
}

Eigen::VectorXd ConstantVelocityModel::apply(const Eigen::VectorXd& s) const { return jacobian(s) * s; }

Eigen::MatrixXd ConstantVelocityModel::jacobian(const Eigen::VectorXd&) const { return cv_transition(); }

namespace {

// Shared by the fixed and adaptive turn models: rotate (dx, dy) by rate, then integrate.
Eigen::VectorXd turn_apply(const Eigen::VectorXd& s, double rate) {
  Eigen::VectorXd out = s;
  const double c = std::cos(rate), sn = std::sin(rate);
  const double vx = c * s(4) - sn * s(5);
  const double vy = sn * s(4) + c * s(5);
  out(4) = vx;
  out(5) = vy;
  out(0) = s(0) + vx;
  out(1) = s(1) + vy;
  out(2) = s(2) + s(6);
  out(3) = s(3) + s(7);
  return out;
}

Eigen::MatrixXd turn_jacobian(const Eigen::VectorXd& s, double rate, int dim) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Identity(dim, dim);
  const double c = std::cos(rate), sn = std::sin(rate);
  j(2, 6) = 1.0;
  j(3, 7) = 1.0;
  // d(vx', vy') / d(vx, vy)
  j(4, 4) = c;
  j(4, 5) = -sn;
  j(5, 4) = sn;
  j(5, 5) = c;
  j(0, 4) = c;
  j(0, 5) = -sn;
  j(1, 4) = sn;
  j(1, 5) = c;
  if (dim > 8) {
    const double dvx = -sn * s(4) - c * s(5);
    const double dvy = c * s(4) - sn * s(5);
    j(4, 8) = dvx;
    j(5, 8) = dvy;
    j(0, 8) = dvx;
    j(1, 8) = dvy;
  }
  return j;
}

}  // namespace

Eigen::VectorXd CoordinatedTurnModel::apply(const Eigen::VectorXd& s) const { return turn_apply(s, rate_); }

Eigen::MatrixXd CoordinatedTurnModel::jacobian(const Eigen::VectorXd& s) const {
  return turn_jacobian(s, rate_, 8);
}

Eigen::VectorXd AdaptiveTurnModel::apply(const Eigen::VectorXd& s) const { return turn_apply(s, s(8)); }

Eigen::MatrixXd AdaptiveTurnModel::jacobian(const Eigen::VectorXd& s) const { return turn_jacobian(s, s(8), 9); }

Eigen::VectorXd AdaptiveTurnModel::process_std(const Eigen::VectorXd& s, const KalmanNoise& noise) const {
  Eigen::VectorXd std = TransitionModel::process_std(s, noise);
  std(8) = noise.turn_rate_std;
  return std;
}

Eigen::VectorXd AdaptiveTurnModel::initial_std(const BoundingBox& b, const KalmanNoise& noise) const {
  Eigen::VectorXd std = TransitionModel::initial_std(b, noise);
  std(8) = noise.initial_turn_rate_std;
  return std;
}

// ---- ExtendedKalmanFilter ----

ExtendedKalmanFilter::ExtendedKalmanFilter(std::shared_ptr<const TransitionModel> model, KalmanNoise noise)
    : model_(std::move(model)), noise_(noise) {
  if (!model_ || model_->dim() < 8) throw ConfigError("EKF transition model must have at least 8 states");
}

void ExtendedKalmanFilter::initiate(const BoundingBox& box) {
  mean_ = Eigen::VectorXd::Zero(model_->dim());
  mean_.head<4>() = box_vector(box);
  cov_ = model_->initial_std(box, noise_).array().square().matrix().asDiagonal();
  initialized_ = true;
}

BoundingBox ExtendedKalmanFilter::predict() {
  if (!initialized_) throw StateError("EKF used before initiate()");
  const Eigen::VectorXd std = model_->process_std(mean_, noise_);
  const Eigen::MatrixXd q = (noise_.process_scale * std.array().square()).matrix().asDiagonal();
  const Eigen::MatrixXd j = model_->jacobian(mean_);
  mean_ = model_->apply(mean_);
  cov_ = j * cov_ * j.transpose() + q;
  return box_of_state(mean_(0), mean_(1), mean_(2), mean_(3));
}

void ExtendedKalmanFilter::update(const BoundingBox& measurement) {
  if (!initialized_) throw StateError("EKF used before initiate()");
  const int n = model_->dim();
  Eigen::MatrixXd hm = Eigen::MatrixXd::Zero(4, n);
  hm.leftCols<4>().setIdentity();
  const Eigen::Matrix4d r = measurement_std(mean_(3), noise_).array().square().matrix().asDiagonal();
  const Eigen::MatrixXd s = hm * cov_ * hm.transpose() + r;
  const Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success || !s.allFinite()) {
    std::ostringstream msg;
    msg << "EKF innovation covariance is singular (model " << model_->name() << ", diag "
        << s.diagonal().transpose() << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::MatrixXd gain = llt.solve(hm * cov_).transpose();
  mean_ += gain * (box_vector(measurement) - hm * mean_);
  cov_ = (Eigen::MatrixXd::Identity(n, n) - gain * hm) * cov_;
}

StateVector ExtendedKalmanFilter::state() const {
  if (!initialized_) throw StateError("EKF used before initiate()");
  return {mean_(0), mean_(1), mean_(2), mean_(3), mean_(4), mean_(5), mean_(6), mean_(7)};
}

}  // namespace trackadapt
