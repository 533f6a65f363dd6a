#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace trackadapt {

// Axis-aligned box in pixels, center-based. Coordinates are always finite and
// w, h >= 0; a box with zero area is degenerate but still a valid value.
class BoundingBox {
 public:
  BoundingBox() = default;
  // Throws DomainError on non-finite input or negative size.
  BoundingBox(double cx, double cy, double w, double h);

  // Top-left corner plus size, the layout used by most annotation files.
  static BoundingBox from_top_left(double x, double y, double w, double h);
  static BoundingBox from_corners(double x1, double y1, double x2, double y2);

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double w() const { return w_; }
  double h() const { return h_; }

  double left() const { return cx_ - 0.5 * w_; }
  double right() const { return cx_ + 0.5 * w_; }
  double top() const { return cy_ - 0.5 * h_; }
  double bottom() const { return cy_ + 0.5 * h_; }
  double area() const { return w_ * h_; }
  bool degenerate() const { return !(w_ > 0.0 && h_ > 0.0); }

  std::array<double, 4> as_array() const { return {cx_, cy_, w_, h_}; }

  BoundingBox translated(double dx, double dy) const;
  BoundingBox scaled(double s) const;  // scales coordinates about the origin

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double cx_ = 0.0;
  double cy_ = 0.0;
  double w_ = 0.0;
  double h_ = 0.0;
};

// Possibly-empty box: nullopt stands for an empty mask / absent target.
using MaybeBox = std::optional<BoundingBox>;

// Row-major boolean grid, (x = column, y = row). Pixel (x, y) covers [x, x+1) x [y, y+1).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(std::size_t width, std::size_t height);
  // Throws DomainError if bits.size() != width * height.
  BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits);

  // Sets every pixel whose center lies inside the box.
  static BinaryMask from_box(std::size_t width, std::size_t height, const BoundingBox& box);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  bool at(std::size_t x, std::size_t y) const { return bits_[y * width_ + x] != 0; }
  void set(std::size_t x, std::size_t y, bool v = true) { bits_[y * width_ + x] = v ? 1 : 0; }
  bool empty() const;
  std::size_t count() const;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Gradient of a scalar with respect to the (cx, cy, w, h) of the predicted box.
using BoxGrad = std::array<double, 4>;

struct LossValue {
  double value = 0.0;
  BoxGrad grad{};
};

double iou(const BoundingBox& a, const BoundingBox& b);
// Empty boxes overlap nothing.
double iou(const MaybeBox& a, const MaybeBox& b);

// min(x, y) / max(x, y) with sim_ratio(0, 0) = 1. Throws DomainError for negative or NaN input.
double sim_ratio(double x, double y);

// w / h; degenerate boxes have no aspect ratio and callers must check first.
double aspect_ratio(const BoundingBox& b);

// Similarity of aspect ratio and of area; both 0 when either box is degenerate.
struct ShapeSimilarity {
  double aspect = 0.0;
  double area = 0.0;
};
ShapeSimilarity shape_similarity(const BoundingBox& a, const BoundingBox& b);

double iou_loss(const BoundingBox& pred, const BoundingBox& gt);
double diou_loss(const BoundingBox& pred, const BoundingBox& gt);
double ciou_loss(const BoundingBox& pred, const BoundingBox& gt);

// Loss values with analytic gradients w.r.t. pred. Ground truth must be
// non-degenerate (DomainError otherwise). For CIoU the aspect-ratio trade-off
// weight alpha = v / ((1 - IoU) + v) is treated as a constant, so the gradient
// is that of 1 - IoU + rho^2/c^2 + alpha_0 * v with alpha_0 frozen at pred.
LossValue iou_loss_grad(const BoundingBox& pred, const BoundingBox& gt);
LossValue diou_loss_grad(const BoundingBox& pred, const BoundingBox& gt);
LossValue ciou_loss_grad(const BoundingBox& pred, const BoundingBox& gt);
// Same, with the trade-off weight supplied instead of computed at pred.
LossValue ciou_loss_grad(const BoundingBox& pred, const BoundingBox& gt, double alpha);

// CIoU trade-off weight at pred (the value frozen during differentiation).
double ciou_alpha(const BoundingBox& pred, const BoundingBox& gt);

// Tightest box around the set bits; nullopt for an all-zero mask.
MaybeBox box_from_mask(const BinaryMask& m);

}  // namespace trackadapt
