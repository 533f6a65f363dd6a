#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "trackadapt/geometry.hpp"
#include "trackadapt/trajectory.hpp"

namespace trackadapt {

// Per-step features fed to the learned predictors:
// [x, y, w, h] / image size, then the frame-to-frame displacement of those
// normalized values multiplied by kVelocityGain.
inline constexpr int kStateFeatures = 8;
// Displacements are a few thousandths of the image per frame; the gain brings them to O(0.1).
inline constexpr double kVelocityGain = 20.0;

std::array<double, 4> normalize_box(const BoundingBox& b, ImageSize image);
BoundingBox denormalize_box(const std::array<double, 4>& n, ImageSize image);

// k x 8 row-major feature window from boxes ordered oldest -> newest. Shorter
// inputs are left-padded by repeating the oldest box. Row i's displacement is
// box_i - box_{i-1}; row 0 copies row 1's. Requires at least one box.
std::vector<double> window_features(std::span<const BoundingBox> boxes, int k, ImageSize image);

// last + delta, where delta is the network output in gain-scaled normalized units.
// Width and height are clamped to >= 0.
BoundingBox apply_delta(const BoundingBox& last, std::span<const double> delta, ImageSize image);

// Target delta that apply_delta maps back onto `next` (used for MSE supervision).
std::array<double, 4> delta_between(const BoundingBox& last, const BoundingBox& next, ImageSize image);

// FIFO of the most recent k selected boxes. Frames with an empty selection are
// not stored, so velocities are never taken across a disappearance gap.
class HistoryBank {
 public:
  struct Entry {
    std::int64_t frame = 0;
    BoundingBox box;
  };

  HistoryBank(std::size_t capacity, ImageSize image);

  // StateError unless frame is strictly greater than every frame pushed so far.
  void push(std::int64_t frame, const MaybeBox& box);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  ImageSize image() const { return image_; }
  const std::deque<Entry>& entries() const { return entries_; }
  std::vector<BoundingBox> boxes() const;
  std::optional<BoundingBox> last() const;
  void clear();

 private:
  std::size_t capacity_;
  ImageSize image_;
  std::deque<Entry> entries_;
  std::optional<std::int64_t> last_frame_;
};

}  // namespace trackadapt
