#include "trackadapt/history_bank.hpp"

#include <algorithm>
#include <string>

#include "trackadapt/errors.hpp"

namespace trackadapt {

std::array<double, 4> normalize_box(const BoundingBox& b, ImageSize image) {
  return {b.cx() / image.width, b.cy() / image.height, b.w() / image.width, b.h() / image.height};
}

BoundingBox denormalize_box(const std::array<double, 4>& n, ImageSize image) {
  return BoundingBox(n[0] * image.width, n[1] * image.height, std::max(n[2] * image.width, 0.0),
                     std::max(n[3] * image.height, 0.0));
}

std::vector<double> window_features(std::span<const BoundingBox> boxes, int k, ImageSize image) {
  if (boxes.empty()) throw DomainError("feature window needs at least one box");
  if (k < 1) throw DomainError("feature window length must be positive");
  const std::size_t n = static_cast<std::size_t>(k);
  std::vector<std::array<double, 4>> rows(n);
  const std::size_t have = std::min(n, boxes.size());
  const std::size_t pad = n - have;
  const auto first = boxes.end() - static_cast<std::ptrdiff_t>(have);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = normalize_box(i < pad ? *first : *(first + static_cast<std::ptrdiff_t>(i - pad)), image);
  }
  std::vector<double> out(n * kStateFeatures, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.data() + i * kStateFeatures;
    std::copy(rows[i].begin(), rows[i].end(), row);
    const std::size_t j = i == 0 ? std::min<std::size_t>(1, n - 1) : i;
    if (j == 0) continue;
    for (int c = 0; c < 4; ++c) row[4 + c] = kVelocityGain * (rows[j][c] - rows[j - 1][c]);
  }
  return out;
}

BoundingBox apply_delta(const BoundingBox& last, std::span<const double> delta, ImageSize image) {
  auto n = normalize_box(last, image);
  for (int c = 0; c < 4; ++c) n[c] += delta[c] / kVelocityGain;
  return denormalize_box(n, image);
}

std::array<double, 4> delta_between(const BoundingBox& last, const BoundingBox& next, ImageSize image) {
  const auto a = normalize_box(last, image);
  const auto b = normalize_box(next, image);
  return {kVelocityGain * (b[0] - a[0]), kVelocityGain * (b[1] - a[1]), kVelocityGain * (b[2] - a[2]),
          kVelocityGain * (b[3] - a[3])};
}

HistoryBank::HistoryBank(std::size_t capacity, ImageSize image) : capacity_(capacity), image_(image) {
  if (capacity == 0) throw ConfigError("history bank capacity must be positive");
  if (!(image.width > 0.0) || !(image.height > 0.0)) throw ConfigError("history bank needs a positive image size");
}

void HistoryBank::push(std::int64_t frame, const MaybeBox& box) {
  if (last_frame_ && frame <= *last_frame_) {
    throw StateError("history frame index " + std::to_string(frame) + " is not after " +
                     std::to_string(*last_frame_));
  }
  last_frame_ = frame;
  if (!box) return;
  entries_.push_back({frame, *box});
  while (entries_.size() > capacity_) entries_.pop_front();
}

std::vector<BoundingBox> HistoryBank::boxes() const {
  std::vector<BoundingBox> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.box);
  return out;
}

std::optional<BoundingBox> HistoryBank::last() const {
  if (entries_.empty()) return std::nullopt;
  return entries_.back().box;
}

void HistoryBank::clear() {
  entries_.clear();
  last_frame_.reset();
}

}  // namespace trackadapt
