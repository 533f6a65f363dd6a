#include "trackadapt/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "trackadapt/errors.hpp"

namespace trackadapt {

std::size_t TrajectoryAnnotation::visible_count() const {
  return static_cast<std::size_t>(std::count_if(frames.begin(), frames.end(), [](const MaybeBox& b) { return b.has_value(); }));
}

void TrajectoryAnnotation::validate() const {
  if (visible_count() == 0) throw DomainError("trajectory '" + id + "' has no visible frame");
  if (!(image.width > 0.0) || !(image.height > 0.0)) {
    throw DomainError("trajectory '" + id + "' has no positive image size");
  }
}

ImageSize extent_of(const std::vector<MaybeBox>& frames) {
  double w = 1.0, h = 1.0;
  for (const auto& b : frames) {
    if (!b) continue;
    w = std::max(w, b->right());
    h = std::max(h, b->bottom());
  }
  return {std::ceil(w), std::ceil(h)};
}

}  // namespace trackadapt
