#pragma once

#include <string>
#include <vector>

#include "trackadapt/geometry.hpp"

namespace trackadapt {

struct ImageSize {
  double width = 0.0;
  double height = 0.0;
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

// Per-frame ground truth of one sequence; nullopt marks frames where the target is invisible.
struct TrajectoryAnnotation {
  std::string id;
  ImageSize image;
  std::vector<MaybeBox> frames;

  std::size_t size() const { return frames.size(); }
  std::size_t visible_count() const;
  // Throws DomainError unless at least one box is present and the image size is positive.
  void validate() const;
};

// Image size covering every present box (rounded up), used when a format carries none.
ImageSize extent_of(const std::vector<MaybeBox>& frames);

}  // namespace trackadapt
