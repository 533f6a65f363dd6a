#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trackadapt/edrm.hpp"
#include "trackadapt/selector.hpp"
#include "trackadapt/sim/scenario.hpp"
#include "trackadapt/tamb.hpp"

namespace trackadapt::sim {

inline constexpr std::size_t kCandidates = 3;

enum class CandidateSource { target, distractor, part, background };
std::string to_string(CandidateSource s);

struct FrameObservation {
  std::int64_t frame = 0;
  std::vector<Candidate> candidates;  // always kCandidates
  std::array<CandidateSource, kCandidates> sources{};
  FeatureGrid features;
};

// How much the conditioning memories look like the target / a distractor:
// mean IoU of each memory's box with the object's box at that frame (an empty
// memory contributes 0 to both).
struct Affinity {
  double target = 1.0;
  double distractor = 0.0;
};

Affinity memory_affinity(const Scenario& sc, std::span<const MemoryEntry> memories);

// Stand-in for the segmentation decoder. Candidate 0 comes from the target,
// candidate 1 from the first distractor (or background), candidate 2 from the
// second distractor (or a part of the target). Scores shift with the memory
// affinity so that what the tracker remembers feeds back into what it sees.
// Every draw for frame t comes from a stream derived from (seed, t), so the
// random inputs are identical whatever the affinity.
class Segmenter {
 public:
  explicit Segmenter(const Scenario& sc);

  // DomainError if t is outside the scenario.
  FrameObservation observe(std::int64_t t, Affinity affinity = {}) const;

  const std::vector<std::vector<double>>& object_vectors() const { return vectors_; }

 private:
  const Scenario& sc_;
  std::vector<std::vector<double>> vectors_;  // target first, then distractors
};

// Mask-pooled embedding of a box on the frame's feature grid (empty if the box covers no cell).
std::vector<double> embed_box(const Scenario& sc, const FeatureGrid& features, const BoundingBox& box);

// observe() with a perfect memory (target affinity 1, distractor affinity 0).
FrameObservation generate_frame(const Scenario& sc, std::int64_t t);

}  // namespace trackadapt::sim
