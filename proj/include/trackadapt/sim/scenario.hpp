#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trackadapt/sim/motion_script.hpp"
#include "trackadapt/trajectory.hpp"

namespace trackadapt::sim {

enum class CorruptionKind { occlusion, score_noise, jitter, swap_bias };

std::string to_string(CorruptionKind k);
CorruptionKind parse_corruption_kind(const std::string& name);  // ConfigError

// Active on frames [begin, end).
struct Corruption {
  int begin = 0;
  int end = 0;
  CorruptionKind kind = CorruptionKind::occlusion;
  double magnitude = 0.0;
};

struct EmbeddingSpec {
  int dim = 32;
  double noise = 1.0;                   // per-entry std of cell noise; object vectors have unit-variance entries
  double distractor_similarity = 0.3;  // cosine between target and distractor vectors
};

// Knobs of the candidate generator. See docs/scenario_schema.md.
struct SegmenterParams {
  double jitter = 0.02;          // bound on box offset / size change, fraction of size
  double score_noise = 0.03;     // bound on uniform noise added to s_iou
  double memory_gain = 0.5;      // s_iou penalty per unit of missing target affinity
  double distractor_gain = 0.55;  // distractor s_iou gain per unit of distractor affinity
  double part_penalty = 0.35;
  double occlusion_lure = 0.0;   // s_obj boost of distractors while the target is hidden
  int grid = 16;                 // feature grid cells per side
  int mask_scale = 4;            // mask pixels per grid cell per side
};

struct Scenario {
  std::string id;
  int frames = 0;
  ImageSize image{256.0, 256.0};
  std::uint64_t seed = 0;
  MotionScript target;
  std::vector<MotionScript> distractors;
  std::vector<Corruption> corruptions;
  EmbeddingSpec embedding;
  SegmenterParams segmenter;

  // Filled by build(): target boxes (absent while occluded), the target path
  // ignoring occlusion, and distractor boxes.
  TrajectoryAnnotation ground_truth;
  std::vector<BoundingBox> target_track;
  std::vector<std::vector<BoundingBox>> distractor_tracks;

  // Renders tracks and checks the schedule. ConfigError on any violation.
  void build();

  // Sum of the magnitudes of active corruptions of the given kind at frame t.
  double corruption(CorruptionKind kind, std::int64_t t) const;
  // Target hidden at frame t (inside any occlusion window, whatever its magnitude).
  bool occluded(std::int64_t t) const;
};

// JSON text <-> scenario. parse builds the scenario; ConfigError on schema violations.
Scenario parse_scenario(const std::string& text);
std::string scenario_to_string(const Scenario& sc);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace trackadapt::sim
