#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trackadapt/config.hpp"
#include "trackadapt/edrm.hpp"
#include "trackadapt/recurrent.hpp"
#include "trackadapt/sim/scenario.hpp"
#include "trackadapt/sim/segmenter.hpp"

namespace trackadapt::sim {

struct CandidateTrace {
  MaybeBox box;
  double s_iou = 0.0;
  double s_obj = 0.0;
  CandidateSource source = CandidateSource::target;
};

// Everything decided at one frame, enough to replay it offline.
struct FrameTrace {
  std::int64_t frame = 0;
  MaybeBox ground_truth;
  MaybeBox prediction;  // motion predictor output (absent when MP is off)
  Affinity affinity;
  std::vector<CandidateTrace> candidates;
  std::vector<double> scores;
  std::size_t selected = 0;  // selector argmax
  EdrmMode mode_before = EdrmMode::detect;
  EdrmMode mode_after = EdrmMode::detect;
  DetectResult detect;
  std::optional<std::size_t> recovered;
  std::size_t chosen = 0;  // after any EDRM override
  MaybeBox output;
  std::vector<std::int64_t> memory;  // memory frames conditioning the next frame
  // Prototype window contents at the end of the frame.
  std::vector<BoundingBox> prototype_boxes;
  std::vector<std::vector<double>> prototype_embeddings;
};

struct TrackResult {
  std::string id;
  std::vector<MaybeBox> outputs;
  std::vector<FrameTrace> trace;

  std::size_t flag_count() const;
};

// Full per-frame loop. Frame 0 is the prompt and outputs the ground-truth box.
// Then: MP predict, select_mask, EDRM detect (with a same-frame recovery
// attempt on a flag, or a recovery attempt every frame while recovering),
// output (empty if the chosen candidate's s_obj < 0 and it was not a
// recovery), history/prototype/memory updates, memory selection for the next
// frame. Module errors are rethrown with the scenario id and frame index.
TrackResult run_tracker(const Scenario& sc, const TrackerConfig& cfg, std::shared_ptr<const SequenceNet> net = nullptr);

// Mean IoU of the output over visible frames after the prompt.
double mean_output_iou(const TrackResult& r, const Scenario& sc);

// One JSON object per frame, newline-terminated.
std::string trace_to_jsonl(const TrackResult& r);

}  // namespace trackadapt::sim
