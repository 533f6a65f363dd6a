#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trackadapt/geometry.hpp"

namespace trackadapt {

struct MemoryEntry {
  std::int64_t frame = 0;
  MaybeBox box;
  double s_iou = 0.0;
  double s_obj = 0.0;  // logit
  double s_m = 0.0;
  bool prompted = false;
};

struct TambConfig {
  int pool_size = 30;  // M
  int slots = 6;       // N_m
  double mu_iou = 0.50;
  double mu_obj = 0.50;  // applied to sigmoid(s_obj)
  double mu_m = 0.00;
  double delta = 1.0;
  double epsilon = 1.0;
  double zeta = 1.0;

  void validate() const;  // ConfigError
};

double sigmoid(double x);

// delta * s_iou + epsilon * sigmoid(s_obj) + zeta * s_m
double tamb_score(const MemoryEntry& e, const TambConfig& cfg);

// Non-empty box and every score at or above its threshold.
bool admissible(const MemoryEntry& e, const TambConfig& cfg);

// Frame indices (ascending) of the memories to condition on: the prompted
// frame, the most recent frame, and the N_m - 1 best-scoring admissible frames
// found walking backward from just before the most recent one (at most M are
// examined for ranking; ties go to the later frame). History must be ordered
// by strictly increasing frame. DomainError for an empty or unordered history,
// StateError if no entry or more than one entry is prompted.
std::vector<std::int64_t> select_memories(std::span<const MemoryEntry> history, const TambConfig& cfg);

// FIFO reference policy: the prompted frame plus the N_m most recent frames.
std::vector<std::int64_t> baseline_fifo(std::span<const MemoryEntry> history, int slots);

}  // namespace trackadapt
