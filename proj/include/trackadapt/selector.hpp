#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "trackadapt/geometry.hpp"

namespace trackadapt {

// One decoder proposal. box is nullopt for an empty mask; embedding is empty
// when no mask-pooled feature exists (empty mask).
struct Candidate {
  MaybeBox box;
  std::optional<BinaryMask> mask;
  double s_iou = 0.0;  // predicted mask quality, [0, 1]
  double s_obj = 0.0;  // visibility logit
  std::vector<double> embedding;
};

struct SelectorWeights {
  double alpha = 0.85;
  double beta_ar = 0.15;
  double beta_area = 0.10;
  double gamma = 0.15;

  // ConfigError for negative weights or an all-zero set.
  void validate() const;
  SelectorWeights scaled(double c) const { return {alpha * c, beta_ar * c, beta_area * c, gamma * c}; }
};

// beta_ar * Sim(AR) + beta_area * Sim(Area); 0 for an empty or degenerate candidate.
double geometric_score(const BoundingBox& pred, const MaybeBox& cand, const SelectorWeights& w);
// IoU between the motion prediction and the candidate; 0 for an empty candidate.
double motion_score(const BoundingBox& pred, const MaybeBox& cand);

struct Selection {
  std::size_t index = 0;
  std::vector<double> scores;  // combined score per candidate
};

// argmax of alpha * S_IoU + S_g + gamma * S_m, lowest index on ties. Without a
// prediction only S_IoU is used. DomainError for an empty candidate list.
Selection select_mask(std::span<const Candidate> candidates, const std::optional<BoundingBox>& pred,
                      const SelectorWeights& w);

}  // namespace trackadapt
