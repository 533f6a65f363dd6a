#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "trackadapt/geometry.hpp"

namespace trackadapt::eval {

inline constexpr std::size_t kThresholds = 101;  // IoU thresholds 0, 0.01, ..., 1

// Predictions and ground truth of one sequence. A frame is visible iff its
// ground truth is present.
struct SequenceResult {
  std::string id;
  std::vector<MaybeBox> predictions;
  std::vector<MaybeBox> ground_truth;

  std::size_t size() const { return ground_truth.size(); }
  std::size_t visible_count() const;
  void validate() const;  // DomainError if the lengths differ
};

// Fraction of visible frames with IoU > tau for each grid threshold.
std::array<double, kThresholds> success_curve(const SequenceResult& r);

// Per-sequence scores in percent. The first three need a visible frame (DomainError otherwise).
// success_auc integrates the success curve over tau in [0, 1] with step 0.01.
double success_auc(const SequenceResult& r);
double precision(const SequenceResult& r, double pixel_thresh = 20.0);
double norm_precision(const SequenceResult& r, double thresh = 0.2);
// Visible frames score their IoU, invisible frames score 1 for an empty prediction and 0 otherwise.
double acc(const SequenceResult& r);

// Means of the per-sequence scores.
double success_auc(std::span<const SequenceResult> rs);
double precision(std::span<const SequenceResult> rs, double pixel_thresh = 20.0);
double norm_precision(std::span<const SequenceResult> rs, double thresh = 0.2);
double acc(std::span<const SequenceResult> rs);

struct SequenceMetrics {
  std::string id;
  double acc = 0.0;
  double precision = 0.0;
  double norm_precision = 0.0;
  double auc = 0.0;
  std::size_t frames = 0;
};

SequenceMetrics evaluate(const SequenceResult& r);
// Mean of every metric column; id "ALL", frames summed.
SequenceMetrics aggregate(std::span<const SequenceMetrics> ms);

// Success curve averaged over sequences.
std::array<double, kThresholds> mean_success_curve(std::span<const SequenceResult> rs);

}  // namespace trackadapt::eval
