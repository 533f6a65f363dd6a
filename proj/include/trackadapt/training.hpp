#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "trackadapt/geometry.hpp"
#include "trackadapt/recurrent.hpp"
#include "trackadapt/trajectory.hpp"

namespace trackadapt {

enum class BoxLoss { iou, diou, ciou };

std::string to_string(BoxLoss l);
BoxLoss parse_box_loss(const std::string& name);

struct TrainingConfig {
  PredictorArch arch = PredictorArch::lstm;
  int context = 5;
  double lambda1 = 1.0;  // MSE weight on normalized boxes
  double lambda2 = 1.0;  // IoU-family weight on pixel boxes
  BoxLoss box_loss = BoxLoss::ciou;
  double learning_rate = 1e-3;
  int epochs = 20;
  int batch_size = 64;
  std::uint64_t seed = 1;

  // ConfigError on any invariant violation (both lambdas zero, k < 2, ...).
  void validate() const;
};

// One supervised window: up to k contiguous visible boxes and the box that follows.
struct TrainingSample {
  std::vector<double> features;  // k x 8, see window_features()
  BoundingBox last;
  BoundingBox target;
  ImageSize image;
};

// Windows never span a frame where the target is absent. Histories shorter than
// k (but at least 2 boxes) are included and left-padded like at inference time.
std::vector<TrainingSample> build_training_set(std::span<const TrajectoryAnnotation> trajectories, int context);

std::unique_ptr<SequenceNet> make_network(const TrainingConfig& cfg);

// Mean regression loss over the samples. When grad is non-empty it receives the
// (accumulated, not overwritten) gradient w.r.t. the network parameters.
// frozen_alpha, when non-empty, supplies the CIoU trade-off weight per sample
// instead of computing it from the current prediction.
double regression_loss(const SequenceNet& net, std::span<const TrainingSample> samples, const TrainingConfig& cfg,
                       std::span<double> grad = {}, std::span<const double> frozen_alpha = {});

// CIoU trade-off weights at the current parameters, one per sample.
std::vector<double> ciou_alphas(const SequenceNet& net, std::span<const TrainingSample> samples);

struct TrainingResult {
  std::unique_ptr<SequenceNet> net;
  std::vector<double> epoch_loss;  // mean loss over the epoch's mini-batches
};

// Adam on lambda1 * MSE + lambda2 * box loss. Deterministic for a given
// (samples, cfg). Throws ConfigError on an empty set and NumericalError on a
// non-finite loss.
TrainingResult train_mp(std::span<const TrainingSample> samples, const TrainingConfig& cfg);

// Box predicted for each sample by the network.
BoundingBox predict_sample(const SequenceNet& net, const TrainingSample& s);

}  // namespace trackadapt
