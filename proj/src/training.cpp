#include "trackadapt/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "trackadapt/errors.hpp"
#include "trackadapt/history_bank.hpp"
#include "trackadapt/rng.hpp"

namespace trackadapt {

std::string to_string(BoxLoss l) {
  switch (l) {
    case BoxLoss::iou: return "iou";
    case BoxLoss::diou: return "diou";
    case BoxLoss::ciou: return "ciou";
  }
  return "unknown";
}

BoxLoss parse_box_loss(const std::string& name) {
  if (name == "iou") return BoxLoss::iou;
  if (name == "diou") return BoxLoss::diou;
  if (name == "ciou") return BoxLoss::ciou;
  throw ConfigError("unknown box loss '" + name + "' (expected iou|diou|ciou)");
}

void TrainingConfig::validate() const {
  if (arch != PredictorArch::mlp && arch != PredictorArch::lstm) {
    throw ConfigError("only mlp and lstm predictors are trainable");
  }
  if (context < 2) throw ConfigError("context length k must be at least 2");
  if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0)) throw ConfigError("loss weights must be non-negative");
  if (lambda1 == 0.0 && lambda2 == 0.0) throw ConfigError("lambda1 and lambda2 cannot both be zero");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
}

std::vector<TrainingSample> build_training_set(std::span<const TrajectoryAnnotation> trajectories, int context) {
  std::vector<TrainingSample> out;
  for (const auto& traj : trajectories) {
    std::size_t run = 0;  // contiguous visible frames ending at t-1
    for (std::size_t t = 0; t < traj.frames.size(); ++t) {
      if (!traj.frames[t]) {
        run = 0;
        continue;
      }
      if (run >= 2) {
        const std::size_t n = std::min<std::size_t>(run, static_cast<std::size_t>(context));
        std::vector<BoundingBox> hist;
        hist.reserve(n);
        for (std::size_t i = t - n; i < t; ++i) hist.push_back(*traj.frames[i]);
        out.push_back({window_features(hist, context, traj.image), hist.back(), *traj.frames[t], traj.image});
      }
      ++run;
    }
  }
  return out;
}

std::unique_ptr<SequenceNet> make_network(const TrainingConfig& cfg) {
  switch (cfg.arch) {
    case PredictorArch::lstm: return std::make_unique<LstmPredictor>(cfg.context);
    case PredictorArch::mlp: return std::make_unique<MlpPredictor>(cfg.context);
    default: throw ConfigError("only mlp and lstm predictors are trainable");
  }
}

namespace {

Eigen::MatrixXd stack_inputs(std::span<const TrainingSample> samples) {
  const Eigen::Index rows = static_cast<Eigen::Index>(samples.front().features.size());
  Eigen::MatrixXd in(rows, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t j = 0; j < samples.size(); ++j) {
    in.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(samples[j].features.data(), rows);
  }
  return in;
}

// Clamp predicted sizes for the box loss; clamped components get no gradient.
constexpr double kMinLossSize = 1e-6;

struct SampleLoss {
  double value = 0.0;
  std::array<double, 4> d_out{};  // d(value) / d(network output)
};

SampleLoss sample_loss(const TrainingSample& s, std::span<const double> out, const TrainingConfig& cfg,
                       const double* frozen_alpha) {
  SampleLoss r;
  const auto last_n = normalize_box(s.last, s.image);
  const auto gt_n = normalize_box(s.target, s.image);
  std::array<double, 4> pred_n{};
  for (int c = 0; c < 4; ++c) pred_n[c] = last_n[c] + out[c] / kVelocityGain;

  if (cfg.lambda1 > 0.0) {
    for (int c = 0; c < 4; ++c) {
      const double d = pred_n[c] - gt_n[c];
      r.value += cfg.lambda1 * d * d / 4.0;
      r.d_out[c] += cfg.lambda1 * 2.0 * d / 4.0 / kVelocityGain;
    }
  }
  if (cfg.lambda2 > 0.0) {
    const double scale[4] = {s.image.width, s.image.height, s.image.width, s.image.height};
    double px[4];
    bool clamped[4] = {false, false, false, false};
    for (int c = 0; c < 4; ++c) px[c] = pred_n[c] * scale[c];
    for (int c = 2; c < 4; ++c) {
      if (px[c] < kMinLossSize) {
        px[c] = kMinLossSize;
        clamped[c] = true;
      }
    }
    const BoundingBox pred(px[0], px[1], px[2], px[3]);
    LossValue lv;
    switch (cfg.box_loss) {
      case BoxLoss::iou: lv = iou_loss_grad(pred, s.target); break;
      case BoxLoss::diou: lv = diou_loss_grad(pred, s.target); break;
      case BoxLoss::ciou:
        lv = frozen_alpha ? ciou_loss_grad(pred, s.target, *frozen_alpha) : ciou_loss_grad(pred, s.target);
        break;
    }
    r.value += cfg.lambda2 * lv.value;
    for (int c = 0; c < 4; ++c) {
      if (clamped[c]) continue;
      r.d_out[c] += cfg.lambda2 * lv.grad[c] * scale[c] / kVelocityGain;
    }
  }
  return r;
}

}  // namespace

double regression_loss(const SequenceNet& net, std::span<const TrainingSample> samples, const TrainingConfig& cfg,
                       std::span<double> grad, std::span<const double> frozen_alpha) {
  if (samples.empty()) return 0.0;
  if (!frozen_alpha.empty() && frozen_alpha.size() != samples.size()) {
    throw DomainError("frozen alpha count does not match the sample count");
  }
  const Eigen::MatrixXd in = stack_inputs(samples);
  std::unique_ptr<SequenceNet::Cache> cache;
  const Eigen::MatrixXd out = net.forward_train(in, cache);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  Eigen::MatrixXd d_out(4, out.cols());
  double total = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const Eigen::Index col = static_cast<Eigen::Index>(j);
    const double o[4] = {out(0, col), out(1, col), out(2, col), out(3, col)};
    const SampleLoss sl =
        sample_loss(samples[j], o, cfg, frozen_alpha.empty() ? nullptr : &frozen_alpha[j]);
    total += sl.value;
    for (int c = 0; c < 4; ++c) d_out(c, col) = sl.d_out[c] * inv_n;
  }
  if (!grad.empty()) net.backward(*cache, d_out, grad);
  return total * inv_n;
}

std::vector<double> ciou_alphas(const SequenceNet& net, std::span<const TrainingSample> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const BoundingBox pred = predict_sample(net, s);
    const BoundingBox clamped(pred.cx(), pred.cy(), std::max(pred.w(), kMinLossSize), std::max(pred.h(), kMinLossSize));
    out.push_back(ciou_alpha(clamped, s.target));
  }
  return out;
}

BoundingBox predict_sample(const SequenceNet& net, const TrainingSample& s) {
  const auto delta = net.predict_delta(s.features);
  return apply_delta(s.last, delta, s.image);
}

TrainingResult train_mp(std::span<const TrainingSample> samples, const TrainingConfig& cfg) {
  cfg.validate();
  if (samples.empty()) throw ConfigError("training set is empty");
  for (const auto& s : samples) {
    if (s.features.size() != static_cast<std::size_t>(cfg.context * kStateFeatures)) {
      throw ConfigError("training window length does not match the configured context");
    }
  }

  TrainingResult result;
  result.net = make_network(cfg);
  result.net->initialize(cfg.seed);
  SequenceNet& net = *result.net;
  const std::size_t n_params = net.parameter_count();

  // Adam state
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  std::vector<double> m(n_params, 0.0), v(n_params, 0.0), grad(n_params, 0.0);
  std::int64_t step = 0;

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed ^ 0x5DEECE66DULL);
  std::vector<TrainingSample> batch;
  batch.reserve(static_cast<std::size_t>(cfg.batch_size));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    double epoch_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(samples[order[i]]);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double loss = regression_loss(net, batch, cfg, grad);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite training loss at epoch " << epoch << ", batch starting at " << start;
        throw NumericalError(msg.str());
      }
      epoch_sum += loss * static_cast<double>(end - start);

      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      auto p = net.parameters();
      for (std::size_t j = 0; j < n_params; ++j) {
        m[j] = kBeta1 * m[j] + (1.0 - kBeta1) * grad[j];
        v[j] = kBeta2 * v[j] + (1.0 - kBeta2) * grad[j] * grad[j];
        p[j] -= cfg.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + kEps);
      }
    }
    result.epoch_loss.push_back(epoch_sum / static_cast<double>(samples.size()));
  }
  return result;
}

}  // namespace trackadapt
