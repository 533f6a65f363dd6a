#include "trackadapt/eval/metrics.hpp"

#include <cmath>

#include "trackadapt/errors.hpp"

namespace trackadapt::eval {

std::size_t SequenceResult::visible_count() const {
  std::size_t n = 0;
  for (const auto& g : ground_truth) n += g ? 1 : 0;
  return n;
}

void SequenceResult::validate() const {
  if (predictions.size() != ground_truth.size()) {
    throw DomainError("sequence '" + id + "': " + std::to_string(predictions.size()) + " predictions for " +
                      std::to_string(ground_truth.size()) + " ground-truth frames");
  }
}

namespace {

std::size_t require_visible(const SequenceResult& r) {
  r.validate();
  const std::size_t n = r.visible_count();
  if (n == 0) throw DomainError("sequence '" + r.id + "' has no visible frame");
  return n;
}

double threshold(std::size_t i) { return static_cast<double>(i) / static_cast<double>(kThresholds - 1); }

template <typename F>
double mean_over(std::span<const SequenceResult> rs, F&& f) {
  if (rs.empty()) throw DomainError("no sequences to evaluate");
  double sum = 0.0;
  for (const auto& r : rs) sum += f(r);
  return sum / static_cast<double>(rs.size());
}

}  // namespace

std::array<double, kThresholds> success_curve(const SequenceResult& r) {
  const std::size_t n = require_visible(r);
  std::array<double, kThresholds> counts{};
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (!r.ground_truth[t]) continue;
    const double o = iou(r.predictions[t], r.ground_truth[t]);
    for (std::size_t i = 0; i < kThresholds; ++i) {
      if (o > threshold(i)) counts[i] += 1.0;
    }
  }
  for (double& c : counts) c /= static_cast<double>(n);
  return counts;
}

// Area under the success curve as a left Riemann sum with step 0.01. The point
// at tau = 1 is always 0 under the strict test, so a perfect run scores 100.
double success_auc(const SequenceResult& r) {
  const auto curve = success_curve(r);
  double sum = 0.0;
  for (double c : curve) sum += c;
  return 100.0 * sum / static_cast<double>(kThresholds - 1);
}

double precision(const SequenceResult& r, double pixel_thresh) {
  const std::size_t n = require_visible(r);
  std::size_t hit = 0;
  for (std::size_t t = 0; t < r.size(); ++t) {
    const auto& g = r.ground_truth[t];
    const auto& p = r.predictions[t];
    if (!g || !p) continue;
    if (std::hypot(p->cx() - g->cx(), p->cy() - g->cy()) <= pixel_thresh) ++hit;
  }
  return 100.0 * static_cast<double>(hit) / static_cast<double>(n);
}

double norm_precision(const SequenceResult& r, double thresh) {
  const std::size_t n = require_visible(r);
  std::size_t hit = 0;
  for (std::size_t t = 0; t < r.size(); ++t) {
    const auto& g = r.ground_truth[t];
    const auto& p = r.predictions[t];
    if (!g || !p || g->degenerate()) continue;
    if (std::hypot((p->cx() - g->cx()) / g->w(), (p->cy() - g->cy()) / g->h()) <= thresh) ++hit;
  }
  return 100.0 * static_cast<double>(hit) / static_cast<double>(n);
}

double acc(const SequenceResult& r) {
  r.validate();
  if (r.size() == 0) throw DomainError("sequence '" + r.id + "' is empty");
  double sum = 0.0;
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (r.ground_truth[t]) {
      sum += iou(r.predictions[t], r.ground_truth[t]);
    } else {
      sum += r.predictions[t] ? 0.0 : 1.0;
    }
  }
  return 100.0 * sum / static_cast<double>(r.size());
}

double success_auc(std::span<const SequenceResult> rs) {
  return mean_over(rs, [](const SequenceResult& r) { return success_auc(r); });
}
double precision(std::span<const SequenceResult> rs, double pixel_thresh) {
  return mean_over(rs, [&](const SequenceResult& r) { return precision(r, pixel_thresh); });
}
double norm_precision(std::span<const SequenceResult> rs, double thresh) {
  return mean_over(rs, [&](const SequenceResult& r) { return norm_precision(r, thresh); });
}
double acc(std::span<const SequenceResult> rs) {
  return mean_over(rs, [](const SequenceResult& r) { return acc(r); });
}

SequenceMetrics evaluate(const SequenceResult& r) {
  return {r.id, acc(r), precision(r), norm_precision(r), success_auc(r), r.size()};
}

SequenceMetrics aggregate(std::span<const SequenceMetrics> ms) {
  SequenceMetrics a;
  a.id = "ALL";
  if (ms.empty()) return a;
  for (const auto& m : ms) {
    a.acc += m.acc;
    a.precision += m.precision;
    a.norm_precision += m.norm_precision;
    a.auc += m.auc;
    a.frames += m.frames;
  }
  const double n = static_cast<double>(ms.size());
  a.acc /= n;
  a.precision /= n;
  a.norm_precision /= n;
  a.auc /= n;
  return a;
}

std::array<double, kThresholds> mean_success_curve(std::span<const SequenceResult> rs) {
  std::array<double, kThresholds> out{};
  if (rs.empty()) return out;
  for (const auto& r : rs) {
    const auto c = success_curve(r);
    for (std::size_t i = 0; i < kThresholds; ++i) out[i] += c[i];
  }
  for (double& v : out) v /= static_cast<double>(rs.size());
  return out;
}

}  // namespace trackadapt::eval
