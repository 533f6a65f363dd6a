#include "trackadapt/edrm.hpp"

#include <cmath>
#include <string>

#include "trackadapt/errors.hpp"

namespace trackadapt {

std::optional<std::vector<double>> masked_embedding(const FeatureGrid& features, const BinaryMask& mask) {
  if (features.width == 0 || features.height == 0 || features.dim == 0 ||
      features.data.size() != features.width * features.height * features.dim) {
    throw DomainError("feature grid size does not match its dimensions");
  }
  if (mask.width() < features.width || mask.height() < features.height) {
    throw DomainError("mask " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()) +
                      " is smaller than the feature grid " + std::to_string(features.width) + "x" +
                      std::to_string(features.height));
  }
  std::vector<std::uint8_t> cells(features.width * features.height, 0);
  for (std::size_t y = 0; y < mask.height(); ++y) {
    const std::size_t gy = y * features.height / mask.height();
    for (std::size_t x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) cells[gy * features.width + x * features.width / mask.width()] = 1;
    }
  }
  std::vector<double> sum(features.dim, 0.0);
  std::size_t n = 0;
  for (std::size_t gy = 0; gy < features.height; ++gy) {
    for (std::size_t gx = 0; gx < features.width; ++gx) {
      if (!cells[gy * features.width + gx]) continue;
      const auto v = features.cell(gx, gy);
      for (std::size_t i = 0; i < features.dim; ++i) sum[i] += v[i];
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  for (double& s : sum) s /= static_cast<double>(n);
  return sum;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("cosine similarity of vectors with different lengths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void EdrmConfig::validate() const {
  for (double v : {sigma_ar, sigma_a, sigma_s, tau_ar, tau_a, tau_s}) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("EDRM thresholds must lie in [0, 1]");
  }
  if (window < 1) throw ConfigError("EDRM prototype window must be at least 1");
}

TargetPrototype::TargetPrototype(int window) : window_(window) {
  if (window < 1) throw ConfigError("prototype window must be at least 1");
}

void TargetPrototype::push(const BoundingBox& box, std::span<const double> embedding) {
  if (frozen_) return;
  if (!embs_.empty() && embedding.size() != embs_.front().size()) {
    throw DomainError("embedding length changed from " + std::to_string(embs_.front().size()) + " to " +
                      std::to_string(embedding.size()));
  }
  boxes_.push_back(box);
  embs_.emplace_back(embedding.begin(), embedding.end());
  while (boxes_.size() > static_cast<std::size_t>(window_)) {
    boxes_.pop_front();
    embs_.pop_front();
  }
  recompute();
}

void TargetPrototype::recompute() {
  mean_emb_.assign(embs_.front().size(), 0.0);
  for (const auto& e : embs_) {
    for (std::size_t i = 0; i < e.size(); ++i) mean_emb_[i] += e[i];
  }
  for (double& v : mean_emb_) v /= static_cast<double>(embs_.size());
}

BoundingBox TargetPrototype::mean_box() const {
  if (boxes_.empty()) throw StateError("prototype is empty");
  double cx = 0, cy = 0, w = 0, h = 0;
  for (const auto& b : boxes_) {
    cx += b.cx();
    cy += b.cy();
    w += b.w();
    h += b.h();
  }
  const double n = static_cast<double>(boxes_.size());
  return BoundingBox(cx / n, cy / n, w / n, h / n);
}

Similarity prototype_similarity(const TargetPrototype& tp, const MaybeBox& box, std::span<const double> embedding) {
  Similarity s;
  if (box) {
    const ShapeSimilarity g = shape_similarity(*box, tp.mean_box());
    s.ar = g.aspect;
    s.area = g.area;
  }
  if (!embedding.empty()) s.semantic = cosine_similarity(embedding, tp.mean_embedding());
  return s;
}

Edrm::Edrm(EdrmConfig cfg) : cfg_(cfg), proto_(cfg.window) { cfg_.validate(); }

DetectResult Edrm::detect(const MaybeBox& box, std::span<const double> embedding) {
  if (mode_ != EdrmMode::detect) throw StateError("detect called in recover mode");
  DetectResult r;
  const bool reliable = box && !box->degenerate() && !embedding.empty();
  if (!proto_.full()) {
    if (reliable) proto_.push(*box, embedding);
    return r;
  }
  r.armed = true;
  if (reliable) r.scores = prototype_similarity(proto_, box, embedding);
  r.flagged = !reliable || r.scores.ar < cfg_.sigma_ar || r.scores.area < cfg_.sigma_a ||
              r.scores.semantic < cfg_.sigma_s;
  if (r.flagged) {
    proto_.freeze();
    mode_ = EdrmMode::recover;
  } else {
    proto_.push(*box, embedding);
  }
  return r;
}

std::optional<std::size_t> Edrm::try_recover(std::span<const Candidate> candidates) {
  if (mode_ != EdrmMode::recover) throw StateError("try_recover called in detect mode");
  std::optional<std::size_t> best;
  double best_sum = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Candidate& c = candidates[i];
    if (!c.box || c.box->degenerate() || c.embedding.empty()) continue;
    const Similarity s = prototype_similarity(proto_, c.box, c.embedding);
    if (!(s.ar > cfg_.tau_ar && s.area > cfg_.tau_a && s.semantic > cfg_.tau_s)) continue;
    if (!best || s.sum() > best_sum) {
      best = i;
      best_sum = s.sum();
    }
  }
  if (best) {
    proto_.unfreeze();
    mode_ = EdrmMode::detect;
    proto_.push(*candidates[*best].box, candidates[*best].embedding);
  }
  return best;
}

}  // namespace trackadapt
