#include "trackadapt/selector.hpp"

#include "trackadapt/errors.hpp"

namespace trackadapt {

void SelectorWeights::validate() const {
  if (!(alpha >= 0.0) || !(beta_ar >= 0.0) || !(beta_area >= 0.0) || !(gamma >= 0.0)) {
    throw ConfigError("selector weights must be non-negative");
  }
  if (alpha + beta_ar + beta_area + gamma <= 0.0) throw ConfigError("selector weights cannot all be zero");
}

double geometric_score(const BoundingBox& pred, const MaybeBox& cand, const SelectorWeights& w) {
  if (!cand) return 0.0;
  const ShapeSimilarity s = shape_similarity(pred, *cand);
  return w.beta_ar * s.aspect + w.beta_area * s.area;
}

double motion_score(const BoundingBox& pred, const MaybeBox& cand) {
  if (!cand) return 0.0;
  return iou(pred, *cand);
}

Selection select_mask(std::span<const Candidate> candidates, const std::optional<BoundingBox>& pred,
                      const SelectorWeights& w) {
  if (candidates.empty()) throw DomainError("select_mask needs at least one candidate");
  Selection sel;
  sel.scores.reserve(candidates.size());
  for (const auto& c : candidates) {
    double s = pred ? w.alpha * c.s_iou : c.s_iou;
    if (pred) s += geometric_score(*pred, c.box, w) + w.gamma * motion_score(*pred, c.box);
    sel.scores.push_back(s);
  }
  for (std::size_t i = 1; i < sel.scores.size(); ++i) {
    if (sel.scores[i] > sel.scores[sel.index]) sel.index = i;
  }
  return sel;
}

}  // namespace trackadapt
