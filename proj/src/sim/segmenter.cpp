#include "trackadapt/sim/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trackadapt/errors.hpp"
#include "trackadapt/rng.hpp"

namespace trackadapt::sim {

std::string to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::target: return "target";
    case CandidateSource::distractor: return "distractor";
    case CandidateSource::part: return "part";
    case CandidateSource::background: return "background";
  }
  return "unknown";
}

Affinity memory_affinity(const Scenario& sc, std::span<const MemoryEntry> memories) {
  Affinity a{0.0, 0.0};
  if (memories.empty()) return {};
  for (const auto& m : memories) {
    if (!m.box || m.frame < 0 || m.frame >= sc.frames) continue;
    const auto f = static_cast<std::size_t>(m.frame);
    a.target += iou(*m.box, sc.ground_truth.frames[f]);
    double best = 0.0;
    for (const auto& d : sc.distractor_tracks) best = std::max(best, iou(*m.box, d[f]));
    a.distractor += best;
  }
  const double n = static_cast<double>(memories.size());
  a.target /= n;
  a.distractor /= n;
  return a;
}

namespace {

constexpr std::uint64_t kVectorStream = 0xE3B0C442ULL;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

BoundingBox jitter_box(const BoundingBox& b, double amp, Rng& rng) {
  const double dx = rng.uniform(-amp, amp) * b.w();
  const double dy = rng.uniform(-amp, amp) * b.h();
  const double sw = 1.0 + rng.uniform(-amp, amp);
  const double sh = 1.0 + rng.uniform(-amp, amp);
  return BoundingBox(b.cx() + dx, b.cy() + dy, b.w() * std::max(sw, 0.05), b.h() * std::max(sh, 0.05));
}

// Upper half of the object.
BoundingBox part_of(const BoundingBox& b) { return BoundingBox(b.cx(), b.cy() - 0.25 * b.h(), b.w(), 0.5 * b.h()); }

}  // namespace

Segmenter::Segmenter(const Scenario& sc) : sc_(sc) {
  Rng rng = Rng::derive(sc.seed, kVectorStream);
  const auto dim = static_cast<std::size_t>(sc.embedding.dim);
  std::vector<double> target(dim);
  for (double& v : target) v = rng.normal();
  vectors_.push_back(target);
  const double rho = sc.embedding.distractor_similarity;
  const double tn = std::sqrt(std::inner_product(target.begin(), target.end(), target.begin(), 0.0));
  for (std::size_t d = 0; d < sc.distractors.size(); ++d) {
    // Gram-Schmidt a random vector against the target, then mix to the requested cosine.
    std::vector<double> u(dim);
    for (double& v : u) v = rng.normal();
    const double proj = std::inner_product(u.begin(), u.end(), target.begin(), 0.0) / (tn * tn);
    for (std::size_t i = 0; i < dim; ++i) u[i] -= proj * target[i];
    const double un = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
    std::vector<double> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = rho * target[i] + std::sqrt(1.0 - rho * rho) * u[i] * tn / un;
    vectors_.push_back(std::move(out));
  }
}

FrameObservation Segmenter::observe(std::int64_t t, Affinity aff) const {
  if (t < 0 || t >= sc_.frames) {
    throw DomainError("frame " + std::to_string(t) + " is outside scenario '" + sc_.id + "'");
  }
  const auto ft = static_cast<std::size_t>(t);
  const SegmenterParams& p = sc_.segmenter;
  Rng rng = Rng::derive(sc_.seed, static_cast<std::uint64_t>(t) + 1);
  const bool hidden = sc_.occluded(t);
  const BoundingBox& truth = sc_.target_track[ft];

  FrameObservation obs;
  obs.frame = t;

  // Feature grid: object vector plus noise on cells whose centre lies in an
  // object's box (target drawn last, so on top), noise only elsewhere.
  const auto g = static_cast<std::size_t>(p.grid);
  const auto dim = static_cast<std::size_t>(sc_.embedding.dim);
  obs.features = FeatureGrid{g, g, dim, std::vector<double>(g * g * dim)};
  for (std::size_t y = 0; y < g; ++y) {
    const double py = (static_cast<double>(y) + 0.5) * sc_.image.height / static_cast<double>(g);
    for (std::size_t x = 0; x < g; ++x) {
      const double px = (static_cast<double>(x) + 0.5) * sc_.image.width / static_cast<double>(g);
      const std::vector<double>* owner = nullptr;
      for (std::size_t d = 0; d < sc_.distractor_tracks.size(); ++d) {
        const BoundingBox& b = sc_.distractor_tracks[d][ft];
        if (px >= b.left() && px < b.right() && py >= b.top() && py < b.bottom()) owner = &vectors_[d + 1];
      }
      if (!hidden && px >= truth.left() && px < truth.right() && py >= truth.top() && py < truth.bottom()) {
        owner = &vectors_[0];
      }
      double* cell = obs.features.data.data() + (y * g + x) * dim;
      for (std::size_t i = 0; i < dim; ++i) {
        cell[i] = (owner ? (*owner)[i] : 0.0) + sc_.embedding.noise * rng.normal();
      }
    }
  }

  auto embed = [&](const BoundingBox& b) { return embed_box(sc_, obs.features, b); };

  const double score_corr = sc_.corruption(CorruptionKind::score_noise, t);
  const double jitter_corr = sc_.corruption(CorruptionKind::jitter, t);
  const double swap = sc_.corruption(CorruptionKind::swap_bias, t);
  const double missing = 1.0 - std::clamp(aff.target, 0.0, 1.0);
  const double lure = hidden ? p.occlusion_lure : 0.0;

  // Fixed draw order per candidate so the stream never depends on the branch taken.
  struct Draws {
    double noise, corr, obj;
  };
  auto draws = [&]() {
    Draws d{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5)};
    return d;
  };

  // Candidate 0: the target.
  {
    const double amp = p.jitter + jitter_corr + 0.05 * p.memory_gain * missing;
    Rng jr = Rng::derive(rng.next(), 0);
    const Draws d = draws();
    Candidate c;
    if (hidden) {
      c.s_iou = clamp01(0.05 + 0.05 * d.noise);
      c.s_obj = -3.0 + d.obj;
    } else {
      const BoundingBox b = jitter_box(truth, amp, jr);
      c.box = b;
      c.s_iou = clamp01(iou(b, truth) + p.score_noise * d.noise + score_corr * d.corr - p.memory_gain * missing);
      c.s_obj = 4.0 * aff.target - 0.5 + d.obj;
      c.embedding = embed(b);
    }
    obs.candidates.push_back(std::move(c));
    obs.sources[0] = CandidateSource::target;
  }

  // Candidates 1 and 2.
  for (std::size_t slot = 1; slot < kCandidates; ++slot) {
    Rng jr = Rng::derive(rng.next(), slot);
    const Draws d = draws();
    const double bx = rng.uniform(0.15, 0.85), by = rng.uniform(0.15, 0.85);
    Candidate c;
    const std::size_t di = slot - 1;
    if (di < sc_.distractor_tracks.size()) {
      const BoundingBox& src = sc_.distractor_tracks[di][ft];
      const BoundingBox b = jitter_box(src, p.jitter, jr);
      const double bias = di == 0 ? swap : 0.0;
      c.box = b;
      c.s_iou = clamp01(iou(b, src) * (0.35 + p.distractor_gain * aff.distractor) + bias +
                        p.score_noise * d.noise + score_corr * d.corr);
      c.s_obj = -1.0 + 4.0 * aff.distractor + 3.0 * bias + lure + d.obj;
      c.embedding = embed(b);
      obs.sources[slot] = CandidateSource::distractor;
    } else if (slot == 2) {
      obs.sources[slot] = CandidateSource::part;
      if (hidden) {
        c.s_iou = clamp01(0.05 + 0.05 * d.noise);
        c.s_obj = -3.0 + d.obj;
      } else {
        const BoundingBox src = part_of(truth);
        const BoundingBox b = jitter_box(src, p.jitter, jr);
        c.box = b;
        c.s_iou = clamp01(iou(b, src) - p.part_penalty + p.score_noise * d.noise + score_corr * d.corr -
                          p.memory_gain * missing);
        c.s_obj = 4.0 * aff.target - 1.5 + d.obj;
        c.embedding = embed(b);
      }
    } else {
      obs.sources[slot] = CandidateSource::background;
      const BoundingBox b(bx * sc_.image.width, by * sc_.image.height, 0.6 * truth.w(), 0.6 * truth.h());
      c.box = b;
      c.s_iou = clamp01(0.15 + 0.1 * d.noise + score_corr * d.corr);
      c.s_obj = -2.0 + d.obj;
      c.embedding = embed(b);
    }
    obs.candidates.push_back(std::move(c));
  }
  return obs;
}

std::vector<double> embed_box(const Scenario& sc, const FeatureGrid& features, const BoundingBox& box) {
  const auto side = features.width * static_cast<std::size_t>(sc.segmenter.mask_scale);
  const double mx = static_cast<double>(side) / sc.image.width;
  const double my = static_cast<double>(features.height * static_cast<std::size_t>(sc.segmenter.mask_scale)) /
                    sc.image.height;
  const BoundingBox scaled(box.cx() * mx, box.cy() * my, box.w() * mx, box.h() * my);
  const auto e = masked_embedding(
      features, BinaryMask::from_box(side, features.height * static_cast<std::size_t>(sc.segmenter.mask_scale), scaled));
  return e ? *e : std::vector<double>{};
}

FrameObservation generate_frame(const Scenario& sc, std::int64_t t) { return Segmenter(sc).observe(t); }

}  // namespace trackadapt::sim
