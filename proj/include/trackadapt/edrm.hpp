#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "trackadapt/geometry.hpp"
#include "trackadapt/selector.hpp"

namespace trackadapt {

// Row-major h x w grid of d-dimensional feature vectors: cell (x, y) starts at (y * w + x) * d.
struct FeatureGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t dim = 0;
  std::vector<double> data;

  std::span<const double> cell(std::size_t x, std::size_t y) const {
    return {data.data() + (y * width + x) * dim, dim};
  }
};

// Mean feature over grid cells covered by the mask. A mask larger than the grid
// is pooled down first: a cell is set if any mask pixel mapping into it is set
// (pixel x maps to cell x * grid_w / mask_w). nullopt for an empty mask;
// DomainError when the mask is smaller than the grid or the grid is malformed.
std::optional<std::vector<double>> masked_embedding(const FeatureGrid& features, const BinaryMask& mask);

// Cosine of the angle between a and b; 0 if either is the zero vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct EdrmConfig {
  double sigma_ar = 0.40;
  double sigma_a = 0.40;
  double sigma_s = 0.10;
  double tau_ar = 0.40;
  double tau_a = 0.40;
  double tau_s = 0.60;
  int window = 5;

  void validate() const;  // ConfigError
};

// Rolling means of the last T reliable boxes and embeddings.
class TargetPrototype {
 public:
  explicit TargetPrototype(int window = 5);

  int window() const { return window_; }
  std::size_t size() const { return boxes_.size(); }
  bool empty() const { return boxes_.empty(); }
  bool full() const { return boxes_.size() == static_cast<std::size_t>(window_); }
  bool frozen() const { return frozen_; }

  // No-op while frozen. DomainError if the embedding length changes.
  void push(const BoundingBox& box, std::span<const double> embedding);
  void freeze() { frozen_ = true; }
  void unfreeze() { frozen_ = false; }

  BoundingBox mean_box() const;  // StateError if empty
  const std::vector<double>& mean_embedding() const { return mean_emb_; }
  const std::deque<BoundingBox>& boxes() const { return boxes_; }
  const std::deque<std::vector<double>>& embeddings() const { return embs_; }

 private:
  void recompute();

  int window_;
  bool frozen_ = false;
  std::deque<BoundingBox> boxes_;
  std::deque<std::vector<double>> embs_;
  std::vector<double> mean_emb_;
};

struct Similarity {
  double ar = 0.0;
  double area = 0.0;
  double semantic = 0.0;
  double sum() const { return ar + area + semantic; }
};

// Scores of (box, embedding) against the prototype means. An empty box or
// missing embedding scores 0 on the affected terms.
Similarity prototype_similarity(const TargetPrototype& tp, const MaybeBox& box, std::span<const double> embedding);

enum class EdrmMode { detect, recover };

struct DetectResult {
  bool flagged = false;
  bool armed = false;  // false while the prototype is still warming up
  Similarity scores;
};

class Edrm {
 public:
  explicit Edrm(EdrmConfig cfg = {});

  EdrmMode mode() const { return mode_; }
  const TargetPrototype& prototype() const { return proto_; }
  const EdrmConfig& config() const { return cfg_; }

  // Checks the selected output against the prototype. Before T reliable frames
  // have been seen the frame only feeds the prototype. Once armed, an empty
  // selection or any score below its sigma threshold freezes the prototype and
  // switches to recover mode. StateError unless in detect mode.
  DetectResult detect(const MaybeBox& box, std::span<const double> embedding);

  // Returns the candidate matching the frozen prototype above every tau
  // threshold (largest summed score, then lowest index) and switches back to
  // detect mode with that candidate pushed. StateError unless in recover mode.
  std::optional<std::size_t> try_recover(std::span<const Candidate> candidates);

 private:
  EdrmConfig cfg_;
  EdrmMode mode_ = EdrmMode::detect;
  TargetPrototype proto_;
};

}  // namespace trackadapt
