#include "trackadapt/tamb.hpp"

#include <algorithm>
#include <cmath>

#include "trackadapt/errors.hpp"

namespace trackadapt {

void TambConfig::validate() const {
  if (slots < 2) throw ConfigError("TAMB slot count N_m must be at least 2");
  if (pool_size < slots) throw ConfigError("TAMB pool size M must be at least N_m");
  for (double mu : {mu_iou, mu_obj, mu_m}) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("TAMB thresholds must lie in [0, 1]");
  }
  if (!(delta >= 0.0) || !(epsilon >= 0.0) || !(zeta >= 0.0)) throw ConfigError("TAMB weights must be non-negative");
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double tamb_score(const MemoryEntry& e, const TambConfig& cfg) {
  return cfg.delta * e.s_iou + cfg.epsilon * sigmoid(e.s_obj) + cfg.zeta * e.s_m;
}

bool admissible(const MemoryEntry& e, const TambConfig& cfg) {
  return e.box && !e.box->degenerate() && e.s_iou >= cfg.mu_iou && sigmoid(e.s_obj) >= cfg.mu_obj &&
         e.s_m >= cfg.mu_m;
}

namespace {

std::size_t prompted_index(std::span<const MemoryEntry> history) {
  if (history.empty()) throw DomainError("memory history is empty");
  std::size_t found = history.size();
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i > 0 && history[i].frame <= history[i - 1].frame) {
      throw DomainError("memory history frames must be strictly increasing");
    }
    if (!history[i].prompted) continue;
    if (found != history.size()) throw StateError("memory history has more than one prompted entry");
    found = i;
  }
  if (found == history.size()) throw StateError("memory history has no prompted entry");
  return found;
}

}  // namespace

std::vector<std::int64_t> select_memories(std::span<const MemoryEntry> history, const TambConfig& cfg) {
  cfg.validate();
  const std::size_t p = prompted_index(history);
  const std::size_t r = history.size() - 1;

  std::vector<std::size_t> pool;
  for (std::size_t i = r; i-- > 0 && pool.size() < static_cast<std::size_t>(cfg.pool_size);) {
    if (i == p) continue;
    if (admissible(history[i], cfg)) pool.push_back(i);
  }
  // pool is newest first, so a stable sort keeps later frames ahead on ties.
  std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
    return tamb_score(history[a], cfg) > tamb_score(history[b], cfg);
  });
  pool.resize(std::min(pool.size(), static_cast<std::size_t>(cfg.slots - 1)));

  std::vector<std::int64_t> out{history[p].frame, history[r].frame};
  for (std::size_t i : pool) out.push_back(history[i].frame);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::int64_t> baseline_fifo(std::span<const MemoryEntry> history, int slots) {
  if (slots < 1) throw ConfigError("FIFO slot count must be positive");
  const std::size_t p = prompted_index(history);
  std::vector<std::int64_t> out{history[p].frame};
  const std::size_t start = history.size() > static_cast<std::size_t>(slots) ? history.size() - slots : 0;
  for (std::size_t i = start; i < history.size(); ++i) out.push_back(history[i].frame);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace trackadapt
