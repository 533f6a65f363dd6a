#include "trackadapt/sim/tracker.hpp"

#include <json.hpp>

#include "trackadapt/errors.hpp"
#include "trackadapt/predictor.hpp"
#include "trackadapt/selector.hpp"
#include "trackadapt/tamb.hpp"

namespace trackadapt::sim {

using nlohmann::json;

std::size_t TrackResult::flag_count() const {
  std::size_t n = 0;
  for (const auto& f : trace) n += f.detect.flagged ? 1 : 0;
  return n;
}

namespace {

// Rethrows e with a context prefix, keeping the library error type.
[[noreturn]] void rethrow_with(const std::string& ctx) {
  try {
    throw;
  } catch (const ParseError& e) {
    throw ParseError(ctx + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(ctx + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(ctx + e.what());
  } catch (const StateError& e) {
    throw StateError(ctx + e.what());
  } catch (const DomainError& e) {
    throw DomainError(ctx + e.what());
  }
}

std::vector<MemoryEntry> gather(const std::vector<MemoryEntry>& history, const std::vector<std::int64_t>& frames) {
  std::vector<MemoryEntry> out;
  out.reserve(frames.size());
  for (std::int64_t f : frames) out.push_back(history[static_cast<std::size_t>(f)]);
  return out;
}

void snapshot(const Edrm& edrm, FrameTrace& ft) {
  const auto& tp = edrm.prototype();
  ft.prototype_boxes.assign(tp.boxes().begin(), tp.boxes().end());
  ft.prototype_embeddings.assign(tp.embeddings().begin(), tp.embeddings().end());
}

}  // namespace

TrackResult run_tracker(const Scenario& sc, const TrackerConfig& cfg, std::shared_ptr<const SequenceNet> net) {
  try {
    TrackerConfig check = cfg;
    if (net && check.weights.empty()) check.weights = "(in memory)";  // a supplied network stands in for the file
    check.validate();
  } catch (...) {
    rethrow_with("scenario '" + sc.id + "': ");
  }
  TrackResult result;
  result.id = sc.id;
  const Segmenter seg(sc);
  std::unique_ptr<MotionPredictor> mp;
  if (cfg.enable.mp) {
    try {
      mp = make_predictor(cfg.predictor, std::move(net));
    } catch (...) {
      rethrow_with("scenario '" + sc.id + "': ");
    }
    mp->reset(sc.image);
  }
  Edrm edrm(cfg.edrm);
  std::vector<MemoryEntry> history;
  std::vector<std::int64_t> memory;

  for (std::int64_t t = 0; t < sc.frames; ++t) {
    try {
      FrameTrace ft;
      ft.frame = t;
      ft.ground_truth = sc.ground_truth.frames[static_cast<std::size_t>(t)];
      ft.mode_before = edrm.mode();

      if (t == 0) {
        const FrameObservation obs = seg.observe(0);
        const BoundingBox prompt = *ft.ground_truth;
        const auto emb = embed_box(sc, obs.features, prompt);
        ft.output = prompt;
        if (cfg.enable.edrm) ft.detect = edrm.detect(prompt, emb);
        if (mp) mp->observe(0, prompt);
        history.push_back({0, prompt, 1.0, 10.0, 1.0, true});
        memory = {0};
        ft.memory = memory;
        ft.mode_after = edrm.mode();
        snapshot(edrm, ft);
        result.outputs.push_back(ft.output);
        result.trace.push_back(std::move(ft));
        continue;
      }

      if (mp) ft.prediction = mp->predict();
      const std::vector<MemoryEntry> conditioning = gather(history, memory);
      ft.affinity = memory_affinity(sc, conditioning);
      const FrameObservation obs = seg.observe(t, ft.affinity);
      const auto& cands = obs.candidates;

      const Selection sel = select_mask(cands, ft.prediction, cfg.selector);
      ft.scores = sel.scores;
      ft.selected = sel.index;
      ft.chosen = sel.index;
      auto visible_box = [&](std::size_t i) -> MaybeBox {
        return cands[i].s_obj >= 0.0 ? cands[i].box : std::nullopt;
      };

      if (cfg.enable.edrm) {
        bool attempt = edrm.mode() == EdrmMode::recover;
        if (!attempt) {
          ft.detect = edrm.detect(visible_box(ft.chosen), cands[ft.chosen].embedding);
          attempt = ft.detect.flagged;
        }
        if (attempt) {
          ft.recovered = edrm.try_recover(cands);
          if (ft.recovered) ft.chosen = *ft.recovered;
        }
      }
      ft.output = ft.recovered ? cands[ft.chosen].box : visible_box(ft.chosen);
      ft.mode_after = edrm.mode();
      snapshot(edrm, ft);

      if (mp) mp->observe(t, ft.output);
      const double s_m = ft.prediction && ft.output ? iou(*ft.prediction, *ft.output) : 0.0;
      history.push_back({t, ft.output, cands[ft.chosen].s_iou, cands[ft.chosen].s_obj, s_m, false});
      memory = cfg.enable.tamb ? select_memories(history, cfg.tamb) : baseline_fifo(history, cfg.tamb.slots);
      ft.memory = memory;

      for (std::size_t i = 0; i < cands.size(); ++i) {
        ft.candidates.push_back({cands[i].box, cands[i].s_iou, cands[i].s_obj, obs.sources[i]});
      }
      result.outputs.push_back(ft.output);
      result.trace.push_back(std::move(ft));
    } catch (...) {
      rethrow_with("scenario '" + sc.id + "', frame " + std::to_string(t) + ": ");
    }
  }
  return result;
}

double mean_output_iou(const TrackResult& r, const Scenario& sc) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 1; t < r.outputs.size(); ++t) {
    const MaybeBox& gt = sc.ground_truth.frames[t];
    if (!gt) continue;
    sum += iou(r.outputs[t], gt);
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

namespace {

json box_json(const MaybeBox& b) {
  if (!b) return nullptr;
  return json::array({b->cx(), b->cy(), b->w(), b->h()});
}

const char* mode_name(EdrmMode m) { return m == EdrmMode::detect ? "detect" : "recover"; }

}  // namespace

std::string trace_to_jsonl(const TrackResult& r) {
  std::string out;
  for (const auto& f : r.trace) {
    json j;
    j["frame"] = f.frame;
    j["gt"] = box_json(f.ground_truth);
    j["prediction"] = box_json(f.prediction);
    j["affinity"] = {f.affinity.target, f.affinity.distractor};
    j["candidates"] = json::array();
    for (const auto& c : f.candidates) {
      j["candidates"].push_back(
          {{"box", box_json(c.box)}, {"s_iou", c.s_iou}, {"s_obj", c.s_obj}, {"source", to_string(c.source)}});
    }
    j["scores"] = f.scores;
    j["selected"] = f.selected;
    j["mode_before"] = mode_name(f.mode_before);
    j["mode_after"] = mode_name(f.mode_after);
    j["detect"] = {{"armed", f.detect.armed},
                   {"flagged", f.detect.flagged},
                   {"s_ar", f.detect.scores.ar},
                   {"s_a", f.detect.scores.area},
                   {"s_s", f.detect.scores.semantic}};
    j["recovered"] = f.recovered ? json(*f.recovered) : json(nullptr);
    j["chosen"] = f.chosen;
    j["output"] = box_json(f.output);
    j["memory"] = f.memory;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace trackadapt::sim
