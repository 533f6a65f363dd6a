#include "trackadapt/sim/scenario.hpp"

#include <json.hpp>

#include "trackadapt/errors.hpp"
#include "trackadapt/fileio.hpp"

namespace trackadapt::sim {

using nlohmann::json;

std::string to_string(CorruptionKind k) {
  switch (k) {
    case CorruptionKind::occlusion: return "occlusion";
    case CorruptionKind::score_noise: return "score_noise";
    case CorruptionKind::jitter: return "jitter";
    case CorruptionKind::swap_bias: return "swap_bias";
  }
  return "unknown";
}

CorruptionKind parse_corruption_kind(const std::string& name) {
  if (name == "occlusion") return CorruptionKind::occlusion;
  if (name == "score_noise") return CorruptionKind::score_noise;
  if (name == "jitter") return CorruptionKind::jitter;
  if (name == "swap_bias") return CorruptionKind::swap_bias;
  throw ConfigError("unknown corruption kind '" + name + "' (expected occlusion|score_noise|jitter|swap_bias)");
}

void Scenario::build() {
  if (id.empty()) throw ConfigError("scenario id must not be empty");
  if (frames < 2) throw ConfigError("scenario '" + id + "' needs at least 2 frames");
  if (!(image.width > 0.0) || !(image.height > 0.0)) throw ConfigError("scenario image size must be positive");
  if (embedding.dim < 1 || !(embedding.noise >= 0.0) ||
      !(embedding.distractor_similarity >= -1.0 && embedding.distractor_similarity <= 1.0)) {
    throw ConfigError("invalid embedding spec in scenario '" + id + "'");
  }
  if (segmenter.grid < 1 || segmenter.mask_scale < 1 || !(segmenter.jitter >= 0.0) || !(segmenter.score_noise >= 0.0)) {
    throw ConfigError("invalid segmenter parameters in scenario '" + id + "'");
  }
  for (const auto& c : corruptions) {
    if (c.begin < 0 || c.end > frames || c.begin >= c.end) {
      throw ConfigError("corruption window [" + std::to_string(c.begin) + ", " + std::to_string(c.end) +
                        ") is outside scenario '" + id + "' of " + std::to_string(frames) + " frames");
    }
    if (c.kind == CorruptionKind::occlusion && c.begin == 0) {
      throw ConfigError("the prompted frame 0 cannot be occluded");
    }
    if (!std::isfinite(c.magnitude)) throw ConfigError("corruption magnitude must be finite");
  }
  ground_truth = TrajectoryAnnotation{id, image, {}};
  target_track = render(target, frames);
  const auto& boxes = target_track;
  for (int t = 0; t < frames; ++t) {
    if (occluded(t)) {
      ground_truth.frames.emplace_back(std::nullopt);
    } else {
      ground_truth.frames.emplace_back(boxes[static_cast<std::size_t>(t)]);
    }
  }
  distractor_tracks.clear();
  for (const auto& d : distractors) distractor_tracks.push_back(render(d, frames));
}

bool Scenario::occluded(std::int64_t t) const {
  for (const auto& c : corruptions) {
    if (c.kind == CorruptionKind::occlusion && t >= c.begin && t < c.end) return true;
  }
  return false;
}

double Scenario::corruption(CorruptionKind kind, std::int64_t t) const {
  double sum = 0.0;
  for (const auto& c : corruptions) {
    if (c.kind == kind && t >= c.begin && t < c.end) sum += c.magnitude;
  }
  return sum;
}

namespace {

template <typename T>
void get_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void get_pair(const json& j, const char* key, double& a, double& b) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw ConfigError(std::string("'") + key + "' must be a 2-element array");
  a = v[0].get<double>();
  b = v[1].get<double>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

MotionScript motion_from_json(const json& j) {
  check_keys(j, {"type", "start", "size", "velocity", "size_rate", "amplitude", "period", "phase", "acceleration",
                 "turn_rate"},
             "motion");
  MotionScript m;
  m.type = parse_motion_type(j.value("type", std::string("linear")));
  get_pair(j, "start", m.x0, m.y0);
  get_pair(j, "size", m.w0, m.h0);
  get_pair(j, "velocity", m.vx, m.vy);
  get_pair(j, "size_rate", m.dw, m.dh);
  get_opt(j, "amplitude", m.amplitude);
  get_opt(j, "period", m.period);
  get_opt(j, "phase", m.phase);
  get_pair(j, "acceleration", m.ax, m.ay);
  get_opt(j, "turn_rate", m.turn_rate);
  m.validate();
  return m;
}

json motion_to_json(const MotionScript& m) {
  json j;
  j["type"] = to_string(m.type);
  j["start"] = {m.x0, m.y0};
  j["size"] = {m.w0, m.h0};
  j["velocity"] = {m.vx, m.vy};
  j["size_rate"] = {m.dw, m.dh};
  j["amplitude"] = m.amplitude;
  j["period"] = m.period;
  j["phase"] = m.phase;
  j["acceleration"] = {m.ax, m.ay};
  j["turn_rate"] = m.turn_rate;
  return j;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  try {
    const json j = json::parse(text);
    check_keys(j, {"id", "frames", "image", "seed", "target", "distractors", "corruptions", "embedding", "segmenter"},
               "scenario");
    sc.id = j.at("id").get<std::string>();
    sc.frames = j.at("frames").get<int>();
    get_pair(j, "image", sc.image.width, sc.image.height);
    get_opt(j, "seed", sc.seed);
    sc.target = motion_from_json(j.at("target"));
    if (j.contains("distractors")) {
      for (const auto& d : j.at("distractors")) sc.distractors.push_back(motion_from_json(d));
    }
    if (j.contains("corruptions")) {
      for (const auto& c : j.at("corruptions")) {
        check_keys(c, {"begin", "end", "kind", "magnitude"}, "corruption");
        Corruption k;
        k.begin = c.at("begin").get<int>();
        k.end = c.at("end").get<int>();
        k.kind = parse_corruption_kind(c.at("kind").get<std::string>());
        get_opt(c, "magnitude", k.magnitude);
        sc.corruptions.push_back(k);
      }
    }
    if (j.contains("embedding")) {
      const json& e = j.at("embedding");
      check_keys(e, {"dim", "noise", "distractor_similarity"}, "embedding");
      get_opt(e, "dim", sc.embedding.dim);
      get_opt(e, "noise", sc.embedding.noise);
      get_opt(e, "distractor_similarity", sc.embedding.distractor_similarity);
    }
    if (j.contains("segmenter")) {
      const json& s = j.at("segmenter");
      check_keys(s, {"jitter", "score_noise", "memory_gain", "distractor_gain", "part_penalty", "occlusion_lure",
                     "grid", "mask_scale"},
                 "segmenter");
      get_opt(s, "jitter", sc.segmenter.jitter);
      get_opt(s, "score_noise", sc.segmenter.score_noise);
      get_opt(s, "memory_gain", sc.segmenter.memory_gain);
      get_opt(s, "distractor_gain", sc.segmenter.distractor_gain);
      get_opt(s, "part_penalty", sc.segmenter.part_penalty);
      get_opt(s, "occlusion_lure", sc.segmenter.occlusion_lure);
      get_opt(s, "grid", sc.segmenter.grid);
      get_opt(s, "mask_scale", sc.segmenter.mask_scale);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  }
  sc.build();
  return sc;
}

std::string scenario_to_string(const Scenario& sc) {
  json j;
  j["id"] = sc.id;
  j["frames"] = sc.frames;
  j["image"] = {sc.image.width, sc.image.height};
  j["seed"] = sc.seed;
  j["target"] = motion_to_json(sc.target);
  j["distractors"] = json::array();
  for (const auto& d : sc.distractors) j["distractors"].push_back(motion_to_json(d));
  j["corruptions"] = json::array();
  for (const auto& c : sc.corruptions) {
    j["corruptions"].push_back({{"begin", c.begin}, {"end", c.end}, {"kind", to_string(c.kind)}, {"magnitude", c.magnitude}});
  }
  j["embedding"] = {{"dim", sc.embedding.dim},
                    {"noise", sc.embedding.noise},
                    {"distractor_similarity", sc.embedding.distractor_similarity}};
  j["segmenter"] = {{"jitter", sc.segmenter.jitter},
                    {"score_noise", sc.segmenter.score_noise},
                    {"memory_gain", sc.segmenter.memory_gain},
                    {"distractor_gain", sc.segmenter.distractor_gain},
                    {"part_penalty", sc.segmenter.part_penalty},
                    {"occlusion_lure", sc.segmenter.occlusion_lure},
                    {"grid", sc.segmenter.grid},
                    {"mask_scale", sc.segmenter.mask_scale}};
  return j.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& path) {
  try {
    return parse_scenario(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace trackadapt::sim
