#include "trackadapt/config.hpp"

#include <json.hpp>

#include "trackadapt/errors.hpp"

namespace trackadapt {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void get_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename F>
auto parse_json(const std::string& text, const std::string& what, F&& body) {
  try {
    return body(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError("invalid " + what + ": " + e.what());
  }
}

}  // namespace

void TrackerConfig::validate() const {
  selector.validate();
  edrm.validate();
  tamb.validate();
  if ((predictor == PredictorArch::mlp || predictor == PredictorArch::lstm) && enable.mp && weights.empty()) {
    throw ConfigError("predictor " + to_string(predictor) + " needs a weights file");
  }
}

bool operator==(const TrackerConfig& a, const TrackerConfig& b) {
  auto sel = [](const SelectorWeights& w) { return std::tie(w.alpha, w.beta_ar, w.beta_area, w.gamma); };
  auto ed = [](const EdrmConfig& c) {
    return std::tie(c.sigma_ar, c.sigma_a, c.sigma_s, c.tau_ar, c.tau_a, c.tau_s, c.window);
  };
  auto tb = [](const TambConfig& c) {
    return std::tie(c.pool_size, c.slots, c.mu_iou, c.mu_obj, c.mu_m, c.delta, c.epsilon, c.zeta);
  };
  return a.predictor == b.predictor && a.weights == b.weights && sel(a.selector) == sel(b.selector) &&
         ed(a.edrm) == ed(b.edrm) && tb(a.tamb) == tb(b.tamb) && a.enable == b.enable;
}

std::string to_json_string(const TrackerConfig& c) {
  json j;
  j["predictor"] = to_string(c.predictor);
  j["weights"] = c.weights;
  j["selector"] = {{"alpha", c.selector.alpha},
                   {"beta_ar", c.selector.beta_ar},
                   {"beta_area", c.selector.beta_area},
                   {"gamma", c.selector.gamma}};
  j["edrm"] = {{"sigma_ar", c.edrm.sigma_ar}, {"sigma_a", c.edrm.sigma_a}, {"sigma_s", c.edrm.sigma_s},
               {"tau_ar", c.edrm.tau_ar},     {"tau_a", c.edrm.tau_a},     {"tau_s", c.edrm.tau_s},
               {"window", c.edrm.window}};
  j["tamb"] = {{"pool_size", c.tamb.pool_size}, {"slots", c.tamb.slots}, {"mu_iou", c.tamb.mu_iou},
               {"mu_obj", c.tamb.mu_obj},       {"mu_m", c.tamb.mu_m},   {"delta", c.tamb.delta},
               {"epsilon", c.tamb.epsilon},     {"zeta", c.tamb.zeta}};
  j["enable"] = {{"mp", c.enable.mp}, {"edrm", c.enable.edrm}, {"tamb", c.enable.tamb}};
  return j.dump(2) + "\n";
}

TrackerConfig parse_tracker_config(const std::string& text) {
  TrackerConfig c = parse_json(text, "tracker config", [](const json& j) {
    TrackerConfig c;
    check_keys(j, {"predictor", "weights", "selector", "edrm", "tamb", "enable"}, "tracker config");
    if (j.contains("predictor")) c.predictor = parse_arch(j.at("predictor").get<std::string>());
    get_opt(j, "weights", c.weights);
    if (j.contains("selector")) {
      const json& s = j.at("selector");
      check_keys(s, {"alpha", "beta_ar", "beta_area", "gamma"}, "selector");
      get_opt(s, "alpha", c.selector.alpha);
      get_opt(s, "beta_ar", c.selector.beta_ar);
      get_opt(s, "beta_area", c.selector.beta_area);
      get_opt(s, "gamma", c.selector.gamma);
    }
    if (j.contains("edrm")) {
      const json& e = j.at("edrm");
      check_keys(e, {"sigma_ar", "sigma_a", "sigma_s", "tau_ar", "tau_a", "tau_s", "window"}, "edrm");
      get_opt(e, "sigma_ar", c.edrm.sigma_ar);
      get_opt(e, "sigma_a", c.edrm.sigma_a);
      get_opt(e, "sigma_s", c.edrm.sigma_s);
      get_opt(e, "tau_ar", c.edrm.tau_ar);
      get_opt(e, "tau_a", c.edrm.tau_a);
      get_opt(e, "tau_s", c.edrm.tau_s);
      get_opt(e, "window", c.edrm.window);
    }
    if (j.contains("tamb")) {
      const json& t = j.at("tamb");
      check_keys(t, {"pool_size", "slots", "mu_iou", "mu_obj", "mu_m", "delta", "epsilon", "zeta"}, "tamb");
      get_opt(t, "pool_size", c.tamb.pool_size);
      get_opt(t, "slots", c.tamb.slots);
      get_opt(t, "mu_iou", c.tamb.mu_iou);
      get_opt(t, "mu_obj", c.tamb.mu_obj);
      get_opt(t, "mu_m", c.tamb.mu_m);
      get_opt(t, "delta", c.tamb.delta);
      get_opt(t, "epsilon", c.tamb.epsilon);
      get_opt(t, "zeta", c.tamb.zeta);
    }
    if (j.contains("enable")) {
      const json& e = j.at("enable");
      check_keys(e, {"mp", "edrm", "tamb"}, "enable");
      get_opt(e, "mp", c.enable.mp);
      get_opt(e, "edrm", c.enable.edrm);
      get_opt(e, "tamb", c.enable.tamb);
    }
    return c;
  });
  c.validate();
  return c;
}

std::string to_json_string(const TrainingConfig& c) {
  json j;
  j["arch"] = to_string(c.arch);
  j["context"] = c.context;
  j["lambda1"] = c.lambda1;
  j["lambda2"] = c.lambda2;
  j["box_loss"] = to_string(c.box_loss);
  j["learning_rate"] = c.learning_rate;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

TrainingConfig parse_training_config(const std::string& text) {
  TrainingConfig c = parse_json(text, "training config", [](const json& j) {
    TrainingConfig c;
    check_keys(j, {"arch", "context", "lambda1", "lambda2", "box_loss", "learning_rate", "epochs", "batch_size", "seed"},
               "training config");
    if (j.contains("arch")) c.arch = parse_arch(j.at("arch").get<std::string>());
    get_opt(j, "context", c.context);
    get_opt(j, "lambda1", c.lambda1);
    get_opt(j, "lambda2", c.lambda2);
    if (j.contains("box_loss")) c.box_loss = parse_box_loss(j.at("box_loss").get<std::string>());
    get_opt(j, "learning_rate", c.learning_rate);
    get_opt(j, "epochs", c.epochs);
    get_opt(j, "batch_size", c.batch_size);
    get_opt(j, "seed", c.seed);
    return c;
  });
  c.validate();
  return c;
}

std::string to_json_string(const NonlinConfig& c) {
  json j;
  j["accel_mag_thresh"] = c.accel_mag_thresh;
  j["angle_dev_thresh"] = c.angle_dev_thresh;
  j["jerk_thresh"] = c.jerk_thresh;
  j["video_frac_thresh"] = c.video_frac_thresh;
  return j.dump(2) + "\n";
}

NonlinConfig parse_nonlin_config(const std::string& text) {
  NonlinConfig c = parse_json(text, "nonlinearity config", [](const json& j) {
    NonlinConfig c;
    check_keys(j, {"accel_mag_thresh", "angle_dev_thresh", "jerk_thresh", "video_frac_thresh"}, "nonlinearity config");
    get_opt(j, "accel_mag_thresh", c.accel_mag_thresh);
    get_opt(j, "angle_dev_thresh", c.angle_dev_thresh);
    get_opt(j, "jerk_thresh", c.jerk_thresh);
    get_opt(j, "video_frac_thresh", c.video_frac_thresh);
    return c;
  });
  c.validate();
  return c;
}

}  // namespace trackadapt
