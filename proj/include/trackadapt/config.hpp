#pragma once

#include <filesystem>
#include <string>

#include "trackadapt/edrm.hpp"
#include "trackadapt/nonlinearity.hpp"
#include "trackadapt/recurrent.hpp"
#include "trackadapt/selector.hpp"
#include "trackadapt/tamb.hpp"
#include "trackadapt/training.hpp"

namespace trackadapt {

// Which of the three adaptation modules run. A disabled module falls back to
// the plain segmenter behaviour: pure S_IoU selection, no error detection,
// FIFO memory.
struct ModuleSwitches {
  bool mp = true;
  bool edrm = true;
  bool tamb = true;
  friend bool operator==(const ModuleSwitches&, const ModuleSwitches&) = default;
};

struct TrackerConfig {
  PredictorArch predictor = PredictorArch::kf;
  std::string weights;  // weights file for mlp / lstm
  SelectorWeights selector;
  EdrmConfig edrm;
  TambConfig tamb;
  ModuleSwitches enable;

  void validate() const;  // ConfigError
};

bool operator==(const TrackerConfig& a, const TrackerConfig& b);

// JSON documents. Missing keys keep their defaults; unknown keys are rejected.
std::string to_json_string(const TrackerConfig& cfg);
TrackerConfig parse_tracker_config(const std::string& text);

std::string to_json_string(const TrainingConfig& cfg);
TrainingConfig parse_training_config(const std::string& text);

std::string to_json_string(const NonlinConfig& cfg);
NonlinConfig parse_nonlin_config(const std::string& text);

}  // namespace trackadapt
