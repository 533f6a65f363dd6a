#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>

#include "trackadapt/recurrent.hpp"

namespace trackadapt {

// Contents of a trained-weights file. net is null for the kf/ekf tags, which
// carry no parameters. Layout is documented in docs/weights_format.md.
struct WeightsFile {
  PredictorArch arch = PredictorArch::kf;
  int context = 5;
  bool normalized = true;
  std::shared_ptr<SequenceNet> net;
};

void write_weights(std::ostream& os, const WeightsFile& w);
// ParseError (with line number) on malformed input.
WeightsFile read_weights(std::istream& is);

// Written atomically via a temporary file in the same directory.
void save_weights(const std::filesystem::path& path, const WeightsFile& w);
WeightsFile load_weights(const std::filesystem::path& path);

}  // namespace trackadapt
