#include "trackadapt/eval/report.hpp"

#include <cstdio>

namespace trackadapt::eval {

namespace {

std::string row(const SequenceMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "\t%.4f\t%.4f\t%.4f\t%.4f\t%zu\n", m.acc, m.precision, m.norm_precision, m.auc,
                m.frames);
  return m.id + buf;
}

}  // namespace

std::string format_metrics_table(std::span<const SequenceMetrics> rows) {
  std::string out = "id\tAcc\tP\tP_norm\tAUC\tframes\n";
  for (const auto& m : rows) out += row(m);
  out += row(aggregate(rows));
  return out;
}

std::string format_success_plot(const std::array<double, kThresholds>& curve) {
  std::string out = "tau,success\n";
  char buf[64];
  for (std::size_t i = 0; i < kThresholds; ++i) {
    std::snprintf(buf, sizeof buf, "%.2f,%.6f\n", static_cast<double>(i) / static_cast<double>(kThresholds - 1),
                  curve[i]);
    out += buf;
  }
  return out;
}

}  // namespace trackadapt::eval
