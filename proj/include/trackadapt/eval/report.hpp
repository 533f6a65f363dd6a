#pragma once

#include <array>
#include <span>
#include <string>

#include "trackadapt/eval/metrics.hpp"

namespace trackadapt::eval {

// Tab-separated table: header "id\tAcc\tP\tP_norm\tAUC\tframes", one row per
// sequence in the given order, then the aggregate row "ALL". Fixed 4-decimal numbers.
std::string format_metrics_table(std::span<const SequenceMetrics> rows);

// CSV "tau,success" with one line per grid threshold.
std::string format_success_plot(const std::array<double, kThresholds>& curve);

}  // namespace trackadapt::eval
