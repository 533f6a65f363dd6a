#pragma once

#include <cstdint>
#include <vector>

#include "trackadapt/sim/scenario.hpp"

namespace trackadapt::sim {

// The 13 built scenarios of the standard synthetic suite: clean motion
// (linear, sinusoid, reversal, ramp, turn), distractor swaps, occlusions with
// and without lures, score noise and heavy jitter.
std::vector<Scenario> standard_suite(std::uint64_t seed = 7);

// Ids of the suite members without corruptions.
bool is_clean(const Scenario& sc);

// Built occlusion-then-reappear scenario used for EDRM recovery checks.
Scenario reappearance_scenario(std::uint64_t seed = 7);

}  // namespace trackadapt::sim
