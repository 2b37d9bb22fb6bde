#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>

#include "aif/types.hpp"

namespace aif {

/// One backend target. `target` is a URL in HTTP mode; simulation mode keeps
/// tier state inside the simulator and only uses the shared counters.
struct TierEndpoint {
  Tier tier = Tier::light;
  std::string target;
  double timeout_ms = 10000;
  long in_flight = 0;
};

/// Published routing weights plus a monotone epoch, so readers can tell
/// snapshots apart.
struct WeightSnapshot {
  std::array<double, 3> weights = {0, 0, 0};  // (w_light, w_medium, w_heavy)
  std::uint64_t epoch = 0;
};

/// Samples a tier with probability equal to its weight. Zero-weight tiers
/// are never selected.
Tier choose_tier(const WeightSnapshot& snapshot, std::mt19937_64& rng);

}  // namespace aif
