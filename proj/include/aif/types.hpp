#pragma once

#include <array>
#include <string_view>

namespace aif {

/// The three heterogeneous backend pools, ordered as they appear in
/// routing weight vectors (w_light, w_medium, w_heavy).
enum class Tier : int { light = 0, medium = 1, heavy = 2 };

inline constexpr std::array<std::string_view, 3> kTierNames = {"light", "medium",
                                                               "heavy"};

inline std::string_view tier_name(Tier t) {
  return kTierNames[static_cast<int>(t)];
}

inline constexpr int kNumTiers = 3;

}  // namespace aif
