#include "aif/dispatcher.hpp"

#include "aif/rng.hpp"

namespace aif {

Tier choose_tier(const WeightSnapshot& snapshot, std::mt19937_64& rng) {
  const auto& w = snapshot.weights;
  const double total = w[0] + w[1] + w[2];
  const double r = next_unit(rng) * total;
  double cum = 0;
  int last_positive = 0;
  for (int i = 0; i < 3; ++i) {
    if (w[i] <= 0) continue;
    cum += w[i];
    last_positive = i;
    if (r < cum) return static_cast<Tier>(i);
  }
  return static_cast<Tier>(last_positive);  // rounding pushed r past the last edge
}

}  // namespace aif
