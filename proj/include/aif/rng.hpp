#pragma once

#include <cstdint>
#include <random>

namespace aif {

/// splitmix64 step; used to derive independent substream seeds from one
/// master seed so that e.g. workload generation and action sampling do not
/// share a generator.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Named RNG substreams. Adding a stream here never perturbs existing ones.
enum class RngStream : std::uint64_t {
  workload = 1,
  routing = 2,
  service = 3,
  restarts = 4,
  action_selection = 5,
  replay_sampling = 6,
};

inline std::mt19937_64 make_rng(std::uint64_t master_seed, RngStream stream) {
  return std::mt19937_64(
      splitmix64(master_seed ^ (static_cast<std::uint64_t>(stream) * 0x51ed2701ULL)));
}

/// Uniform double in [0, 1). Hand-rolled from raw bits so the mapping is
/// identical on every platform (std::uniform_real_distribution is not).
inline double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace aif
