#pragma once

#include <span>
#include <vector>

namespace aif {

/// One point of the 5-dimensional hidden-state grid: global latency and
/// request-rate levels plus per-tier utilization levels, each in {0,1,2}.
struct StateTuple {
  int latency_level = 0;
  int rate_level = 0;
  int util_heavy = 0;
  int util_medium = 0;
  int util_light = 0;

  bool operator==(const StateTuple&) const = default;
};

/// Mixed-radix enumeration of a discrete factored state space. The router
/// uses the fixed 3^5 = 243 grid; tests also build reduced spaces.
///
/// Index convention: the first dimension is most significant, so for the
/// router space index = l*81 + r*27 + uH*9 + uM*3 + uL. This ordering is
/// frozen; serialized models depend on it.
class StateSpace {
 public:
  explicit StateSpace(std::vector<int> cardinalities);

  /// The router's 3x3x3x3x3 space (latency, rate, util_heavy, util_medium,
  /// util_light).
  static StateSpace router();

  int size() const { return size_; }
  int num_dims() const { return static_cast<int>(cards_.size()); }
  const std::vector<int>& cardinalities() const { return cards_; }

  /// Throws std::out_of_range if any level is outside its cardinality.
  int encode(std::span<const int> levels) const;

  /// Throws std::out_of_range if index is not in [0, size()).
  std::vector<int> decode(int index) const;

  /// Level of dimension `dim` for state `index`, without materializing the
  /// full tuple.
  int level_of(int index, int dim) const;

 private:
  std::vector<int> cards_;
  std::vector<int> radix_;  // place value per dimension
  int size_ = 0;
};

inline constexpr int kNumStates = 243;

/// Router-space encode/decode. Throws std::out_of_range on invalid input.
int encode_state(const StateTuple& s);
StateTuple decode_state(int index);

}  // namespace aif
