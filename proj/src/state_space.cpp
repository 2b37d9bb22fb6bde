#include "aif/state_space.hpp"

#include <stdexcept>
#include <string>

namespace aif {

StateSpace::StateSpace(std::vector<int> cardinalities) : cards_(std::move(cardinalities)) {
  if (cards_.empty()) throw std::invalid_argument("state space needs at least one dimension");
  radix_.resize(cards_.size());
  size_ = 1;
  for (int d = static_cast<int>(cards_.size()) - 1; d >= 0; --d) {
    if (cards_[d] < 1) throw std::invalid_argument("dimension cardinality must be >= 1");
    radix_[d] = size_;
    size_ *= cards_[d];
  }
}

StateSpace StateSpace::router() { return StateSpace({3, 3, 3, 3, 3}); }

int StateSpace::encode(std::span<const int> levels) const {
  if (static_cast<int>(levels.size()) != num_dims())
    throw std::out_of_range("level count does not match state dimensions");
  int idx = 0;
  for (int d = 0; d < num_dims(); ++d) {
    if (levels[d] < 0 || levels[d] >= cards_[d])
      throw std::out_of_range("state level " + std::to_string(levels[d]) +
                              " out of range for dimension " + std::to_string(d));
    idx += levels[d] * radix_[d];
  }
  return idx;
}

std::vector<int> StateSpace::decode(int index) const {
  if (index < 0 || index >= size_)
    throw std::out_of_range("state index " + std::to_string(index) + " out of range");
  std::vector<int> levels(cards_.size());
  for (int d = 0; d < num_dims(); ++d) {
    levels[d] = (index / radix_[d]) % cards_[d];
  }
  return levels;
}

int StateSpace::level_of(int index, int dim) const {
  return (index / radix_[dim]) % cards_[dim];
}

int encode_state(const StateTuple& s) {
  static const StateSpace space = StateSpace::router();
  const int levels[5] = {s.latency_level, s.rate_level, s.util_heavy, s.util_medium,
                         s.util_light};
  return space.encode(levels);
}

StateTuple decode_state(int index) {
  static const StateSpace space = StateSpace::router();
  auto v = space.decode(index);
  return StateTuple{v[0], v[1], v[2], v[3], v[4]};
}

}  // namespace aif
