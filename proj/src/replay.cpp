#include "aif/replay.hpp"

#include <numeric>

#include "aif/rng.hpp"

namespace aif {

void ReplayBuffer::record(TransitionRecord rec) {
  if (records_.size() == capacity_) records_.pop_front();
  records_.push_back(std::move(rec));
}

std::vector<const TransitionRecord*> ReplayBuffer::sample(size_t batch,
                                                          std::mt19937_64& rng) const {
  const size_t n = records_.size();
  const size_t k = std::min(batch, n);
  std::vector<const TransitionRecord*> out;
  out.reserve(k);
  if (k == 0) return out;
  if (k == n) {
    for (const auto& r : records_) out.push_back(&r);
    return out;
  }
  // Partial Fisher-Yates over an index array; draws are platform-stable
  // because next_unit() is.
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(next_unit(rng) * static_cast<double>(n - i));
    if (j >= n) j = n - 1;
    std::swap(idx[i], idx[j]);
    out.push_back(&records_[idx[i]]);
  }
  return out;
}

}  // namespace aif
