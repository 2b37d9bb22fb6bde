#pragma once

#include <deque>
#include <random>
#include <vector>

#include "aif/model.hpp"

namespace aif {

/// One observed transition: beliefs before and after a fast tick, the action
/// in force while it happened, the observation that drove it, and the time
/// since that action was last changed.
struct TransitionRecord {
  BeliefVector prior_belief;      // q(s_{t-1})
  BeliefVector posterior_belief;  // q(s_t)
  int action = 0;
  ObservationTuple observation;
  double dt_since_action_change = 0;
};

/// Bounded FIFO of recent transitions (default capacity 5000, oldest-first
/// eviction).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity = 5000) : capacity_(capacity) {}

  void record(TransitionRecord rec);

  size_t size() const { return records_.size(); }
  size_t capacity() const { return capacity_; }
  const TransitionRecord& at(size_t i) const { return records_[i]; }

  /// Uniform sample without replacement of min(batch, size()) records.
  /// Reproducible for a given rng state.
  std::vector<const TransitionRecord*> sample(size_t batch, std::mt19937_64& rng) const;

 private:
  size_t capacity_;
  std::deque<TransitionRecord> records_;
};

}  // namespace aif
