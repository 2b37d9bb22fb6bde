#include "aif/learning.hpp"

#include <cmath>
#include <set>

namespace aif {

double sigmoid_weight(double dt_seconds) {
  return 1.0 / (1.0 + std::exp(-(dt_seconds - 2.0) / 2.0));
}

void update_observation_model(ObservationModel& A, const ObservationTuple& o,
                              const BeliefVector& belief, double alpha) {
  if (alpha == 0) return;
  const int n = A.num_states();
  auto bins = o.bins();
  for (int k = 0; k < A.num_factors(); ++k) {
    double* row = A.raw_counts_mutable(k).data() + static_cast<size_t>(bins[k]) * n;
    for (int s = 0; s < n; ++s) row[s] += alpha * belief.p[s];
  }
  A.refresh();
}

void update_transition_model(TransitionModel& B,
                             std::span<const TransitionRecord* const> batch, double alpha_b) {
  if (batch.empty()) return;
  const int n = B.num_states();
  std::set<int> touched;
  for (const TransitionRecord* rec : batch) {
    const double scale = alpha_b * sigmoid_weight(rec->dt_since_action_change);
    double* m = B.raw_counts_mutable(rec->action).data();
    for (int prev = 0; prev < n; ++prev) {
      const double w_prev = rec->prior_belief.p[prev] * scale;
      if (w_prev == 0) continue;
      for (int next = 0; next < n; ++next)
        m[static_cast<size_t>(next) * n + prev] += w_prev * rec->posterior_belief.p[next];
    }
    touched.insert(rec->action);
  }
  for (int a : touched) B.refresh_action(a);
}

}  // namespace aif
