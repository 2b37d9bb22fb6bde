#pragma once

#include <span>

#include "aif/model.hpp"
#include "aif/replay.hpp"

namespace aif {

/// w(dt) = 1 / (1 + exp(-(dt - 2) / 2)): transitions shortly after an action
/// change are down-weighted until the system settles.
double sigmoid_weight(double dt_seconds);

/// Pseudo-count update A[o_k, s] += alpha * belief[s] for every factor k.
/// Adds exactly alpha of mass per factor. Refreshes the normalized view.
void update_observation_model(ObservationModel& A, const ObservationTuple& o,
                              const BeliefVector& belief, double alpha);

/// For each record, adds alpha_b * w(dt) * outer(posterior, prior) to the
/// pseudo-counts of the record's action, then refreshes the touched actions.
/// Empty batches are a no-op.
void update_transition_model(TransitionModel& B,
                             std::span<const TransitionRecord* const> batch, double alpha_b);

}  // namespace aif
