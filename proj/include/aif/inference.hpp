#pragma once

#include <random>
#include <span>
#include <vector>

#include "aif/model.hpp"

namespace aif {

/// p(o | s) for every state: the elementwise product over the four
/// normalized factor rows selected by the observation's bins.
std::vector<double> likelihood(const ObservationModel& A, std::span<const int> obs_bins);
std::vector<double> likelihood(const ObservationModel& A, const ObservationTuple& o);

/// One-step prior: normalized B_a applied to the current belief.
BeliefVector belief_predict(const BeliefVector& b, const TransitionModel& B, int action);

/// Posterior ~ prior * likelihood, renormalized.
/// Throws std::runtime_error if the evidence annihilates all mass.
BeliefVector belief_update(const BeliefVector& prior, std::span<const double> like);

/// Predicted observation marginal per factor: marginal_k[j] =
/// sum_s p(j | s) b_next[s].
std::vector<std::vector<double>> predict_observations(const BeliefVector& b_next,
                                                      const ObservationModel& A);

/// Sum over factors of KL(pred_k || softmax(C_k)); >= 0, zero when every
/// predicted marginal matches its normalized preference.
double risk(const std::vector<std::vector<double>>& pred, const PreferenceModel& C);

/// Expected entropy of the observation likelihood under b_next, summed over
/// factors.
double ambiguity(const BeliefVector& b_next, const ObservationModel& A);

/// kappa * (ln 3 - H(weights)): penalizes concentrated routing vectors.
double action_cost(const Policy& a, double kappa);

/// G(a) = risk + ambiguity + cost with a one-step lookahead through B_a.
FreeEnergyBreakdown expected_free_energy(const BeliefVector& b, const GenerativeModel& model,
                                         const Policy& a, double kappa);

/// softmax over -beta * G, computed with max-subtraction.
std::vector<double> action_distribution(std::span<const double> G, double beta);

/// Samples a policy id from action_distribution(G, beta).
int select_action(std::span<const double> G, double beta, std::mt19937_64& rng);

/// Deterministic mode: argmin of G, lowest id on ties.
int select_action_argmin(std::span<const double> G);

}  // namespace aif
