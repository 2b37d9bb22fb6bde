#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aif/state_space.hpp"

namespace aif {

/// One second's discretized metrics: P95 latency, request rate and queue
/// depth in {0,1,2}, error rate in {0,1}.
struct ObservationTuple {
  int latency_bin = 0;
  int rate_bin = 0;
  int queue_bin = 0;
  int error_bin = 0;

  std::array<int, 4> bins() const { return {latency_bin, rate_bin, queue_bin, error_bin}; }
  bool operator==(const ObservationTuple&) const = default;
};

inline constexpr std::array<int, 4> kObservationBins = {3, 3, 3, 2};

/// Posterior probability distribution over hidden states.
struct BeliefVector {
  std::vector<double> p;

  BeliefVector() = default;
  explicit BeliefVector(int n, double value) : p(n, value) {}
  static BeliefVector uniform(int n) { return BeliefVector(n, 1.0 / n); }
  static BeliefVector delta(int n, int state);

  int size() const { return static_cast<int>(p.size()); }
  double& operator[](int i) { return p[i]; }
  double operator[](int i) const { return p[i]; }

  double sum() const;
  /// Rescales to sum 1. Throws std::runtime_error if total mass is zero.
  void normalize();
  /// Shannon entropy in nats (0 ln 0 = 0).
  double entropy() const;
  int argmax() const;
};

/// Factorized observation model A: one pseudo-count matrix per observation
/// factor, factor k shaped (bins_k x n_states). The normalized view (columns
/// summing to 1 over bins) is what inference consumes; refresh() rebuilds it
/// after pseudo-count changes.
class ObservationModel {
 public:
  ObservationModel(std::vector<int> bins, int n_states, double initial_count = 1.0);

  int num_factors() const { return static_cast<int>(bins_.size()); }
  int bins(int factor) const { return bins_[factor]; }
  const std::vector<int>& bin_cardinalities() const { return bins_; }
  int num_states() const { return n_states_; }

  double count(int factor, int bin, int state) const {
    return counts_[factor][bin * n_states_ + state];
  }
  void add_count(int factor, int bin, int state, double amount) {
    counts_[factor][bin * n_states_ + state] += amount;
  }
  void set_count(int factor, int bin, int state, double value) {
    counts_[factor][bin * n_states_ + state] = value;
  }
  std::span<const double> raw_counts(int factor) const { return counts_[factor]; }
  std::span<double> raw_counts_mutable(int factor) { return counts_[factor]; }

  /// p(bin | state) under the normalized view.
  double prob(int factor, int bin, int state) const {
    return norm_[factor][bin * n_states_ + state];
  }
  std::span<const double> normalized(int factor) const { return norm_[factor]; }

  /// Sum over factors of the entropy of the likelihood column for `state`;
  /// precomputed by refresh() because expected free energy evaluates it for
  /// every state on every tick.
  double column_entropy(int state) const { return column_entropy_[state]; }

  /// Recomputes the normalized view and per-state column entropies.
  /// Throws std::domain_error if any pseudo-count is <= 0.
  void refresh();

  double total_count(int factor) const;

 private:
  std::vector<int> bins_;
  int n_states_;
  std::vector<std::vector<double>> counts_;  // [factor][bin * n_states + state]
  std::vector<std::vector<double>> norm_;
  std::vector<double> column_entropy_;
};

/// Per-action transition pseudo-counts B. Matrix entry [next, prev] of the
/// normalized view is p(next | prev, action); columns (fixed prev) sum to 1.
class TransitionModel {
 public:
  /// Every cell starts at `uniform_count` with `diagonal_extra` added on the
  /// diagonal (a stay-put prior).
  TransitionModel(int n_states, int n_actions, double uniform_count, double diagonal_extra);

  int num_states() const { return n_states_; }
  int num_actions() const { return n_actions_; }

  double count(int action, int next, int prev) const {
    return counts_[action][next * n_states_ + prev];
  }
  void add_count(int action, int next, int prev, double amount) {
    counts_[action][next * n_states_ + prev] += amount;
  }
  std::span<const double> raw_counts(int action) const { return counts_[action]; }
  std::span<double> raw_counts_mutable(int action) { return counts_[action]; }

  double prob(int action, int next, int prev) const {
    return norm_[action][next * n_states_ + prev];
  }
  std::span<const double> normalized(int action) const { return norm_[action]; }

  /// out[next] = sum_prev p(next | prev, action) * b[prev].
  void predict(int action, const BeliefVector& b, BeliefVector& out) const;

  /// Recomputes normalized columns. Throws std::domain_error on nonpositive
  /// pseudo-counts.
  void refresh();
  /// Recompute only one action's matrix (learning touches few per batch).
  void refresh_action(int action);

 private:
  int n_states_;
  int n_actions_;
  std::vector<std::vector<double>> counts_;  // [action][next * n_states + prev]
  std::vector<std::vector<double>> norm_;
};

enum class PreferenceMode { normal, protective };

/// Log-preference vectors over observation bins, one per factor. C(o) is the
/// sum of the per-factor components. The error component's high bin carries
/// -3.0 normally and -11.5 in protective mode.
struct PreferenceModel {
  std::array<std::vector<double>, 4> components;
  PreferenceMode mode = PreferenceMode::normal;

  /// Defaults: prefer low latency, be indifferent to rate, mildly prefer
  /// short queues, strongly prefer the low-error bin.
  static PreferenceModel baseline();

  double value(const ObservationTuple& o) const {
    return components[0][o.latency_bin] + components[1][o.rate_bin] +
           components[2][o.queue_bin] + components[3][o.error_bin];
  }
};

/// One of the 20 predefined routing actions.
struct Policy {
  int id = 0;
  std::array<double, 3> weights = {0, 0, 0};  // (w_light, w_medium, w_heavy)
  std::string label;
};

/// The default 20-entry action table: 1 balanced, 5 heavy-biased, 4
/// medium-biased, 4 light-biased, 6 exploratory.
std::vector<Policy> default_policy_table();

inline constexpr int kNumPolicies = 20;

/// Everything the decision loop needs, treated as an immutable snapshot
/// between slow-tick updates.
struct GenerativeModel {
  StateSpace space;
  ObservationModel A;
  TransitionModel B;
  PreferenceModel C;
  std::vector<Policy> policies;

  /// Router-space model with uniform A, stay-put B prior, baseline C and the
  /// default policy table.
  static GenerativeModel initial(double a_count = 1.0, double b_uniform = 1.0 / kNumStates,
                                 double b_diag_extra = 1.0);
};

/// Risk / ambiguity / cost decomposition of G(a), all in nats.
struct FreeEnergyBreakdown {
  double risk = 0;
  double ambiguity = 0;
  double cost = 0;
  double total = 0;
};

}  // namespace aif
