#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "aif/inference.hpp"
#include "aif/metrics.hpp"
#include "aif/model.hpp"
#include "aif/replay.hpp"

namespace aif {

struct EngineConfig {
  double beta = 5.0;
  double alpha = 0.05;    // A learning rate
  double alpha_b = 0.05;  // B learning rate
  double kappa = 0.1;     // action cost scale
  double fast_period_s = 1.0;
  double slow_period_s = 10.0;
  double error_trigger = 0.15;   // enter protective above this
  double error_release = 0.10;   // leave protective below this
  double protective_error_logpref = -11.5;
  double normal_error_logpref = -3.0;
  double latency_relax_factor = 0.25;
  double util_evidence_hit = 0.8;  // soft-evidence weight on the observed bin
  double util_evidence_miss = 0.1;
  std::uint64_t rng_seed = 1;
  std::size_t replay_capacity = 5000;
  std::size_t replay_batch = 100;
  bool deterministic_actions = false;  // argmin instead of softmax sampling
};

/// Hysteresis-guarded preference switch. Entering protective mode sets the
/// error component's high bin to the protective value and relaxes latency
/// preferences by latency_relax_factor; leaving restores the baseline.
/// Inside the (release, trigger] band the mode holds.
std::pair<PreferenceModel, PreferenceMode> adjust_preferences(const PreferenceModel& current,
                                                              const PreferenceModel& baseline,
                                                              double recent_error_rate,
                                                              PreferenceMode mode,
                                                              const EngineConfig& cfg);

/// Utilization bins indexed by Tier (light, medium, heavy).
using UtilBins = std::array<int, 3>;

/// The inference-action loop. fast_tick runs once per second: belief
/// prediction, Bayesian update, expected free energy over the policy table,
/// softmax action sampling, and transition recording. slow_tick runs every
/// ten seconds and publishes a freshly learned model snapshot; between slow
/// ticks the fast loop's A and B are bit-identical.
class Engine {
 public:
  Engine(EngineConfig cfg, GenerativeModel initial_model);
  explicit Engine(EngineConfig cfg) : Engine(cfg, GenerativeModel::initial()) {}

  struct TickResult {
    int policy_id = 0;
    std::array<double, 3> weights = {0, 0, 0};
    PreferenceMode mode = PreferenceMode::normal;
    std::vector<double> efe_totals;
  };

  /// One fast-loop step. `recent_error_rate` is the 10 s window error rate
  /// used by the preference check; `util_bins` carries fresh utilization
  /// readings when the poll fired since the last tick.
  TickResult fast_tick(double now, const ObservationTuple& o, double recent_error_rate,
                       const std::optional<UtilBins>& util_bins);

  /// One slow-loop step: applies the accumulated observation pairs to A and
  /// a replay batch to B, then atomically publishes the new snapshot.
  void slow_tick(double now);

  std::shared_ptr<const GenerativeModel> model_snapshot() const;
  const BeliefVector& belief() const { return belief_; }
  const PreferenceModel& preferences() const { return prefs_; }
  PreferenceMode mode() const { return mode_; }
  int current_policy() const { return current_policy_; }
  std::array<double, 3> current_weights() const;
  std::uint64_t tick_count() const { return tick_count_; }
  const ReplayBuffer& replay() const { return buffer_; }

  /// Line-delimited decision trace (one JSON object per fast tick).
  void set_trace_sink(std::ostream* sink) { trace_ = sink; }
  /// Optional append-only experience log of transition summaries.
  void set_experience_log(std::ostream* sink) { experience_log_ = sink; }

 private:
  void publish(std::shared_ptr<const GenerativeModel> next);
  std::vector<double> observation_evidence(const GenerativeModel& m, const ObservationTuple& o,
                                           const std::optional<UtilBins>& util_bins) const;

  EngineConfig cfg_;
  mutable std::mutex model_mu_;
  std::shared_ptr<const GenerativeModel> model_;
  PreferenceModel prefs_;
  PreferenceModel baseline_prefs_;
  PreferenceMode mode_ = PreferenceMode::normal;
  BeliefVector belief_;
  int current_policy_ = 0;
  double last_policy_change_ = 0;
  std::uint64_t tick_count_ = 0;
  ReplayBuffer buffer_;
  std::vector<std::pair<ObservationTuple, BeliefVector>> pending_pairs_;
  std::mt19937_64 rng_action_;
  std::mt19937_64 rng_replay_;
  std::ostream* trace_ = nullptr;
  std::ostream* experience_log_ = nullptr;
};

}  // namespace aif
