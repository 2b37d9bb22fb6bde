#pragma once

#include <array>
#include <deque>
#include <functional>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <vector>

#include "aif/dispatcher.hpp"
#include "aif/metrics.hpp"
#include "aif/types.hpp"

namespace aif {

/// Exponential up-times with a fixed repair window.
struct RestartProcess {
  double mean_up_s = 300;
  double down_s = 30;
};

/// Deterministic outage window, for reproducible fault injection in
/// scenarios and tests.
struct DownWindow {
  double start_s = 0;
  double duration_s = 0;
};

/// One simulated tier: a single queue feeding `concurrency_limit` slots.
/// Per-request service time is base_service_ms * (8 / capacity_cores) with
/// optional lognormal jitter, so a 2-core tier runs 4x slower per request
/// than the 8-core reference.
struct TierModel {
  Tier tier = Tier::light;
  double capacity_cores = 2;
  double base_service_ms = 200;
  double service_jitter_sigma = 0;  // lognormal sigma; 0 means deterministic
  int concurrency_limit = 2;
  int queue_capacity = 100;
  std::optional<RestartProcess> restarts;
  std::vector<DownWindow> forced_downs;
};

double service_time_ms(const TierModel& tier, std::mt19937_64& rng);

struct WorkloadSpec {
  enum class Pattern { steady, burst };
  Pattern pattern = Pattern::burst;
  double target_rps = 50;
  double duration_s = 600;
  double burst_on_s = 20;
  double burst_off_s = 10;
};

/// Poisson arrival times over [0, duration). Burst mode alternates on/off
/// phases with the on-rate scaled so the whole-run average is target_rps.
/// Identical (spec, rng state) pairs produce identical streams.
std::vector<double> generate_workload(const WorkloadSpec& spec, std::mt19937_64& rng);

enum class SimEventKind {
  arrival,
  service_complete,
  request_timeout,
  restart_down,
  restart_up,
  fast_tick,
  slow_tick,
  util_poll,
};

struct SimEvent {
  double time = 0;
  long seq = 0;  // insertion order; breaks time ties
  SimEventKind kind = SimEventKind::arrival;
  long request = -1;
  int tier = -1;
  int aux = 0;

  bool operator>(const SimEvent& other) const {
    if (time != other.time) return time > other.time;
    return seq > other.seq;
  }
};

struct SimConfig {
  std::array<TierModel, 3> tiers;  // indexed by Tier
  double timeout_ms = 10000;
  double fast_period_s = 1.0;
  double slow_period_s = 10.0;
  double util_poll_period_s = 10.0;
};

/// Single-threaded discrete-event simulation of the three-tier testbed.
/// The decision engine and metric pipeline hang off the tick hooks, so the
/// same modules run unchanged against virtual or wall-clock time.
class Simulation {
 public:
  /// Returns the routing weights to use until the next fast tick.
  using FastTickHook = std::function<std::array<double, 3>(double now)>;
  using SlowTickHook = std::function<void(double now)>;
  using UtilPollHook = std::function<void(double now, const TierUtilization& util)>;
  using OutcomeHook = std::function<void(const RequestOutcome& outcome)>;

  Simulation(SimConfig cfg, std::uint64_t seed);

  void set_fast_tick_hook(FastTickHook h) { fast_hook_ = std::move(h); }
  void set_slow_tick_hook(SlowTickHook h) { slow_hook_ = std::move(h); }
  void set_util_poll_hook(UtilPollHook h) { util_hook_ = std::move(h); }
  void set_outcome_hook(OutcomeHook h) { outcome_hook_ = std::move(h); }

  /// Initial weights used before the first fast tick.
  void set_weights(const std::array<double, 3>& w);

  /// Processes the arrival stream plus all periodic events through
  /// `duration_s` of virtual time, then drains outstanding requests.
  void run(std::span<const double> arrivals, double duration_s);

  int in_flight() const { return in_flight_; }
  long in_flight_of(Tier t) const { return tier_in_flight_[static_cast<int>(t)]; }
  long arrivals_seen() const { return arrivals_seen_; }
  long outcomes_emitted() const { return outcomes_emitted_; }
  double measured_downtime_s(Tier t) const;
  std::uint64_t weight_epoch() const { return weights_.epoch; }

 private:
  struct Request {
    double arrival = 0;
    Tier tier = Tier::light;
    bool resolved = false;
    bool serving = false;
  };

  struct TierRuntime {
    TierModel model;
    int busy = 0;
    int down_depth = 0;
    std::deque<long> queue;
    std::vector<long> serving;
    double busy_integral = 0;
    double last_busy_change = 0;
    double poll_integral_mark = 0;
    double down_since = 0;
    double total_down = 0;
  };

  void schedule(double time, SimEventKind kind, long request = -1, int tier = -1, int aux = 0);
  void handle(const SimEvent& ev);
  void handle_arrival(double now, long id);
  void start_service(double now, long id);
  void complete_service(double now, long id, int tier_idx);
  void handle_timeout(double now, long id);
  void tier_down(double now, int tier_idx);
  void tier_up(double now, int tier_idx, bool rearm);
  void pull_from_queue(double now, TierRuntime& tr);
  void advance_busy_integral(TierRuntime& tr, double now);
  void emit(double now, long id, OutcomeStatus status, std::optional<double> latency_ms);

  SimConfig cfg_;
  std::array<TierRuntime, 3> tiers_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<>> events_;
  long next_seq_ = 0;
  std::vector<Request> requests_;
  WeightSnapshot weights_;
  int in_flight_ = 0;
  std::array<long, 3> tier_in_flight_ = {0, 0, 0};
  long arrivals_seen_ = 0;
  long outcomes_emitted_ = 0;
  double last_poll_time_ = 0;
  double run_duration_ = 0;
  std::mt19937_64 rng_route_;
  std::mt19937_64 rng_service_;
  std::mt19937_64 rng_restarts_;
  FastTickHook fast_hook_;
  SlowTickHook slow_hook_;
  UtilPollHook util_hook_;
  OutcomeHook outcome_hook_;
};

}  // namespace aif
