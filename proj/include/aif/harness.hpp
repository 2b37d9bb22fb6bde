#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aif/engine.hpp"
#include "aif/metrics.hpp"
#include "aif/scenario.hpp"

namespace aif {

/// The evaluation protocol: strategies x repeated seeded runs against one
/// scenario, each run on a fresh engine.
struct ExperimentSpec {
  std::vector<std::string> strategies = {"aif", "baseline"};
  int runs_per_strategy = 3;
  double run_duration_s = 600;   // desk default; the full protocol uses 2700
  double cooldown_s = 0;         // meaningful only against live hardware
  std::string scenario_path;
  std::vector<std::uint64_t> seeds;  // per run; derived from the scenario seed if empty
};

ExperimentSpec load_experiment_spec(const std::string& path);

/// Per-run metrics in the layout of the overall comparison table. Tier
/// shares use all requests as denominator (shares plus failed_pct account
/// for 100%); the *_succ_pct variants are shares among successful requests
/// only.
struct RunReport {
  std::string strategy;
  std::uint64_t seed = 0;
  long request_count = 0;
  double success_rate_pct = 0;
  double p50_ms = 0;
  double p95_ms = 0;
  double heavy_pct = 0, medium_pct = 0, light_pct = 0, failed_pct = 0;
  double heavy_succ_pct = 0, medium_succ_pct = 0, light_succ_pct = 0;
};

RunReport make_report(const std::vector<RequestOutcome>& outcomes, const std::string& strategy,
                      std::uint64_t seed);

struct MetricStat {
  double mean = 0;
  double stddev = 0;  // sample std (n-1); 0 when n == 1
};

struct StrategyAggregate {
  int n = 0;
  MetricStat succ, p50, p95, heavy, medium, light, failed, requests, heavy_succ;
};

struct AggregateReport {
  std::optional<StrategyAggregate> aif, baseline;
  bool has_delta = false;  // both strategies present
  double delta_succ_pp = 0;
  double delta_p50_pct = 0;  // (aif - base) / base, percent
  double delta_p95_pct = 0;
  double delta_heavy_pp = 0, delta_medium_pp = 0, delta_light_pp = 0, delta_failed_pp = 0;
  double delta_requests = 0;
  double welch_t_p50 = 0;  // Welch's t statistic for the P50 difference
};

AggregateReport aggregate(const std::vector<RunReport>& reports);

/// Writes report.csv (fixed column schema, delta row with percent latency
/// deltas) and summary.txt under out_dir. Throws on I/O failure without
/// leaving a partial CSV behind.
void emit_report(const AggregateReport& agg, const std::vector<RunReport>& runs,
                 const std::string& out_dir);

/// Per-fast-tick view for tests and observers.
struct TickStats {
  double now = 0;
  WindowStats window;
  Engine::TickResult result;
};

/// Extra wiring for a single run; everything is optional.
struct RunSinks {
  std::ostream* outcomes = nullptr;  // line-delimited raw outcome log
  std::ostream* trace = nullptr;     // engine decision trace
  std::function<void(const TickStats&)> tick_observer;
  const GenerativeModel* initial_model = nullptr;  // default: uniform fresh model
};

/// One seeded run of one strategy ("aif" or "baseline") in simulation mode.
RunReport run_single(const Scenario& scenario, const std::string& strategy, std::uint64_t seed,
                     double duration_s, const RunSinks& sinks = {});

/// The full protocol. Writes per-run logs plus report.csv/summary.txt when
/// out_dir is non-empty; progress notes go to `progress` when given.
std::vector<RunReport> run_experiment(const ExperimentSpec& spec, const Scenario& scenario,
                                      const std::string& out_dir, std::ostream* progress);

/// Recomputes a report from a raw outcome log written by run_single.
RunReport replay_log(const std::string& path);

inline constexpr std::array<double, 3> kBaselineWeights = {0.33, 0.33, 0.34};

}  // namespace aif
