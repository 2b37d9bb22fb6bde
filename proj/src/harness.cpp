#include "aif/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aif/rng.hpp"
#include "aif/sim.hpp"

namespace aif {

namespace {

using nlohmann::json;

const char* status_name(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::success: return "success";
    case OutcomeStatus::error: return "error";
    default: return "timeout";
  }
}

OutcomeStatus status_from(const std::string& s) {
  if (s == "success") return OutcomeStatus::success;
  if (s == "error") return OutcomeStatus::error;
  if (s == "timeout") return OutcomeStatus::timeout;
  throw std::runtime_error("unknown outcome status: " + s);
}

Tier tier_from(const std::string& s) {
  for (int i = 0; i < 3; ++i)
    if (s == kTierNames[i]) return static_cast<Tier>(i);
  throw std::runtime_error("unknown tier: " + s);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

MetricStat stat_of(const std::vector<double>& xs) {
  MetricStat m;
  if (xs.empty()) return m;
  double sum = 0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return m;
}

StrategyAggregate aggregate_strategy(const std::vector<RunReport>& runs) {
  StrategyAggregate agg;
  agg.n = static_cast<int>(runs.size());
  auto collect = [&](auto getter) {
    std::vector<double> xs;
    xs.reserve(runs.size());
    for (const auto& r : runs) xs.push_back(getter(r));
    return stat_of(xs);
  };
  agg.succ = collect([](const RunReport& r) { return r.success_rate_pct; });
  agg.p50 = collect([](const RunReport& r) { return r.p50_ms; });
  agg.p95 = collect([](const RunReport& r) { return r.p95_ms; });
  agg.heavy = collect([](const RunReport& r) { return r.heavy_pct; });
  agg.medium = collect([](const RunReport& r) { return r.medium_pct; });
  agg.light = collect([](const RunReport& r) { return r.light_pct; });
  agg.failed = collect([](const RunReport& r) { return r.failed_pct; });
  agg.requests = collect([](const RunReport& r) { return static_cast<double>(r.request_count); });
  agg.heavy_succ = collect([](const RunReport& r) { return r.heavy_succ_pct; });
  return agg;
}

}  // namespace

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment spec: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  ExperimentSpec spec;
  if (j.contains("strategies")) spec.strategies = j["strategies"].get<std::vector<std::string>>();
  spec.runs_per_strategy = j.value("runs_per_strategy", spec.runs_per_strategy);
  spec.run_duration_s = j.value("run_duration_s", spec.run_duration_s);
  spec.cooldown_s = j.value("cooldown_s", spec.cooldown_s);
  spec.scenario_path = j.value("scenario", spec.scenario_path);
  if (j.contains("seeds")) spec.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (spec.strategies.empty()) throw std::runtime_error("experiment needs at least one strategy");
  for (const auto& s : spec.strategies)
    if (s != "aif" && s != "baseline") throw std::runtime_error("unknown strategy: " + s);
  if (spec.runs_per_strategy < 1 || spec.run_duration_s <= 0)
    throw std::runtime_error("runs must be >= 1 and duration positive");
  return spec;
}

RunReport make_report(const std::vector<RequestOutcome>& outcomes, const std::string& strategy,
                      std::uint64_t seed) {
  RunReport r;
  r.strategy = strategy;
  r.seed = seed;
  r.request_count = static_cast<long>(outcomes.size());
  if (outcomes.empty()) return r;

  std::vector<double> latencies;
  latencies.reserve(outcomes.size());
  long succ_by_tier[3] = {0, 0, 0};
  long successes = 0;
  for (const auto& o : outcomes) {
    if (o.status == OutcomeStatus::success) {
      ++successes;
      ++succ_by_tier[static_cast<int>(o.tier)];
      if (o.latency_ms) latencies.push_back(*o.latency_ms);
    }
  }
  const double total = static_cast<double>(outcomes.size());
  r.success_rate_pct = 100.0 * static_cast<double>(successes) / total;
  r.p50_ms = nearest_rank_percentile(latencies, 0.50);
  r.p95_ms = nearest_rank_percentile(std::move(latencies), 0.95);
  r.light_pct = 100.0 * static_cast<double>(succ_by_tier[0]) / total;
  r.medium_pct = 100.0 * static_cast<double>(succ_by_tier[1]) / total;
  r.heavy_pct = 100.0 * static_cast<double>(succ_by_tier[2]) / total;
  r.failed_pct = 100.0 * static_cast<double>(outcomes.size() - successes) / total;
  if (successes > 0) {
    r.light_succ_pct = 100.0 * static_cast<double>(succ_by_tier[0]) / successes;
    r.medium_succ_pct = 100.0 * static_cast<double>(succ_by_tier[1]) / successes;
    r.heavy_succ_pct = 100.0 * static_cast<double>(succ_by_tier[2]) / successes;
  }
  return r;
}

AggregateReport aggregate(const std::vector<RunReport>& reports) {
  AggregateReport agg;
  std::vector<RunReport> aif_runs, base_runs;
  for (const auto& r : reports)
    (r.strategy == "aif" ? aif_runs : base_runs).push_back(r);
  if (!aif_runs.empty()) agg.aif = aggregate_strategy(aif_runs);
  if (!base_runs.empty()) agg.baseline = aggregate_strategy(base_runs);
  if (agg.aif && agg.baseline) {
    agg.has_delta = true;
    const auto& a = *agg.aif;
    const auto& b = *agg.baseline;
    agg.delta_succ_pp = a.succ.mean - b.succ.mean;
    agg.delta_p50_pct = b.p50.mean != 0 ? 100.0 * (a.p50.mean - b.p50.mean) / b.p50.mean : 0;
    agg.delta_p95_pct = b.p95.mean != 0 ? 100.0 * (a.p95.mean - b.p95.mean) / b.p95.mean : 0;
    agg.delta_heavy_pp = a.heavy.mean - b.heavy.mean;
    agg.delta_medium_pp = a.medium.mean - b.medium.mean;
    agg.delta_light_pp = a.light.mean - b.light.mean;
    agg.delta_failed_pp = a.failed.mean - b.failed.mean;
    agg.delta_requests = a.requests.mean - b.requests.mean;
    const double var_term = a.p50.stddev * a.p50.stddev / std::max(1, a.n) +
                            b.p50.stddev * b.p50.stddev / std::max(1, b.n);
    agg.welch_t_p50 = var_term > 0 ? (a.p50.mean - b.p50.mean) / std::sqrt(var_term) : 0;
  }
  return agg;
}

namespace {

void append_strategy_row(std::string& csv, const char* name, const StrategyAggregate& s) {
  csv += name;
  csv += ',' + fmt(s.succ.mean) + ',' + fmt(s.succ.stddev);
  csv += ',' + fmt(s.p50.mean) + ',' + fmt(s.p50.stddev);
  csv += ',' + fmt(s.p95.mean) + ',' + fmt(s.p95.stddev);
  csv += ',' + fmt(s.heavy.mean) + ',' + fmt(s.medium.mean) + ',' + fmt(s.light.mean);
  csv += ',' + fmt(s.failed.mean) + ',' + fmt1(s.requests.mean);
  csv += '\n';
}

}  // namespace

void emit_report(const AggregateReport& agg, const std::vector<RunReport>& runs,
                 const std::string& out_dir) {
  if (!agg.aif && !agg.baseline) throw std::runtime_error("nothing to report: no runs");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  // The CSV is assembled in memory and written in one shot, so an unwritable
  // path cannot leave a truncated file.
  std::string csv =
      "strategy,succ_pct,succ_std,p50_ms,p50_std,p95_ms,p95_std,heavy_pct,medium_pct,"
      "light_pct,failed_pct,requests\n";
  if (agg.aif) append_strategy_row(csv, "aif", *agg.aif);
  if (agg.baseline) append_strategy_row(csv, "baseline", *agg.baseline);
  if (agg.has_delta) {
    // Latency deltas are percentages relative to baseline; everything else
    // is an absolute difference (percentage points for shares).
    csv += "delta," + fmt(agg.delta_succ_pp) + ",," + fmt(agg.delta_p50_pct) + ",," +
           fmt(agg.delta_p95_pct) + ",," + fmt(agg.delta_heavy_pp) + ',' +
           fmt(agg.delta_medium_pp) + ',' + fmt(agg.delta_light_pp) + ',' +
           fmt(agg.delta_failed_pp) + ',' + fmt1(agg.delta_requests) + '\n';
  }

  const fs::path csv_path = fs::path(out_dir) / "report.csv";
  {
    std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + csv_path.string() + " for writing");
    out << csv;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(csv_path, ec);
      throw std::runtime_error("write failed for " + csv_path.string());
    }
  }

  std::ostringstream sum;
  auto describe = [&](const char* name, const StrategyAggregate& s) {
    sum << name << " (n=" << s.n << ")\n";
    sum << "  success    " << fmt(s.succ.mean) << " % +- " << fmt(s.succ.stddev) << "\n";
    sum << "  p50        " << fmt(s.p50.mean) << " ms +- " << fmt(s.p50.stddev) << "\n";
    sum << "  p95        " << fmt(s.p95.mean) << " ms +- " << fmt(s.p95.stddev) << "\n";
    sum << "  tier share of all requests (heavy/medium/light/failed)  " << fmt(s.heavy.mean)
        << " / " << fmt(s.medium.mean) << " / " << fmt(s.light.mean) << " / "
        << fmt(s.failed.mean) << " %\n";
    sum << "  heavy share among successful requests  " << fmt(s.heavy_succ.mean) << " % +- "
        << fmt(s.heavy_succ.stddev) << "\n";
    sum << "  requests   " << fmt1(s.requests.mean) << "\n";
  };
  if (agg.aif) describe("aif", *agg.aif);
  if (agg.baseline) describe("baseline", *agg.baseline);
  if (agg.has_delta) {
    sum << "delta (aif - baseline)\n";
    sum << "  success    " << fmt(agg.delta_succ_pp) << " pp\n";
    sum << "  p50        " << fmt(agg.delta_p50_pct) << " %\n";
    sum << "  p95        " << fmt(agg.delta_p95_pct) << " %\n";
    sum << "  heavy/medium/light/failed  " << fmt(agg.delta_heavy_pp) << " / "
        << fmt(agg.delta_medium_pp) << " / " << fmt(agg.delta_light_pp) << " / "
        << fmt(agg.delta_failed_pp) << " pp\n";
    sum << "  Welch t (p50 difference)  " << fmt(agg.welch_t_p50) << "\n";
  }
  sum << "runs\n";
  for (const auto& r : runs) {
    sum << "  " << r.strategy << " seed=" << r.seed << " succ=" << fmt(r.success_rate_pct)
        << "% p50=" << fmt(r.p50_ms) << "ms p95=" << fmt(r.p95_ms)
        << "ms heavy_succ_share=" << fmt(r.heavy_succ_pct) << "% n=" << r.request_count << "\n";
  }

  const fs::path sum_path = fs::path(out_dir) / "summary.txt";
  std::ofstream out(sum_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + sum_path.string() + " for writing");
  out << sum.str();
}

RunReport run_single(const Scenario& scenario, const std::string& strategy, std::uint64_t seed,
                     double duration_s, const RunSinks& sinks) {
  if (strategy != "aif" && strategy != "baseline")
    throw std::runtime_error("unknown strategy: " + strategy);

  WorkloadSpec wl = scenario.workload;
  wl.duration_s = duration_s;
  auto workload_rng = make_rng(seed, RngStream::workload);
  const auto arrivals = generate_workload(wl, workload_rng);

  SimConfig simcfg = scenario.sim;
  simcfg.fast_period_s = scenario.engine.fast_period_s;
  simcfg.slow_period_s = scenario.engine.slow_period_s;
  simcfg.util_poll_period_s = scenario.engine.slow_period_s;
  Simulation sim(simcfg, seed);

  MetricWindow window(10.0);
  std::vector<RequestOutcome> outcomes;
  outcomes.reserve(arrivals.size());

  if (sinks.outcomes) {
    json meta{{"log", "aif-router-outcomes"}, {"v", 1},        {"strategy", strategy},
              {"seed", seed},                 {"duration_s", duration_s}};
    *sinks.outcomes << meta.dump() << '\n';
  }
  sim.set_outcome_hook([&](const RequestOutcome& o) {
    window.add(o);
    outcomes.push_back(o);
    if (sinks.outcomes) {
      json line{{"t", o.timestamp},
                {"tier", tier_name(o.tier)},
                {"status", status_name(o.status)}};
      if (o.latency_ms) line["latency_ms"] = *o.latency_ms;
      *sinks.outcomes << line.dump() << '\n';
    }
  });

  if (strategy == "baseline") {
    sim.set_weights(kBaselineWeights);
    sim.run(arrivals, duration_s);
    return make_report(outcomes, strategy, seed);
  }

  EngineConfig ecfg = scenario.engine;
  ecfg.rng_seed = seed;
  Engine engine(ecfg, sinks.initial_model ? *sinks.initial_model : GenerativeModel::initial());
  engine.set_trace_sink(sinks.trace);

  std::optional<UtilBins> fresh_util;
  sim.set_util_poll_hook([&](double, const TierUtilization& u) {
    fresh_util = UtilBins{discretize_utilization(u.light, scenario.discretization),
                          discretize_utilization(u.medium, scenario.discretization),
                          discretize_utilization(u.heavy, scenario.discretization)};
  });
  sim.set_fast_tick_hook([&](double now) {
    window.set_queue_depth(sim.in_flight());
    WindowStats stats = window.stats(now);
    ObservationTuple obs = discretize(stats, scenario.discretization);
    auto result = engine.fast_tick(now, obs, stats.error_rate, fresh_util);
    fresh_util.reset();
    if (sinks.tick_observer) sinks.tick_observer(TickStats{now, stats, result});
    return result.weights;
  });
  sim.set_slow_tick_hook([&](double now) { engine.slow_tick(now); });
  sim.set_weights(engine.current_weights());
  sim.run(arrivals, duration_s);
  return make_report(outcomes, strategy, seed);
}

std::vector<RunReport> run_experiment(const ExperimentSpec& spec, const Scenario& scenario,
                                      const std::string& out_dir, std::ostream* progress) {
  namespace fs = std::filesystem;
  std::vector<std::uint64_t> seeds = spec.seeds;
  for (int k = static_cast<int>(seeds.size()); k < spec.runs_per_strategy; ++k)
    seeds.push_back(scenario.base_seed + static_cast<std::uint64_t>(k));

  const bool writing = !out_dir.empty();
  if (writing) {
    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "runs", ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + out_dir);
  }

  std::vector<RunReport> reports;
  for (const auto& strategy : spec.strategies) {
    for (int k = 0; k < spec.runs_per_strategy; ++k) {
      const std::uint64_t seed = seeds[k];
      RunSinks sinks;
      std::ofstream outcomes_file, trace_file;
      if (writing) {
        const auto stem = strategy + "_seed" + std::to_string(seed);
        outcomes_file.open(fs::path(out_dir) / "runs" / (stem + ".outcomes.jsonl"),
                           std::ios::binary | std::ios::trunc);
        if (!outcomes_file) throw std::runtime_error("cannot write outcome log in " + out_dir);
        sinks.outcomes = &outcomes_file;
        if (strategy == "aif") {
          trace_file.open(fs::path(out_dir) / "runs" / (stem + ".trace.jsonl"),
                          std::ios::binary | std::ios::trunc);
          if (!trace_file) throw std::runtime_error("cannot write trace log in " + out_dir);
          sinks.trace = &trace_file;
        }
      }
      if (progress)
        *progress << "run " << strategy << " seed=" << seed << " duration=" << spec.run_duration_s
                  << "s\n";
      reports.push_back(run_single(scenario, strategy, seed, spec.run_duration_s, sinks));
    }
  }

  if (writing) emit_report(aggregate(reports), reports, out_dir);
  return reports;
}

RunReport replay_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open outcome log: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty outcome log: " + path);
  json meta;
  try {
    meta = json::parse(line);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": bad metadata line: " + e.what());
  }
  if (meta.value("log", "") != "aif-router-outcomes")
    throw std::runtime_error(path + ": not an outcome log");
  const std::string strategy = meta.value("strategy", "unknown");
  const std::uint64_t seed = meta.value("seed", std::uint64_t{0});

  std::vector<RequestOutcome> outcomes;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    RequestOutcome o;
    o.timestamp = j.value("t", 0.0);
    o.tier = tier_from(j.at("tier").get<std::string>());
    o.status = status_from(j.at("status").get<std::string>());
    if (j.contains("latency_ms")) o.latency_ms = j["latency_ms"].get<double>();
    outcomes.push_back(o);
  }
  return make_report(outcomes, strategy, seed);
}

}  // namespace aif
