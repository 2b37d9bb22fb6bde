#include "aif/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace aif {

namespace {

using nlohmann::json;

TierModel parse_tier(const json& j, Tier tier) {
  TierModel m;
  m.tier = tier;
  m.capacity_cores = j.value("capacity_cores", m.capacity_cores);
  m.base_service_ms = j.value("base_service_ms", m.base_service_ms);
  m.service_jitter_sigma = j.value("service_jitter_sigma", m.service_jitter_sigma);
  m.concurrency_limit = j.value("concurrency_limit",
                                std::max(1, static_cast<int>(m.capacity_cores + 0.5)));
  m.queue_capacity = j.value("queue_capacity", m.queue_capacity);
  if (j.contains("restarts") && !j["restarts"].is_null()) {
    RestartProcess rp;
    rp.mean_up_s = j["restarts"].value("mean_up_s", rp.mean_up_s);
    rp.down_s = j["restarts"].value("down_s", rp.down_s);
    m.restarts = rp;
  }
  if (j.contains("forced_downs")) {
    for (const auto& w : j["forced_downs"])
      m.forced_downs.push_back(DownWindow{w.at("start_s").get<double>(),
                                          w.at("duration_s").get<double>()});
  }
  if (m.capacity_cores <= 0 || m.base_service_ms <= 0)
    throw std::runtime_error("tier capacity and service time must be positive");
  return m;
}

void parse_engine(const json& j, EngineConfig& e) {
  e.beta = j.value("beta", e.beta);
  e.alpha = j.value("alpha", e.alpha);
  e.alpha_b = j.value("alpha_b", e.alpha_b);
  e.kappa = j.value("kappa", e.kappa);
  e.error_trigger = j.value("error_trigger", e.error_trigger);
  e.error_release = j.value("error_release", e.error_release);
  e.protective_error_logpref = j.value("protective_error_logpref", e.protective_error_logpref);
  e.normal_error_logpref = j.value("normal_error_logpref", e.normal_error_logpref);
  e.latency_relax_factor = j.value("latency_relax_factor", e.latency_relax_factor);
  e.util_evidence_hit = j.value("util_evidence_hit", e.util_evidence_hit);
  e.util_evidence_miss = j.value("util_evidence_miss", e.util_evidence_miss);
  if (e.beta < 0 || e.alpha <= 0 || e.alpha_b <= 0)
    throw std::runtime_error("engine parameters out of range");
  if (!(e.error_release >= 0 && e.error_release < e.error_trigger && e.error_trigger <= 1))
    throw std::runtime_error("error thresholds must satisfy 0 <= release < trigger <= 1");
}

void parse_discretization(const json& j, DiscretizationConfig& d) {
  d.latency_t1_ms = j.value("latency_t1_ms", d.latency_t1_ms);
  d.latency_t2_ms = j.value("latency_t2_ms", d.latency_t2_ms);
  d.rate_t1_rps = j.value("rate_t1_rps", d.rate_t1_rps);
  d.rate_t2_rps = j.value("rate_t2_rps", d.rate_t2_rps);
  d.queue_t1 = j.value("queue_t1", d.queue_t1);
  d.queue_t2 = j.value("queue_t2", d.queue_t2);
  d.error_t1 = j.value("error_t1", d.error_t1);
  d.util_t1 = j.value("util_t1", d.util_t1);
  d.util_t2 = j.value("util_t2", d.util_t2);
  if (d.latency_t1_ms >= d.latency_t2_ms || d.rate_t1_rps >= d.rate_t2_rps ||
      d.queue_t1 >= d.queue_t2 || d.util_t1 >= d.util_t2)
    throw std::runtime_error("discretization thresholds must be strictly increasing");
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  try {
    Scenario sc;
    sc.base_seed = j.value("seed", sc.base_seed);
    sc.sim.timeout_ms = j.value("timeout_ms", sc.sim.timeout_ms);

    const json& tiers = j.at("tiers");
    sc.sim.tiers[0] = parse_tier(tiers.at("light"), Tier::light);
    sc.sim.tiers[1] = parse_tier(tiers.at("medium"), Tier::medium);
    sc.sim.tiers[2] = parse_tier(tiers.at("heavy"), Tier::heavy);

    if (j.contains("workload")) {
      const json& w = j["workload"];
      std::string pattern = w.value("pattern", "burst");
      if (pattern == "steady")
        sc.workload.pattern = WorkloadSpec::Pattern::steady;
      else if (pattern == "burst")
        sc.workload.pattern = WorkloadSpec::Pattern::burst;
      else
        throw std::runtime_error("unknown workload pattern: " + pattern);
      sc.workload.target_rps = w.value("target_rps", sc.workload.target_rps);
      sc.workload.duration_s = w.value("duration_s", sc.workload.duration_s);
      sc.workload.burst_on_s = w.value("burst_on_s", sc.workload.burst_on_s);
      sc.workload.burst_off_s = w.value("burst_off_s", sc.workload.burst_off_s);
      if (sc.workload.target_rps <= 0)
        throw std::runtime_error("target_rps must be positive");
    }

    if (j.contains("engine")) parse_engine(j["engine"], sc.engine);
    if (j.contains("discretization")) parse_discretization(j["discretization"], sc.discretization);

    sc.sim.fast_period_s = sc.engine.fast_period_s;
    sc.sim.slow_period_s = sc.engine.slow_period_s;
    sc.sim.util_poll_period_s = sc.engine.slow_period_s;
    return sc;
  } catch (const json::exception& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace aif
