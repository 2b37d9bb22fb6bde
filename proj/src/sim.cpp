#include "aif/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aif/rng.hpp"

namespace aif {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double exp_gap(double rate, std::mt19937_64& rng) {
  return -std::log1p(-next_unit(rng)) / rate;
}

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller, platform-stable (std::normal_distribution is not).
  double u1 = next_unit(rng);
  double u2 = next_unit(rng);
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(kTwoPi * u2);
}

}  // namespace

double service_time_ms(const TierModel& tier, std::mt19937_64& rng) {
  constexpr double kReferenceCores = 8.0;
  double t = tier.base_service_ms * (kReferenceCores / tier.capacity_cores);
  if (tier.service_jitter_sigma > 0)
    t *= std::exp(tier.service_jitter_sigma * standard_normal(rng));
  return t;
}

std::vector<double> generate_workload(const WorkloadSpec& spec, std::mt19937_64& rng) {
  if (spec.target_rps <= 0) throw std::invalid_argument("target_rps must be positive");
  std::vector<double> arrivals;
  arrivals.reserve(static_cast<size_t>(spec.target_rps * spec.duration_s * 1.2) + 16);

  if (spec.pattern == WorkloadSpec::Pattern::steady) {
    double t = exp_gap(spec.target_rps, rng);
    while (t < spec.duration_s) {
      arrivals.push_back(t);
      t += exp_gap(spec.target_rps, rng);
    }
    return arrivals;
  }

  const double cycle = spec.burst_on_s + spec.burst_off_s;
  if (spec.burst_on_s <= 0 || cycle <= 0)
    throw std::invalid_argument("burst phases must be positive");
  const double on_rate = spec.target_rps * cycle / spec.burst_on_s;
  for (double phase = 0; phase < spec.duration_s; phase += cycle) {
    const double phase_end = std::min(phase + spec.burst_on_s, spec.duration_s);
    double t = phase + exp_gap(on_rate, rng);
    while (t < phase_end) {
      arrivals.push_back(t);
      t += exp_gap(on_rate, rng);
    }
  }
  return arrivals;
}

Simulation::Simulation(SimConfig cfg, std::uint64_t seed)
    : cfg_(cfg),
      rng_route_(make_rng(seed, RngStream::routing)),
      rng_service_(make_rng(seed, RngStream::service)),
      rng_restarts_(make_rng(seed, RngStream::restarts)) {
  for (int i = 0; i < 3; ++i) {
    tiers_[i].model = cfg_.tiers[i];
    if (tiers_[i].model.concurrency_limit < 1)
      throw std::invalid_argument("concurrency_limit must be >= 1");
  }
  weights_ = WeightSnapshot{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 0};
}

void Simulation::set_weights(const std::array<double, 3>& w) {
  weights_.weights = w;
  ++weights_.epoch;
}

void Simulation::schedule(double time, SimEventKind kind, long request, int tier, int aux) {
  events_.push(SimEvent{time, next_seq_++, kind, request, tier, aux});
}

double Simulation::measured_downtime_s(Tier t) const {
  return tiers_[static_cast<int>(t)].total_down;
}

void Simulation::advance_busy_integral(TierRuntime& tr, double now) {
  tr.busy_integral += tr.busy * (now - tr.last_busy_change);
  tr.last_busy_change = now;
}

void Simulation::run(std::span<const double> arrivals, double duration_s) {
  run_duration_ = duration_s;
  requests_.clear();
  requests_.reserve(arrivals.size());
  for (double t : arrivals) {
    schedule(t, SimEventKind::arrival, static_cast<long>(requests_.size()));
    requests_.push_back(Request{t, Tier::light, false, false});
  }
  arrivals_seen_ = static_cast<long>(arrivals.size());

  // Periodic events; the poll precedes the fast tick at coincident times so
  // the tick sees fresh readings, and each handler re-arms itself.
  if (util_hook_) schedule(cfg_.util_poll_period_s, SimEventKind::util_poll);
  if (slow_hook_) schedule(cfg_.slow_period_s, SimEventKind::slow_tick);
  if (fast_hook_) schedule(cfg_.fast_period_s, SimEventKind::fast_tick);

  for (int i = 0; i < 3; ++i) {
    auto& m = tiers_[i].model;
    for (const auto& w : m.forced_downs) {
      schedule(w.start_s, SimEventKind::restart_down, -1, i, /*rearm=*/0);
      schedule(w.start_s + w.duration_s, SimEventKind::restart_up, -1, i, 0);
    }
    if (m.restarts)
      schedule(exp_gap(1.0 / m.restarts->mean_up_s, rng_restarts_), SimEventKind::restart_down,
               -1, i, /*rearm=*/1);
  }

  while (!events_.empty()) {
    SimEvent ev = events_.top();
    events_.pop();
    handle(ev);
  }

  // Close out downtime accounting for tiers still down at the end.
  for (auto& tr : tiers_) {
    if (tr.down_depth > 0) {
      tr.total_down += std::max(0.0, run_duration_ - tr.down_since);
      tr.down_depth = 0;
    }
  }
}

void Simulation::handle(const SimEvent& ev) {
  const double now = ev.time;
  switch (ev.kind) {
    case SimEventKind::arrival:
      handle_arrival(now, ev.request);
      break;
    case SimEventKind::service_complete:
      complete_service(now, ev.request, ev.tier);
      break;
    case SimEventKind::request_timeout:
      handle_timeout(now, ev.request);
      break;
    case SimEventKind::restart_down:
      if (now < run_duration_) {
        tier_down(now, ev.tier);
        if (ev.aux == 1)  // exponential chain carries its own repair event
          schedule(now + tiers_[ev.tier].model.restarts->down_s, SimEventKind::restart_up, -1,
                   ev.tier, 1);
      }
      break;
    case SimEventKind::restart_up:
      tier_up(now, ev.tier, ev.aux == 1);
      break;
    case SimEventKind::fast_tick: {
      if (fast_hook_) set_weights(fast_hook_(now));
      const double next = now + cfg_.fast_period_s;
      if (next <= run_duration_) schedule(next, SimEventKind::fast_tick);
      break;
    }
    case SimEventKind::slow_tick: {
      if (slow_hook_) slow_hook_(now);
      const double next = now + cfg_.slow_period_s;
      if (next <= run_duration_) schedule(next, SimEventKind::slow_tick);
      break;
    }
    case SimEventKind::util_poll: {
      TierUtilization u;
      double* fields[3] = {&u.light, &u.medium, &u.heavy};
      const double interval = now - last_poll_time_;
      for (int i = 0; i < 3; ++i) {
        auto& tr = tiers_[i];
        advance_busy_integral(tr, now);
        const double capacity = tr.model.concurrency_limit * interval;
        *fields[i] = capacity > 0
                         ? std::clamp((tr.busy_integral - tr.poll_integral_mark) / capacity,
                                      0.0, 1.0)
                         : 0.0;
        tr.poll_integral_mark = tr.busy_integral;
      }
      last_poll_time_ = now;
      if (util_hook_) util_hook_(now, u);
      const double next = now + cfg_.util_poll_period_s;
      if (next <= run_duration_) schedule(next, SimEventKind::util_poll);
      break;
    }
  }
}

void Simulation::handle_arrival(double now, long id) {
  Request& req = requests_[id];
  req.tier = choose_tier(weights_, rng_route_);
  ++in_flight_;
  ++tier_in_flight_[static_cast<int>(req.tier)];

  TierRuntime& tr = tiers_[static_cast<int>(req.tier)];
  if (tr.down_depth > 0) {
    emit(now, id, OutcomeStatus::error, std::nullopt);
    return;
  }
  if (tr.busy < tr.model.concurrency_limit) {
    start_service(now, id);
  } else if (static_cast<int>(tr.queue.size()) < tr.model.queue_capacity) {
    tr.queue.push_back(id);
  } else {
    emit(now, id, OutcomeStatus::error, std::nullopt);  // queue overflow
    return;
  }
  schedule(now + cfg_.timeout_ms / 1000.0, SimEventKind::request_timeout, id);
}

void Simulation::start_service(double now, long id) {
  Request& req = requests_[id];
  TierRuntime& tr = tiers_[static_cast<int>(req.tier)];
  advance_busy_integral(tr, now);
  ++tr.busy;
  tr.serving.push_back(id);
  req.serving = true;
  const double service_s = service_time_ms(tr.model, rng_service_) / 1000.0;
  schedule(now + service_s, SimEventKind::service_complete, id, static_cast<int>(req.tier));
}

void Simulation::complete_service(double now, long id, int tier_idx) {
  Request& req = requests_[id];
  TierRuntime& tr = tiers_[tier_idx];
  if (!req.serving) return;  // the tier restarted underneath this request
  req.serving = false;
  advance_busy_integral(tr, now);
  --tr.busy;
  tr.serving.erase(std::find(tr.serving.begin(), tr.serving.end(), id));
  if (!req.resolved)
    emit(now, id, OutcomeStatus::success, (now - req.arrival) * 1000.0);
  pull_from_queue(now, tr);
}

void Simulation::pull_from_queue(double now, TierRuntime& tr) {
  while (tr.busy < tr.model.concurrency_limit && !tr.queue.empty()) {
    long id = tr.queue.front();
    tr.queue.pop_front();
    if (requests_[id].resolved) continue;  // timed out while queued
    start_service(now, id);
  }
}

void Simulation::handle_timeout(double now, long id) {
  Request& req = requests_[id];
  if (req.resolved) return;
  emit(now, id, OutcomeStatus::timeout, std::nullopt);
  if (!req.serving) {
    // Still queued: free the slot it was holding in line.
    TierRuntime& tr = tiers_[static_cast<int>(req.tier)];
    auto it = std::find(tr.queue.begin(), tr.queue.end(), id);
    if (it != tr.queue.end()) tr.queue.erase(it);
  }
  // An in-service request keeps its slot until completion; the backend does
  // not cancel work the client gave up on.
}

void Simulation::tier_down(double now, int tier_idx) {
  TierRuntime& tr = tiers_[tier_idx];
  ++tr.down_depth;
  if (tr.down_depth > 1) return;
  tr.down_since = now;
  advance_busy_integral(tr, now);
  tr.busy = 0;
  for (long id : tr.serving) {
    requests_[id].serving = false;
    if (!requests_[id].resolved) emit(now, id, OutcomeStatus::error, std::nullopt);
  }
  tr.serving.clear();
  for (long id : tr.queue)
    if (!requests_[id].resolved) emit(now, id, OutcomeStatus::error, std::nullopt);
  tr.queue.clear();
}

void Simulation::tier_up(double now, int tier_idx, bool rearm) {
  TierRuntime& tr = tiers_[tier_idx];
  if (tr.down_depth > 0) {
    --tr.down_depth;
    if (tr.down_depth == 0) tr.total_down += now - tr.down_since;
  }
  if (rearm && tr.model.restarts && now < run_duration_) {
    const double next_down =
        now + exp_gap(1.0 / tr.model.restarts->mean_up_s, rng_restarts_);
    schedule(next_down, SimEventKind::restart_down, -1, tier_idx, 1);
  }
}

void Simulation::emit(double now, long id, OutcomeStatus status,
                      std::optional<double> latency_ms) {
  Request& req = requests_[id];
  req.resolved = true;
  --in_flight_;
  --tier_in_flight_[static_cast<int>(req.tier)];
  ++outcomes_emitted_;
  if (outcome_hook_)
    outcome_hook_(RequestOutcome{now, req.tier, status, latency_ms});
}

}  // namespace aif
