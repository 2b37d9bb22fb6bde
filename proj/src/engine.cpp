#include "aif/engine.hpp"

#include <json.hpp>

#include "aif/learning.hpp"
#include "aif/rng.hpp"

namespace aif {

std::pair<PreferenceModel, PreferenceMode> adjust_preferences(const PreferenceModel& current,
                                                              const PreferenceModel& baseline,
                                                              double recent_error_rate,
                                                              PreferenceMode mode,
                                                              const EngineConfig& cfg) {
  if (mode == PreferenceMode::normal && recent_error_rate > cfg.error_trigger) {
    PreferenceModel next = baseline;
    next.mode = PreferenceMode::protective;
    next.components[3].back() = cfg.protective_error_logpref;
    for (double& c : next.components[0]) c *= cfg.latency_relax_factor;
    return {next, PreferenceMode::protective};
  }
  if (mode == PreferenceMode::protective && recent_error_rate < cfg.error_release) {
    PreferenceModel next = baseline;
    next.mode = PreferenceMode::normal;
    return {next, PreferenceMode::normal};
  }
  return {current, mode};
}

Engine::Engine(EngineConfig cfg, GenerativeModel initial_model)
    : cfg_(cfg),
      model_(std::make_shared<const GenerativeModel>(std::move(initial_model))),
      buffer_(cfg.replay_capacity),
      rng_action_(make_rng(cfg.rng_seed, RngStream::action_selection)),
      rng_replay_(make_rng(cfg.rng_seed, RngStream::replay_sampling)) {
  baseline_prefs_ = model_->C;
  baseline_prefs_.components[3].back() = cfg_.normal_error_logpref;
  baseline_prefs_.mode = PreferenceMode::normal;
  prefs_ = baseline_prefs_;
  mode_ = PreferenceMode::normal;
  belief_ = BeliefVector::uniform(model_->space.size());
}

std::shared_ptr<const GenerativeModel> Engine::model_snapshot() const {
  std::lock_guard lock(model_mu_);
  return model_;
}

void Engine::publish(std::shared_ptr<const GenerativeModel> next) {
  std::lock_guard lock(model_mu_);
  model_ = std::move(next);
}

std::array<double, 3> Engine::current_weights() const {
  return model_snapshot()->policies[current_policy_].weights;
}

std::vector<double> Engine::observation_evidence(const GenerativeModel& m,
                                                 const ObservationTuple& o,
                                                 const std::optional<UtilBins>& util_bins) const {
  auto like = likelihood(m.A, o);
  if (!util_bins) return like;
  // Soft evidence from the 10 s utilization poll: per tier dimension, weight
  // util_evidence_hit on the observed bin and util_evidence_miss elsewhere.
  // State dims 2,3,4 are util_heavy, util_medium, util_light.
  const int dims[3] = {4, 3, 2};  // state dim per Tier (light, medium, heavy)
  for (int t = 0; t < 3; ++t) {
    const int observed = (*util_bins)[t];
    for (int s = 0; s < m.space.size(); ++s) {
      like[s] *= (m.space.level_of(s, dims[t]) == observed) ? cfg_.util_evidence_hit
                                                            : cfg_.util_evidence_miss;
    }
  }
  return like;
}

Engine::TickResult Engine::fast_tick(double now, const ObservationTuple& o,
                                     double recent_error_rate,
                                     const std::optional<UtilBins>& util_bins) {
  auto model = model_snapshot();

  std::tie(prefs_, mode_) =
      adjust_preferences(prefs_, baseline_prefs_, recent_error_rate, mode_, cfg_);

  BeliefVector prior = belief_predict(belief_, model->B, current_policy_);
  auto evidence = observation_evidence(*model, o, util_bins);
  BeliefVector posterior = belief_update(prior, evidence);

  const int n_policies = static_cast<int>(model->policies.size());
  std::vector<double> g(n_policies);
  BeliefVector b_next;
  for (int a = 0; a < n_policies; ++a) {
    model->B.predict(a, posterior, b_next);
    double r = risk(predict_observations(b_next, model->A), prefs_);
    double amb = ambiguity(b_next, model->A);
    double cost = action_cost(model->policies[a], cfg_.kappa);
    g[a] = r + amb + cost;
  }

  int selected = cfg_.deterministic_actions ? select_action_argmin(g)
                                            : select_action(g, cfg_.beta, rng_action_);

  const double dt = now - last_policy_change_;
  buffer_.record(TransitionRecord{belief_, posterior, current_policy_, o, dt});
  pending_pairs_.emplace_back(o, posterior);

  if (experience_log_) {
    nlohmann::json rec{{"t", now},
                       {"action", current_policy_},
                       {"dt", dt},
                       {"obs", o.bins()},
                       {"prior_map", belief_.argmax()},
                       {"post_map", posterior.argmax()}};
    *experience_log_ << rec.dump() << '\n';
  }

  if (selected != current_policy_) {
    current_policy_ = selected;
    last_policy_change_ = now;
  }
  belief_ = std::move(posterior);
  ++tick_count_;

  TickResult result{selected, model->policies[selected].weights, mode_, std::move(g)};

  if (trace_) {
    auto map_state = model->space.decode(belief_.argmax());
    nlohmann::json line{{"v", 1},
                        {"t", now},
                        {"obs", o.bins()},
                        {"belief_entropy", belief_.entropy()},
                        {"map_state", map_state},
                        {"G", result.efe_totals},
                        {"policy", selected},
                        {"mode", mode_ == PreferenceMode::protective ? "protective" : "normal"}};
    *trace_ << line.dump() << '\n';
  }

  return result;
}

void Engine::slow_tick(double /*now*/) {
  auto next = std::make_shared<GenerativeModel>(*model_snapshot());
  for (const auto& [obs, belief] : pending_pairs_)
    update_observation_model(next->A, obs, belief, cfg_.alpha);
  pending_pairs_.clear();

  auto batch = buffer_.sample(cfg_.replay_batch, rng_replay_);
  update_transition_model(next->B, batch, cfg_.alpha_b);

  next->C = prefs_;
  publish(std::move(next));
}

}  // namespace aif
