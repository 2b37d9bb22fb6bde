#include "aif/model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aif {

BeliefVector BeliefVector::delta(int n, int state) {
  BeliefVector b(n, 0.0);
  b.p[state] = 1.0;
  return b;
}

double BeliefVector::sum() const { return std::accumulate(p.begin(), p.end(), 0.0); }

void BeliefVector::normalize() {
  double s = sum();
  if (s <= 0.0) throw std::runtime_error("belief has zero total mass");
  for (double& v : p) v /= s;
}

double BeliefVector::entropy() const {
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v * std::log(v);
  return h;
}

int BeliefVector::argmax() const {
  int best = 0;
  for (int i = 1; i < size(); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

ObservationModel::ObservationModel(std::vector<int> bins, int n_states, double initial_count)
    : bins_(std::move(bins)), n_states_(n_states) {
  if (initial_count <= 0) throw std::domain_error("pseudo-counts must be positive");
  counts_.reserve(bins_.size());
  for (int b : bins_) counts_.emplace_back(static_cast<size_t>(b) * n_states_, initial_count);
  refresh();
}

void ObservationModel::refresh() {
  norm_.assign(counts_.size(), {});
  column_entropy_.assign(n_states_, 0.0);
  for (int k = 0; k < num_factors(); ++k) {
    norm_[k].resize(counts_[k].size());
    for (int s = 0; s < n_states_; ++s) {
      double total = 0;
      for (int j = 0; j < bins_[k]; ++j) {
        double c = counts_[k][j * n_states_ + s];
        if (c <= 0) throw std::domain_error("observation pseudo-count must stay positive");
        total += c;
      }
      double h = 0;
      for (int j = 0; j < bins_[k]; ++j) {
        double p = counts_[k][j * n_states_ + s] / total;
        norm_[k][j * n_states_ + s] = p;
        if (p > 0) h -= p * std::log(p);
      }
      column_entropy_[s] += h;
    }
  }
}

double ObservationModel::total_count(int factor) const {
  return std::accumulate(counts_[factor].begin(), counts_[factor].end(), 0.0);
}

TransitionModel::TransitionModel(int n_states, int n_actions, double uniform_count,
                                 double diagonal_extra)
    : n_states_(n_states), n_actions_(n_actions) {
  if (uniform_count <= 0) throw std::domain_error("pseudo-counts must be positive");
  counts_.reserve(n_actions_);
  for (int a = 0; a < n_actions_; ++a) {
    auto& m = counts_.emplace_back(static_cast<size_t>(n_states_) * n_states_, uniform_count);
    for (int s = 0; s < n_states_; ++s) m[s * n_states_ + s] += diagonal_extra;
  }
  refresh();
}

void TransitionModel::refresh() {
  norm_.assign(n_actions_, {});
  for (int a = 0; a < n_actions_; ++a) {
    norm_[a].resize(counts_[a].size());
    refresh_action(a);
  }
}

void TransitionModel::refresh_action(int action) {
  auto& cnt = counts_[action];
  auto& nrm = norm_[action];
  if (nrm.size() != cnt.size()) nrm.resize(cnt.size());
  for (int prev = 0; prev < n_states_; ++prev) {
    double total = 0;
    for (int next = 0; next < n_states_; ++next) {
      double c = cnt[next * n_states_ + prev];
      if (c <= 0) throw std::domain_error("transition pseudo-count must stay positive");
      total += c;
    }
    for (int next = 0; next < n_states_; ++next)
      nrm[next * n_states_ + prev] = cnt[next * n_states_ + prev] / total;
  }
}

void TransitionModel::predict(int action, const BeliefVector& b, BeliefVector& out) const {
  const auto& m = norm_[action];
  out.p.assign(n_states_, 0.0);
  for (int next = 0; next < n_states_; ++next) {
    const double* row = m.data() + static_cast<size_t>(next) * n_states_;
    double acc = 0;
    for (int prev = 0; prev < n_states_; ++prev) acc += row[prev] * b.p[prev];
    out.p[next] = acc;
  }
}

PreferenceModel PreferenceModel::baseline() {
  PreferenceModel c;
  c.components[0] = {0.0, -1.0, -3.0};  // latency: low bins strongly preferred
  c.components[1] = {0.0, 0.0, 0.0};    // rate: workload-driven, no preference
  c.components[2] = {0.0, -0.5, -1.5};  // queue depth
  c.components[3] = {0.0, -3.0};        // error rate
  c.mode = PreferenceMode::normal;
  return c;
}

std::vector<Policy> default_policy_table() {
  std::vector<Policy> t;
  auto add = [&](double l, double m, double h, const char* label) {
    t.push_back(Policy{static_cast<int>(t.size()), {l, m, h}, label});
  };
  add(0.33, 0.33, 0.34, "balanced");
  add(0.15, 0.25, 0.60, "heavy-biased");
  add(0.10, 0.20, 0.70, "heavy-biased");
  add(0.05, 0.15, 0.80, "heavy-biased");
  add(0.00, 0.10, 0.90, "heavy-biased");
  add(0.00, 0.00, 1.00, "heavy-biased");
  add(0.20, 0.60, 0.20, "medium-biased");
  add(0.15, 0.70, 0.15, "medium-biased");
  add(0.10, 0.80, 0.10, "medium-biased");
  add(0.00, 1.00, 0.00, "medium-biased");
  add(0.60, 0.20, 0.20, "light-biased");
  add(0.70, 0.15, 0.15, "light-biased");
  add(0.80, 0.10, 0.10, "light-biased");
  add(1.00, 0.00, 0.00, "light-biased");
  add(0.50, 0.30, 0.20, "exploratory");
  add(0.20, 0.30, 0.50, "exploratory");
  add(0.40, 0.40, 0.20, "exploratory");
  add(0.20, 0.40, 0.40, "exploratory");
  add(0.40, 0.20, 0.40, "exploratory");
  add(0.25, 0.50, 0.25, "exploratory");
  return t;
}

GenerativeModel GenerativeModel::initial(double a_count, double b_uniform, double b_diag_extra) {
  return GenerativeModel{
      StateSpace::router(),
      ObservationModel({kObservationBins.begin(), kObservationBins.end()}, kNumStates, a_count),
      TransitionModel(kNumStates, kNumPolicies, b_uniform, b_diag_extra),
      PreferenceModel::baseline(), default_policy_table()};
}

}  // namespace aif
