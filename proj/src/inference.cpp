#include "aif/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aif/rng.hpp"

namespace aif {

std::vector<double> likelihood(const ObservationModel& A, std::span<const int> obs_bins) {
  const int n = A.num_states();
  if (static_cast<int>(obs_bins.size()) != A.num_factors())
    throw std::out_of_range("observation has wrong number of factors");
  std::vector<double> like(n, 1.0);
  for (int k = 0; k < A.num_factors(); ++k) {
    const int bin = obs_bins[k];
    if (bin < 0 || bin >= A.bins(k))
      throw std::out_of_range("observation bin out of range for factor " + std::to_string(k));
    const double* row = A.normalized(k).data() + static_cast<size_t>(bin) * n;
    for (int s = 0; s < n; ++s) like[s] *= row[s];
  }
  return like;
}

std::vector<double> likelihood(const ObservationModel& A, const ObservationTuple& o) {
  auto bins = o.bins();
  return likelihood(A, std::span<const int>(bins.data(), bins.size()));
}

BeliefVector belief_predict(const BeliefVector& b, const TransitionModel& B, int action) {
  BeliefVector out;
  B.predict(action, b, out);
  out.normalize();  // columns are stochastic, so this only scrubs rounding
  return out;
}

BeliefVector belief_update(const BeliefVector& prior, std::span<const double> like) {
  if (static_cast<int>(like.size()) != prior.size())
    throw std::invalid_argument("likelihood length does not match belief");
  BeliefVector post(prior.size(), 0.0);
  double total = 0;
  for (int s = 0; s < prior.size(); ++s) {
    post.p[s] = prior.p[s] * like[s];
    total += post.p[s];
  }
  if (total <= 0.0) throw std::runtime_error("degenerate evidence: posterior mass is zero");
  for (double& v : post.p) v /= total;
  return post;
}

std::vector<std::vector<double>> predict_observations(const BeliefVector& b_next,
                                                      const ObservationModel& A) {
  const int n = A.num_states();
  std::vector<std::vector<double>> marginals(A.num_factors());
  for (int k = 0; k < A.num_factors(); ++k) {
    marginals[k].assign(A.bins(k), 0.0);
    for (int j = 0; j < A.bins(k); ++j) {
      const double* row = A.normalized(k).data() + static_cast<size_t>(j) * n;
      double acc = 0;
      for (int s = 0; s < n; ++s) acc += row[s] * b_next.p[s];
      marginals[k][j] = acc;
    }
  }
  return marginals;
}

double risk(const std::vector<std::vector<double>>& pred, const PreferenceModel& C) {
  double total = 0;
  for (size_t k = 0; k < pred.size(); ++k) {
    const auto& prefs = C.components[k];
    // softmax of the log-preference component
    double mx = *std::max_element(prefs.begin(), prefs.end());
    double z = 0;
    for (double c : prefs) z += std::exp(c - mx);
    for (size_t j = 0; j < pred[k].size(); ++j) {
      double p = pred[k][j];
      if (p <= 0) continue;
      double q = std::exp(prefs[j] - mx) / z;
      total += p * std::log(p / q);
    }
  }
  return std::max(total, 0.0);
}

double ambiguity(const BeliefVector& b_next, const ObservationModel& A) {
  double total = 0;
  for (int s = 0; s < b_next.size(); ++s)
    if (b_next.p[s] > 0) total += b_next.p[s] * A.column_entropy(s);
  return std::max(total, 0.0);
}

double action_cost(const Policy& a, double kappa) {
  double h = 0;
  for (double w : a.weights)
    if (w > 0) h -= w * std::log(w);
  return std::max(kappa * (std::log(3.0) - h), 0.0);
}

FreeEnergyBreakdown expected_free_energy(const BeliefVector& b, const GenerativeModel& model,
                                         const Policy& a, double kappa) {
  BeliefVector b_next = belief_predict(b, model.B, a.id);
  FreeEnergyBreakdown g;
  g.risk = risk(predict_observations(b_next, model.A), model.C);
  g.ambiguity = ambiguity(b_next, model.A);
  g.cost = action_cost(a, kappa);
  g.total = g.risk + g.ambiguity + g.cost;
  return g;
}

std::vector<double> action_distribution(std::span<const double> G, double beta) {
  // p(a) ~ exp(-beta G(a)); subtracting the minimum G keeps exponents <= 0.
  double gmin = *std::min_element(G.begin(), G.end());
  std::vector<double> p(G.size());
  double z = 0;
  for (size_t i = 0; i < G.size(); ++i) {
    p[i] = std::exp(-beta * (G[i] - gmin));
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

int select_action(std::span<const double> G, double beta, std::mt19937_64& rng) {
  auto p = action_distribution(G, beta);
  double r = next_unit(rng);
  double cum = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    cum += p[i];
    if (r < cum) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;  // r landed on accumulated rounding
}

int select_action_argmin(std::span<const double> G) {
  int best = 0;
  for (size_t i = 1; i < G.size(); ++i)
    if (G[i] < G[best]) best = static_cast<int>(i);
  return best;
}

}  // namespace aif
