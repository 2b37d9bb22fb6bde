#include "aif/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace aif {

void MetricWindow::add(const RequestOutcome& outcome) { samples_.push_back(outcome); }

WindowStats MetricWindow::stats(double now) {
  while (!samples_.empty() && samples_.front().timestamp <= now - duration_)
    samples_.pop_front();

  WindowStats st;
  st.queue_depth = queue_depth_;
  st.sample_count = static_cast<int>(samples_.size());
  if (samples_.empty()) return st;

  std::vector<double> latencies;
  latencies.reserve(samples_.size());
  int failures = 0;
  for (const auto& s : samples_) {
    if (s.status == OutcomeStatus::success) {
      if (s.latency_ms) latencies.push_back(*s.latency_ms);
    } else {
      ++failures;
    }
  }
  st.p95_ms = nearest_rank_percentile(std::move(latencies), 0.95);
  st.rate_rps = static_cast<double>(samples_.size()) / duration_;
  st.error_rate = static_cast<double>(failures) / static_cast<double>(samples_.size());
  return st;
}

double nearest_rank_percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  size_t rank = static_cast<size_t>(std::ceil(q * static_cast<double>(values.size())));
  if (rank < 1) rank = 1;
  return values[rank - 1];
}

namespace {
int three_way_bin(double v, double t1, double t2) {
  if (v < t1) return 0;
  if (v < t2) return 1;
  return 2;
}
}  // namespace

ObservationTuple discretize(double p95_ms, double rate_rps, double queue_depth,
                            double error_rate, const DiscretizationConfig& cfg) {
  ObservationTuple o;
  o.latency_bin = three_way_bin(p95_ms, cfg.latency_t1_ms, cfg.latency_t2_ms);
  o.rate_bin = three_way_bin(rate_rps, cfg.rate_t1_rps, cfg.rate_t2_rps);
  o.queue_bin = three_way_bin(queue_depth, cfg.queue_t1, cfg.queue_t2);
  o.error_bin = error_rate < cfg.error_t1 ? 0 : 1;
  return o;
}

ObservationTuple discretize(const WindowStats& stats, const DiscretizationConfig& cfg) {
  return discretize(stats.p95_ms, stats.rate_rps, stats.queue_depth, stats.error_rate, cfg);
}

int discretize_utilization(double fraction, const DiscretizationConfig& cfg) {
  return three_way_bin(fraction, cfg.util_t1, cfg.util_t2);
}

}  // namespace aif
