#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "aif/model.hpp"
#include "aif/types.hpp"

namespace aif {

enum class OutcomeStatus { success, error, timeout };

/// Terminal record of one request. latency_ms is present only for successes.
struct RequestOutcome {
  double timestamp = 0;  // seconds, monotonic
  Tier tier = Tier::light;
  OutcomeStatus status = OutcomeStatus::success;
  std::optional<double> latency_ms;
};

struct WindowStats {
  double p95_ms = 0;
  double rate_rps = 0;
  int queue_depth = 0;
  double error_rate = 0;  // (errors + timeouts) / total
  int sample_count = 0;
};

/// Sliding window over recent request outcomes. Samples older than the
/// window duration are evicted before any statistic is derived. Queue depth
/// is a level, not a flow; the dispatcher feeds the current in-flight count
/// through set_queue_depth.
class MetricWindow {
 public:
  explicit MetricWindow(double duration_s = 10.0) : duration_(duration_s) {}

  void add(const RequestOutcome& outcome);
  void set_queue_depth(int depth) { queue_depth_ = depth; }
  double duration() const { return duration_; }
  size_t size() const { return samples_.size(); }

  /// P95 is nearest-rank (ceil(0.95 n), 1-based) over successful-request
  /// latencies; rate divides by the full window duration. An empty window
  /// yields (0, 0, queue, 0).
  WindowStats stats(double now);

 private:
  double duration_;
  std::deque<RequestOutcome> samples_;
  int queue_depth_ = 0;
};

/// Nearest-rank percentile over an unsorted sample (copied and sorted
/// internally). q in (0, 1]; empty input yields 0.
double nearest_rank_percentile(std::vector<double> values, double q);

/// Bin thresholds. Each metric maps bin 0 below t1, bin 1 in [t1, t2),
/// bin 2 at or above t2; a value equal to a threshold lands in the upper
/// bin. Error rate uses the single threshold.
struct DiscretizationConfig {
  double latency_t1_ms = 500, latency_t2_ms = 2000;
  double rate_t1_rps = 20, rate_t2_rps = 40;
  double queue_t1 = 10, queue_t2 = 50;
  double error_t1 = 0.10;
  double util_t1 = 0.4, util_t2 = 0.8;
};

ObservationTuple discretize(const WindowStats& stats, const DiscretizationConfig& cfg);
ObservationTuple discretize(double p95_ms, double rate_rps, double queue_depth,
                            double error_rate, const DiscretizationConfig& cfg);

/// Maps a CPU fraction in [0,1] onto {idle, moderate, saturated}.
int discretize_utilization(double fraction, const DiscretizationConfig& cfg);

/// Per-tier CPU fractions as polled every slow period.
struct TierUtilization {
  double light = 0, medium = 0, heavy = 0;
  double at(Tier t) const {
    switch (t) {
      case Tier::light: return light;
      case Tier::medium: return medium;
      default: return heavy;
    }
  }
};

/// Source of utilization readings; implementations poll the simulator or
/// scrape an HTTP metrics endpoint.
class UtilizationSource {
 public:
  virtual ~UtilizationSource() = default;
  virtual std::optional<TierUtilization> poll() = 0;
};

}  // namespace aif
