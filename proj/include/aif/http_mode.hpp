#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "aif/dispatcher.hpp"
#include "aif/engine.hpp"
#include "aif/metrics.hpp"

namespace aif {

/// Scrapes a JSON endpoint of the form {"light":0.42,"medium":0.77,
/// "heavy":0.21}. poll() returns nullopt on connection failure or bad JSON.
class HttpUtilizationSource : public UtilizationSource {
 public:
  explicit HttpUtilizationSource(std::string url);
  std::optional<TierUtilization> poll() override;

 private:
  std::string host_;
  std::string path_;
};

/// Weighted reverse proxy over the three tier endpoints. Thread-safe: any
/// number of server threads may call forward() while the engine thread
/// updates weights.
class HttpDispatcher {
 public:
  HttpDispatcher(std::array<TierEndpoint, 3> endpoints, std::uint64_t seed);

  void set_weights(const std::array<double, 3>& w);
  WeightSnapshot weights() const;

  struct ForwardResult {
    int status = 502;
    std::string body;
    std::string content_type = "text/plain";
  };

  /// Proxies one request body verbatim to a weight-sampled tier. Reports the
  /// outcome (502 on error, 504 on timeout) to the outcome hook.
  ForwardResult forward(const std::string& method, const std::string& path,
                        const std::string& body, const std::string& content_type);

  void set_outcome_hook(std::function<void(const RequestOutcome&)> hook);
  long in_flight() const { return in_flight_.load(); }
  long in_flight_of(Tier t) const {
    return endpoints_[static_cast<int>(t)].counter->load();
  }

 private:
  struct Endpoint {
    TierEndpoint cfg;
    std::unique_ptr<std::atomic<long>> counter;
  };
  std::array<Endpoint, 3> endpoints_;
  mutable std::mutex mu_;  // guards weights_ and rng_
  WeightSnapshot weights_;
  std::mt19937_64 rng_;
  std::atomic<long> in_flight_{0};
  std::function<void(const RequestOutcome&)> outcome_hook_;
  std::chrono::steady_clock::time_point start_;
};

struct ServeConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::array<std::string, 3> tier_urls;  // light, medium, heavy
  double timeout_ms = 10000;
  std::string metrics_url;  // optional utilization scrape endpoint
  EngineConfig engine;
  DiscretizationConfig discretization;
  std::string trace_path;
};

/// Live wall-clock mode: HTTP proxy plus the 1 s / 10 s engine loops.
/// start() spawns the server and engine threads; stop() shuts both down.
class ServeRuntime {
 public:
  explicit ServeRuntime(ServeConfig cfg);
  ~ServeRuntime();

  /// Binds the listen socket (throws on failure) and starts the loops.
  void start();
  void stop();
  int bound_port() const { return bound_port_; }
  HttpDispatcher& dispatcher() { return *dispatcher_; }
  std::uint64_t ticks() const { return tick_count_.load(); }

 private:
  void engine_loop();

  ServeConfig cfg_;
  std::unique_ptr<HttpDispatcher> dispatcher_;
  std::unique_ptr<Engine> engine_;
  std::unique_ptr<HttpUtilizationSource> util_source_;
  MetricWindow window_;
  std::mutex window_mu_;
  std::atomic<bool> running_{false};
  std::atomic<std::uint64_t> tick_count_{0};
  int bound_port_ = 0;
  std::thread server_thread_;
  std::thread engine_thread_;
  struct Impl;  // holds the httplib server
  std::unique_ptr<Impl> impl_;
  std::unique_ptr<std::ofstream> trace_file_;
  std::chrono::steady_clock::time_point start_;
};

/// CLI entry: runs until interrupted.
int run_serve(const ServeConfig& cfg);

}  // namespace aif
