#include "aif/http_mode.hpp"

#include <chrono>
#include <csignal>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

namespace aif {

namespace {

/// Splits "http://host:port/some/path" into client target and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme = url.find("://");
  auto after = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = url.find('/', after);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

double now_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

HttpUtilizationSource::HttpUtilizationSource(std::string url) {
  std::tie(host_, path_) = split_url(url);
}

std::optional<TierUtilization> HttpUtilizationSource::poll() {
  httplib::Client cli(host_);
  cli.set_connection_timeout(2, 0);
  cli.set_read_timeout(2, 0);
  auto res = cli.Get(path_);
  if (!res || res->status != 200) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(res->body);
    TierUtilization u;
    u.light = j.at("light").get<double>();
    u.medium = j.at("medium").get<double>();
    u.heavy = j.at("heavy").get<double>();
    return u;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

HttpDispatcher::HttpDispatcher(std::array<TierEndpoint, 3> endpoints, std::uint64_t seed)
    : rng_(make_rng(seed, RngStream::routing)), start_(std::chrono::steady_clock::now()) {
  for (int i = 0; i < 3; ++i) {
    endpoints_[i].cfg = endpoints[i];
    endpoints_[i].counter = std::make_unique<std::atomic<long>>(0);
  }
  weights_ = WeightSnapshot{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 0};
}

void HttpDispatcher::set_weights(const std::array<double, 3>& w) {
  std::lock_guard lock(mu_);
  weights_.weights = w;
  ++weights_.epoch;
}

WeightSnapshot HttpDispatcher::weights() const {
  std::lock_guard lock(mu_);
  return weights_;
}

void HttpDispatcher::set_outcome_hook(std::function<void(const RequestOutcome&)> hook) {
  outcome_hook_ = std::move(hook);
}

HttpDispatcher::ForwardResult HttpDispatcher::forward(const std::string& method,
                                                      const std::string& path,
                                                      const std::string& body,
                                                      const std::string& content_type) {
  Tier tier;
  {
    std::lock_guard lock(mu_);
    tier = choose_tier(weights_, rng_);
  }
  auto& ep = endpoints_[static_cast<int>(tier)];
  ep.counter->fetch_add(1);
  in_flight_.fetch_add(1);

  const auto [target, base_path] = split_url(ep.cfg.target);
  const std::string full_path = base_path == "/" ? path : base_path + path;
  const double timeout_s = ep.cfg.timeout_ms / 1000.0;

  httplib::Client cli(target);
  cli.set_connection_timeout(std::chrono::duration<double>(timeout_s));
  cli.set_read_timeout(std::chrono::duration<double>(timeout_s));
  cli.set_write_timeout(std::chrono::duration<double>(timeout_s));

  const auto t0 = std::chrono::steady_clock::now();
  httplib::Result res = method == "GET" ? cli.Get(full_path)
                                        : cli.Post(full_path, body, content_type.c_str());
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  RequestOutcome outcome;
  outcome.timestamp = now_seconds(start_);
  outcome.tier = tier;

  ForwardResult out;
  if (res && res->status >= 200 && res->status < 300) {
    outcome.status = OutcomeStatus::success;
    outcome.latency_ms = elapsed_ms;
    out.status = res->status;
    out.body = res->body;
    if (res->has_header("Content-Type")) out.content_type = res->get_header_value("Content-Type");
  } else if (!res && elapsed_ms >= ep.cfg.timeout_ms * 0.9) {
    outcome.status = OutcomeStatus::timeout;
    out.status = 504;
    out.body = "upstream timeout";
  } else {
    outcome.status = OutcomeStatus::error;
    out.status = 502;
    out.body = "upstream error";
  }

  ep.counter->fetch_sub(1);
  in_flight_.fetch_sub(1);
  if (outcome_hook_) outcome_hook_(outcome);
  return out;
}

struct ServeRuntime::Impl {
  httplib::Server server;
};

ServeRuntime::ServeRuntime(ServeConfig cfg) : cfg_(std::move(cfg)), window_(10.0) {
  std::array<TierEndpoint, 3> eps;
  for (int i = 0; i < 3; ++i)
    eps[i] = TierEndpoint{static_cast<Tier>(i), cfg_.tier_urls[i], cfg_.timeout_ms, 0};
  dispatcher_ = std::make_unique<HttpDispatcher>(eps, cfg_.engine.rng_seed);
  engine_ = std::make_unique<Engine>(cfg_.engine);
  if (!cfg_.metrics_url.empty())
    util_source_ = std::make_unique<HttpUtilizationSource>(cfg_.metrics_url);
  if (!cfg_.trace_path.empty()) {
    trace_file_ = std::make_unique<std::ofstream>(cfg_.trace_path, std::ios::trunc);
    if (*trace_file_) engine_->set_trace_sink(trace_file_.get());
  }
  impl_ = std::make_unique<Impl>();
  start_ = std::chrono::steady_clock::now();

  dispatcher_->set_outcome_hook([this](const RequestOutcome& o) {
    std::lock_guard lock(window_mu_);
    window_.add(o);
  });

  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    auto r = dispatcher_->forward(req.method, req.path, req.body,
                                  req.get_header_value("Content-Type"));
    res.status = r.status;
    res.set_content(r.body, r.content_type.c_str());
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
}

ServeRuntime::~ServeRuntime() { stop(); }

void ServeRuntime::start() {
  bound_port_ = cfg_.listen_port != 0
                    ? (impl_->server.bind_to_port(cfg_.listen_host, cfg_.listen_port)
                           ? cfg_.listen_port
                           : -1)
                    : impl_->server.bind_to_any_port(cfg_.listen_host);
  if (bound_port_ <= 0)
    throw std::runtime_error("cannot bind " + cfg_.listen_host + ":" +
                             std::to_string(cfg_.listen_port));
  running_ = true;
  server_thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  engine_thread_ = std::thread([this] { engine_loop(); });
  dispatcher_->set_weights(engine_->current_weights());
}

void ServeRuntime::stop() {
  if (!running_.exchange(false)) return;
  impl_->server.stop();
  if (server_thread_.joinable()) server_thread_.join();
  if (engine_thread_.joinable()) engine_thread_.join();
}

void ServeRuntime::engine_loop() {
  using clock = std::chrono::steady_clock;
  const auto fast_period = std::chrono::duration<double>(cfg_.engine.fast_period_s);
  const int slow_every =
      std::max(1, static_cast<int>(cfg_.engine.slow_period_s / cfg_.engine.fast_period_s + 0.5));
  auto next = clock::now() + std::chrono::duration_cast<clock::duration>(fast_period);
  std::uint64_t tick = 0;
  std::optional<UtilBins> fresh_util;

  while (running_) {
    std::this_thread::sleep_until(next);
    next += std::chrono::duration_cast<clock::duration>(fast_period);
    if (!running_) break;
    ++tick;

    if (util_source_ && tick % slow_every == 0) {
      if (auto u = util_source_->poll()) {
        fresh_util = UtilBins{discretize_utilization(u->light, cfg_.discretization),
                              discretize_utilization(u->medium, cfg_.discretization),
                              discretize_utilization(u->heavy, cfg_.discretization)};
      }
    }

    WindowStats stats;
    {
      std::lock_guard lock(window_mu_);
      window_.set_queue_depth(static_cast<int>(dispatcher_->in_flight()));
      stats = window_.stats(now_seconds(start_));
    }
    auto obs = discretize(stats, cfg_.discretization);
    auto result = engine_->fast_tick(now_seconds(start_), obs, stats.error_rate, fresh_util);
    fresh_util.reset();
    dispatcher_->set_weights(result.weights);
    if (tick % slow_every == 0) engine_->slow_tick(now_seconds(start_));
    tick_count_.store(tick);
  }
}

namespace {
std::atomic<bool> g_interrupted{false};
void on_signal(int) { g_interrupted = true; }
}  // namespace

int run_serve(const ServeConfig& cfg) {
  ServeRuntime runtime(cfg);
  runtime.start();
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  runtime.stop();
  return 0;
}

}  // namespace aif
