#pragma once

#include <cstdint>
#include <string>

#include "aif/engine.hpp"
#include "aif/metrics.hpp"
#include "aif/sim.hpp"

namespace aif {

/// Everything a simulated run needs: tier models, workload shape, engine
/// parameters and discretization thresholds. Loaded from the JSON scenario
/// schema documented in the README.
struct Scenario {
  SimConfig sim;
  WorkloadSpec workload;
  EngineConfig engine;
  DiscretizationConfig discretization;
  std::uint64_t base_seed = 1;
};

/// Parses a scenario file. Throws std::runtime_error with the offending path
/// and field on malformed input; nothing is partially applied.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::string& origin);

}  // namespace aif
