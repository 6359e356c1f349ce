#pragma once

// Bundled parameter sets and the on-disk scenario config format. The
// presets carry the measured service demands of two study clusters: a
// small validation cluster (up to 8 servers, 1.25M documents each) and
// a projected 100-server cluster (10M documents each) at four memory
// sizes. They make the CLI usable without writing a config file first.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "searchcap/scenario.hpp"

namespace searchcap {

struct ScenarioConfig {
    ClusterConfig cluster;
    ParamTable params;
    std::optional<ScalingSpec> scaling;
    std::optional<SloSpec> slo;
    std::optional<CacheParams> cache;
};

// Known names: "table4", "table5-reference", "table5-4xmem",
// "paper-case-study". Throws ConfigError for anything else.
ScenarioConfig preset(const std::string& name);

std::vector<std::string> preset_names();

// JSON file, durations in milliseconds:
// {
//   "cluster": {"p": 100, "b": 10e6},
//   "params": {"reference": {"s_broker_ms": 3.45, "s_hit_ms": 28.23,
//                            "s_miss_ms": 35.31, "s_disk_ms": 66.03,
//                            "hit": 0.02}, ...},
//   "scaling": {"profile": "reference", "cpu_speedup": 1, "disk_speedup": 1},
//   "slo": {"max_ms": 300, "total_rate": 200},
//   "cache": {"hit_result": 0.5, "s_ms": 0.069}
// }
// cluster and params are required, the rest optional.
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

// Picks the effective service demands: the config's scaling spec when
// present, otherwise the sole profile. Ambiguous multi-profile configs
// without a scaling spec are rejected.
ServiceParams effective_params(const ScenarioConfig& config);

// Measured (server count, broker demand in seconds) points from the
// validation cluster; feeding them to broker_demand_fit reproduces the
// projection behind the 100-server broker figure.
std::vector<std::pair<double, double>> validation_broker_points();

}  // namespace searchcap
