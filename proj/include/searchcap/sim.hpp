#pragma once

// Discrete-event simulator for the broadcast cluster, used to check how
// tight the analytic bounds are. Queries arrive (Poisson or replayed
// from a trace), fork into one task per index server, join when the
// last task finishes, then queue at the broker.

#include <cstdint>
#include <optional>
#include <vector>

#include "searchcap/model.hpp"

namespace searchcap {

// Independent: every sibling task draws its own service time, the
// textbook fork-join assumption behind the upper bound. Identical: all
// siblings share one draw, modelling perfectly correlated per-query
// work; the join then never waits and the lower bound becomes exact.
enum class CorrelationMode { Independent, Identical };

struct SimConfig {
    int p = 1;
    double lambda = 0;            // ignored for trace-driven runs
    double s_server_mean = 0;     // single-class exponential mean
    std::optional<ServiceParams> two_class;  // used by run_two_class
    double s_broker_mean = 0;
    CorrelationMode mode = CorrelationMode::Independent;
    std::uint64_t horizon = 200000;  // completed queries to simulate
    double warmup_fraction = 0.1;    // completions discarded up front
    int batches = 20;                // batch-means groups for the CI
    std::uint64_t seed = 1;
    void validate() const;
};

struct SimResult {
    double mean_response = 0;
    double ci_halfwidth = 0;   // 95% batch-means confidence half-width
    double utilization = 0;    // busy fraction averaged over servers
    std::uint64_t completed = 0;
    double mean_in_system = 0;     // time-averaged query count in cluster
    double throughput = 0;         // completions per second after warmup
    bool saturated_warning = false;  // offered load >= some station's capacity
};

// Single-class run: every server task is exponential with mean
// s_server_mean. Identical seeds give bit-identical results.
SimResult run(const SimConfig& config);

// Two-class run: each query is a disk-cache hit (mean s_hit) or a miss
// (mean s_miss + s_disk) according to config.two_class. In Identical
// mode siblings share the class draw as well.
SimResult run_two_class(const SimConfig& config);

// Same mechanics with arrival instants taken from the trace (seconds,
// non-decreasing) instead of a Poisson stream.
SimResult run_trace(const SimConfig& config, const std::vector<double>& arrivals);

}  // namespace searchcap
