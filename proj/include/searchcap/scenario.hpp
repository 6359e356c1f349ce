#pragma once

// What-if layer on top of the queueing model: hardware scaling knobs,
// load sweeps, and sizing against a response-time objective.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "searchcap/model.hpp"

namespace searchcap {

// Service demand columns keyed by memory profile ("reference", "2x", ...).
// More memory raises the disk-cache hit rate, so each profile is a full
// measured parameter set rather than a derived one.
using ParamTable = std::map<std::string, ServiceParams>;

// A faster CPU divides the CPU demands, a faster disk divides the disk
// demand. The broker demand is CPU-bound and scales with the CPU unless
// broker_cpu_fixed is set (e.g. the broker stays on old hardware).
struct ScalingSpec {
    std::string memory_profile = "reference";
    double cpu_speedup = 1.0;
    double disk_speedup = 1.0;
    bool broker_cpu_fixed = false;
    void validate() const;
};

struct SloSpec {
    double max_mean_response = 0;  // seconds, upper-bound target
    double total_rate = 0;         // queries per second the service must absorb
    void validate() const;
};

ServiceParams apply_scaling(const ParamTable& table, const ScalingSpec& scaling);

struct SweepPoint {
    double lambda = 0;
    bool saturated = false;
    ModelReport report;   // meaningful only when !saturated
    double u_server = 0;  // offered utilization, may exceed 1
};

struct SweepResult {
    std::vector<SweepPoint> points;

    // Columns: lambda,r_lower_s,r_upper_s,u_server,saturated. Saturated
    // points keep their row with empty bound fields.
    void write_csv(std::ostream& out) const;
};

// Evaluates the bounds at lambda_min, lambda_min + step, ... up to but
// not including lambda_max. Saturated points are recorded, not skipped.
SweepResult sweep(const ClusterConfig& cluster, const ServiceParams& params,
                  double lambda_min, double lambda_max, double step);

// Largest integer arrival rate whose response-time upper bound still
// meets the objective. When cache is given the cache-aware bound is
// used. Throws InfeasibleSloError when even 1 query/second misses it.
int max_rate_under_slo(const ClusterConfig& cluster, const ServiceParams& params,
                       const SloSpec& slo,
                       const std::optional<CacheParams>& cache = std::nullopt);

// Independent cluster replicas needed so that replicas * per_replica_rate
// covers total_rate.
int replicas_needed(double total_rate, double per_replica_rate);

// Ratio of upper bounds, baseline over improved. Both reports must come
// from the same p and lambda; the caller guarantees that.
double gain_over_baseline(const ModelReport& baseline, const ModelReport& improved);

}  // namespace searchcap
