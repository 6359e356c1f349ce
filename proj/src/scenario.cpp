#include "searchcap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace searchcap {

void ScalingSpec::validate() const {
    if (cpu_speedup <= 0 || disk_speedup <= 0)
        throw ConfigError("scaling: speedup factors must be > 0");
    if (memory_profile.empty())
        throw ConfigError("scaling: memory profile must be named");
}

void SloSpec::validate() const {
    if (max_mean_response <= 0)
        throw ConfigError("slo: max mean response must be > 0");
    if (total_rate <= 0)
        throw ConfigError("slo: total rate must be > 0");
}

ServiceParams apply_scaling(const ParamTable& table, const ScalingSpec& scaling) {
    scaling.validate();
    const auto it = table.find(scaling.memory_profile);
    if (it == table.end()) {
        std::ostringstream msg;
        msg << "scaling: unknown memory profile '" << scaling.memory_profile
            << "', have:";
        for (const auto& [name, _] : table) msg << " " << name;
        throw ConfigError(msg.str());
    }

    ServiceParams scaled = it->second;
    scaled.s_hit /= scaling.cpu_speedup;
    scaled.s_miss /= scaling.cpu_speedup;
    scaled.s_disk /= scaling.disk_speedup;
    if (!scaling.broker_cpu_fixed) scaled.s_broker /= scaling.cpu_speedup;
    scaled.validate();
    return scaled;
}

void SweepResult::write_csv(std::ostream& out) const {
    out << "lambda,r_lower_s,r_upper_s,u_server,saturated\n";
    char buf[160];
    for (const auto& pt : points) {
        if (pt.saturated) {
            std::snprintf(buf, sizeof buf, "%.9g,,,%.9g,1\n", pt.lambda,
                          pt.u_server);
        } else {
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,0\n", pt.lambda,
                          pt.report.r_lower, pt.report.r_upper, pt.u_server);
        }
        out << buf;
    }
}

SweepResult sweep(const ClusterConfig& cluster, const ServiceParams& params,
                  double lambda_min, double lambda_max, double step) {
    if (lambda_min < 0 || lambda_max < lambda_min)
        throw ConfigError("sweep: need 0 <= lambda_min <= lambda_max");
    if (step <= 0) throw ConfigError("sweep: step must be > 0");

    const double s_server = service_time_server(params);
    // Half-open range; the small slack keeps lambda_min + k*step points
    // that land on lambda_max only through rounding out of the sweep.
    const auto count = static_cast<std::size_t>(
        std::max(0.0, std::ceil((lambda_max - lambda_min) / step - 1e-9)));

    SweepResult result;
    result.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        SweepPoint pt;
        pt.lambda = lambda_min + static_cast<double>(i) * step;
        pt.u_server = utilization(s_server, pt.lambda);
        try {
            pt.report = response_bounds(cluster, params, Workload{pt.lambda});
        } catch (const SaturationError&) {
            pt.saturated = true;
        }
        result.points.push_back(pt);
    }
    return result;
}

namespace {

// Upper bound at an integer rate, or nothing when any station saturates.
std::optional<double> bound_at(const ClusterConfig& cluster,
                               const ServiceParams& params,
                               const std::optional<CacheParams>& cache,
                               int lambda) {
    try {
        const Workload load{static_cast<double>(lambda)};
        if (cache) return response_with_result_cache(cluster, params, load, *cache);
        return response_bounds(cluster, params, load).r_upper;
    } catch (const SaturationError&) {
        return std::nullopt;
    }
}

}  // namespace

int max_rate_under_slo(const ClusterConfig& cluster, const ServiceParams& params,
                       const SloSpec& slo,
                       const std::optional<CacheParams>& cache) {
    slo.validate();

    const auto v1 = bound_at(cluster, params, cache, 1);
    if (!v1 || *v1 > slo.max_mean_response) {
        std::ostringstream msg;
        msg << "objective of " << slo.max_mean_response * 1e3
            << " ms cannot be met at 1 query/second (bound ";
        if (v1)
            msg << *v1 * 1e3 << " ms)";
        else
            msg << "diverges)";
        throw InfeasibleSloError(msg.str());
    }

    // Largest integer rate below the capacity of every station; the
    // bound is finite and increasing on [1, hi], so plain bisection for
    // the last rate still meeting the objective works.
    double capacity = std::numeric_limits<double>::infinity();
    const double s_server = service_time_server(params);
    if (s_server > 0) capacity = std::min(capacity, 1.0 / s_server);
    if (params.s_broker > 0) capacity = std::min(capacity, 1.0 / params.s_broker);
    if (cache && cache->s_cached > 0)
        capacity = std::min(capacity, 1.0 / cache->s_cached);
    int hi = capacity < 2e9 ? static_cast<int>(std::ceil(capacity)) : 2000000000;
    while (hi > 1 && !bound_at(cluster, params, cache, hi)) --hi;

    if (const auto v = bound_at(cluster, params, cache, hi);
        v && *v <= slo.max_mean_response)
        return hi;

    int lo = 1;
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        const auto v = bound_at(cluster, params, cache, mid);
        if (v && *v <= slo.max_mean_response)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

int replicas_needed(double total_rate, double per_replica_rate) {
    if (total_rate <= 0) throw ConfigError("replicas: total rate must be > 0");
    if (per_replica_rate <= 0)
        throw ConfigError("replicas: per-replica rate must be > 0");
    return static_cast<int>(std::ceil(total_rate / per_replica_rate));
}

double gain_over_baseline(const ModelReport& baseline, const ModelReport& improved) {
    if (improved.r_upper <= 0)
        throw ConfigError("gain: improved bound must be > 0");
    return baseline.r_upper / improved.r_upper;
}

}  // namespace searchcap
