#include "searchcap/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace searchcap {

const char* station_name(Station s) {
    switch (s) {
        case Station::Server: return "server";
        case Station::Broker: return "broker";
        case Station::ResultCache: return "result-cache";
    }
    return "unknown";
}

SaturationError::SaturationError(Station station, double utilization)
    : std::runtime_error([&] {
          std::ostringstream msg;
          msg << station_name(station) << " saturated: offered utilization "
              << utilization << " >= 1";
          return msg.str();
      }()),
      station_(station),
      utilization_(utilization) {}

void ClusterConfig::validate() const {
    if (p < 1) throw ConfigError("cluster: p must be >= 1");
    if (b < 0) throw ConfigError("cluster: b must be >= 0");
}

void ServiceParams::validate() const {
    if (s_broker < 0 || s_hit < 0 || s_miss < 0 || s_disk < 0)
        throw ConfigError("service params: demands must be >= 0");
    if (hit < 0 || hit > 1)
        throw ConfigError("service params: hit must be in [0, 1]");
}

void Workload::validate() const {
    if (lambda < 0 || !std::isfinite(lambda))
        throw ConfigError("workload: lambda must be finite and >= 0");
}

void CacheParams::validate() const {
    if (hit_result < 0 || hit_result > 1)
        throw ConfigError("result cache: hit_result must be in [0, 1]");
    if (s_cached < 0)
        throw ConfigError("result cache: s_cached must be >= 0");
}

double service_time_server(const ServiceParams& params) {
    params.validate();
    return params.hit * params.s_hit +
           (1.0 - params.hit) * (params.s_miss + params.s_disk);
}

double residence_time(double service_time, double lambda) {
    const double u = lambda * service_time;
    if (u >= 1.0) throw SaturationError(Station::Server, u);
    return service_time / (1.0 - u);
}

double utilization(double service_time, double lambda) {
    return lambda * service_time;
}

double harmonic(int p) {
    if (p < 1) throw ConfigError("harmonic: p must be >= 1");
    double h = 0.0;
    for (int i = 1; i <= p; ++i) h += 1.0 / i;
    return h;
}

ModelReport response_bounds(const ClusterConfig& cluster,
                            const ServiceParams& params,
                            const Workload& load) {
    cluster.validate();
    params.validate();
    load.validate();

    ModelReport rep;
    rep.s_server = service_time_server(params);
    rep.u_server = utilization(rep.s_server, load.lambda);
    const double u_broker = utilization(params.s_broker, load.lambda);

    // Name the bottleneck, not just the first station we happen to test.
    if (rep.u_server >= 1.0 || u_broker >= 1.0) {
        if (rep.u_server >= u_broker)
            throw SaturationError(Station::Server, rep.u_server);
        throw SaturationError(Station::Broker, u_broker);
    }

    rep.r_server = rep.s_server / (1.0 - rep.u_server);
    rep.r_broker = params.s_broker / (1.0 - u_broker);
    rep.h_p = harmonic(cluster.p);
    rep.r_lower = rep.r_server + rep.r_broker;
    rep.r_upper = rep.h_p * rep.r_server + rep.r_broker;
    return rep;
}

double response_with_result_cache(const ClusterConfig& cluster,
                                  const ServiceParams& params,
                                  const Workload& load,
                                  const CacheParams& cache) {
    cache.validate();
    const ModelReport rep = response_bounds(cluster, params, load);

    const double u_cache = utilization(cache.s_cached, load.lambda);
    if (u_cache >= 1.0) throw SaturationError(Station::ResultCache, u_cache);
    const double r_cached = cache.s_cached / (1.0 - u_cache);

    return rep.r_upper * (1.0 - cache.hit_result) + r_cached * cache.hit_result;
}

BrokerFit broker_demand_fit(const std::vector<std::pair<double, double>>& points) {
    std::set<double> distinct;
    for (const auto& [p, s] : points) {
        if (p < 1) throw ConfigError("broker fit: p must be >= 1");
        if (s < 0) throw ConfigError("broker fit: demand must be >= 0");
        distinct.insert(p);
    }
    if (distinct.size() < 2)
        throw ConfigError("broker fit: need at least two distinct p values");

    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
    }
    const double mx = sx / n, my = sy / n;

    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }

    BrokerFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace searchcap
