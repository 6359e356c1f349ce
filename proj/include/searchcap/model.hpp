#pragma once

// Closed-form queueing model of a document-partitioned search cluster:
// every query is broadcast by a broker to p identical index servers,
// partial answers are merged at the broker once all servers reply.
// Each station is approximated as an M/M/1 queue; the broadcast fork
// and the final join make the server tier a fork-join stage, for which
// we report a lower and an upper bound instead of an exact value.
//
// Conventions: durations are seconds, rates are queries per second.
// The arrival rate lambda is the cluster-wide rate; because queries are
// broadcast, every index server and the broker see the full lambda.

#include <utility>
#include <vector>

#include "searchcap/errors.hpp"

namespace searchcap {

struct ClusterConfig {
    int p = 1;      // number of index servers
    double b = 0;   // documents held per server, informational
    void validate() const;
};

// Per-query service demands at one index server and at the broker.
// A query either finds all posting data in the server's disk cache
// (probability hit, demand s_hit) or touches the disk (s_miss of CPU
// plus s_disk of disk wait).
struct ServiceParams {
    double s_broker = 0;
    double s_hit = 0;
    double s_miss = 0;
    double s_disk = 0;
    double hit = 0;
    void validate() const;
};

struct Workload {
    double lambda = 0;  // cluster arrival rate, queries per second
    void validate() const;
};

// Result cache in front of the broker: a fraction hit_result of queries
// is answered from the cache with the (much smaller) broker demand
// s_cached instead of being broadcast.
struct CacheParams {
    double hit_result = 0;
    double s_cached = 0;
    void validate() const;
};

struct ModelReport {
    double s_server = 0;  // mean demand at one index server
    double u_server = 0;  // index server utilization
    double r_server = 0;  // residence time at one index server
    double r_broker = 0;  // residence time at the broker
    double h_p = 1;       // fork-join amplification factor
    double r_lower = 0;   // lower bound on mean cluster response time
    double r_upper = 0;   // upper bound on mean cluster response time
};

// Mean demand at one index server, mixing cache-hit and miss paths.
double service_time_server(const ServiceParams& params);

// M/M/1 residence time s / (1 - lambda * s). Throws SaturationError
// when lambda * s >= 1.
double residence_time(double service_time, double lambda);

double utilization(double service_time, double lambda);

// Sum 1 + 1/2 + ... + 1/p, the factor by which the p-way join
// amplifies one server's residence time in the worst case.
double harmonic(int p);

// Bounds on the mean end-to-end response time:
//   r_server + r_broker  <=  R  <=  harmonic(p) * r_server + r_broker.
// Throws SaturationError naming the station that saturates first.
ModelReport response_bounds(const ClusterConfig& cluster,
                            const ServiceParams& params,
                            const Workload& load);

// Upper bound with a result cache: cache misses pay the full bounded
// response, hits only a residence time at the broker with demand
// s_cached. With hit_result == 0 this returns exactly the plain upper
// bound.
double response_with_result_cache(const ClusterConfig& cluster,
                                  const ServiceParams& params,
                                  const Workload& load,
                                  const CacheParams& cache);

// Least-squares line through measured (p, broker demand) points, used
// to extrapolate broker cost to cluster sizes that were never measured.
struct BrokerFit {
    double slope = 0;      // seconds per additional server
    double intercept = 0;  // seconds
    double r_squared = 0;

    double at(double p) const { return intercept + slope * p; }
};

// points: (number of servers, measured broker demand in seconds).
// Requires at least two distinct p values.
BrokerFit broker_demand_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace searchcap
