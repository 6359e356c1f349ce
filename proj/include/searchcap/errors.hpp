#pragma once

#include <stdexcept>
#include <string>

namespace searchcap {

enum class Station { Server, Broker, ResultCache };

const char* station_name(Station s);

// Offered utilization reached 1 at a station; the model has no finite
// answer there. Callers that sweep load must catch this rather than
// treat the point as a large-but-valid response time.
class SaturationError : public std::runtime_error {
public:
    SaturationError(Station station, double utilization);

    Station station() const noexcept { return station_; }
    double utilization() const noexcept { return utilization_; }

private:
    Station station_;
    double utilization_;
};

// The response-time objective cannot be met even at 1 query/second.
class InfeasibleSloError : public std::runtime_error {
public:
    explicit InfeasibleSloError(const std::string& what)
        : std::runtime_error(what) {}
};

// Invalid user-supplied configuration, parameters, or input file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace searchcap
