#pragma once

// Maximum-likelihood fits of candidate service and interarrival
// distributions, goodness-of-fit ranking, and the power-law fit used
// for query popularity.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace searchcap {

enum class Family { Exponential, Gamma, Weibull, Lognormal, Pareto };

constexpr std::array<Family, 5> kAllFamilies = {
    Family::Exponential, Family::Gamma, Family::Weibull, Family::Lognormal,
    Family::Pareto};

const char* family_name(Family family);

// A fit that could not be produced (degenerate sample, non-convergent
// solver). select_model keeps these in its ranking, at the bottom.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitResult {
    Family family = Family::Exponential;
    // Family-specific, always two slots:
    //   Exponential: {mean, 0}
    //   Gamma:       {shape, scale}
    //   Weibull:     {shape, scale}
    //   Lognormal:   {log-mean, log-stddev}
    //   Pareto:      {minimum, shape}
    std::array<double, 2> params = {0, 0};
    double ks_stat = 1;
    double sse = 0;  // sum of squared CDF errors at the sample points
    std::size_t n = 0;
    bool failed = false;
    std::string failure;  // set when failed

    double cdf(double x) const;
};

// Requires a sample of at least 10 strictly positive values. Throws
// FitError when the family cannot be fitted to this sample; the message
// carries the solver trace for the iterative families.
FitResult fit_family(std::span<const double> sample, Family family);

// Fits every family and ranks by KS statistic, ties broken by SSE;
// families that failed to fit come last. Deterministic order.
std::vector<FitResult> select_model(std::span<const double> sample);

// Columns: family,param1,param2,ks,sse,rank. Failed fits carry "fail"
// in the numeric columns.
void write_fits_csv(std::ostream& out, const std::vector<FitResult>& ranked);

// Empirical CDF with one fitted-CDF column per successful fit, for
// overlay plots. Rows are the sorted sample points.
void write_cdf_overlay_csv(std::ostream& out, std::span<const double> sample,
                           const std::vector<FitResult>& ranked);

struct RankedItem {
    std::size_t rank = 0;  // 1-based, most frequent first
    std::uint64_t count = 0;
    std::string item;
};

// Descending count; equal counts are ordered lexicographically so the
// ranking is stable across runs.
std::vector<RankedItem> rank_frequencies(const std::vector<std::string>& items);

struct ZipfFit {
    double alpha = 0;
    double r_squared = 0;
    std::size_t min_rank = 1;
    std::size_t max_rank = 0;
};

// Least squares on log(count) vs log(rank); alpha is the negated slope.
// max_rank 0 means no upper cutoff. A cutoff is the usual way to keep
// the flat singleton tail of a real log from biasing the slope.
ZipfFit fit_zipf(std::span<const std::pair<double, double>> rank_count,
                 std::size_t min_rank = 1, std::size_t max_rank = 0);

ZipfFit fit_zipf(const std::vector<RankedItem>& ranked, std::size_t min_rank = 1,
                 std::size_t max_rank = 0);

}  // namespace searchcap
