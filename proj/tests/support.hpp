#pragma once

// Shared helpers for seeded synthetic data. Tests draw through the same
// explicit transforms as the simulator so frozen expectations stay
// valid across standard-library versions.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : rng_(seed) {}

    double uniform01() {
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

    double exponential(double mean) {
        return -mean * std::log1p(-uniform01());
    }

    double weibull(double shape, double scale) {
        return scale * std::pow(-std::log1p(-uniform01()), 1.0 / shape);
    }

    double pareto(double x_min, double shape) {
        return x_min * std::pow(1.0 - uniform01(), -1.0 / shape);
    }

    // Box-Muller; one draw per call keeps the stream layout simple.
    double normal(double mu, double sigma) {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        return mu + sigma * std::sqrt(-2.0 * std::log(u1)) *
                        std::cos(2.0 * std::acos(-1.0) * u2);
    }

    double lognormal(double mu, double sigma) {
        return std::exp(normal(mu, sigma));
    }

    // Integer-shape gamma as a sum of exponentials.
    double gamma_int(int shape, double scale) {
        double sum = 0;
        for (int i = 0; i < shape; ++i) sum += exponential(scale);
        return sum;
    }

    std::uint64_t integer(std::uint64_t bound) { return rng_() % bound; }

private:
    std::mt19937_64 rng_;
};

inline std::vector<double> sample(Rng& rng, std::size_t n, auto draw) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(draw(rng));
    return out;
}

// Zipf(alpha) item indices over [0, universe) by inverse-CDF on the
// exact normalized weights. Heavy but fine for test sizes.
class ZipfSampler {
public:
    ZipfSampler(std::size_t universe, double alpha) : cdf_(universe) {
        double total = 0;
        for (std::size_t i = 0; i < universe; ++i) {
            total += std::pow(static_cast<double>(i + 1), -alpha);
            cdf_[i] = total;
        }
        for (double& c : cdf_) c /= total;
    }

    std::size_t draw(Rng& rng) const {
        const double u = rng.uniform01();
        std::size_t lo = 0, hi = cdf_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cdf_[mid] < u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

private:
    std::vector<double> cdf_;
};

}  // namespace testsupport
