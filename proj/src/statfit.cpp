#include "searchcap/statfit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "searchcap/errors.hpp"

namespace searchcap {

const char* family_name(Family family) {
    switch (family) {
        case Family::Exponential: return "exponential";
        case Family::Gamma: return "gamma";
        case Family::Weibull: return "weibull";
        case Family::Lognormal: return "lognormal";
        case Family::Pareto: return "pareto";
    }
    return "unknown";
}

double FitResult::cdf(double x) const {
    if (x <= 0) return 0;
    switch (family) {
        case Family::Exponential:
            return -std::expm1(-x / params[0]);
        case Family::Gamma:
            return boost::math::gamma_p(params[0], x / params[1]);
        case Family::Weibull:
            return -std::expm1(-std::pow(x / params[1], params[0]));
        case Family::Lognormal:
            return 0.5 * std::erfc(-(std::log(x) - params[0]) /
                                   (params[1] * std::sqrt(2.0)));
        case Family::Pareto:
            return x < params[0] ? 0.0 : 1.0 - std::pow(params[0] / x, params[1]);
    }
    return 0;
}

namespace {

constexpr int kMaxIterations = 200;
constexpr double kRelTol = 1e-8;

struct SampleStats {
    std::vector<double> sorted;
    double mean = 0;
    double mean_log = 0;
    double var_log = 0;  // biased (maximum-likelihood) variance
};

SampleStats prepare(std::span<const double> sample) {
    if (sample.size() < 10)
        throw FitError("fit: need at least 10 observations");

    SampleStats st;
    st.sorted.assign(sample.begin(), sample.end());
    std::sort(st.sorted.begin(), st.sorted.end());
    if (st.sorted.front() <= 0)
        throw FitError("fit: observations must be > 0");

    const auto n = static_cast<double>(st.sorted.size());
    for (double x : st.sorted) {
        st.mean += x;
        st.mean_log += std::log(x);
    }
    st.mean /= n;
    st.mean_log /= n;
    for (double x : st.sorted) {
        const double d = std::log(x) - st.mean_log;
        st.var_log += d * d;
    }
    st.var_log /= n;
    return st;
}

[[noreturn]] void no_convergence(const char* family,
                                 const std::vector<double>& trace) {
    std::ostringstream msg;
    msg << family << ": no convergence after " << kMaxIterations
        << " iterations; shape trace:";
    const std::size_t show = std::min<std::size_t>(trace.size(), 8);
    for (std::size_t i = 0; i < show; ++i) msg << " " << trace[i];
    msg << " ... " << trace.back();
    throw FitError(msg.str());
}

// Root of log(k) - digamma(k) = s, which is decreasing in k. Newton
// from the standard closed-form starting point.
double gamma_shape(double s) {
    std::vector<double> trace;
    double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) /
               (12.0 * s);
    trace.push_back(k);
    for (int it = 0; it < kMaxIterations; ++it) {
        const double g = std::log(k) - boost::math::digamma(k) - s;
        const double gp = 1.0 / k - boost::math::trigamma(k);
        double next = k - g / gp;
        if (next <= 0) next = k / 2;
        trace.push_back(next);
        if (std::abs(next - k) <= kRelTol * k) return next;
        k = next;
    }
    no_convergence("gamma", trace);
}

FitResult fit_gamma(const SampleStats& st) {
    const double s = std::log(st.mean) - st.mean_log;  // >= 0, Jensen
    if (s < 1e-12)
        throw FitError("gamma: zero log-dispersion, sample is degenerate");
    const double k = gamma_shape(s);
    FitResult fit;
    fit.family = Family::Gamma;
    fit.params = {k, st.mean / k};
    return fit;
}

FitResult fit_weibull(const SampleStats& st) {
    const double sd_log = std::sqrt(st.var_log);
    if (sd_log < 1e-12)
        throw FitError("weibull: zero log-dispersion, sample is degenerate");

    // Work with x / max(x) so the powers stay in (0, 1]; the profile
    // equation A(k) - 1/k - mean_log = 0 is unchanged by the scaling
    // because A is a weighted mean of the logs.
    const double scale_ref = st.sorted.back();
    std::vector<double> z, lz;
    z.reserve(st.sorted.size());
    lz.reserve(st.sorted.size());
    for (double x : st.sorted) {
        z.push_back(x / scale_ref);
        lz.push_back(std::log(x));
    }

    std::vector<double> trace;
    double k = (std::acos(-1.0) / std::sqrt(6.0)) / sd_log;  // moment start
    trace.push_back(k);
    for (int it = 0; it < kMaxIterations; ++it) {
        double sw = 0, swl = 0, swll = 0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double w = std::pow(z[i], k);
            sw += w;
            swl += w * lz[i];
            swll += w * lz[i] * lz[i];
        }
        const double a = swl / sw;
        const double f = a - 1.0 / k - st.mean_log;
        const double fp = (swll / sw - a * a) + 1.0 / (k * k);
        double next = k - f / fp;
        if (next <= 0) next = k / 2;
        trace.push_back(next);
        if (std::abs(next - k) <= kRelTol * k) {
            k = next;
            double sw_final = 0;
            for (double v : z) sw_final += std::pow(v, k);
            const double lambda =
                scale_ref *
                std::pow(sw_final / static_cast<double>(z.size()), 1.0 / k);
            FitResult fit;
            fit.family = Family::Weibull;
            fit.params = {k, lambda};
            return fit;
        }
        k = next;
    }
    no_convergence("weibull", trace);
}

FitResult fit_lognormal(const SampleStats& st) {
    if (st.var_log < 1e-24)
        throw FitError("lognormal: zero log-variance, sample is degenerate");
    FitResult fit;
    fit.family = Family::Lognormal;
    fit.params = {st.mean_log, std::sqrt(st.var_log)};
    return fit;
}

FitResult fit_pareto(const SampleStats& st) {
    const double x_min = st.sorted.front();
    double t = 0;
    for (double x : st.sorted) t += std::log(x / x_min);
    if (t < 1e-12)
        throw FitError("pareto: zero log-spread, sample is degenerate");
    FitResult fit;
    fit.family = Family::Pareto;
    fit.params = {x_min, static_cast<double>(st.sorted.size()) / t};
    return fit;
}

void score(FitResult& fit, const SampleStats& st) {
    const auto n = static_cast<double>(st.sorted.size());
    double ks = 0, sse = 0;
    for (std::size_t i = 0; i < st.sorted.size(); ++i) {
        const double f = fit.cdf(st.sorted[i]);
        const double hi = static_cast<double>(i + 1) / n;
        const double lo = static_cast<double>(i) / n;
        ks = std::max(ks, std::max(hi - f, f - lo));
        sse += (hi - f) * (hi - f);
    }
    fit.ks_stat = ks;
    fit.sse = sse;
    fit.n = st.sorted.size();
}

}  // namespace

FitResult fit_family(std::span<const double> sample, Family family) {
    const SampleStats st = prepare(sample);

    FitResult fit;
    switch (family) {
        case Family::Exponential:
            fit.family = Family::Exponential;
            fit.params = {st.mean, 0};
            break;
        case Family::Gamma: fit = fit_gamma(st); break;
        case Family::Weibull: fit = fit_weibull(st); break;
        case Family::Lognormal: fit = fit_lognormal(st); break;
        case Family::Pareto: fit = fit_pareto(st); break;
    }
    score(fit, st);
    return fit;
}

std::vector<FitResult> select_model(std::span<const double> sample) {
    std::vector<FitResult> fits;
    fits.reserve(kAllFamilies.size());
    for (Family family : kAllFamilies) {
        try {
            fits.push_back(fit_family(sample, family));
        } catch (const FitError& e) {
            FitResult failed;
            failed.family = family;
            failed.failed = true;
            failed.failure = e.what();
            failed.n = sample.size();
            fits.push_back(failed);
        }
    }

    std::sort(fits.begin(), fits.end(),
              [](const FitResult& a, const FitResult& b) {
                  if (a.failed != b.failed) return b.failed;
                  if (a.failed) return a.family < b.family;
                  if (a.ks_stat != b.ks_stat) return a.ks_stat < b.ks_stat;
                  if (a.sse != b.sse) return a.sse < b.sse;
                  return a.family < b.family;
              });
    return fits;
}

void write_fits_csv(std::ostream& out, const std::vector<FitResult>& ranked) {
    out << "family,param1,param2,ks,sse,rank\n";
    char buf[192];
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const FitResult& fit = ranked[i];
        if (fit.failed) {
            std::snprintf(buf, sizeof buf, "%s,fail,fail,fail,fail,%zu\n",
                          family_name(fit.family), i + 1);
        } else {
            std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.9g,%.9g,%zu\n",
                          family_name(fit.family), fit.params[0], fit.params[1],
                          fit.ks_stat, fit.sse, i + 1);
        }
        out << buf;
    }
}

void write_cdf_overlay_csv(std::ostream& out, std::span<const double> sample,
                           const std::vector<FitResult>& ranked) {
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());

    out << "x,empirical";
    for (const FitResult& fit : ranked)
        if (!fit.failed) out << ',' << family_name(fit.family);
    out << '\n';

    char buf[64];
    const auto n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g", sorted[i],
                      static_cast<double>(i + 1) / n);
        out << buf;
        for (const FitResult& fit : ranked) {
            if (fit.failed) continue;
            std::snprintf(buf, sizeof buf, ",%.9g", fit.cdf(sorted[i]));
            out << buf;
        }
        out << '\n';
    }
}

std::vector<RankedItem> rank_frequencies(const std::vector<std::string>& items) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& item : items) ++counts[item];

    std::vector<RankedItem> ranked;
    ranked.reserve(counts.size());
    for (auto& [item, count] : counts)
        ranked.push_back(RankedItem{0, count, item});
    std::sort(ranked.begin(), ranked.end(),
              [](const RankedItem& a, const RankedItem& b) {
                  if (a.count != b.count) return a.count > b.count;
                  return a.item < b.item;
              });
    for (std::size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = i + 1;
    return ranked;
}

ZipfFit fit_zipf(std::span<const std::pair<double, double>> rank_count,
                 std::size_t min_rank, std::size_t max_rank) {
    if (min_rank < 1) throw ConfigError("zipf: min rank must be >= 1");

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::size_t n = 0;
    double lo_rank = 0, hi_rank = 0;
    for (const auto& [rank, count] : rank_count) {
        if (rank < static_cast<double>(min_rank)) continue;
        if (max_rank && rank > static_cast<double>(max_rank)) continue;
        if (count < 1) continue;
        const double x = std::log(rank), y = std::log(count);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        if (n == 0 || rank < lo_rank) lo_rank = rank;
        if (n == 0 || rank > hi_rank) hi_rank = rank;
        ++n;
    }
    if (n < 2 || lo_rank == hi_rank)
        throw ConfigError("zipf: need at least two distinct ranks in range");

    const auto dn = static_cast<double>(n);
    const double vxx = sxx - sx * sx / dn;
    const double vxy = sxy - sx * sy / dn;
    const double vyy = syy - sy * sy / dn;

    ZipfFit fit;
    fit.alpha = -vxy / vxx;
    fit.r_squared = vyy > 0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
    fit.min_rank = static_cast<std::size_t>(lo_rank);
    fit.max_rank = static_cast<std::size_t>(hi_rank);
    return fit;
}

ZipfFit fit_zipf(const std::vector<RankedItem>& ranked, std::size_t min_rank,
                 std::size_t max_rank) {
    std::vector<std::pair<double, double>> points;
    points.reserve(ranked.size());
    for (const auto& item : ranked)
        points.emplace_back(static_cast<double>(item.rank),
                            static_cast<double>(item.count));
    return fit_zipf(points, min_rank, max_rank);
}

}  // namespace searchcap
