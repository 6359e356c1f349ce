#include "searchcap/workload.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

namespace searchcap {

namespace {

constexpr std::int64_t kHourMs = 3600 * 1000LL;
constexpr std::int64_t kDayMs = 24 * kHourMs;
// The epoch fell on a Thursday; the Sunday before it anchors the
// week-aligned fold grid.
constexpr std::int64_t kEpochSundayMs = -4 * kDayMs;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t euclid_mod(std::int64_t a, std::int64_t b) {
    std::int64_t m = a % b;
    if (m < 0) m += b;
    return m;
}

const QueryRecord& require_nonempty(const QueryLog& log) {
    if (log.records.empty()) throw ConfigError("query log is empty");
    return log.records.front();
}

}  // namespace

std::int64_t QueryLog::first_ms() const {
    return require_nonempty(*this).timestamp_ms;
}

std::int64_t QueryLog::last_ms() const {
    require_nonempty(*this);
    return records.back().timestamp_ms;
}

std::int64_t QueryLog::span_ms() const { return last_ms() - first_ms(); }

QueryLog parse_log(std::istream& in) {
    QueryLog log;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            ++log.malformed_lines;
            continue;
        }

        std::int64_t ts = 0;
        const char* first = line.data();
        const auto [ptr, ec] = std::from_chars(first, first + tab, ts);
        if (ec != std::errc{} || ptr != first + tab) {
            ++log.malformed_lines;
            continue;
        }

        QueryRecord rec;
        rec.timestamp_ms = ts;
        std::size_t i = tab + 1;
        while (i < line.size()) {
            while (i < line.size() &&
                   std::isspace(static_cast<unsigned char>(line[i])))
                ++i;
            std::size_t start = i;
            while (i < line.size() &&
                   !std::isspace(static_cast<unsigned char>(line[i])))
                ++i;
            if (i > start) {
                std::string term = line.substr(start, i - start);
                for (char& c : term)
                    c = static_cast<char>(
                        std::tolower(static_cast<unsigned char>(c)));
                rec.terms.push_back(std::move(term));
            }
        }
        if (rec.terms.empty()) {
            ++log.malformed_lines;
            continue;
        }
        log.records.push_back(std::move(rec));
    }

    if (log.records.empty())
        throw ConfigError("query log: no parseable lines");
    std::stable_sort(log.records.begin(), log.records.end(),
                     [](const QueryRecord& a, const QueryRecord& b) {
                         return a.timestamp_ms < b.timestamp_ms;
                     });
    return log;
}

void write_tsv(const QueryLog& log, std::ostream& out) {
    for (const auto& rec : log.records) {
        out << rec.timestamp_ms << '\t';
        for (std::size_t i = 0; i < rec.terms.size(); ++i) {
            if (i) out << ' ';
            out << rec.terms[i];
        }
        out << '\n';
    }
}

std::string normalized_query(const QueryRecord& record) {
    std::string key;
    for (const auto& term : record.terms) {
        if (!key.empty()) key += ' ';
        for (char c : term)
            key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return key;
}

void LoadSeries::write_csv(std::ostream& out) const {
    out << "bin_start_ms,count\n";
    for (std::size_t i = 0; i < counts.size(); ++i)
        out << start_ms + static_cast<std::int64_t>(i) * bin_width_ms << ','
            << counts[i] << '\n';
}

LoadSeries bin_load(const QueryLog& log, std::int64_t bin_width_ms) {
    require_nonempty(log);
    if (bin_width_ms <= 0) throw ConfigError("bin width must be > 0");

    LoadSeries series;
    series.start_ms = log.first_ms();
    series.bin_width_ms = bin_width_ms;
    series.counts.assign(
        static_cast<std::size_t>((log.span_ms()) / bin_width_ms) + 1, 0);
    for (const auto& rec : log.records)
        ++series.counts[static_cast<std::size_t>(
            (rec.timestamp_ms - series.start_ms) / bin_width_ms)];
    return series;
}

std::int64_t fold_origin(const QueryLog& log, const FoldSpec& spec) {
    if (spec.window_ms <= 0) throw ConfigError("fold: window must be > 0");
    if (spec.origin_ms) return *spec.origin_ms;
    const std::int64_t first = log.first_ms();
    return kEpochSundayMs +
           floor_div(first - kEpochSundayMs, spec.window_ms) * spec.window_ms;
}

QueryLog fold(const QueryLog& log, const FoldSpec& spec) {
    require_nonempty(log);
    const std::int64_t origin = fold_origin(log, spec);

    QueryLog folded;
    folded.records.reserve(log.records.size());
    for (const auto& rec : log.records) {
        QueryRecord moved = rec;
        moved.timestamp_ms =
            origin + euclid_mod(rec.timestamp_ms - origin, spec.window_ms);
        folded.records.push_back(std::move(moved));
    }
    std::stable_sort(folded.records.begin(), folded.records.end(),
                     [](const QueryRecord& a, const QueryRecord& b) {
                         return a.timestamp_ms < b.timestamp_ms;
                     });
    return folded;
}

double fold_boost_factor(const QueryLog& log, const FoldSpec& spec) {
    require_nonempty(log);
    if (spec.window_ms <= 0) throw ConfigError("fold: window must be > 0");
    return static_cast<double>(log.span_ms()) /
           static_cast<double>(spec.window_ms);
}

std::vector<double> interarrivals(const QueryLog& log,
                                  std::int64_t window_start_ms,
                                  std::int64_t window_end_ms) {
    require_nonempty(log);
    if (window_end_ms < window_start_ms)
        throw ConfigError("interarrivals: empty window");

    std::vector<double> gaps;
    std::int64_t prev = 0;
    bool have_prev = false;
    for (const auto& rec : log.records) {
        if (rec.timestamp_ms < window_start_ms ||
            rec.timestamp_ms > window_end_ms)
            continue;
        if (have_prev)
            gaps.push_back(static_cast<double>(rec.timestamp_ms - prev) / 1e3);
        prev = rec.timestamp_ms;
        have_prev = true;
    }
    if (gaps.empty())
        throw ConfigError("interarrivals: need at least two records in window");
    return gaps;
}

std::pair<std::int64_t, std::int64_t> busiest_hour(const QueryLog& log) {
    require_nonempty(log);
    if (log.span_ms() < kHourMs)
        throw ConfigError("busiest hour: log spans less than an hour");

    const LoadSeries series = bin_load(log, kHourMs);
    const auto it = std::max_element(series.counts.begin(), series.counts.end());
    const auto idx = static_cast<std::int64_t>(it - series.counts.begin());
    const std::int64_t start = series.start_ms + idx * kHourMs;
    return {start, start + kHourMs};
}

QueryLengthStats query_length_stats(const QueryLog& log) {
    require_nonempty(log);

    std::vector<std::size_t> lengths;
    lengths.reserve(log.records.size());
    for (const auto& rec : log.records) lengths.push_back(rec.terms.size());
    std::sort(lengths.begin(), lengths.end());

    QueryLengthStats stats;
    const auto n = lengths.size();
    stats.mean = static_cast<double>(std::accumulate(
                     lengths.begin(), lengths.end(), std::size_t{0})) /
                 static_cast<double>(n);
    stats.median =
        n % 2 ? static_cast<double>(lengths[n / 2])
              : (static_cast<double>(lengths[n / 2 - 1] + lengths[n / 2])) / 2.0;
    for (auto len : lengths) {
        if (len == 1)
            stats.frac_one += 1;
        else if (len == 2)
            stats.frac_two += 1;
        else
            stats.frac_three_plus += 1;
    }
    stats.frac_one /= static_cast<double>(n);
    stats.frac_two /= static_cast<double>(n);
    stats.frac_three_plus /= static_cast<double>(n);
    return stats;
}

double popularity_concentration(const QueryLog& log, double top_fraction) {
    require_nonempty(log);
    if (top_fraction <= 0 || top_fraction > 1)
        throw ConfigError("concentration: fraction must be in (0, 1]");

    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& rec : log.records) ++counts[normalized_query(rec)];

    std::vector<std::uint64_t> sorted;
    sorted.reserve(counts.size());
    for (const auto& [_, c] : counts) sorted.push_back(c);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    const auto take = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               top_fraction * static_cast<double>(sorted.size()) + 1e-9));
    std::uint64_t covered = 0;
    for (std::size_t i = 0; i < take && i < sorted.size(); ++i)
        covered += sorted[i];
    return static_cast<double>(covered) /
           static_cast<double>(log.records.size());
}

}  // namespace searchcap
