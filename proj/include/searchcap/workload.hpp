#pragma once

// Query-log ingestion and characterization: load time series, folding a
// long log onto a short repeating window, interarrival extraction, and
// the summary statistics used to pick model parameters.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "searchcap/errors.hpp"

namespace searchcap {

struct QueryRecord {
    std::int64_t timestamp_ms = 0;  // milliseconds since the epoch, UTC
    std::vector<std::string> terms;
};

struct QueryLog {
    std::vector<QueryRecord> records;  // sorted by timestamp
    std::size_t malformed_lines = 0;   // skipped during parsing

    std::int64_t first_ms() const;
    std::int64_t last_ms() const;
    std::int64_t span_ms() const;
};

// Tab-separated lines: epoch-milliseconds, tab, query text. The text is
// whitespace-tokenized and lowercased. Lines without a tab, without a
// parseable timestamp, or with an empty query are counted as malformed
// and skipped; a log with no valid line at all is an error.
QueryLog parse_log(std::istream& in);

void write_tsv(const QueryLog& log, std::ostream& out);

// Lowercased terms joined by single spaces; the key used wherever two
// submissions must count as the same query.
std::string normalized_query(const QueryRecord& record);

struct LoadSeries {
    std::int64_t start_ms = 0;
    std::int64_t bin_width_ms = 0;
    std::vector<std::uint64_t> counts;

    void write_csv(std::ostream& out) const;  // bin_start_ms,count
};

// Counts per consecutive bin, first bin starting at the first record.
LoadSeries bin_load(const QueryLog& log, std::int64_t bin_width_ms);

struct FoldSpec {
    std::int64_t window_ms = 7 * 24 * 3600 * 1000LL;
    // Fold target start; by default the window grid is anchored at
    // Sunday 00:00 UTC and the window containing the first record is
    // used, so a one-week fold maps Tuesday traffic onto Tuesday.
    std::optional<std::int64_t> origin_ms;
};

// Maps every record to origin + ((t - origin) mod window), preserving
// each record's position inside the repeating window. Folding an
// already folded log is a no-op. Record count is always preserved.
QueryLog fold(const QueryLog& log, const FoldSpec& spec);

std::int64_t fold_origin(const QueryLog& log, const FoldSpec& spec);

// span / window: how much denser the folded log is than the original.
double fold_boost_factor(const QueryLog& log, const FoldSpec& spec);

// Gaps in seconds between consecutive records with timestamps inside
// [window_start, window_end]. Needs at least two records in the window.
std::vector<double> interarrivals(const QueryLog& log,
                                  std::int64_t window_start_ms,
                                  std::int64_t window_end_ms);

// Bounds [start, end) of the fullest hour-wide bin, bins aligned to the
// first record; the earliest wins ties. Needs at least an hour of span.
std::pair<std::int64_t, std::int64_t> busiest_hour(const QueryLog& log);

struct QueryLengthStats {
    double mean = 0;
    double median = 0;
    double frac_one = 0;
    double frac_two = 0;
    double frac_three_plus = 0;
};

QueryLengthStats query_length_stats(const QueryLog& log);

// Fraction of all submissions covered by the top_fraction most popular
// distinct queries (at least one query is always counted).
double popularity_concentration(const QueryLog& log, double top_fraction);

}  // namespace searchcap
