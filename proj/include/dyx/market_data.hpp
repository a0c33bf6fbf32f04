// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DYX_MARKET_DATA_HPP
#define DYX_MARKET_DATA_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace dyx {

// Calendar date, compared by (y, m, d) only; no time zone anywhere.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    friend auto operator<=>(const Date&, const Date&) = default;
    std::string iso() const;
};

// Dated close prices: the raw input of everything downstream.
// Invariants: dates strictly ascending, every close > 0, length >= 2.
struct PriceSeries {
    std::vector<Date> dates;
    std::vector<double> closes;

    std::size_t size() const noexcept { return closes.size(); }
};

// Log returns at lag tau (in trading rows). offset identifies which series
// this is: 0 is the overlapping series r_t = log(P_{t+tau}/P_t) for every t;
// offsets 1..tau are the disjoint paths striding the price series.
struct ReturnSeries {
    int tau = 1;
    int offset = 0;
    bool centered = false;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double mean() const;
    double variance() const;  // unbiased, divisor n-1
};

// The tau disjoint paths of a price series. Their multiset union equals the
// overlapping series exactly: path j takes start indices j, j+tau, j+2tau, ...
// (1-based), so every start index 1..n-tau is used exactly once. When tau
// does not divide n the lengths differ by at most one; values are never
// padded.
struct PathSet {
    int tau = 1;
    std::vector<ReturnSeries> paths;
};

// Admissible interval of log returns for one lag.
struct TrimBounds {
    double lo = 0.0;
    double hi = 0.0;
};

// The interval table Dragulescu & Yakovenko used on DJIA data, keyed by lag.
const std::map<int, TrimBounds>& dy_trim_table();

// Equal-width occupation-number histogram.
//
// Widths are delta_r = (max - min)/(no_bins + 1), giving no_bins + 1 cells
// over [min, max]; cells holding fewer than five points are dropped (so the
// retained bins may have gaps). Densities are count/(delta_r * n_total) and
// the x axis is shifted by the sample mean of the input, so
// sum(density * delta_r) == n_kept/n_total.
struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    double center = 0.0;
    std::int64_t count = 0;
    double density = 0.0;
};

struct Histogram {
    int requested_bins = 0;
    double delta_r = 0.0;
    double center_shift = 0.0;  // subtracted sample mean
    std::int64_t n_total = 0;
    std::int64_t n_kept = 0;
    std::vector<HistogramBin> bins;
};

// CSV ingestion options. The file must have a header row; the date and close
// columns are looked up by name. Decimal point is '.'; fields containing
// thousands separators shift the column count and are rejected as malformed.
// date_format understands %Y, %m, %d with literal separators.
struct CsvOptions {
    std::string date_column = "Date";
    std::string close_column = "Close";
    std::string date_format = "%Y-%m-%d";
};

// Parses dated close prices. Rows are accepted in either date order and
// sorted ascending. Rows whose date or close field is empty (or NA/null) are
// skipped; rows that fail to parse, or with a non-positive close, raise
// errc::parse_error naming the line; duplicate dates and fewer than two
// valid rows are errors too.
PriceSeries load_price_csv(std::istream& in, const CsvOptions& options = {});
PriceSeries load_price_csv_file(const std::string& path, const CsvOptions& options = {});

// r_t = log(P_{t+tau}/P_t) for all n-tau start rows (data reuse mode).
ReturnSeries overlapping_returns(const PriceSeries& prices, int tau);

// The tau disjoint non-overlapping series described at PathSet.
// Requires floor(n/tau) >= 2 so every path has at least one return and the
// longest at least two.
PathSet split_paths(const PriceSeries& prices, int tau);

struct TrimResult {
    ReturnSeries series;
    std::size_t removed = 0;
};

// Drops values outside [bounds.lo, bounds.hi] (closed interval). Never
// fails; an empty result is legal and visible through removed == size.
TrimResult trim_returns(const ReturnSeries& series, TrimBounds bounds);

// Returns a copy with the sample mean subtracted.
ReturnSeries center_returns(const ReturnSeries& series);

Histogram build_histogram(const ReturnSeries& series, int no_bins);

struct BinCountChoice {
    int no_bins = 0;
    bool satisfied = false;  // false: nothing on the grid met the <1% rule
};

// Largest no_bins in {10, 20, 50, 100, 200, 500, 1000} whose histogram drops
// fewer than one percent of the points; falls back to 10 with
// satisfied == false when no grid value qualifies. Requires n >= 50.
BinCountChoice choose_bin_count(const ReturnSeries& series);

struct ShapeVariation {
    double mu_pct = 0.0;
    double sigma_pct = 0.0;
};

// Dispersion of the per-path sample mean and sample standard deviation:
// std over paths divided by the mean over paths, in percent (both taken
// with the n-1 divisor). Degenerate when a denominator is zero.
ShapeVariation path_shape_variation(const PathSet& paths);

// bin_center,count,density
void write_histogram_csv(std::ostream& out, const Histogram& hist);

} // namespace dyx

#endif
