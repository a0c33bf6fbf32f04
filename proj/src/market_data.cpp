// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#include "dyx/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dyx/error.hpp"
#include "dyx/format.hpp"

namespace dyx {

namespace {

std::string trim_ws(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim_ws(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

bool is_missing(const std::string& s) {
    return s.empty() || s == "NA" || s == "na" || s == "null" || s == "NULL" || s == "NaN";
}

// Minimal %Y/%m/%d parser; everything else in the format is a literal.
bool parse_date(const std::string& text, const std::string& format, Date& out) {
    std::size_t ti = 0;
    Date d{};
    bool saw_y = false, saw_m = false, saw_d = false;
    for (std::size_t fi = 0; fi < format.size(); ++fi) {
        if (format[fi] == '%' && fi + 1 < format.size()) {
            const char spec = format[++fi];
            const std::size_t width = (spec == 'Y') ? 4 : 2;
            if (ti + width > text.size()) return false;
            int value = 0;
            for (std::size_t k = 0; k < width; ++k) {
                const char c = text[ti + k];
                if (c < '0' || c > '9') return false;
                value = value * 10 + (c - '0');
            }
            ti += width;
            switch (spec) {
                case 'Y': d.year = value; saw_y = true; break;
                case 'm': d.month = value; saw_m = true; break;
                case 'd': d.day = value; saw_d = true; break;
                default: return false;
            }
        } else {
            if (ti >= text.size() || text[ti] != format[fi]) return false;
            ++ti;
        }
    }
    if (ti != text.size() || !saw_y || !saw_m || !saw_d) return false;
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) return false;
    out = d;
    return true;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    auto lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
    };
    const std::string want = lower(name);
    for (std::size_t i = 0; i < header.size(); ++i)
        if (lower(header[i]) == want) return static_cast<int>(i);
    return -1;
}

double sample_std(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
}

} // namespace

std::string Date::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

const std::map<int, TrimBounds>& dy_trim_table() {
    static const std::map<int, TrimBounds> table = {
        {1, {-0.04, 0.04}},  {5, {-0.08, 0.08}},   {20, {-0.13, 0.15}},  {40, {-0.17, 0.20}},
        {80, {-0.18, 0.25}}, {100, {-0.20, 0.28}}, {200, {-0.22, 0.38}}, {250, {-0.22, 0.44}},
    };
    return table;
}

double ReturnSeries::mean() const {
    if (values.empty()) fail(errc::invalid_argument, "ReturnSeries::mean: empty series");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double ReturnSeries::variance() const {
    if (values.size() < 2) fail(errc::invalid_argument, "ReturnSeries::variance: need n >= 2");
    const double m = mean();
    double ss = 0.0;
    for (double x : values) ss += (x - m) * (x - m);
    return ss / static_cast<double>(values.size() - 1);
}

PriceSeries load_price_csv(std::istream& in, const CsvOptions& options) {
    std::string line;
    if (!std::getline(in, line)) fail(errc::parse_error, "CSV: empty input");
    const auto header = split_csv_line(line);
    const int date_col = find_column(header, options.date_column);
    const int close_col = find_column(header, options.close_column);
    if (date_col < 0)
        fail(errc::parse_error, "CSV: no '" + options.date_column + "' column in header");
    if (close_col < 0)
        fail(errc::parse_error, "CSV: no '" + options.close_column + "' column in header");
    const std::size_t min_cols = static_cast<std::size_t>(std::max(date_col, close_col)) + 1;

    struct Row {
        Date date;
        double close;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_ws(line).empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string at = " at line " + std::to_string(line_no);
        if (fields.size() < min_cols)
            fail(errc::parse_error, "CSV: expected " + std::to_string(min_cols) +
                                        " columns, got " + std::to_string(fields.size()) + at);
        const std::string& date_text = fields[static_cast<std::size_t>(date_col)];
        const std::string& close_text = fields[static_cast<std::size_t>(close_col)];
        if (is_missing(date_text) || is_missing(close_text)) continue;

        Row row{};
        if (!parse_date(date_text, options.date_format, row.date))
            fail(errc::parse_error, "CSV: bad date '" + date_text + "'" + at);
        char* end = nullptr;
        row.close = std::strtod(close_text.c_str(), &end);
        if (end == close_text.c_str() || *end != '\0')
            fail(errc::parse_error, "CSV: bad close '" + close_text + "'" + at);
        if (!(row.close > 0.0) || !std::isfinite(row.close))
            fail(errc::parse_error, "CSV: non-positive close '" + close_text + "'" + at);
        rows.push_back(row);
    }
    if (rows.size() < 2) fail(errc::parse_error, "CSV: fewer than 2 valid rows");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].date == rows[i - 1].date)
            fail(errc::parse_error, "CSV: duplicate date " + rows[i].date.iso());

    PriceSeries out;
    out.dates.reserve(rows.size());
    out.closes.reserve(rows.size());
    for (const Row& r : rows) {
        out.dates.push_back(r.date);
        out.closes.push_back(r.close);
    }
    return out;
}

PriceSeries load_price_csv_file(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open " + path);
    return load_price_csv(in, options);
}

ReturnSeries overlapping_returns(const PriceSeries& prices, int tau) {
    const std::size_t n = prices.size();
    if (tau < 1 || static_cast<std::size_t>(tau) >= n)
        fail(errc::invalid_argument, "overlapping_returns: lag out of range");
    ReturnSeries out;
    out.tau = tau;
    out.offset = 0;
    out.values.reserve(n - static_cast<std::size_t>(tau));
    for (std::size_t i = 0; i + static_cast<std::size_t>(tau) < n; ++i)
        out.values.push_back(std::log(prices.closes[i + static_cast<std::size_t>(tau)] / prices.closes[i]));
    return out;
}

PathSet split_paths(const PriceSeries& prices, int tau) {
    const std::size_t n = prices.size();
    if (tau < 1) fail(errc::invalid_argument, "split_paths: lag must be >= 1");
    if (n / static_cast<std::size_t>(tau) < 2)
        fail(errc::invalid_argument, "split_paths: lag too large for two points per path");
    PathSet out;
    out.tau = tau;
    out.paths.resize(static_cast<std::size_t>(tau));
    for (int j = 1; j <= tau; ++j) {
        ReturnSeries& path = out.paths[static_cast<std::size_t>(j - 1)];
        path.tau = tau;
        path.offset = j;
        // 1-based close indices j, j+tau, j+2tau, ...
        for (std::size_t s = static_cast<std::size_t>(j); s + static_cast<std::size_t>(tau) <= n;
             s += static_cast<std::size_t>(tau))
            path.values.push_back(std::log(prices.closes[s + static_cast<std::size_t>(tau) - 1] /
                                           prices.closes[s - 1]));
    }
    return out;
}

TrimResult trim_returns(const ReturnSeries& series, TrimBounds bounds) {
    if (!(bounds.lo < bounds.hi))
        fail(errc::invalid_argument, "trim_returns: bounds must satisfy lo < hi");
    TrimResult out;
    out.series.tau = series.tau;
    out.series.offset = series.offset;
    out.series.centered = series.centered;
    out.series.values.reserve(series.values.size());
    for (double v : series.values) {
        if (v >= bounds.lo && v <= bounds.hi)
            out.series.values.push_back(v);
        else
            ++out.removed;
    }
    return out;
}

ReturnSeries center_returns(const ReturnSeries& series) {
    ReturnSeries out = series;
    const double m = series.mean();
    for (double& v : out.values) v -= m;
    out.centered = true;
    return out;
}

Histogram build_histogram(const ReturnSeries& series, int no_bins) {
    if (no_bins < 2) fail(errc::invalid_argument, "build_histogram: no_bins must be >= 2");
    if (series.values.empty()) fail(errc::invalid_argument, "build_histogram: empty series");
    const auto [min_it, max_it] = std::minmax_element(series.values.begin(), series.values.end());
    const double lo = *min_it, hi = *max_it;
    if (!(hi > lo)) fail(errc::domain_error, "build_histogram: constant series");

    const int cells = no_bins + 1;
    const double delta_r = (hi - lo) / static_cast<double>(cells);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(cells), 0);
    for (double v : series.values) {
        auto idx = static_cast<std::int64_t>((v - lo) / delta_r);
        idx = std::clamp<std::int64_t>(idx, 0, cells - 1);
        ++counts[static_cast<std::size_t>(idx)];
    }

    Histogram out;
    out.requested_bins = no_bins;
    out.delta_r = delta_r;
    out.center_shift = series.mean();
    out.n_total = static_cast<std::int64_t>(series.values.size());
    for (int i = 0; i < cells; ++i) {
        const std::int64_t c = counts[static_cast<std::size_t>(i)];
        if (c < 5) continue;  // occupation-number filter
        HistogramBin bin;
        bin.lo = lo + delta_r * i - out.center_shift;
        bin.hi = lo + delta_r * (i + 1) - out.center_shift;
        bin.center = lo + delta_r * (i + 0.5) - out.center_shift;
        bin.count = c;
        bin.density = static_cast<double>(c) / (delta_r * static_cast<double>(out.n_total));
        out.n_kept += c;
        out.bins.push_back(bin);
    }
    if (out.bins.empty()) fail(errc::domain_error, "build_histogram: every bin is below the occupation threshold");
    return out;
}

BinCountChoice choose_bin_count(const ReturnSeries& series) {
    if (series.values.size() < 50)
        fail(errc::invalid_argument, "choose_bin_count: need at least 50 values");
    static constexpr int grid[] = {10, 20, 50, 100, 200, 500, 1000};
    BinCountChoice choice{grid[0], false};
    for (int no_bins : grid) {
        double dropped = 1.0;
        try {
            const Histogram h = build_histogram(series, no_bins);
            dropped = 1.0 - static_cast<double>(h.n_kept) / static_cast<double>(h.n_total);
        } catch (const Error&) {
            // all bins sparse at this resolution
        }
        if (dropped < 0.01) choice = {no_bins, true};
    }
    return choice;
}

ShapeVariation path_shape_variation(const PathSet& paths) {
    if (paths.paths.size() < 2)
        fail(errc::invalid_argument, "path_shape_variation: need at least 2 paths");
    std::vector<double> mus, sigmas;
    for (const ReturnSeries& p : paths.paths) {
        if (p.values.size() < 2)
            fail(errc::invalid_argument, "path_shape_variation: every path needs >= 2 values");
        mus.push_back(p.mean());
        sigmas.push_back(std::sqrt(p.variance()));
    }
    const double mu_mean = std::accumulate(mus.begin(), mus.end(), 0.0) / static_cast<double>(mus.size());
    const double sigma_mean =
        std::accumulate(sigmas.begin(), sigmas.end(), 0.0) / static_cast<double>(sigmas.size());
    if (mu_mean == 0.0 || sigma_mean == 0.0)
        fail(errc::domain_error, "path_shape_variation: mean of per-path parameter is zero");
    return {100.0 * sample_std(mus) / std::abs(mu_mean),
            100.0 * sample_std(sigmas) / std::abs(sigma_mean)};
}

void write_histogram_csv(std::ostream& out, const Histogram& hist) {
    out << "bin_center,count,density\n";
    for (const HistogramBin& b : hist.bins)
        out << format_double(b.center) << ',' << b.count << ',' << format_double(b.density) << '\n';
}

} // namespace dyx
