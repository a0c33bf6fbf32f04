// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DYX_STATS_TESTS_HPP
#define DYX_STATS_TESTS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyx/density.hpp"
#include "dyx/gaussian.hpp"
#include "dyx/market_data.hpp"

namespace dyx {

struct TestResult {
    std::string name;
    double statistic = 0.0;
    std::optional<double> df;
    double p_value = 1.0;
    double alpha = 0.05;
    bool reject = false;  // always p_value < alpha
};

// Fisher excess kurtosis and skewness from population (divisor n) central
// moments: kurtosis = m4/m2^2 - 3, skewness = m3/m2^(3/2). n >= 4 (resp. 3),
// non-constant.
double fisher_kurtosis(std::span<const double> sample);
double skewness(std::span<const double> sample);

// JB = n (S^2/6 + K^2/24) against chi-squared with 2 df. n >= 20.
TestResult jarque_bera(std::span<const double> sample, double alpha);

// Composite-normality KS distance T against N(mean, sd) fitted to the
// sample. The p-value is Monte Carlo: the fraction of mc_reps simulated
// null-normal samples of the same size whose T exceeds the observed one.
// The null tables are generated from a fixed internal seed and cached per
// (n, mc_reps), so results are reproducible call to call.
TestResult lilliefors(std::span<const double> sample, double alpha, int mc_reps = 10000);

// Simple-hypothesis two-sided Kolmogorov-Smirnov test against a fully
// specified CDF; p-value from the asymptotic Kolmogorov series at
// sqrt(n) * D. n >= 5.
TestResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf,
                   double alpha);

// Chi-squared test on equal-expected-frequency bins: bin edges sit at the
// model CDF quantiles i*e/n (e = expected_per_bin, default 5), the last bin
// absorbs the remainder with its expected count adjusted, and
// df = bins - 1 - m_params. Degenerate df (< 1) raises errc::domain_error.
TestResult chi2_equal_freq(std::span<const double> sample,
                           const std::function<double(double)>& cdf, int m_params, double alpha,
                           int expected_per_bin = 5);

// Rank-based Kruskal-Wallis H with midrank tie correction, chi-squared with
// groups-1 df. All values identical yields H undefined: p = 1 by convention
// with the statistic reported as 0.
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups, double alpha);

struct ProbPlotData {
    std::vector<double> ordered;         // sorted sample
    std::vector<double> normal_medians;  // normal quantiles of the Filliben positions
    double slope = 0.0;                  // least-squares reference line
    double intercept = 0.0;
};

// Normal probability plot pairs: uniform order statistic medians
// m(1) = 1 - m(n), m(i) = (i - 0.3175)/(n + 0.365), m(n) = 0.5^(1/n), mapped
// through the normal quantile. n >= 3.
ProbPlotData normal_prob_plot_data(std::span<const double> sample);

struct TailCount {
    double z = 0.0;
    double expected = 0.0;       // n * two-sided normal mass beyond z
    std::int64_t observed = 0;   // points outside mu +/- z sigma
};

// Fama's outlier count at the given sigma multiples (default 2, 3, 4). The
// z = 4 row needs n of a few hundred to be meaningful.
std::vector<TailCount> tail_counts(std::span<const double> sample, const GaussianParams& fitted,
                                   std::span<const double> z_levels = {});

struct RejectionSummary {
    double proportion = 0.0;  // rejected / tested
    int rejected = 0;
    int tested = 0;
    int not_run = 0;  // paths where the test raised an error
};

// Runs a test on every path and reports the fraction rejecting; per-path
// errors are counted separately as not_run.
RejectionSummary rejection_proportion(
    const PathSet& paths, const std::function<TestResult(const ReturnSeries&)>& test);

struct KurtosisSummary {
    std::vector<double> values;
    double mean = 0.0;
    double stddev = 0.0;  // n-1 divisor over the replicate kurtoses
};

// Draws n_sets datasets of n_per_set points from the density (seeds derived
// per set) and summarizes their Fisher kurtoses.
KurtosisSummary generated_kurtosis(const TabulatedDensity& density, std::size_t n_per_set,
                                   int n_sets, std::uint64_t seed);

// {name, statistic, df, p_value, alpha, reject}
std::string test_result_json(const TestResult& result);

} // namespace dyx

#endif
