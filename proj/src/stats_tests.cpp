// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#include "dyx/stats_tests.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include <nlohmann/json.hpp>

#include "dyx/error.hpp"
#include "dyx/heston_sim.hpp"
#include "dyx/rng.hpp"
#include "dyx/special.hpp"

namespace dyx {

namespace {

struct Moments {
    double mean, m2, m3, m4;
};

Moments central_moments(std::span<const double> sample) {
    const double n = static_cast<double>(sample.size());
    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : sample) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    return {mean, m2 / n, m3 / n, m4 / n};
}

TestResult make_result(std::string name, double stat, std::optional<double> df, double p,
                       double alpha) {
    TestResult r;
    r.name = std::move(name);
    r.statistic = stat;
    r.df = df;
    r.p_value = p;
    r.alpha = alpha;
    r.reject = p < alpha;
    return r;
}

// Two-sided KS distance of a sorted sample against cdf values at the sample
// points: max over i of max(i/n - F_i, F_i - (i-1)/n).
double ks_distance_sorted(const std::vector<double>& f_sorted) {
    const double n = static_cast<double>(f_sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < f_sorted.size(); ++i) {
        const double fi = f_sorted[i];
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - fi);
        d = std::max(d, fi - static_cast<double>(i) / n);
    }
    return d;
}

double lilliefors_statistic(std::vector<double> sorted) {
    const std::size_t n = sorted.size();
    double mean = 0.0;
    for (double x : sorted) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : sorted) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) fail(errc::domain_error, "lilliefors: zero variance");
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = normal_cdf((sorted[i] - mean) / sd);
    return ks_distance_sorted(f);
}

// Null distribution of the Lilliefors statistic, simulated once per
// (n, mc_reps) from a fixed seed and kept sorted.
const std::vector<double>& lilliefors_null_table(std::size_t n, int mc_reps) {
    static std::mutex mu;
    static std::map<std::pair<std::size_t, int>, std::vector<double>> cache;
    constexpr std::uint64_t kTableSeed = 0x4C696C6C6965664Dull;

    std::scoped_lock lock(mu);
    auto it = cache.find({n, mc_reps});
    if (it != cache.end()) return it->second;

    std::vector<double> table(static_cast<std::size_t>(mc_reps));
    std::vector<double> sample(n);
    for (int rep = 0; rep < mc_reps; ++rep) {
        const Philox gen(kTableSeed + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep));
        for (std::size_t i = 0; i < n; ++i) sample[i] = normal_quantile(gen.uniform_at(i));
        std::sort(sample.begin(), sample.end());
        table[static_cast<std::size_t>(rep)] = lilliefors_statistic(sample);
    }
    std::sort(table.begin(), table.end());
    return cache.emplace(std::make_pair(n, mc_reps), std::move(table)).first->second;
}

} // namespace

double fisher_kurtosis(std::span<const double> sample) {
    if (sample.size() < 4) fail(errc::invalid_argument, "fisher_kurtosis: need n >= 4");
    const Moments m = central_moments(sample);
    if (!(m.m2 > 0.0)) fail(errc::domain_error, "fisher_kurtosis: zero variance");
    return m.m4 / (m.m2 * m.m2) - 3.0;
}

double skewness(std::span<const double> sample) {
    if (sample.size() < 3) fail(errc::invalid_argument, "skewness: need n >= 3");
    const Moments m = central_moments(sample);
    if (!(m.m2 > 0.0)) fail(errc::domain_error, "skewness: zero variance");
    return m.m3 / std::pow(m.m2, 1.5);
}

TestResult jarque_bera(std::span<const double> sample, double alpha) {
    if (sample.size() < 20) fail(errc::invalid_argument, "jarque_bera: need n >= 20");
    const double n = static_cast<double>(sample.size());
    const double s = skewness(sample);
    const double k = fisher_kurtosis(sample);
    const double jb = n * (s * s / 6.0 + k * k / 24.0);
    return make_result("jarque_bera", jb, 2.0, chi2_sf(jb, 2.0), alpha);
}

TestResult lilliefors(std::span<const double> sample, double alpha, int mc_reps) {
    if (sample.size() < 5) fail(errc::invalid_argument, "lilliefors: need n >= 5");
    if (mc_reps < 100) fail(errc::invalid_argument, "lilliefors: need mc_reps >= 100");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double t = lilliefors_statistic(std::move(sorted));
    const std::vector<double>& table = lilliefors_null_table(sample.size(), mc_reps);
    const auto above = table.end() - std::upper_bound(table.begin(), table.end(), t);
    const double p = static_cast<double>(above) / static_cast<double>(mc_reps);
    return make_result("lilliefors", t, std::nullopt, p, alpha);
}

TestResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf,
                   double alpha) {
    if (sample.size() < 5) fail(errc::invalid_argument, "ks_test: need n >= 5");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> f(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) f[i] = cdf(sorted[i]);
    const double d = ks_distance_sorted(f);
    const double lambda = std::sqrt(static_cast<double>(sample.size())) * d;
    return make_result("ks", d, std::nullopt, kolmogorov_sf(lambda), alpha);
}

TestResult chi2_equal_freq(std::span<const double> sample,
                           const std::function<double(double)>& cdf, int m_params, double alpha,
                           int expected_per_bin) {
    if (expected_per_bin < 1) fail(errc::invalid_argument, "chi2_equal_freq: expected_per_bin >= 1");
    if (m_params < 0) fail(errc::invalid_argument, "chi2_equal_freq: m_params >= 0");
    const std::size_t n = sample.size();
    const std::int64_t bins = static_cast<std::int64_t>(n) / expected_per_bin;
    const double df = static_cast<double>(bins) - 1.0 - static_cast<double>(m_params);
    if (df < 1.0) fail(errc::domain_error, "chi2_equal_freq: lack of data (df < 1)");

    // Counting in u = cdf(x) space puts the bin edges exactly at the model
    // quantiles i*e/n without inverting the CDF.
    std::vector<std::int64_t> observed(static_cast<std::size_t>(bins), 0);
    const double e = static_cast<double>(expected_per_bin);
    for (double x : sample) {
        const double u = cdf(x);
        auto idx = static_cast<std::int64_t>(u * static_cast<double>(n) / e);
        idx = std::clamp<std::int64_t>(idx, 0, bins - 1);
        ++observed[static_cast<std::size_t>(idx)];
    }

    double stat = 0.0;
    for (std::int64_t b = 0; b < bins; ++b) {
        const double expect = (b == bins - 1)
                                  ? static_cast<double>(n) - e * static_cast<double>(bins - 1)
                                  : e;
        const double diff = static_cast<double>(observed[static_cast<std::size_t>(b)]) - expect;
        stat += diff * diff / expect;
    }
    return make_result("chi2_equal_freq", stat, df, chi2_sf(stat, df), alpha);
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups, double alpha) {
    if (groups.size() < 2) fail(errc::invalid_argument, "kruskal_wallis: need >= 2 groups");
    for (const auto& g : groups)
        if (g.size() < 2) fail(errc::invalid_argument, "kruskal_wallis: every group needs n >= 2");

    struct Tagged {
        double value;
        std::size_t group;
    };
    std::vector<Tagged> pooled;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (double v : groups[g]) pooled.push_back({v, g});
    const double n_total = static_cast<double>(pooled.size());
    std::sort(pooled.begin(), pooled.end(),
              [](const Tagged& a, const Tagged& b) { return a.value < b.value; });

    std::vector<double> rank_sum(groups.size(), 0.0);
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = 0.5 * (static_cast<double>(i) + 1.0 + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) rank_sum[pooled[k].group] += midrank;
        tie_term += t * t * t - t;
        i = j;
    }

    double h = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g)
        h += rank_sum[g] * rank_sum[g] / static_cast<double>(groups[g].size());
    h = 12.0 / (n_total * (n_total + 1.0)) * h - 3.0 * (n_total + 1.0);

    const double df = static_cast<double>(groups.size()) - 1.0;
    const double correction = 1.0 - tie_term / (n_total * n_total * n_total - n_total);
    if (correction <= 0.0) {
        // Every pooled value identical: H undefined, accept by convention.
        return make_result("kruskal_wallis", 0.0, df, 1.0, alpha);
    }
    h /= correction;
    return make_result("kruskal_wallis", h, df, chi2_sf(h, df), alpha);
}

ProbPlotData normal_prob_plot_data(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 3) fail(errc::invalid_argument, "normal_prob_plot_data: need n >= 3");
    ProbPlotData out;
    out.ordered.assign(sample.begin(), sample.end());
    std::sort(out.ordered.begin(), out.ordered.end());

    out.normal_medians.resize(n);
    const double mn = std::pow(0.5, 1.0 / static_cast<double>(n));
    for (std::size_t i = 1; i <= n; ++i) {
        double m;
        if (i == n)
            m = mn;
        else if (i == 1)
            m = 1.0 - mn;
        else
            m = (static_cast<double>(i) - 0.3175) / (static_cast<double>(n) + 0.365);
        out.normal_medians[i - 1] = normal_quantile(m);
    }

    // Least-squares reference line ordered = slope * median + intercept.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += out.normal_medians[i];
        sy += out.ordered[i];
        sxx += out.normal_medians[i] * out.normal_medians[i];
        sxy += out.normal_medians[i] * out.ordered[i];
    }
    const double nn = static_cast<double>(n);
    out.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    out.intercept = (sy - out.slope * sx) / nn;
    return out;
}

std::vector<TailCount> tail_counts(std::span<const double> sample, const GaussianParams& fitted,
                                   std::span<const double> z_levels) {
    static constexpr double kDefault[3] = {2.0, 3.0, 4.0};
    if (z_levels.empty()) z_levels = std::span<const double>(kDefault, 3);
    if (sample.empty()) fail(errc::invalid_argument, "tail_counts: empty sample");
    const double n = static_cast<double>(sample.size());
    std::vector<TailCount> out;
    out.reserve(z_levels.size());
    for (double z : z_levels) {
        TailCount tc;
        tc.z = z;
        tc.expected = n * 2.0 * normal_cdf(-z);
        for (double x : sample)
            if (std::abs(x - fitted.mu) > z * fitted.sigma) ++tc.observed;
        out.push_back(tc);
    }
    return out;
}

RejectionSummary rejection_proportion(
    const PathSet& paths, const std::function<TestResult(const ReturnSeries&)>& test) {
    RejectionSummary out;
    for (const ReturnSeries& path : paths.paths) {
        try {
            const TestResult r = test(path);
            ++out.tested;
            if (r.reject) ++out.rejected;
        } catch (const Error&) {
            ++out.not_run;
        }
    }
    if (out.tested == 0) fail(errc::domain_error, "rejection_proportion: no path was testable");
    out.proportion = static_cast<double>(out.rejected) / static_cast<double>(out.tested);
    return out;
}

KurtosisSummary generated_kurtosis(const TabulatedDensity& density, std::size_t n_per_set,
                                   int n_sets, std::uint64_t seed) {
    if (n_per_set < 100) fail(errc::invalid_argument, "generated_kurtosis: need n_per_set >= 100");
    if (n_sets < 2) fail(errc::invalid_argument, "generated_kurtosis: need n_sets >= 2");
    KurtosisSummary out;
    out.values.reserve(static_cast<std::size_t>(n_sets));
    for (int s = 0; s < n_sets; ++s) {
        const std::vector<double> draw =
            sample_from_density(density, n_per_set, derive_seed(seed, static_cast<std::uint64_t>(s)));
        out.values.push_back(fisher_kurtosis(draw));
    }
    const double n = static_cast<double>(out.values.size());
    out.mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : out.values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / (n - 1.0));
    return out;
}

std::string test_result_json(const TestResult& result) {
    nlohmann::ordered_json j;
    j["name"] = result.name;
    j["statistic"] = result.statistic;
    if (result.df)
        j["df"] = *result.df;
    else
        j["df"] = nullptr;
    j["p_value"] = result.p_value;
    j["alpha"] = result.alpha;
    j["reject"] = result.reject;
    return j.dump();
}

} // namespace dyx
