// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#include "dyx/heston_sim.hpp"

#include <algorithm>
#include <cmath>

#include "dyx/error.hpp"
#include "dyx/rng.hpp"
#include "dyx/special.hpp"

namespace dyx {

SimResult simulate_returns(const SimConfig& config) {
    config.params.validate();
    if (config.n_returns < 1) fail(errc::invalid_argument, "simulate_returns: n_returns >= 1");
    if (config.tau < 1) fail(errc::invalid_argument, "simulate_returns: tau >= 1");
    if (config.substeps < 1) fail(errc::invalid_argument, "simulate_returns: substeps >= 1");
    if (config.burn_in_days < 0) fail(errc::invalid_argument, "simulate_returns: burn_in_days >= 0");

    const DyParams& q = config.params;
    const double dt = 1.0 / static_cast<double>(config.substeps);
    const double sdt = std::sqrt(dt);
    const double rho_c = std::sqrt(1.0 - q.rho * q.rho);

    const Philox w1(config.seed, 0);
    const Philox w2(config.seed, 1);

    const std::int64_t recorded_days = config.n_returns * config.tau;
    const std::int64_t total_days = config.burn_in_days + recorded_days;

    SimResult out;
    out.returns.tau = config.tau;
    out.returns.offset = 1;  // a single non-overlapping path
    out.returns.values.reserve(static_cast<std::size_t>(config.n_returns));
    out.variance_path.reserve(static_cast<std::size_t>(recorded_days));

    double v = config.v0 < 0.0 ? q.theta : config.v0;
    double x_window = 0.0;
    std::uint64_t step = 0;
    for (std::int64_t day = 0; day < total_days; ++day) {
        for (int s = 0; s < config.substeps; ++s, ++step) {
            const double z1 = normal_quantile(w1.uniform_at(step));
            const double z2raw = normal_quantile(w2.uniform_at(step));
            const double z2 = q.rho * z1 + rho_c * z2raw;
            const double vp = std::max(v, 0.0);
            const double sv = std::sqrt(vp);
            x_window += (q.mu - 0.5 * vp) * dt + sv * sdt * z1;
            v += -q.gamma * (vp - q.theta) * dt + q.k * sv * sdt * z2;
        }
        if (day < config.burn_in_days) {
            x_window = 0.0;
            continue;
        }
        out.variance_path.push_back(std::max(v, 0.0));
        if ((day - config.burn_in_days + 1) % config.tau == 0) {
            out.returns.values.push_back(x_window);
            x_window = 0.0;
        }
    }
    return out;
}

std::vector<double> sample_from_density(const TabulatedDensity& density, std::size_t n,
                                        std::uint64_t seed) {
    if (density.x.size() < 2 || density.cdf.size() != density.x.size())
        fail(errc::invalid_argument, "sample_from_density: malformed table");
    const double lo = density.cdf.front();
    const double hi = density.cdf.back();
    if (hi - lo < 1.0 - 1e-3)
        fail(errc::domain_error, "sample_from_density: cdf span " + std::to_string(hi - lo) +
                                     " < 1 - 1e-3 (grid too narrow)");

    const Philox gen(seed, 2);  // distinct from the simulator's Wiener streams
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = lo + (hi - lo) * gen.uniform_at(i);
        const auto it = std::upper_bound(density.cdf.begin(), density.cdf.end(), u);
        std::size_t j = static_cast<std::size_t>(it - density.cdf.begin());
        if (j == 0) j = 1;
        if (j >= density.cdf.size()) j = density.cdf.size() - 1;
        const double c0 = density.cdf[j - 1], c1 = density.cdf[j];
        const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
        out[i] = density.x[j - 1] + t * (density.x[j] - density.x[j - 1]);
    }
    return out;
}

PriceSeries simulate_price_series(const DyParams& params, std::int64_t n_days, int substeps,
                                  std::uint64_t seed, int burn_in_days) {
    if (n_days < 2) fail(errc::invalid_argument, "simulate_price_series: need n_days >= 2");
    SimConfig cfg;
    cfg.params = params;
    cfg.n_returns = n_days - 1;
    cfg.tau = 1;
    cfg.substeps = substeps;
    cfg.seed = seed;
    cfg.burn_in_days = burn_in_days;
    const SimResult sim = simulate_returns(cfg);

    PriceSeries out;
    out.dates.reserve(static_cast<std::size_t>(n_days));
    out.closes.reserve(static_cast<std::size_t>(n_days));

    // Weekday calendar starting Tuesday 1990-01-02.
    int y = 1990, m = 1, d = 2, weekday = 2;  // 0 = Sunday
    auto push_date = [&] {
        out.dates.push_back({y, m, d});
        do {
            static constexpr int md[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
            int days = md[m - 1];
            const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
            if (m == 2 && leap) days = 29;
            if (++d > days) {
                d = 1;
                if (++m > 12) { m = 1; ++y; }
            }
            weekday = (weekday + 1) % 7;
        } while (weekday == 0 || weekday == 6);
    };

    double log_price = std::log(100.0);
    push_date();
    out.closes.push_back(100.0);
    for (double r : sim.returns.values) {
        log_price += r;
        push_date();
        out.closes.push_back(std::exp(log_price));
    }
    return out;
}

} // namespace dyx
