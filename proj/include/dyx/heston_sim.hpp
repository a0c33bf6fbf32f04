// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DYX_HESTON_SIM_HPP
#define DYX_HESTON_SIM_HPP

#include <cstdint>
#include <vector>

#include "dyx/density.hpp"
#include "dyx/dy_model.hpp"
#include "dyx/market_data.hpp"

namespace dyx {

// Euler-Maruyama discretization of the coupled log-price/variance SDEs
//   dx = (mu - v/2) dt + sqrt(v) dW1,   dv = -gamma (v - theta) dt + k sqrt(v) dW2
// with full truncation: v may dip below zero in the state, but v+ = max(v, 0)
// is what enters the restoring drift and both diffusion terms, and v+ is what
// gets recorded. Gaussian increments are exact (sqrt(dt) * z with z from the
// Philox streams), so k = 0 reproduces the constant-variance model exactly at
// any substep count.
struct SimConfig {
    DyParams params;
    std::int64_t n_returns = 0;
    int tau = 1;
    int substeps = 100;        // Euler steps per trading day
    double v0 = -1.0;          // initial variance; negative means theta
    std::uint64_t seed = 0;
    int burn_in_days = 250;    // discarded so v starts near stationarity
};

struct SimResult {
    ReturnSeries returns;               // n_returns log returns over tau-day windows
    std::vector<double> variance_path;  // truncated v at each recorded day end
};

// Deterministic for a fixed config: stream 0 of the seed drives W1, stream 1
// drives W2 (correlated via Cholesky), indexed by global substep, so results
// do not depend on scheduling or chunking.
SimResult simulate_returns(const SimConfig& config);

// Inverse-CDF draws from the piecewise-linear tabulated CDF, deterministic
// per seed. Uniforms are rescaled onto the table's CDF span; a span short of
// 1 - 1e-3 means the grid clips real mass and is rejected.
std::vector<double> sample_from_density(const TabulatedDensity& density, std::size_t n,
                                        std::uint64_t seed);

// Synthetic close-price series S0 = 100 driven by daily simulated returns
// (weekday dates from 1990-01-02), so the whole analysis pipeline can run
// without real data.
PriceSeries simulate_price_series(const DyParams& params, std::int64_t n_days, int substeps,
                                  std::uint64_t seed, int burn_in_days = 250);

} // namespace dyx

#endif
