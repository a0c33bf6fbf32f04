// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DYX_GAUSSIAN_HPP
#define DYX_GAUSSIAN_HPP

#include "dyx/market_data.hpp"

namespace dyx {

// Bachelier-Osborne baseline: log returns per lag are N(mu, sigma^2).
struct GaussianParams {
    double mu = 0.0;
    double sigma = 1.0;
};

// Sample mean and unbiased (n-1) standard deviation. Rejects constant
// series, where sigma would be zero.
GaussianParams fit_gaussian(const ReturnSeries& series);

double gaussian_pdf(const GaussianParams& params, double x);
double gaussian_cdf(const GaussianParams& params, double x);

} // namespace dyx

#endif
