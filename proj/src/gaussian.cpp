// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#include "dyx/gaussian.hpp"

#include <cmath>

#include "dyx/error.hpp"
#include "dyx/special.hpp"

namespace dyx {

GaussianParams fit_gaussian(const ReturnSeries& series) {
    if (series.values.size() < 2) fail(errc::invalid_argument, "fit_gaussian: need n >= 2");
    GaussianParams params;
    params.mu = series.mean();
    params.sigma = std::sqrt(series.variance());
    if (!(params.sigma > 0.0)) fail(errc::domain_error, "fit_gaussian: constant series");
    return params;
}

double gaussian_pdf(const GaussianParams& params, double x) {
    if (!(params.sigma > 0.0)) fail(errc::invalid_argument, "gaussian_pdf: sigma must be > 0");
    return normal_pdf((x - params.mu) / params.sigma) / params.sigma;
}

double gaussian_cdf(const GaussianParams& params, double x) {
    if (!(params.sigma > 0.0)) fail(errc::invalid_argument, "gaussian_cdf: sigma must be > 0");
    return normal_cdf((x - params.mu) / params.sigma);
}

} // namespace dyx
