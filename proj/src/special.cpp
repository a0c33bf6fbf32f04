// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#include "dyx/special.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "dyx/error.hpp"

namespace dyx {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
} // namespace

double normal_pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) fail(errc::invalid_argument, "normal_quantile: p outside (0,1)");

    // Acklam (2003) coefficients.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;

    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley iteration against the erfc-based CDF.
    const double e = normal_cdf(x) - p;
    const double u = e / normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double chi2_sf(double x, double df) {
    if (!(df > 0.0)) fail(errc::invalid_argument, "chi2_sf: df must be positive");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double chi2_cdf(double x, double df) {
    if (!(df > 0.0)) fail(errc::invalid_argument, "chi2_cdf: df must be positive");
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_p(0.5 * df, 0.5 * x);
}

double kolmogorov_sf(double lambda) noexcept {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // CDF form: sqrt(2 pi)/lambda * sum exp(-(2j-1)^2 pi^2 / (8 lambda^2)).
        const double w = M_PI * M_PI / (8.0 * lambda * lambda);
        double cdf = 0.0;
        for (int j = 1; j <= 5; ++j) {
            const int m = 2 * j - 1;
            cdf += std::exp(-static_cast<double>(m) * m * w);
        }
        cdf *= std::sqrt(2.0 * M_PI) / lambda;
        return 1.0 - cdf;
    }
    const double w = 2.0 * lambda * lambda;
    double sf = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 24; ++j) {
        const double term = std::exp(-static_cast<double>(j) * j * w);
        sf += sign * term;
        sign = -sign;
        if (term < 1e-300) break;
    }
    return std::max(0.0, 2.0 * sf);
}

} // namespace dyx
