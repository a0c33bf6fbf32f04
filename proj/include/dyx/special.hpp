// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DYX_SPECIAL_HPP
#define DYX_SPECIAL_HPP

namespace dyx {

// Standard normal density and distribution function. The CDF is computed
// from std::erfc and is accurate to a few ULP over the full double range,
// comfortably inside the 1e-12 needed by the distribution tests.
double normal_pdf(double z) noexcept;
double normal_cdf(double z) noexcept;

// Inverse standard normal CDF. Acklam's rational approximation (2003
// constant set) polished with one Halley step against normal_cdf; relative
// error is at the double rounding level. p must lie in (0, 1).
double normal_quantile(double p);

// Upper/lower tail of the chi-squared distribution with (possibly
// non-integer) df > 0, via the regularized incomplete gamma functions.
double chi2_sf(double x, double df);
double chi2_cdf(double x, double df);

// Kolmogorov limiting distribution of sqrt(n)*D. `kolmogorov_sf` is the
// two-sided asymptotic p-value 2*sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2);
// the theta-dual series is used for small lambda where that sum loses
// precision.
double kolmogorov_sf(double lambda) noexcept;

} // namespace dyx

#endif
