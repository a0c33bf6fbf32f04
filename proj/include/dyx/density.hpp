// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DYX_DENSITY_HPP
#define DYX_DENSITY_HPP

#include <iosfwd>
#include <vector>

namespace dyx {

// A model or empirical density sampled on an ascending x grid, with its CDF
// tabulated on the same grid.
//
// Contract (checked by make_tabulated):
//   - density never below -1e-8 before clamping; stored values are >= 0
//   - trapezoid mass within 1e-4 of one
//   - cdf monotone nondecreasing with cdf.back() in [1 - 1e-4, 1]
struct TabulatedDensity {
    int tau = 0;
    std::vector<double> x;
    std::vector<double> density;
    std::vector<double> cdf;
    double mass = 0.0;  // raw trapezoid integral before clamping
};

// Builds the table from raw density values: clamps quadrature noise, checks
// the mass tolerance, accumulates the trapezoid CDF capped at one.
TabulatedDensity make_tabulated(int tau, std::vector<double> x, std::vector<double> density);

// CDF by linear interpolation, clamped to 0 below the grid and 1 above.
double density_cdf_at(const TabulatedDensity& table, double x);

// Density by linear interpolation, 0 outside the grid.
double density_pdf_at(const TabulatedDensity& table, double x);

// x,density,cdf
void write_density_csv(std::ostream& out, const TabulatedDensity& table);

} // namespace dyx

#endif
