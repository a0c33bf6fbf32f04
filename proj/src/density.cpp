// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#include "dyx/density.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "dyx/error.hpp"
#include "dyx/format.hpp"

namespace dyx {

TabulatedDensity make_tabulated(int tau, std::vector<double> x, std::vector<double> density) {
    if (x.size() < 2 || x.size() != density.size())
        fail(errc::invalid_argument, "make_tabulated: need matching grids of length >= 2");
    if (!std::is_sorted(x.begin(), x.end()) ||
        std::adjacent_find(x.begin(), x.end()) != x.end())
        fail(errc::invalid_argument, "make_tabulated: x grid must be strictly ascending");

    for (double& d : density) {
        if (!std::isfinite(d) || d < -1e-8)
            fail(errc::numeric_error, "make_tabulated: density value below tolerance");
        d = std::max(d, 0.0);
    }

    TabulatedDensity table;
    table.tau = tau;
    table.x = std::move(x);
    table.density = std::move(density);
    table.cdf.resize(table.x.size());
    double acc = 0.0;
    table.cdf[0] = 0.0;
    for (std::size_t i = 1; i < table.x.size(); ++i) {
        acc += 0.5 * (table.density[i] + table.density[i - 1]) * (table.x[i] - table.x[i - 1]);
        table.cdf[i] = std::min(acc, 1.0);
    }
    table.mass = acc;
    if (std::abs(table.mass - 1.0) > 1e-4)
        fail(errc::numeric_error,
             "make_tabulated: mass " + std::to_string(table.mass) + " outside 1 +/- 1e-4");
    return table;
}

double density_cdf_at(const TabulatedDensity& table, double x) {
    if (x <= table.x.front()) return 0.0;
    if (x >= table.x.back()) return 1.0;
    const auto it = std::upper_bound(table.x.begin(), table.x.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - table.x.begin());
    const double t = (x - table.x[i - 1]) / (table.x[i] - table.x[i - 1]);
    return table.cdf[i - 1] + t * (table.cdf[i] - table.cdf[i - 1]);
}

double density_pdf_at(const TabulatedDensity& table, double x) {
    if (x < table.x.front() || x > table.x.back()) return 0.0;
    const auto it = std::upper_bound(table.x.begin(), table.x.end(), x);
    if (it == table.x.end()) return table.density.back();
    const std::size_t i = static_cast<std::size_t>(it - table.x.begin());
    if (i == 0) return table.density.front();
    const double t = (x - table.x[i - 1]) / (table.x[i] - table.x[i - 1]);
    return table.density[i - 1] + t * (table.density[i] - table.density[i - 1]);
}

void write_density_csv(std::ostream& out, const TabulatedDensity& table) {
    out << "x,density,cdf\n";
    for (std::size_t i = 0; i < table.x.size(); ++i)
        out << format_double(table.x[i]) << ',' << format_double(table.density[i]) << ','
            << format_double(table.cdf[i]) << '\n';
}

} // namespace dyx
