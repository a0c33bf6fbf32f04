// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#include "dyx/nn_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "dyx/error.hpp"
#include "dyx/rng.hpp"
#include "dyx/special.hpp"

namespace dyx {

namespace {

constexpr int kHidden = 5;
constexpr int kParams = 3 * kHidden + 1;  // w1, b1, w2, b2

using Vec = std::array<double, kParams>;

double eval_raw(const Vec& q, double z) {
    double acc = q[3 * kHidden];  // b2
    for (int i = 0; i < kHidden; ++i)
        acc += q[2 * kHidden + i] * std::tanh(q[i] * z + q[kHidden + i]);
    return acc;
}

// Residuals r_i = f(z_i) - y_i and Jacobian rows d r_i / d q.
double residuals(const Vec& q, const std::vector<double>& z, const std::vector<double>& y,
                 std::vector<double>& r, std::vector<Vec>* jac) {
    double loss = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        double f = q[3 * kHidden];
        Vec row{};
        for (int h = 0; h < kHidden; ++h) {
            const double th = std::tanh(q[h] * z[i] + q[kHidden + h]);
            const double sech2 = 1.0 - th * th;
            f += q[2 * kHidden + h] * th;
            row[h] = q[2 * kHidden + h] * sech2 * z[i];
            row[kHidden + h] = q[2 * kHidden + h] * sech2;
            row[2 * kHidden + h] = th;
        }
        row[3 * kHidden] = 1.0;
        r[i] = f - y[i];
        loss += r[i] * r[i];
        if (jac) (*jac)[i] = row;
    }
    return loss;
}

// Solves (A + lambda diag(A)) d = -g in place; A is 16x16 SPD-ish.
bool solve_damped(const double a_in[kParams][kParams], const double g[kParams], double lambda,
                  double d[kParams]) {
    double a[kParams][kParams];
    for (int i = 0; i < kParams; ++i)
        for (int j = 0; j < kParams; ++j) a[i][j] = a_in[i][j];
    for (int i = 0; i < kParams; ++i) a[i][i] += lambda * std::max(a_in[i][i], 1e-12);

    // Cholesky.
    double l[kParams][kParams] = {};
    for (int i = 0; i < kParams; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (s <= 0.0) return false;
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    double tmp[kParams];
    for (int i = 0; i < kParams; ++i) {
        double s = -g[i];
        for (int k = 0; k < i; ++k) s -= l[i][k] * tmp[k];
        tmp[i] = s / l[i][i];
    }
    for (int i = kParams - 1; i >= 0; --i) {
        double s = tmp[i];
        for (int k = i + 1; k < kParams; ++k) s -= l[k][i] * d[k];
        d[i] = s / l[i][i];
    }
    return true;
}

} // namespace

double mlp_eval(const MlpParams& params, double x) {
    double acc = params.b2;
    for (int i = 0; i < kHidden; ++i) acc += params.w2[i] * std::tanh(params.w1[i] * x + params.b1[i]);
    return acc;
}

MlpParams train_mlp(const Histogram& hist, const MlpTrainOptions& options) {
    if (hist.bins.size() < 20) fail(errc::invalid_argument, "train_mlp: need >= 20 retained bins");

    std::vector<double> x, y;
    x.reserve(hist.bins.size());
    y.reserve(hist.bins.size());
    for (const HistogramBin& b : hist.bins) {
        x.push_back(b.center);
        y.push_back(std::log(b.density));
    }

    // Standardize inputs for training.
    double xm = 0.0;
    for (double v : x) xm += v;
    xm /= static_cast<double>(x.size());
    double xs = 0.0;
    for (double v : x) xs += (v - xm) * (v - xm);
    xs = std::sqrt(xs / static_cast<double>(x.size() - 1));
    if (!(xs > 0.0)) fail(errc::domain_error, "train_mlp: degenerate bin centers");
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - xm) / xs;
    double ym = 0.0;
    for (double v : y) ym += v;
    ym /= static_cast<double>(y.size());

    const std::size_t n = z.size();
    std::vector<double> r(n), r_try(n);
    std::vector<Vec> jac(n);

    double best_loss = std::numeric_limits<double>::infinity();
    Vec best{};
    bool any_finite = false;

    for (int restart = 0; restart < options.restarts; ++restart) {
        const Philox gen(options.seed, 0x4D4C50u + static_cast<std::uint64_t>(restart));
        Vec q{};
        std::uint64_t draw = 0;
        for (int h = 0; h < kHidden; ++h) {
            q[h] = 1.2 * normal_quantile(gen.uniform_at(draw++));          // w1
            q[kHidden + h] = 1.5 * normal_quantile(gen.uniform_at(draw++));  // b1
            q[2 * kHidden + h] = 0.5 * normal_quantile(gen.uniform_at(draw++));  // w2
        }
        q[3 * kHidden] = ym;

        double loss = residuals(q, z, y, r, &jac);
        if (!std::isfinite(loss)) continue;
        double lambda = 1e-3;

        for (int iter = 0; iter < options.max_iterations;) {
            double a[kParams][kParams] = {};
            double g[kParams] = {};
            for (std::size_t i = 0; i < n; ++i) {
                for (int p = 0; p < kParams; ++p) {
                    g[p] += jac[i][p] * r[i];
                    for (int pq = p; pq < kParams; ++pq) a[p][pq] += jac[i][p] * jac[i][pq];
                }
            }
            for (int p = 0; p < kParams; ++p)
                for (int pq = 0; pq < p; ++pq) a[p][pq] = a[pq][p];

            double d[kParams];
            bool stepped = false;
            while (lambda < 1e12) {
                if (solve_damped(a, g, lambda, d)) {
                    Vec q_try = q;
                    for (int p = 0; p < kParams; ++p) q_try[p] += d[p];
                    const double loss_try = residuals(q_try, z, y, r_try, nullptr);
                    if (std::isfinite(loss_try) && loss_try < loss) {
                        const double drop = loss - loss_try;
                        q = q_try;
                        loss = residuals(q, z, y, r, &jac);
                        lambda = std::max(lambda / 3.0, 1e-14);
                        ++iter;
                        stepped = true;
                        if (drop < 1e-15 * (1.0 + loss)) iter = options.max_iterations;
                        break;
                    }
                }
                lambda *= 2.0;
            }
            if (!stepped) break;
        }

        if (std::isfinite(loss) && loss < best_loss) {
            best_loss = loss;
            best = q;
            any_finite = true;
        }
    }
    if (!any_finite) fail(errc::numeric_error, "train_mlp: every restart diverged");

    // Fold the standardization into the weights: w1 z + b1 with
    // z = (x - xm)/xs becomes (w1/xs) x + (b1 - w1 xm / xs).
    MlpParams out;
    for (int h = 0; h < kHidden; ++h) {
        out.w1[h] = best[h] / xs;
        out.b1[h] = best[kHidden + h] - best[h] * xm / xs;
        out.w2[h] = best[2 * kHidden + h];
    }
    out.b2 = best[3 * kHidden];

    // Normalization constant over the training span.
    const double lo = hist.bins.front().lo, hi = hist.bins.back().hi;
    double mass = 0.0;
    double prev = std::exp(mlp_eval(out, lo));
    const int steps = 2048;
    for (int i = 1; i <= steps; ++i) {
        const double xi = lo + (hi - lo) * static_cast<double>(i) / steps;
        const double cur = std::exp(mlp_eval(out, xi));
        mass += 0.5 * (prev + cur) * (hi - lo) / steps;
        prev = cur;
    }
    if (!(mass > 0.0) || !std::isfinite(mass))
        fail(errc::numeric_error, "train_mlp: normalization mass underflow");
    out.norm = mass;
    return out;
}

TabulatedDensity mlp_density(const MlpParams& params, const std::vector<double>& x_grid, int tau) {
    if (x_grid.size() < 2) fail(errc::invalid_argument, "mlp_density: need a grid of >= 2 points");
    std::vector<double> raw(x_grid.size());
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        raw[i] = mlp_eval(params, x_grid[i]);
        peak = std::max(peak, raw[i]);
    }
    if (!std::isfinite(peak)) fail(errc::numeric_error, "mlp_density: non-finite network output");

    std::vector<double> dens(x_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i) dens[i] = std::exp(raw[i] - peak);
    double mass = 0.0;
    for (std::size_t i = 1; i < x_grid.size(); ++i)
        mass += 0.5 * (dens[i] + dens[i - 1]) * (x_grid[i] - x_grid[i - 1]);
    if (!(mass > 0.0)) fail(errc::numeric_error, "mlp_density: mass underflow");
    for (double& d : dens) d /= mass;
    return make_tabulated(tau, x_grid, std::move(dens));
}

std::string mlp_params_json(const MlpParams& params) {
    nlohmann::ordered_json j;
    j["w1"] = params.w1;
    j["b1"] = params.b1;
    j["w2"] = params.w2;
    j["b2"] = params.b2;
    j["norm"] = params.norm;
    return j.dump(2);
}

MlpParams mlp_params_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MlpParams p;
    for (int i = 0; i < kHidden; ++i) {
        p.w1[static_cast<std::size_t>(i)] = j.at("w1").at(i).get<double>();
        p.b1[static_cast<std::size_t>(i)] = j.at("b1").at(i).get<double>();
        p.w2[static_cast<std::size_t>(i)] = j.at("w2").at(i).get<double>();
    }
    p.b2 = j.at("b2").get<double>();
    p.norm = j.value("norm", 1.0);
    return p;
}

} // namespace dyx
