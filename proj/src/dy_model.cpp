// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#include "dyx/dy_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dyx/error.hpp"
#include "dyx/special.hpp"

namespace dyx {

namespace {

using cplx = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTruncationLevel = 1e-12;  // |exp(Re F)| kept below this past Pmax
constexpr double kDensityFloor = 1e-300;

std::string params_str(const DyParams& p, double t) {
    std::ostringstream os;
    os << "(gamma=" << p.gamma << ", theta=" << p.theta << ", k=" << p.k << ", mu=" << p.mu
       << ", rho=" << p.rho << ", t=" << t << ")";
    return os.str();
}

// 12-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlx[6] = {0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
                            0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
constexpr double kGlw[6] = {0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
                            0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

struct Brackets {
    cplx log_h[3];   // principal-branch logs of the three bracket factors
    cplx linear;     // Gamma*t - 2z
};

// Evaluates the bracket factors h_j with cosh/sinh folded into exponentials:
// cosh z + c sinh z = e^z [ (1+c)/2 + ((1-c)/2) e^{-2z} ], Re z >= 0, so the
// h_j stay O(1) no matter how large p*t gets.
Brackets eval_brackets(const DyParams& q, double t, double p) {
    const cplx gam(q.gamma + 0.0, q.rho * q.k * p);  // Gamma
    const cplx omega = std::sqrt(gam * gam + q.k * q.k * cplx(p * p, -p));
    const cplx z = 0.5 * t * omega;
    const cplx decay = std::exp(-2.0 * z);

    const cplx c1 = q.gamma / omega;
    const cplx c2 = gam / omega;
    const cplx c3 = (omega * omega - gam * gam + 2.0 * q.gamma * gam) / (2.0 * q.gamma * omega);

    Brackets out;
    const cplx cs[3] = {c1, c2, c3};
    for (int j = 0; j < 3; ++j)
        out.log_h[j] = std::log(0.5 * (1.0 + cs[j]) + 0.5 * (1.0 - cs[j]) * decay);
    out.linear = gam * t - 2.0 * z;
    return out;
}

cplx combine(const DyParams& q, double t, const Brackets& b, const double wind[3]) {
    constexpr double kTwoPi = 6.283185307179586;
    const cplx l0 = b.log_h[0] + cplx(0.0, kTwoPi * wind[0]);
    const cplx l1 = b.log_h[1] + cplx(0.0, kTwoPi * wind[1]);
    const cplx l2 = b.log_h[2] + cplx(0.0, kTwoPi * wind[2]);
    return (q.gamma * q.theta / (q.k * q.k)) * (b.linear - 2.0 * (l0 - l1 + l2));
}

double mean_of(const Histogram& h) {
    double mass = 0.0, m = 0.0;
    for (const HistogramBin& b : h.bins) {
        const double w = b.density * h.delta_r;
        mass += w;
        m += w * b.center;
    }
    return m / mass;
}

double variance_of(const Histogram& h) {
    const double m = mean_of(h);
    double mass = 0.0, v = 0.0;
    for (const HistogramBin& b : h.bins) {
        const double w = b.density * h.delta_r;
        mass += w;
        v += w * (b.center - m) * (b.center - m);
    }
    return v / mass;
}

// ---- Nelder-Mead ----------------------------------------------------------

struct NmResult {
    std::vector<double> x;
    double f = kInf;
    int iterations = 0;
    bool converged = false;
};

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                     const std::vector<double>& x0, const std::vector<double>& steps,
                     int max_iterations, double tolerance,
                     const std::function<void(double)>& on_improve) {
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> xs(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += steps[i];
    std::vector<double> fs(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fs[i] = fn(xs[i]);

    std::vector<std::size_t> order(d + 1);
    auto sort_simplex = [&] {
        for (std::size_t i = 0; i <= d; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    };
    sort_simplex();
    double best_seen = fs[order[0]];
    if (std::isfinite(best_seen) && on_improve) on_improve(best_seen);

    NmResult res;
    for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
        const std::size_t lo = order[0], hi = order[d], second_hi = order[d - 1];
        if (std::isfinite(fs[lo]) && fs[hi] - fs[lo] < tolerance * (1.0 + std::abs(fs[lo]))) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == hi) continue;
            for (std::size_t j = 0; j < d; ++j) centroid[j] += xs[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(d);

        auto point = [&](double coef) {
            std::vector<double> x(d);
            for (std::size_t j = 0; j < d; ++j) x[j] = centroid[j] + coef * (xs[hi][j] - centroid[j]);
            return x;
        };

        const std::vector<double> xr = point(-1.0);
        const double fr = fn(xr);
        if (fr < fs[lo]) {
            const std::vector<double> xe = point(-2.0);
            const double fe = fn(xe);
            if (fe < fr) { xs[hi] = xe; fs[hi] = fe; }
            else         { xs[hi] = xr; fs[hi] = fr; }
        } else if (fr < fs[second_hi]) {
            xs[hi] = xr;
            fs[hi] = fr;
        } else {
            const double coef = (fr < fs[hi]) ? -0.5 : 0.5;
            const std::vector<double> xc = point(coef);
            const double fc = fn(xc);
            if (fc < std::min(fr, fs[hi])) {
                xs[hi] = xc;
                fs[hi] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == lo) continue;
                    for (std::size_t j = 0; j < d; ++j)
                        xs[i][j] = xs[lo][j] + 0.5 * (xs[i][j] - xs[lo][j]);
                    fs[i] = fn(xs[i]);
                }
            }
        }
        sort_simplex();
        if (fs[order[0]] < best_seen) {
            best_seen = fs[order[0]];
            if (on_improve) on_improve(best_seen);
        }
    }
    sort_simplex();
    res.x = xs[order[0]];
    res.f = fs[order[0]];
    return res;
}

} // namespace

void DyParams::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma) || !(theta > 0.0) || !std::isfinite(theta) ||
        !(k > 0.0) || !std::isfinite(k) || !std::isfinite(mu) || !(std::abs(rho) <= 1.0))
        fail(errc::invalid_argument, "DyParams: need gamma, theta, k > 0, finite mu, |rho| <= 1");
}

std::complex<double> char_exponent(const DyParams& params, double t, double p) {
    params.validate();
    if (!(t > 0.0)) fail(errc::invalid_argument, "char_exponent: t must be positive");
    static constexpr double kNoWind[3] = {0.0, 0.0, 0.0};
    const cplx f = combine(params, t, eval_brackets(params, t, p), kNoWind);
    if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
        fail(errc::numeric_error, "char_exponent: non-finite value at p=" + std::to_string(p) +
                                      " " + params_str(params, t));
    return f;
}

CharExponentSeries::CharExponentSeries(const DyParams& params, double t)
    : params_(params), t_(t) {
    params_.validate();
    if (!(t > 0.0)) fail(errc::invalid_argument, "CharExponentSeries: t must be positive");
}

std::complex<double> CharExponentSeries::eval(double p) {
    constexpr double kPi = 3.141592653589793;
    const Brackets b = eval_brackets(params_, t_, p);
    if (have_prev_) {
        for (int j = 0; j < 3; ++j) {
            double delta = b.log_h[j].imag() - prev_arg_[j];
            while (delta > kPi) { wind_[j] -= 1.0; delta -= 2.0 * kPi; }
            while (delta < -kPi) { wind_[j] += 1.0; delta += 2.0 * kPi; }
        }
    }
    for (int j = 0; j < 3; ++j) prev_arg_[j] = b.log_h[j].imag();
    have_prev_ = true;
    const cplx f = combine(params_, t_, b, wind_);
    if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
        fail(errc::numeric_error, "char_exponent: non-finite value at p=" + std::to_string(p) +
                                      " " + params_str(params_, t_));
    return f;
}

double dy_mean(const DyParams& params, double t) { return -0.5 * params.theta * t; }

double dy_stddev(const DyParams& params, double t) {
    // Exact second moment for stationary initial variance at rho = 0; used
    // only to size grids, so the missing rho cross term is absorbed by the
    // 10-sigma margin.
    const double gt = params.gamma * t;
    const double var = params.theta * t +
                       params.theta * params.k * params.k /
                           (4.0 * std::pow(params.gamma, 3)) * (gt - 1.0 + std::exp(-gt));
    return std::sqrt(var);
}

DyDensityPlan::DyDensityPlan(const DyParams& params, double t) : params_(params), t_(t) {
    params_.validate();
    if (!(t > 0.0)) fail(errc::invalid_argument, "DyDensityPlan: t must be positive");
    one_sided_ = params_.rho == 0.0;

    // Truncation: double from 50/sqrt(theta t) until the envelope exp(Re F)
    // is below the cutoff.
    p_max_ = 50.0 / std::sqrt(params_.theta * t_);
    int doublings = 0;
    while (std::exp(char_exponent(params_, t_, p_max_).real()) >= kTruncationLevel) {
        p_max_ *= 2.0;
        if (++doublings > 24)
            fail(errc::numeric_error,
                 "dy_pdf: no truncation bound below hard cap " + params_str(params_, t_));
    }

    const double m = dy_mean(params_, t_);
    const double s = dy_stddev(params_, t_);
    ref_grid_.resize(801);
    for (std::size_t i = 0; i < ref_grid_.size(); ++i)
        ref_grid_[i] = m - 10.0 * s + 20.0 * s * static_cast<double>(i) / 800.0;

    // Refine the panel count until the normalization estimate settles.
    double prev_mass = kInf;
    bool settled = false;
    for (int panels = 16; panels <= 2048; panels *= 2) {
        build_nodes(panels);
        const std::vector<double> d = density_at(ref_grid_);
        double mass = 0.0;
        for (std::size_t i = 1; i < ref_grid_.size(); ++i)
            mass += 0.5 * (d[i] + d[i - 1]) * (ref_grid_[i] - ref_grid_[i - 1]);
        if (std::abs(mass - prev_mass) < 1e-6) {
            settled = true;
            break;
        }
        prev_mass = mass;
    }
    if (!settled)
        fail(errc::numeric_error,
             "dy_pdf: quadrature did not settle at 2048 panels " + params_str(params_, t_));

    if (!one_sided_) {
        // Residual imaginary part of the two-sided integral, relative to the
        // peak density.
        double max_density = 0.0, max_imag = 0.0;
        for (double x : ref_grid_) {
            double re = 0.0, im = 0.0;
            for (std::size_t i = 0; i < nodes_.size(); ++i) {
                const cplx e = weights_[i] * std::exp(cplx(0.0, nodes_[i] * x));
                re += e.real();
                im += e.imag();
            }
            max_density = std::max(max_density, std::abs(re));
            max_imag = std::max(max_imag, std::abs(im));
        }
        imag_residual_ = max_imag / std::max(max_density, kDensityFloor);
        if (imag_residual_ > 1e-8)
            fail(errc::numeric_error,
                 "dy_pdf: two-sided integral left imaginary residual " +
                     std::to_string(imag_residual_) + " " + params_str(params_, t_));
    }
}

void DyDensityPlan::build_nodes(int panels) {
    nodes_.clear();
    weights_.clear();
    nodes_.reserve(static_cast<std::size_t>(panels) * 12 * (one_sided_ ? 1 : 2));
    weights_.reserve(nodes_.capacity());

    const double scale = one_sided_ ? 1.0 / M_PI : 0.5 / M_PI;
    const double width = p_max_ / static_cast<double>(panels);

    auto side_nodes = [&](double sign) {
        CharExponentSeries series(params_, t_);
        // Walk |p| upward so the branch tracker always sees adjacent points.
        for (int panel = 0; panel < panels; ++panel) {
            const double mid = width * (panel + 0.5);
            const double half = 0.5 * width;
            double ps[12], ws[12];
            for (int i = 0; i < 6; ++i) {
                ps[i] = mid - half * kGlx[5 - i];
                ws[i] = kGlw[5 - i];
                ps[6 + i] = mid + half * kGlx[i];
                ws[6 + i] = kGlw[i];
            }
            for (int i = 0; i < 12; ++i) {
                const cplx f = series.eval(sign * ps[i]);
                nodes_.push_back(sign * ps[i]);
                weights_.push_back(scale * ws[i] * half * std::exp(f));
            }
        }
    };

    side_nodes(1.0);
    if (!one_sided_) side_nodes(-1.0);
}

double DyDensityPlan::density_at(double x) const {
    // Re[ sum w_i e^{F_i} e^{i p_i x} ]; the weights already fold in exp(F)
    // and the 1/pi (or 1/2pi) prefactor.
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double ph = nodes_[i] * x;
        acc += weights_[i].real() * std::cos(ph) - weights_[i].imag() * std::sin(ph);
    }
    return acc;
}

std::vector<double> DyDensityPlan::density_at(const std::vector<double>& xs) const {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = density_at(xs[i]);
    return out;
}

TabulatedDensity dy_pdf(const DyParams& params, double t, const std::vector<double>& x_grid) {
    const DyDensityPlan plan(params, t);
    const std::vector<double>& grid = x_grid.empty() ? plan.reference_grid() : x_grid;
    try {
        return make_tabulated(static_cast<int>(std::lround(t)), grid, plan.density_at(grid));
    } catch (const Error& e) {
        fail(e.code(), std::string(e.what()) + " " + params_str(params, t));
    }
}

double log_deviation_error(const DyParams& params, const std::vector<LagHistogram>& histograms,
                           bool squared_terms) {
    params.validate();
    if (histograms.empty())
        fail(errc::invalid_argument, "log_deviation_error: need at least one histogram");
    double e = 0.0;
    for (const LagHistogram& lh : histograms) {
        const DyDensityPlan plan(params, static_cast<double>(lh.tau));
        const double shift = lh.hist.center_shift - params.mu * lh.tau;
        for (const HistogramBin& bin : lh.hist.bins) {
            if (!(bin.density > 0.0))
                fail(errc::invalid_argument, "log_deviation_error: non-positive bin density");
            const double model = plan.density_at(bin.center + shift);
            const double term = std::log(bin.density) - std::log(std::max(model, kDensityFloor));
            e += squared_terms ? term * term : std::abs(term);
        }
    }
    return e;
}

FitReport fit_dy(const std::vector<LagHistogram>& histograms, const FitOptions& options) {
    if (histograms.empty()) fail(errc::invalid_argument, "fit_dy: need at least one histogram");
    for (const LagHistogram& lh : histograms)
        if (lh.tau < 1 || lh.hist.bins.empty())
            fail(errc::invalid_argument, "fit_dy: invalid lag histogram");

    // Auto-init recipe: moments of the smallest-lag histogram scaled to one
    // day; gamma starts at 0.1/day with Feller ratio 2.
    const LagHistogram* smallest = &histograms.front();
    for (const LagHistogram& lh : histograms)
        if (lh.tau < smallest->tau) smallest = &lh;
    const double tau0 = smallest->tau;
    const double theta0 = std::max(variance_of(smallest->hist) / tau0, 1e-12);
    const double mu0 = (mean_of(smallest->hist) + smallest->hist.center_shift) / tau0 + 0.5 * theta0;

    auto lattice_start = [&](double gamma, double feller) {
        DyParams p;
        p.gamma = gamma;
        p.theta = theta0;
        p.k = std::sqrt(2.0 * gamma * theta0 / feller);
        p.mu = mu0;
        p.rho = options.rho_fixed;
        return p;
    };

    std::vector<DyParams> starts;
    starts.push_back(options.init ? *options.init : lattice_start(0.1, 2.0));
    static constexpr double kLattice[7][2] = {{0.1, 0.8}, {1.0, 0.8}, {1.0, 2.4}, {5.0, 0.8},
                                              {5.0, 2.4}, {25.0, 0.8}, {25.0, 2.4}};
    for (const auto& gf : kLattice) {
        if (static_cast<int>(starts.size()) >= std::max(options.restarts, 1)) break;
        starts.push_back(lattice_start(gf[0], gf[1]));
    }

    const std::size_t dim = options.fit_rho ? 5 : 4;
    FitReport report;
    report.error = kInf;
    for (const LagHistogram& lh : histograms) report.lags.push_back(lh.tau);
    std::sort(report.lags.begin(), report.lags.end());

    int evaluations = 0;
    auto unpack = [&](const std::vector<double>& q) {
        DyParams p;
        p.gamma = std::exp(std::clamp(q[0], -46.0, 46.0));
        p.theta = std::exp(std::clamp(q[1], -46.0, 46.0));
        p.k = std::exp(std::clamp(q[2], -46.0, 46.0));
        p.mu = q[3];
        p.rho = options.fit_rho ? 0.99 * std::tanh(q[4]) : options.rho_fixed;
        return p;
    };
    auto objective = [&](const std::vector<double>& q) {
        ++evaluations;
        try {
            return log_deviation_error(unpack(q), histograms, options.squared_terms);
        } catch (const Error&) {
            return kInf;
        }
    };

    double global_best = kInf;
    for (const DyParams& s : starts) {
        std::vector<double> q0 = {std::log(s.gamma), std::log(s.theta), std::log(s.k), s.mu};
        std::vector<double> steps = {0.7, 0.7, 0.7, 0.5 * std::sqrt(theta0)};
        if (options.fit_rho) {
            q0.push_back(std::atanh(std::clamp(s.rho / 0.99, -0.999, 0.999)));
            steps.push_back(0.3);
        }
        const NmResult r = nelder_mead(
            objective, q0, steps, options.max_iterations, options.tolerance,
            [&](double e) {
                if (e < global_best) {
                    global_best = e;
                    report.error_trace.push_back(e);
                }
            });
        report.iterations += r.iterations;
        if (r.f < report.error) {
            report.error = r.f;
            report.params = unpack(r.x);
            report.converged = r.converged;
        }
    }
    report.evaluations = evaluations;
    if (!std::isfinite(report.error))
        fail(errc::numeric_error, "fit_dy: no start point produced a finite error");
    report.feller_ratio = report.params.feller_ratio();
    report.feller_warning = report.params.feller_warning();
    return report;
}

std::string fit_report_json(const FitReport& report) {
    nlohmann::ordered_json j;
    j["gamma"] = report.params.gamma;
    j["theta"] = report.params.theta;
    j["k"] = report.params.k;
    j["mu"] = report.params.mu;
    j["rho"] = report.params.rho;
    j["lags"] = report.lags;
    j["E"] = report.error;
    j["converged"] = report.converged;
    j["feller_ratio"] = report.feller_ratio;
    return j.dump(2);
}

double dy_return_cdf(const TabulatedDensity& table, const DyParams& params, double r) {
    return density_cdf_at(table, r - params.mu * table.tau);
}

} // namespace dyx
