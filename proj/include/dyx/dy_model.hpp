// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DYX_DY_MODEL_HPP
#define DYX_DY_MODEL_HPP

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "dyx/density.hpp"
#include "dyx/market_data.hpp"

namespace dyx {

// Parameters of the Dragulescu-Yakovenko stochastic-volatility model, all in
// trading-day units: the variance follows the CIR process
// dv = -gamma (v - theta) dt + k sqrt(v) dW2, the log price drifts at mu,
// and rho correlates the two Wiener processes (zero in the reduced model).
struct DyParams {
    double gamma = 0.0;  // relaxation rate, 1/day
    double theta = 0.0;  // long-run variance per day
    double k = 0.0;      // variance noise
    double mu = 0.0;     // drift per day
    double rho = 0.0;

    double feller_ratio() const { return 2.0 * gamma * theta / (k * k); }
    // True when the exact CIR process can touch zero; a caution flag, not an
    // error.
    bool feller_warning() const { return feller_ratio() < 1.0; }
    void validate() const;
};

// Characteristic exponent F_t(p) of the centered log return at lag t:
// with Gamma = gamma + i rho k p and Omega = sqrt(Gamma^2 + k^2 (p^2 - i p)),
//
//   F_t(p) = gamma Gamma theta t / k^2
//          - (2 gamma theta / k^2) log[(cosh(Omega t/2) + (gamma/Omega) sinh) /
//                                      (cosh(Omega t/2) + (Gamma/Omega) sinh)]
//          - (2 gamma theta / k^2) log[cosh(Omega t/2)
//                + ((Omega^2 - Gamma^2 + 2 gamma Gamma)/(2 gamma Omega)) sinh]
//
// evaluated in log domain (cosh/sinh never formed directly) so large p*t
// cannot overflow. F_t(0) = 0 and, at rho = 0, F_t(-p) = conj(F_t(p)).
std::complex<double> char_exponent(const DyParams& params, double t, double p);

// Ascending-p evaluator that additionally unwraps the complex logarithms by
// continuity between consecutive calls; used by the quadrature and by the
// branch-continuity checks. A fresh instance starts on the principal branch.
class CharExponentSeries {
  public:
    CharExponentSeries(const DyParams& params, double t);
    std::complex<double> eval(double p);  // p must not decrease across calls

  private:
    DyParams params_;
    double t_;
    bool have_prev_ = false;
    double prev_arg_[3] = {0.0, 0.0, 0.0};
    double wind_[3] = {0.0, 0.0, 0.0};
};

// Reusable inversion plan for one (params, t): truncation point, composite
// Gauss-Legendre nodes on [0, Pmax] (mirrored when rho != 0), and the
// characteristic exponent at every node. Building the plan performs the
// adaptive refinement; evaluating the density afterwards is a plain weighted
// sum, so one plan can serve any number of evaluation points.
class DyDensityPlan {
  public:
    DyDensityPlan(const DyParams& params, double t);

    double density_at(double x) const;
    std::vector<double> density_at(const std::vector<double>& xs) const;

    // Grid the refinement converged on: 801 points over mean +/- 10 sigma of
    // the model.
    const std::vector<double>& reference_grid() const { return ref_grid_; }
    double p_max() const { return p_max_; }
    std::size_t node_count() const { return nodes_.size(); }
    // Magnitude of the imaginary part left by the two-sided integral,
    // relative to the peak density (zero by construction when rho == 0).
    double imag_residual() const { return imag_residual_; }

  private:
    void build_nodes(int panels);

    DyParams params_;
    double t_;
    bool one_sided_;
    double p_max_ = 0.0;
    std::vector<double> nodes_;
    std::vector<std::complex<double>> weights_;  // quadrature weight * exp(F)
    std::vector<double> ref_grid_;
    double imag_residual_ = 0.0;
};

// Model mean and a grid-sizing standard deviation for the centered return at
// lag t (stationary initial variance, used to place evaluation grids).
double dy_mean(const DyParams& params, double t);
double dy_stddev(const DyParams& params, double t);

// Inverse Fourier transform of exp(F_t) tabulated on the given ascending
// grid (or the plan's reference grid when none is supplied). The result
// satisfies the TabulatedDensity contract; normalization failures surface as
// errc::numeric_error with the parameters echoed.
TabulatedDensity dy_pdf(const DyParams& params, double t,
                        const std::vector<double>& x_grid = {});

// A histogram paired with the lag it was built at.
struct LagHistogram {
    int tau = 1;
    Histogram hist;
};

// Fitting error E = sum over lags and retained bins of
// |log empirical density - log model density| at the uncentered bin
// centers (the model is shifted by mu*tau, which is how mu enters the fit).
// Model densities below 1e-300 contribute a penalized term instead of a log
// of zero. squared_terms switches to the squared-difference variant.
double log_deviation_error(const DyParams& params, const std::vector<LagHistogram>& histograms,
                           bool squared_terms = false);

struct FitOptions {
    bool fit_rho = false;           // rho pinned to rho_fixed unless set
    double rho_fixed = 0.0;
    bool squared_terms = false;
    int restarts = 8;               // deterministic start lattice size
    int max_iterations = 500;       // Nelder-Mead iterations per start
    double tolerance = 1e-8;        // simplex spread: tol * (1 + |E|)
    std::optional<DyParams> init;   // overrides the auto-init recipe
};

struct FitReport {
    DyParams params;
    double error = 0.0;
    bool converged = false;
    int iterations = 0;   // summed over starts
    int evaluations = 0;
    std::vector<int> lags;
    double feller_ratio = 0.0;
    bool feller_warning = false;
    std::vector<double> error_trace;  // best E after each accepted improvement
};

// Nelder-Mead minimization of E over (log gamma, log theta, log k, mu),
// plus atanh-bounded rho when fit_rho is set. Starts are the auto-init
// point (gamma = 0.1/day, theta and mu from the smallest-lag histogram
// moments, Feller ratio 2) followed by a fixed lattice
// gamma in {0.1, 1, 5, 25} x Feller in {0.8, 2.4}; the best start wins.
FitReport fit_dy(const std::vector<LagHistogram>& histograms, const FitOptions& options = {});

// {gamma, theta, k, mu, rho, lags, E, converged, feller_ratio}
std::string fit_report_json(const FitReport& report);

// CDF of the *raw* (uncentered) return r at lag tau implied by a centered
// density table: the model places r = x + mu*tau.
double dy_return_cdf(const TabulatedDensity& table, const DyParams& params, double r);

} // namespace dyx

#endif
