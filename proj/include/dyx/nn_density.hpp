// Copyright 2026 the dyx authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DYX_NN_DENSITY_HPP
#define DYX_NN_DENSITY_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dyx/density.hpp"
#include "dyx/market_data.hpp"

namespace dyx {

// 1-5-1 feed-forward network: tansig hidden layer, linear output,
//   f(x) = b2 + sum_i w2[i] * tanh(w1[i] * x + b1[i])
// (tansig(n) = 2/(1+e^{-2n}) - 1 is exactly tanh). 16 parameters total.
// Trained against the log of a histogram's densities; standardization of the
// inputs is folded back into w1/b1 after training, so evaluation is plain.
struct MlpParams {
    std::array<double, 5> w1{};
    std::array<double, 5> b1{};
    std::array<double, 5> w2{};
    double b2 = 0.0;
    double norm = 1.0;  // trapezoid mass of exp(f) over the training span
};

double mlp_eval(const MlpParams& params, double x);

struct MlpTrainOptions {
    int restarts = 5;
    int max_iterations = 400;  // accepted Levenberg-Marquardt steps per restart
    std::uint64_t seed = 0;
};

// Levenberg-Marquardt fit of f to (bin center, log density) with analytic
// Jacobian; damping doubles on rejected steps and shrinks by 3 on accepted
// ones, so the loss is non-increasing across accepted steps. Initialization
// is seeded and deterministic; the best of `restarts` runs wins. Needs at
// least 20 retained bins. Diverged restarts are discarded; only all of them
// failing is an error.
MlpParams train_mlp(const Histogram& hist, const MlpTrainOptions& options = {});

// exp(f) renormalized to unit trapezoid mass over the grid.
TabulatedDensity mlp_density(const MlpParams& params, const std::vector<double>& x_grid, int tau = 0);

// Flat arrays {w1, b1, w2, b2, norm}.
std::string mlp_params_json(const MlpParams& params);
MlpParams mlp_params_from_json(const std::string& text);

} // namespace dyx

#endif
