/*
 Copyright 2026 dualctl contributors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef DUALCTL_BOUNDS_HPP
#define DUALCTL_BOUNDS_HPP

#include "dualctl/estimation.hpp"
#include "dualctl/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dualctl {

/// Constants of the exploration LMI.
struct BoundConstants {
    double gamma_v = 0.0;
    double gamma_y = 0.0;
    double gamma_v1 = 0.0;
    double l1 = 0.0;
    double l = 0.0;
    double eps = 0.5;
    std::string method_gamma_v1 = "scenario";
    std::string method_gamma_y = "scenario";
    std::string method_l1 = "scenario";
    int samples = 0;
    long rejected = 0;
    long unstable = 0;
    double confidence = 0.0;  ///< joint confidence of the scenario constants
};

double noise_line_radius(double sigma_w, int T);

struct GammaBound {
    double gamma_bar = 0.0;  ///< bound on each block
    double gamma = 0.0;      ///< gamma_bar * sqrt(n_phi)
    double lambda = 0.0;     ///< multiplier at the optimum
    bool feasible = false;
};

/**
 * @brief Robust bound on max_i ||V_i - Vhat_i|| over the prior set.
 *
 * Bounded-real LMI for the stacked nominal and perturbed open loop driven by u,
 * output the state error. The multiplier is searched on a 25-point log grid in
 * [1e-4, 1e4] and refined once. Throws if no multiplier gives a bound below 1e6.
 */
GammaBound gamma_v_lmi(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const MatrixXd& D0, int nphi);

/// Same for the channel w -> x of x+ = A x + w, bounding ||(z I - A)^{-1}||.
GammaBound gamma_y_lmi(const MatrixXd& Ahat0, const MatrixXd& D0, int nphi);

/// 2 C_w L_w (2 sqrt(n_phi) + sqrt(log(2 / delta))).
double l1_analytic(int nphi, double sigma_wbar, double delta, double C_w, double L_w);

/// ceil((2 / delta) (ln(1 / beta) + d)).
long scenario_sample_count(double delta, double beta, int d);

/// The ceil((1 - delta) N)-th smallest value.
double scenarioQuantile(std::vector<double> values, double delta);

/**
 * @brief One draw of ||W||, W the block matrix of white-noise DFT lines on the grid.
 *
 * Column i holds the line at omega_i: real with variance sigma_wbar^2 per entry at
 * omega in {0, 1/2}, complex with variance sigma_wbar^2 / 2 per part otherwise.
 * The blocks are disjoint, so ||W|| is the largest column norm.
 */
double noiseLineNormSample(int nx, const FrequencyGrid& grid, double sigma_wbar, std::mt19937_64& rng);

double l1_scenario(int nx, const FrequencyGrid& grid, double sigma_wbar, double delta, double beta,
                   std::uint64_t seed);

/// ||(V - Vhat) Vhat^{-1}||, which equals ||(V - Vhat) (Vhat^H Vhat)^{-1/2}||.
double relativeTransferError(const MatrixXcd& Vhat, const MatrixXcd& V);
/// Same quantity written with X = (Vhat^H Vhat)^{-1/2}.
double relativeTransferErrorX(const MatrixXcd& Vhat, const MatrixXcd& V);

struct ScenarioSet {
    double gamma_v1 = 0.0;
    double gamma_y = 0.0;
    double gamma_v_blocks = 0.0;  ///< max_i ||V_i - Vhat_i|| over samples
    int samples = 0;
    long rejected = 0;
    long unstable = 0;
};

/// Scenario estimates of gamma_v1 and gamma_y from N_s prior draws restricted to the prior set.
ScenarioSet gamma_v1_scenario(const GaussianPrior& prior, const FrequencyGrid& grid, double delta, double beta,
                              std::uint64_t seed);

/// All exploration constants by the scenario route; l = gamma_y * l1.
BoundConstants computeConstants(const GaussianPrior& prior, const FrequencyGrid& grid, double sigma_w, double beta,
                                double eps, std::uint64_t seed);

/// Fraction of fresh prior draws (restricted to the prior set) with ||(V - Vhat) Vhat^{-1}|| > gamma_v1.
double holdoutGammaV1(const GaussianPrior& prior, const FrequencyGrid& grid, double gamma_v1, int n,
                      std::uint64_t seed);
/// Fraction of fresh noise-line draws with ||W|| > l1.
double holdoutL1(int nx, const FrequencyGrid& grid, double sigma_wbar, double l1, int n, std::uint64_t seed);

} // namespace dualctl

#endif // DUALCTL_BOUNDS_HPP
