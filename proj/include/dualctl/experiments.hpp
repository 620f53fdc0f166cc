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
#ifndef DUALCTL_EXPERIMENTS_HPP
#define DUALCTL_EXPERIMENTS_HPP

#include "dualctl/bounds.hpp"
#include "dualctl/estimation.hpp"
#include "dualctl/model.hpp"
#include "dualctl/spectral.hpp"
#include "dualctl/synthesis.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dualctl {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ExperimentConfig {
    MatrixXd A;  ///< true system
    MatrixXd B;
    double sigma_w = 1.0;
    MatrixXd D0;                            ///< prior shape; default 1e3 I
    std::optional<MatrixXd> prior_center;   ///< drawn around the truth when absent
    int T = 100;
    std::vector<double> frequencies;        ///< default i / (2 n_phi)
    double delta = 0.01;
    double beta = 1e-10;
    double eps = 0.5;
    MatrixXd goal;                          ///< default diag(1e7, 0, ..., 0)
    double gamma_p = kNaN;                  ///< dual mode when finite
    std::vector<double> gamma_p_list;       ///< empty: chosen from the baselines
    std::vector<double> alphas{0.1, 1.0, 10.0, 100.0, 1000.0};
    int trials = 10;
    int guarantee_runs = 100;
    int validation_samples = 100;
    int holdout = 10000;
    std::uint64_t seed = 0;
    int threads = 1;
    PerformanceIndex perf;                  ///< default: state and input, unit weights

    int nx() const { return static_cast<int>(A.rows()); }
    int nphi() const { return nx() + 1; }
    SystemModel truth() const { return SystemModel(A, B, sigma_w); }
    FrequencyGrid grid() const { return FrequencyGrid::fromOmegas(T, frequencies); }
    /// Fills unset defaults and checks sizes; throws std::invalid_argument.
    void resolve();
};

/// Independent 64-bit seed for a (tag, counter) pair of the master seed.
std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t tag, std::uint64_t counter);

struct TrialResult {
    std::string status = "ok";  ///< ok | infeasible | error
    std::string stage;          ///< failing stage when status != ok
    std::string message;
    GaussianPrior prior;
    BoundConstants constants;
    ExplorationPlan plan;
    bool dual = false;
    bool no_exploration = false;
    double gamma_e = 0.0;
    double gamma_p = kNaN;
    double energy = 0.0;       ///< sum of u_k^2 over the exploration phase
    MatrixXd D_T;
    double DT11 = 0.0;
    bool goal_met = false;     ///< D_T >= Dbar_T
    MatrixXd theta_hat;
    MatrixXd theta_tilde;
    GainScheduledController controller;
    MatrixXd K;
    double hinf_truth = kNaN;  ///< closed-loop gain on the true system
};

/// Prior for a trial: center drawn uniformly from the ellipsoid around the truth unless fixed.
GaussianPrior trialPrior(const ExperimentConfig& cfg, const MatrixXd& D0, std::uint64_t counter);

/// Exploration-phase simulation of the truth from x0 = 0.
Trajectory explorationRun(const ExperimentConfig& cfg, const std::vector<double>& inputs, std::uint64_t counter);

/// Whether D_T - goal is PSD up to a relative tolerance.
bool dominates(const MatrixXd& D_T, const MatrixXd& goal, double rel_tol = 1e-9);

/**
 * @brief Full pipeline for one trial.
 *
 * Prior, exploration constants, plan (exploration goal, or the dual problem when
 * cfg.gamma_p is finite), exploration run, MAP update, projection onto the prior
 * set, controller extraction and its gain on the true system. A failing stage is
 * recorded and later stages are skipped.
 */
TrialResult run_algorithm1(const ExperimentConfig& cfg, std::uint64_t trial = 0);

/// Gaussian input rescaled to the given energy, applied to the truth.
TrialResult random_exploration_baseline(const ExperimentConfig& cfg, const GaussianPrior& prior, double energy_budget,
                                        std::uint64_t trial = 0);

/// Gaussian input of length T with sum of squares equal to `energy` (zero when energy is 0).
std::vector<double> scaledRandomInput(int T, double energy, std::mt19937_64& rng);

struct Fig3Row {
    double alpha = 0.0;
    int trial = 0;
    std::string method;  ///< targeted | random
    double DT11 = 0.0;
    double energy = 0.0;
    double goal_ratio = 0.0;  ///< DT11 / goal_11
    bool goal_met = false;
    std::string status;
};

struct Fig3Summary {
    double alpha = 0.0;
    bool feasible = true;
    int trials = 0;
    int goal_met = 0;
    double targeted_mean = 0.0, targeted_std = 0.0;
    double random_mean = 0.0, random_std = 0.0;
    double ratio = 0.0;  ///< targeted_mean / random_mean
};

struct Fig3Table {
    std::vector<Fig3Row> rows;
    std::vector<Fig3Summary> summary;
};

/// Targeted versus energy-matched random exploration for each alpha (prior shape alpha D0).
Fig3Table fig3_harness(const ExperimentConfig& cfg);

struct Fig4Row {
    double gamma_p = 0.0;
    double gamma_e = 0.0;
    std::string status;
    Multipliers multipliers;
    bool no_exploration = false;
};

struct Fig4Table {
    double nominal = kNaN;  ///< H-infinity level on the true system
    double robust = kNaN;   ///< robust level on the prior set
    double limit = kNaN;    ///< scheduling limit
    std::vector<Fig4Row> rows;
};

/// Default sweep: probes below the limit, points in (limit, robust], and the robust level.
std::vector<double> defaultGammaSweep(double nominal, double limit, double robust);

/**
 * @brief Energy needed for each performance level.
 *
 * Levels are solved in increasing order and every multiplier triple that won a
 * level is tried again at the later ones, which keeps the sweep monotone.
 */
Fig4Table fig4_harness(const ExperimentConfig& cfg);

struct ValidationReport {
    std::vector<MatrixXd> plants;  ///< [A B] of each sample
    std::vector<double> gains;
    double max_gain = 0.0;
    int violations = 0;
    int unstable = 0;
    double gamma_p = 0.0;
    double slack = 1e-4;
};

/**
 * @brief Closed-loop gains over plants drawn from the prior set and the post-exploration set.
 *
 * Plants are drawn uniformly from the ellipsoid centred at theta_tilde with shape
 * D0 + Dbar and kept if they lie in the prior set. The scheduled gain is the one for
 * theta_tilde. Setting `outside` draws from a 4x larger set instead (negative control).
 */
ValidationReport validate_closed_loop(const GainScheduledController& ctrl, const GaussianPrior& prior,
                                      const MatrixXd& theta_tilde, const MatrixXd& Dbar, const PerformanceIndex& perf,
                                      int samples, std::uint64_t seed, bool outside = false);

/// Number of runs (fresh noise each) in which a fixed plan reaches D_T >= goal.
int guaranteeHits(const ExperimentConfig& cfg, const GaussianPrior& prior, const ExplorationPlan& plan,
                  const MatrixXd& goal, int runs, std::uint64_t seed);

/**
 * @brief Frequency with which the true parameter lies in the posterior credibility set.
 *
 * The true [A B] is drawn from the prior each trial, driven by a random input of
 * unit power and updated by the MAP estimate.
 */
double credibilityCoverage(const ExperimentConfig& cfg, int trials, std::uint64_t seed);

/// Runs f(0..n-1) on up to `threads` threads; results must be written by index.
void parallelFor(int n, int threads, const std::function<void(int)>& f);

} // namespace dualctl

#endif // DUALCTL_EXPERIMENTS_HPP
