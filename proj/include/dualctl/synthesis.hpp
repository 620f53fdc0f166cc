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
#ifndef DUALCTL_SYNTHESIS_HPP
#define DUALCTL_SYNTHESIS_HPP

#include "dualctl/bounds.hpp"
#include "dualctl/estimation.hpp"
#include "dualctl/sdp.hpp"
#include "dualctl/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dualctl {

/// Strict inequalities F < 0 are imposed as F <= -kStrictMargin I.
constexpr double kStrictMargin = 1e-8;

/**
 * @brief [[gamma_e, a'], [a, gamma_e I]] >= 0, i.e. ||a|| <= gamma_e.
 *
 * @param amplitudes n x 1 expression (the diagonal of U_e)
 * @param gamma_e 1 x 1 expression
 */
sdp::Affine energy_bound_lmi(const sdp::Affine& amplitudes, const sdp::Affine& gamma_e);

/// Right-hand side G = (cbar n_phi / (T (1 - eps))) Dbar + (l^2 / eps) I of the excitation requirement.
sdp::Affine excitationTarget(const sdp::Affine& Dbar_T, double eps, double l, int T, double cbar);

/**
 * @brief Robust excitation LMI in the real embedding of a Hermitian matrix.
 *
 * With Psi = sum_i m_i Vhat_i Vhat_i^H and the true V = (I + E) Vhat, ||E|| <= gamma_v1,
 *   [[Psi - G - mu gamma_v1^2 I, Psi], [Psi, Psi + mu I]] >= 0,  mu >= 0,
 * is equivalent to (I + E) Psi (I + E)^H >= G for every such E.
 *
 * @param line_power 1 x 1 expressions m_i (linear in the decision variables)
 */
sdp::Affine robustExcitationLmi(const std::vector<sdp::Affine>& line_power, const MatrixXcd& Vhat,
                                const sdp::Affine& G, double gamma_v1, const sdp::Affine& mu);

/**
 * @brief Exploration constraint for tangent points lambda and amplitudes a.
 *
 * Line powers are m_i = 2 c_i lambda_i a_i - lambda_i^2. Throws if gamma_v1 >= 0.5.
 */
sdp::Affine exploration_lmi(double eps, const VectorXd& lambda, const sdp::Affine& amplitudes, const MatrixXcd& Vhat,
                            const FrequencyGrid& grid, double l, const sdp::Affine& Dbar_T, double gamma_v1, int T,
                            double cbar, const sdp::Affine& mu);

struct ExplorationResult {
    sdp::Status status = sdp::Status::NumericalFailure;
    ExplorationPlan plan;
    double mu = 0.0;
    int iterations = 0;
    std::string message;
};

/**
 * @brief Minimal-energy plan whose guaranteed excitation dominates the goal.
 *
 * Each round solves the exploration SDP for fixed tangent points, then moves the
 * tangent points to c_i a_i. The energy bound never increases between rounds.
 * An empty `lambda_init` starts from equal tangent points large enough that the
 * equal-amplitude plan already meets the goal.
 */
ExplorationResult solve_exploration_problem(const GaussianPrior& prior, const FrequencyGrid& grid,
                                            const BoundConstants& constants, double sigma_w, const MatrixXd& goal,
                                            const VectorXd& lambda_init = VectorXd(), int max_iters = 60);

struct GainScheduledController {
    MatrixXd Ks;  ///< 1 x n_x
    MatrixXd M;   ///< 1 x n_x
    MatrixXd N;   ///< n_x x n_x
    double lambda_s = 1.0;
    double lambda_u = 1.0;
    double gamma_p = 0.0;

    MatrixXd Kx() const;
};

/// Which uncertainty channels the design sees.
struct ChannelSet {
    bool scheduling = true;
    bool uncertainty = true;
};

struct GsVariables {
    sdp::Affine N, M, Ks;
};

GsVariables addGsVariables(sdp::Problem& p, int nx, bool scheduling);

/**
 * @brief Gain-scheduling LMI (must be negative definite).
 *
 * Columns (x, w_s, w_u, w) and rows (x+, z_s, z_u, z); the channels that are
 * switched off are dropped. Rs_inv and Ru_inv enter the lower-right corner as
 * -(1/lambda) R^{-1}.
 */
sdp::Affine gain_scheduling_lmi(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const PerformanceIndex& perf,
                                const MatrixXd& Rs_inv, const sdp::Affine& Ru_inv, double lambda_s, double lambda_u,
                                const GsVariables& v, const sdp::Affine& gamma, ChannelSet channels);

/// Same LMI at numeric values (for checks).
MatrixXd gainSchedulingMatrix(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const PerformanceIndex& perf,
                              const MatrixXd& Rs_inv, const MatrixXd& Ru_inv, const GainScheduledController& c,
                              ChannelSet channels);

struct GsDesign {
    bool feasible = false;
    GainScheduledController controller;
};

/// Minimal gamma_p for fixed multipliers.
GsDesign minimizeGainScheduling(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const PerformanceIndex& perf,
                                const MatrixXd& Rs_inv, const MatrixXd& Ru_inv, double lambda_s, double lambda_u,
                                ChannelSet channels);

/// Minimal gamma_p with the multipliers searched (grid scan then coordinate refinement).
GsDesign bestGainScheduling(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const PerformanceIndex& perf,
                            const MatrixXd& Rs_inv, const MatrixXd& Ru_inv, ChannelSet channels);

enum class BaselineMode { Nominal, Robust };

/// State-feedback H-infinity level, nominal or robust against the prior set with shape D0.
GsDesign h_infinity_baseline(const MatrixXd& A, const MatrixXd& B, const PerformanceIndex& perf, BaselineMode mode,
                             const MatrixXd& D0 = MatrixXd());

/// K = (1 - K_s (B~ - B0))^{-1} (K_x + K_s (A~ - A0)).
MatrixXd extract_controller(const GainScheduledController& ctrl, const MatrixXd& Ahat0, const MatrixXd& Bhat0,
                            const MatrixXd& Atilde, const MatrixXd& Btilde);

/// Closed-loop H-infinity norm of w -> z under u = K x.
double closedLoopHinf(const MatrixXd& A, const MatrixXd& B, const MatrixXd& K, const PerformanceIndex& perf);

struct Multipliers {
    double eps = 0.5;
    double lambda_s = 1.0;
    double lambda_u = 1.0;
};

struct DualSearchOptions {
    std::vector<double> eps_grid;     ///< default 0.02, 0.05, 0.1 .. 0.9
    std::vector<double> lambda_grid;  ///< default 9 points in [1e-2, 1e6]
    int golden_iterations = 12;
    int coordinate_sweeps = 2;
    std::vector<Multipliers> extra_starts;
    /// Robust design without exploration; computed on demand when absent.
    std::optional<GsDesign> robust;
    static DualSearchOptions defaults();
};

struct DualResult {
    sdp::Status status = sdp::Status::Infeasible;
    ExplorationPlan plan;
    GainScheduledController controller;
    Multipliers multipliers;
    bool no_exploration = false;
    int solves = 0;
    std::string message;
};

/// Joint exploration and gain-scheduling problem for fixed multipliers.
DualResult solveDualFixed(const GaussianPrior& prior, const FrequencyGrid& grid, const BoundConstants& constants,
                          double sigma_w, const PerformanceIndex& perf, double gamma_p, const Multipliers& m);

/**
 * @brief Minimal exploration energy that certifies performance level gamma_p.
 *
 * If the robust design without exploration already reaches gamma_p the plan is
 * empty. Otherwise the multipliers are searched: a (lambda_s, lambda_u) grid at
 * eps = 0.5, the extra starts, a lambda_u scan at the lambda_s of the scheduling
 * limit, then coordinate refinement over all three.
 */
DualResult solve_dual_problem(const GaussianPrior& prior, const FrequencyGrid& grid, const BoundConstants& constants,
                              double sigma_w, const PerformanceIndex& perf, double gamma_p,
                              const DualSearchOptions& options = DualSearchOptions::defaults());

/// Level below which no exploration can help: gain scheduling with the post-exploration channel removed.
GsDesign schedulingLimit(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const PerformanceIndex& perf,
                         const MatrixXd& D0);

} // namespace dualctl

#endif // DUALCTL_SYNTHESIS_HPP
