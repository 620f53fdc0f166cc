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
#ifndef DUALCTL_MODEL_HPP
#define DUALCTL_MODEL_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace dualctl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/**
 * @brief Independent random stream for (master seed, stream id, counter).
 *
 * Every trial derives its own generator from the master seed, so trials can be
 * re-run one at a time and in any order.
 */
std::mt19937_64 makeStream(std::uint64_t master, std::uint64_t stream, std::uint64_t counter = 0);

/// Stream ids used across the toolkit.
namespace streams {
constexpr std::uint64_t kNoise = 1;
constexpr std::uint64_t kPriorCenter = 2;
constexpr std::uint64_t kScenarioV = 3;
constexpr std::uint64_t kScenarioW = 4;
constexpr std::uint64_t kRandomInput = 5;
constexpr std::uint64_t kValidation = 6;
constexpr std::uint64_t kHoldout = 7;
constexpr std::uint64_t kTruth = 8;
} // namespace streams

/**
 * @brief x_{k+1} = A x_k + B u_k + w_k with scalar input and w_k ~ N(0, sigma_w^2 I).
 */
struct SystemModel {
    MatrixXd A;
    MatrixXd B;
    double sigma_w = 1.0;

    SystemModel() = default;
    SystemModel(MatrixXd A_, MatrixXd B_, double sigma);

    int nx() const { return static_cast<int>(A.rows()); }
    int nphi() const { return nx() + 1; }
    /// Throws if dimensions or the noise level are invalid.
    void validate() const;
};

/**
 * @brief Performance channel z = C x + D_u u + D_w w with multiplier (Q_p, S_p, R_p).
 */
struct PerformanceIndex {
    MatrixXd C;
    MatrixXd Du;
    MatrixXd Dw;
    MatrixXd Qp;
    MatrixXd Sp;
    MatrixXd Rp;

    int nz() const { return static_cast<int>(C.rows()); }
    void validate(int nx) const;

    /// l2-gain specialization: S_p = 0, R_p = I / gamma, Q_p = -gamma I.
    static PerformanceIndex l2Gain(const MatrixXd& C, const MatrixXd& Du, const MatrixXd& Dw, double gamma);
    /// State and input penalty: C = [I; 0], D_u = [0; 1], D_w = 0.
    static PerformanceIndex stateInput(int nx, double gamma = 1.0);
};

struct Trajectory {
    std::vector<VectorXd> x;  ///< x_0 .. x_T
    std::vector<double> u;    ///< u_0 .. u_{T-1}
    std::vector<VectorXd> w;  ///< w_0 .. w_{T-1}

    int horizon() const { return static_cast<int>(u.size()); }
    VectorXd regressor(int k) const;
    /// Sum over k of phi_k phi_k'.
    MatrixXd gram() const;
};

/// Open-loop simulation with fresh Gaussian noise from `rng`.
Trajectory simulate(const SystemModel& model, const std::vector<double>& inputs, const VectorXd& x0,
                    std::mt19937_64& rng);
/// Same, seeded directly.
Trajectory simulate(const SystemModel& model, const std::vector<double>& inputs, const VectorXd& x0,
                    std::uint64_t seed);
/// Same, with a given noise sequence.
Trajectory simulateWithNoise(const SystemModel& model, const std::vector<double>& inputs, const VectorXd& x0,
                             const std::vector<VectorXd>& noise);

/// Closed loop u_k = K x_k driven by the given disturbance.
Trajectory simulateFeedback(const SystemModel& model, const MatrixXd& K, const VectorXd& x0,
                            const std::vector<VectorXd>& noise);

VectorXd performance_output(const PerformanceIndex& perf, const VectorXd& x, double u, const VectorXd& w);

double spectralRadius(const MatrixXd& A);
bool isSchur(const MatrixXd& A);

/**
 * @brief Largest observed ||z|| / ||w|| over sampled disturbance sequences, closed loop u = K x.
 *
 * Random Gaussian, impulse and worst-frequency sinusoidal sequences are tried. The
 * result is a lower bound on the true l2-gain.
 */
double empirical_l2_gain(const SystemModel& model, const MatrixXd& K, const PerformanceIndex& perf, int horizon,
                         std::uint64_t seed, int samples = 20);

/// Gain of one disturbance sequence from x0 = 0.
double sequenceGain(const SystemModel& model, const MatrixXd& K, const PerformanceIndex& perf,
                    const std::vector<VectorXd>& w);

} // namespace dualctl

#endif // DUALCTL_MODEL_HPP
