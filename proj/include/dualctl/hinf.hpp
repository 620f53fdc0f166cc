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
#ifndef DUALCTL_HINF_HPP
#define DUALCTL_HINF_HPP

#include <Eigen/Dense>

namespace dualctl {

/// Largest singular value of D + C (e^{j theta} I - A)^{-1} B.
double frequencyGain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                     const Eigen::MatrixXd& D, double theta);

struct PeakFrequency {
    double theta = 0.0;
    double gain = 0.0;
    Eigen::VectorXcd direction;  ///< unit input direction achieving the gain
};

/// Dense sweep over theta in [0, pi].
PeakFrequency peakGainFrequency(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                                const Eigen::MatrixXd& D, int points);

/**
 * @brief H-infinity norm of a stable discrete-time system by bisection.
 *
 * The system is mapped to continuous time with the Cayley transform, which keeps
 * the norm, and each bisection step tests the Hamiltonian for imaginary-axis
 * eigenvalues. The returned value is the upper end of the final bracket.
 * Throws "closed loop not Schur" for unstable A.
 */
double hinfNorm(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                const Eigen::MatrixXd& D, double rel_tol = 1e-9);

} // namespace dualctl

#endif // DUALCTL_HINF_HPP
