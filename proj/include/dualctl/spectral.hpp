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
#ifndef DUALCTL_SPECTRAL_HPP
#define DUALCTL_SPECTRAL_HPP

#include "dualctl/model.hpp"

#include <complex>
#include <vector>

namespace dualctl {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

/**
 * @brief Frequencies in cycles per sample, each a multiple of 1/T inside [0, 1/2].
 */
struct FrequencyGrid {
    int T = 0;
    std::vector<int> bins;  ///< omega_i = bins[i] / T

    FrequencyGrid() = default;
    FrequencyGrid(int T_, std::vector<int> bins_);
    /// Snaps to bins; throws if a value is not a multiple of 1/T.
    static FrequencyGrid fromOmegas(int T, const std::vector<double>& omegas);

    int size() const { return static_cast<int>(bins.size()); }
    double omega(int i) const { return static_cast<double>(bins[i]) / T; }
    std::vector<double> omegas() const;
    /// Exact line amplitude factor of 2 a cos(2 pi omega k): 2 at omega in {0, 1/2}, else 1.
    double coefficient(int i) const;
    VectorXd coefficients() const;
    void validate(int nphi) const;
};

struct ExplorationPlan {
    FrequencyGrid grid;
    VectorXd amplitudes;  ///< a_i, the diagonal of U_e
    double gamma_e = 0.0;
    MatrixXd Dbar_T;
    std::vector<double> gamma_e_history;  ///< one entry per L-iteration

    MatrixXd Ue() const { return amplitudes.asDiagonal(); }
    /// Line powers (c_i a_i)^2.
    VectorXd powers() const;
};

struct TransferData {
    MatrixXcd V;  ///< column i: [(z_i I - A)^{-1} B; 1]
    MatrixXcd Y;  ///< block i (n_phi x n_x): [(z_i I - A)^{-1}; 0]
    std::vector<cplx> z;

    int nphi() const { return static_cast<int>(V.rows()); }
    MatrixXcd Yblock(int i) const;
};

std::vector<double> generate_input(const ExplorationPlan& plan);

/// (1/T) sum_k s_k e^{-j 2 pi omega k}, T = signal length. Throws if omega is off the grid.
cplx spectral_line(const std::vector<double>& signal, double omega);
VectorXcd spectral_line(const std::vector<VectorXd>& signal, double omega);

TransferData transfer_matrices(const MatrixXd& A, const MatrixXd& B, const FrequencyGrid& grid);

/// Phi_bar = V diag(c_i a_i).
MatrixXcd information_matrix(const TransferData& transfer, const VectorXd& amplitudes, const FrequencyGrid& grid);

/// Real part of a Hermitian matrix; throws if the input is not Hermitian.
MatrixXd hermitianRealPart(const MatrixXcd& H, double tol = 1e-9);

/**
 * @brief Guaranteed lower bound on D_T given a noise-line bound ||W_tilde|| <= l.
 *
 * (T / (cbar n_phi)) [ (1 - eps) Re(Phi Phi^H) - ((1 - eps) / eps) l^2 I ],  cbar = sigma_w^2 c_delta.
 */
MatrixXd excitation_lower_bound(const MatrixXcd& Phi_bar, double l, double eps, int T, double c_delta,
                                double sigma_w);

/**
 * @brief Bound that is affine in the amplitudes for fixed tangent points lambda_i.
 *
 * Each line power p_i = (c_i a_i)^2 is replaced by 2 c_i a_i lambda_i - lambda_i^2 <= p_i,
 * tight at lambda_i = c_i a_i.
 */
MatrixXd convex_relaxed_bound(const VectorXd& lambda, const VectorXd& amplitudes, const MatrixXcd& V,
                              const FrequencyGrid& grid, double l, double eps, int T, double cbar);

/// Quadratic part sum_i m_i Re(V_i V_i^H) of the relaxed bound.
MatrixXd relaxedQuadraticPart(const VectorXd& lambda, const VectorXd& amplitudes, const MatrixXcd& V,
                              const FrequencyGrid& grid);

/// State at k = 0 of the periodic steady state under generate_input(plan), noise free.
VectorXd periodicInitialState(const MatrixXd& A, const MatrixXd& B, const ExplorationPlan& plan);

} // namespace dualctl

#endif // DUALCTL_SPECTRAL_HPP
