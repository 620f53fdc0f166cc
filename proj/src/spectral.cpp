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
#include "dualctl/spectral.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace dualctl {

namespace {

cplx unitPoint(double omega) { return std::exp(cplx(0.0, 2.0 * M_PI * omega)); }

int snapToBin(double omega, int T) {
    const double b = omega * T;
    const double r = std::round(b);
    if (std::abs(b - r) > 1e-9 * std::max(1.0, std::abs(b))) throw std::invalid_argument("frequency not on the DFT grid");
    return static_cast<int>(r);
}

} // namespace

FrequencyGrid::FrequencyGrid(int T_, std::vector<int> bins_) : T(T_), bins(std::move(bins_)) {
    if (T < 1) throw std::invalid_argument("FrequencyGrid: T must be positive");
    std::set<int> seen;
    for (int b : bins) {
        if (b < 0 || 2 * b > T) throw std::invalid_argument("FrequencyGrid: frequencies must lie in [0, 1/2]");
        if (!seen.insert(b).second) throw std::invalid_argument("FrequencyGrid: frequencies must be distinct");
    }
}

FrequencyGrid FrequencyGrid::fromOmegas(int T, const std::vector<double>& omegas) {
    std::vector<int> b;
    for (double w : omegas) b.push_back(snapToBin(w, T));
    return FrequencyGrid(T, b);
}

std::vector<double> FrequencyGrid::omegas() const {
    std::vector<double> w;
    for (int i = 0; i < size(); ++i) w.push_back(omega(i));
    return w;
}

double FrequencyGrid::coefficient(int i) const { return (bins[i] == 0 || 2 * bins[i] == T) ? 2.0 : 1.0; }

VectorXd FrequencyGrid::coefficients() const {
    VectorXd c(size());
    for (int i = 0; i < size(); ++i) c(i) = coefficient(i);
    return c;
}

void FrequencyGrid::validate(int nphi) const {
    if (size() != nphi) throw std::invalid_argument("FrequencyGrid: need exactly n_phi frequencies");
    if (T < nphi) throw std::invalid_argument("FrequencyGrid: need T >= n_phi");
}

VectorXd ExplorationPlan::powers() const {
    return (grid.coefficients().cwiseProduct(amplitudes)).cwiseAbs2();
}

MatrixXcd TransferData::Yblock(int i) const {
    const int nx = nphi() - 1;
    return Y.middleCols(i * nx, nx);
}

std::vector<double> generate_input(const ExplorationPlan& plan) {
    const int T = plan.grid.T;
    std::vector<double> u(T, 0.0);
    for (int i = 0; i < plan.grid.size(); ++i) {
        const double a = plan.amplitudes(i);
        if (a == 0.0) continue;
        for (int k = 0; k < T; ++k) {
            // Reduce the phase modulo T to keep the argument small and exact.
            const long m = (static_cast<long>(plan.grid.bins[i]) * k) % T;
            u[k] += 2.0 * a * std::cos(2.0 * M_PI * static_cast<double>(m) / T);
        }
    }
    return u;
}

cplx spectral_line(const std::vector<double>& signal, double omega) {
    const int T = static_cast<int>(signal.size());
    if (T < 1) throw std::invalid_argument("spectral_line: empty signal");
    const int bin = snapToBin(omega, T);
    cplx acc = 0.0;
    for (int k = 0; k < T; ++k) {
        const long m = (static_cast<long>(bin) * k) % T;
        acc += signal[k] * std::exp(cplx(0.0, -2.0 * M_PI * static_cast<double>(m) / T));
    }
    return acc / static_cast<double>(T);
}

VectorXcd spectral_line(const std::vector<VectorXd>& signal, double omega) {
    const int T = static_cast<int>(signal.size());
    if (T < 1) throw std::invalid_argument("spectral_line: empty signal");
    const int bin = snapToBin(omega, T);
    VectorXcd acc = VectorXcd::Zero(signal[0].size());
    for (int k = 0; k < T; ++k) {
        const long m = (static_cast<long>(bin) * k) % T;
        acc += signal[k].cast<cplx>() * std::exp(cplx(0.0, -2.0 * M_PI * static_cast<double>(m) / T));
    }
    return acc / static_cast<double>(T);
}

TransferData transfer_matrices(const MatrixXd& A, const MatrixXd& B, const FrequencyGrid& grid) {
    const int nx = static_cast<int>(A.rows());
    const int nl = grid.size();
    TransferData td;
    td.V = MatrixXcd::Zero(nx + 1, nl);
    td.Y = MatrixXcd::Zero(nx + 1, nx * nl);
    for (int i = 0; i < nl; ++i) {
        const cplx z = unitPoint(grid.omega(i));
        td.z.push_back(z);
        MatrixXcd R = z * MatrixXcd::Identity(nx, nx) - A.cast<cplx>();
        Eigen::FullPivLU<MatrixXcd> lu(R);
        if (lu.rcond() < 1e-12) throw std::runtime_error("eigenvalue on evaluation circle");
        MatrixXcd Rinv = lu.inverse();
        td.V.col(i).head(nx) = Rinv * B.cast<cplx>();
        td.V(nx, i) = 1.0;
        td.Y.block(0, i * nx, nx, nx) = Rinv;
    }
    return td;
}

MatrixXcd information_matrix(const TransferData& transfer, const VectorXd& amplitudes, const FrequencyGrid& grid) {
    if (amplitudes.size() != transfer.V.cols() || grid.size() != amplitudes.size())
        throw std::invalid_argument("information_matrix: dimension mismatch");
    VectorXd ca = grid.coefficients().cwiseProduct(amplitudes);
    return transfer.V * ca.cast<cplx>().asDiagonal();
}

MatrixXd hermitianRealPart(const MatrixXcd& H, double tol) {
    const double asym = (H - H.adjoint()).norm();
    if (asym > tol * std::max(1.0, H.norm())) throw std::runtime_error("matrix is not Hermitian");
    MatrixXd R = H.real();
    return 0.5 * (R + R.transpose());
}

MatrixXd excitation_lower_bound(const MatrixXcd& Phi_bar, double l, double eps, int T, double c_delta,
                                double sigma_w) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("excitation_lower_bound: eps must lie in (0, 1)");
    const int n = static_cast<int>(Phi_bar.rows());
    const double cbar = sigma_w * sigma_w * c_delta;
    const MatrixXd P = hermitianRealPart(Phi_bar * Phi_bar.adjoint());
    return (T / (cbar * n)) * ((1.0 - eps) * P - ((1.0 - eps) / eps) * l * l * MatrixXd::Identity(n, n));
}

MatrixXd relaxedQuadraticPart(const VectorXd& lambda, const VectorXd& amplitudes, const MatrixXcd& V,
                              const FrequencyGrid& grid) {
    const int n = static_cast<int>(V.rows());
    MatrixXd Q = MatrixXd::Zero(n, n);
    for (int i = 0; i < grid.size(); ++i) {
        const double m = 2.0 * grid.coefficient(i) * amplitudes(i) * lambda(i) - lambda(i) * lambda(i);
        Q += m * hermitianRealPart(V.col(i) * V.col(i).adjoint());
    }
    return Q;
}

MatrixXd convex_relaxed_bound(const VectorXd& lambda, const VectorXd& amplitudes, const MatrixXcd& V,
                              const FrequencyGrid& grid, double l, double eps, int T, double cbar) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("convex_relaxed_bound: eps must lie in (0, 1)");
    if (lambda.size() != amplitudes.size() || V.cols() != amplitudes.size())
        throw std::invalid_argument("convex_relaxed_bound: dimension mismatch");
    const int n = static_cast<int>(V.rows());
    const MatrixXd Q = relaxedQuadraticPart(lambda, amplitudes, V, grid);
    return (T * (1.0 - eps) / (cbar * n)) * Q - (T / (cbar * n)) * ((1.0 - eps) / eps) * l * l * MatrixXd::Identity(n, n);
}

VectorXd periodicInitialState(const MatrixXd& A, const MatrixXd& B, const ExplorationPlan& plan) {
    const TransferData td = transfer_matrices(A, B, plan.grid);
    const int nx = static_cast<int>(A.rows());
    VectorXd x0 = VectorXd::Zero(nx);
    for (int i = 0; i < plan.grid.size(); ++i) x0 += 2.0 * plan.amplitudes(i) * td.V.col(i).head(nx).real();
    return x0;
}

} // namespace dualctl
