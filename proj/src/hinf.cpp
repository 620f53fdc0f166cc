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
#include "dualctl/hinf.hpp"
#include "dualctl/model.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace dualctl {

using Eigen::MatrixXcd;
using cd = std::complex<double>;

namespace {

MatrixXcd response(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C, const MatrixXd& D, double theta) {
    const int n = static_cast<int>(A.rows());
    MatrixXcd zI = std::exp(cd(0.0, theta)) * MatrixXcd::Identity(n, n);
    MatrixXcd R = (zI - A.cast<cd>()).partialPivLu().solve(B.cast<cd>());
    return C.cast<cd>() * R + D.cast<cd>();
}

// True when gamma is (approximately) below the norm: the Hamiltonian has an
// eigenvalue on the imaginary axis, or gamma does not exceed sigma_max(D).
bool gammaBelowNorm(const MatrixXd& Ac, const MatrixXd& Bc, const MatrixXd& Cc, const MatrixXd& Dc, double gamma) {
    const int n = static_cast<int>(Ac.rows());
    const int m = static_cast<int>(Bc.cols());
    const int p = static_cast<int>(Cc.rows());
    const double g2 = gamma * gamma;
    MatrixXd R = g2 * MatrixXd::Identity(m, m) - Dc.transpose() * Dc;
    MatrixXd S = g2 * MatrixXd::Identity(p, p) - Dc * Dc.transpose();
    Eigen::LLT<MatrixXd> lr(R), ls(S);
    if (lr.info() != Eigen::Success || ls.info() != Eigen::Success) return true;
    MatrixXd F = Ac + Bc * lr.solve(Dc.transpose() * Cc);
    MatrixXd H(2 * n, 2 * n);
    H.topLeftCorner(n, n) = F;
    H.topRightCorner(n, n) = gamma * Bc * lr.solve(Bc.transpose());
    H.bottomLeftCorner(n, n) = -gamma * Cc.transpose() * ls.solve(Cc);
    H.bottomRightCorner(n, n) = -F.transpose();
    Eigen::EigenSolver<MatrixXd> es(H, false);
    const double scale = std::max(1.0, H.norm());
    for (int i = 0; i < 2 * n; ++i)
        if (std::abs(es.eigenvalues()(i).real()) < 1e-9 * scale) return true;
    return false;
}

} // namespace

double frequencyGain(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C, const MatrixXd& D, double theta) {
    Eigen::JacobiSVD<MatrixXcd> svd(response(A, B, C, D, theta));
    return svd.singularValues()(0);
}

PeakFrequency peakGainFrequency(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C, const MatrixXd& D,
                                int points) {
    PeakFrequency best;
    for (int i = 0; i <= points; ++i) {
        const double th = M_PI * i / points;
        Eigen::JacobiSVD<MatrixXcd> svd(response(A, B, C, D, th), Eigen::ComputeFullV);
        if (i == 0 || svd.singularValues()(0) > best.gain) {
            best.gain = svd.singularValues()(0);
            best.theta = th;
            best.direction = svd.matrixV().col(0);
        }
    }
    return best;
}

double hinfNorm(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C, const MatrixXd& D, double rel_tol) {
    const int n = static_cast<int>(A.rows());
    if (!isSchur(A)) throw std::runtime_error("closed loop not Schur");
    double lo = peakGainFrequency(A, B, C, D, 256).gain;
    if (n == 0) return lo;

    // Cayley transform z = (1 + s) / (1 - s).
    const MatrixXd I = MatrixXd::Identity(n, n);
    Eigen::PartialPivLU<MatrixXd> lu(A + I);
    const MatrixXd Ac = lu.solve(A - I);
    const MatrixXd Bc = std::sqrt(2.0) * lu.solve(B);
    const MatrixXd CinvT = lu.transpose().solve(C.transpose());  // (A + I)^{-T} C'
    const MatrixXd Cc = std::sqrt(2.0) * CinvT.transpose();
    const MatrixXd Dc = D - C * lu.solve(B);

    if (lo <= 0.0) {
        if (!gammaBelowNorm(Ac, Bc, Cc, Dc, 1e-300)) return 0.0;
        lo = 1e-300;
    }
    double hi = lo * (1.0 + 1e-3);
    while (gammaBelowNorm(Ac, Bc, Cc, Dc, hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("hinfNorm: no finite bound");
    }
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (gammaBelowNorm(Ac, Bc, Cc, Dc, mid)) lo = mid;
        else hi = mid;
    }
    return hi;
}

} // namespace dualctl
