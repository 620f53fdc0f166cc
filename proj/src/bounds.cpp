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
#include "dualctl/bounds.hpp"
#include "dualctl/sdp.hpp"
#include "dualctl/search.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace dualctl {

using sdp::Affine;

double noise_line_radius(double sigma_w, int T) {
    if (T < 1) throw std::invalid_argument("noise_line_radius: T must be positive");
    return sigma_w / std::sqrt(static_cast<double>(T));
}

namespace {

double opNorm(const MatrixXcd& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<MatrixXcd> svd(M);
    return svd.singularValues()(0);
}

constexpr double kStrict = 1e-8;

// The relative re-check in the solver is loose when one block dominates the
// scale, so the bound is kept only if gamma > 0 and F is negative definite.
double acceptedGamma(const sdp::Result& r, const Affine& F, const Affine& g) {
    const double inf = std::numeric_limits<double>::infinity();
    if (r.status != sdp::Status::Optimal) return inf;
    const double gamma = g.value(r.y)(0, 0);
    const MatrixXd Fv = F.value(r.y);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (Fv + Fv.transpose()), Eigen::EigenvaluesOnly);
    if (!(gamma > 0.0) || es.eigenvalues().maxCoeff() >= 0.0) return inf;
    return gamma;
}

// Minimal gamma_bar for a fixed multiplier; +inf when infeasible.
double gammaVAt(const MatrixXd& A0, const MatrixXd& B0, const MatrixXd& D0, double lam) {
    const int n = static_cast<int>(A0.rows());
    sdp::Problem p;
    Affine P = p.symmetric("P", 2 * n);
    Affine g = p.scalar("gamma");

    MatrixXd Aa = MatrixXd::Zero(2 * n, 2 * n);
    Aa.topLeftCorner(n, n) = A0;
    Aa.bottomRightCorner(n, n) = A0;
    MatrixXd Bu = MatrixXd::Zero(2 * n, n);
    Bu.bottomRows(n).setIdentity();
    MatrixXd Bin(2 * n, 1);
    Bin << B0, B0;
    MatrixXd Ce(n, 2 * n);
    Ce << -MatrixXd::Identity(n, n), MatrixXd::Identity(n, n);
    MatrixXd Cz = MatrixXd::Zero(n + 1, 2 * n);
    Cz.topRightCorner(n, n).setIdentity();
    MatrixXd Dz = MatrixXd::Zero(n + 1, 1);
    Dz(n, 0) = 1.0;

    Affine F = sdp::symmetricBlocks({
        {-P},
        {Affine(n, 2 * n), Affine(-lam * MatrixXd::Identity(n, n))},
        {Affine(1, 2 * n), Affine(1, n), -g},
        {P * Aa, P * Bu, P * Bin, -P},
        {Affine(Ce), Affine(n, n), Affine(n, 1), Affine(n, 2 * n), sdp::kron(-g, MatrixXd::Identity(n, n))},
        {Affine(Cz), Affine(n + 1, n), Affine(Dz), Affine(n + 1, 2 * n), Affine(n + 1, n), Affine(-(1.0 / lam) * D0)},
    });
    p.addNegativeLmi(sdp::jacobiScaled(F), kStrict, "gamma_v");
    p.addLmi(Affine(MatrixXd::Constant(1, 1, 1e6)) - g, 0.0, "cap");
    p.minimize(g);
    sdp::Result r = p.solve();
    return acceptedGamma(r, F, g);
}

double gammaYAt(const MatrixXd& A0, const MatrixXd& D0, double lam) {
    const int n = static_cast<int>(A0.rows());
    const MatrixXd I = MatrixXd::Identity(n, n);
    sdp::Problem p;
    Affine P = p.symmetric("P", n);
    Affine g = p.scalar("gamma");
    MatrixXd Cz = MatrixXd::Zero(n + 1, n);
    Cz.topRows(n).setIdentity();
    Affine F = sdp::symmetricBlocks({
        {-P},
        {Affine(n, n), Affine(-lam * I)},
        {Affine(n, n), Affine(n, n), sdp::kron(-g, I)},
        {P * A0, P, P, -P},
        {Affine(I), Affine(n, n), Affine(n, n), Affine(n, n), sdp::kron(-g, I)},
        {Affine(Cz), Affine(n + 1, n), Affine(n + 1, n), Affine(n + 1, n), Affine(n + 1, n), Affine(-(1.0 / lam) * D0)},
    });
    p.addNegativeLmi(sdp::jacobiScaled(F), kStrict, "gamma_y");
    p.addLmi(Affine(MatrixXd::Constant(1, 1, 1e6)) - g, 0.0, "cap");
    p.minimize(g);
    sdp::Result r = p.solve();
    return acceptedGamma(r, F, g);
}

GammaBound searchMultiplier(const std::function<double(double)>& f, int nphi, const char* what) {
    ScalarMin m = scanAndRefine(f, logspace(1e-4, 1e4, 25), 20);
    GammaBound b;
    if (!std::isfinite(m.f) || m.f >= 1e6)
        throw std::runtime_error(std::string(what) + ": prior uncertainty too large / possibly unstable members");
    b.gamma_bar = m.f;
    b.gamma = m.f * std::sqrt(static_cast<double>(nphi));
    b.lambda = m.x;
    b.feasible = true;
    return b;
}

} // namespace

GammaBound gamma_v_lmi(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const MatrixXd& D0, int nphi) {
    return searchMultiplier([&](double lam) { return gammaVAt(Ahat0, Bhat0, D0, lam); }, nphi, "gamma_v_lmi");
}

GammaBound gamma_y_lmi(const MatrixXd& Ahat0, const MatrixXd& D0, int nphi) {
    return searchMultiplier([&](double lam) { return gammaYAt(Ahat0, D0, lam); }, nphi, "gamma_y_lmi");
}

double l1_analytic(int nphi, double sigma_wbar, double delta, double C_w, double L_w) {
    (void)sigma_wbar;  // enters through the calibrated constants
    const double t = std::sqrt(std::log(2.0 / delta));
    return 2.0 * C_w * L_w * (2.0 * std::sqrt(static_cast<double>(nphi)) + t);
}

long scenario_sample_count(double delta, double beta, int d) {
    if (!(delta > 0.0 && delta < 1.0) || !(beta > 0.0 && beta < 1.0) || d < 1)
        throw std::invalid_argument("scenario_sample_count: invalid arguments");
    const double v = (2.0 / delta) * (std::log(1.0 / beta) + d);
    // Guard against values like 8.000000000001 from rounding in the logarithm.
    return static_cast<long>(std::ceil(v - 1e-9 * v));
}

double scenarioQuantile(std::vector<double> values, double delta) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    long k = static_cast<long>(std::ceil((1.0 - delta) * n - 1e-9));
    k = std::clamp<long>(k, 1, static_cast<long>(values.size()));
    return values[k - 1];
}

double noiseLineNormSample(int nx, const FrequencyGrid& grid, double sigma_wbar, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    double best = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        const bool real = grid.coefficient(i) == 2.0;
        double s2 = 0.0;
        for (int r = 0; r < nx; ++r) {
            if (real) {
                const double v = sigma_wbar * nd(rng);
                s2 += v * v;
            } else {
                const double re = sigma_wbar * nd(rng) / std::sqrt(2.0);
                const double im = sigma_wbar * nd(rng) / std::sqrt(2.0);
                s2 += re * re + im * im;
            }
        }
        best = std::max(best, std::sqrt(s2));
    }
    return best;
}

double l1_scenario(int nx, const FrequencyGrid& grid, double sigma_wbar, double delta, double beta,
                   std::uint64_t seed) {
    const long ns = scenario_sample_count(delta, beta, 1);
    std::mt19937_64 rng = makeStream(seed, streams::kScenarioW);
    std::vector<double> norms;
    norms.reserve(ns);
    for (long i = 0; i < ns; ++i) norms.push_back(noiseLineNormSample(nx, grid, sigma_wbar, rng));
    return scenarioQuantile(std::move(norms), delta);
}

double relativeTransferError(const MatrixXcd& Vhat, const MatrixXcd& V) {
    Eigen::PartialPivLU<MatrixXcd> lu(Vhat.transpose());
    // E = (V - Vhat) Vhat^{-1}  <=>  Vhat' E' = (V - Vhat)'.
    MatrixXcd Et = lu.solve((V - Vhat).transpose());
    return opNorm(Et.transpose());
}

double relativeTransferErrorX(const MatrixXcd& Vhat, const MatrixXcd& V) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Vhat.adjoint() * Vhat);
    const MatrixXcd X = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().cast<cplx>().asDiagonal() *
                        es.eigenvectors().adjoint();
    return opNorm((V - Vhat) * X);
}

ScenarioSet gamma_v1_scenario(const GaussianPrior& prior, const FrequencyGrid& grid, double delta, double beta,
                              std::uint64_t seed) {
    const long ns = scenario_sample_count(delta, beta, 1);
    std::mt19937_64 rng = makeStream(seed, streams::kScenarioV);
    const TransferData nominal = transfer_matrices(prior.Ahat(), prior.Bhat(), grid);
    ScenarioSet s;
    const int nx = prior.nx();
    for (long i = 0; i < ns;) {
        long rej = 0;
        MatrixXd Theta = samplePriorInRegion(prior, rng, &rej);
        s.rejected += rej;
        const MatrixXd A = Theta.leftCols(nx), B = Theta.rightCols(1);
        if (!isSchur(A)) {
            ++s.unstable;
            continue;
        }
        const TransferData td = transfer_matrices(A, B, grid);
        s.gamma_v1 = std::max(s.gamma_v1, relativeTransferError(nominal.V, td.V));
        s.gamma_y = std::max(s.gamma_y, opNorm(td.Y));
        for (int c = 0; c < grid.size(); ++c)
            s.gamma_v_blocks = std::max(s.gamma_v_blocks, (td.V.col(c) - nominal.V.col(c)).norm());
        ++i;
        ++s.samples;
    }
    if (s.rejected > s.samples) std::cerr << "warning: gamma_v1_scenario rejected more than half of the prior draws\n";
    return s;
}

BoundConstants computeConstants(const GaussianPrior& prior, const FrequencyGrid& grid, double sigma_w, double beta,
                                double eps, std::uint64_t seed) {
    grid.validate(prior.nphi());
    BoundConstants bc;
    const ScenarioSet s = gamma_v1_scenario(prior, grid, prior.delta, beta, seed);
    bc.gamma_v1 = s.gamma_v1;
    bc.gamma_y = s.gamma_y;
    bc.gamma_v = s.gamma_v_blocks * std::sqrt(static_cast<double>(grid.size()));
    bc.l1 = l1_scenario(prior.nx(), grid, noise_line_radius(sigma_w, grid.T), prior.delta, beta, seed);
    bc.l = bc.gamma_y * bc.l1;
    bc.eps = eps;
    bc.samples = s.samples;
    bc.rejected = s.rejected;
    bc.unstable = s.unstable;
    bc.confidence = 1.0 - 2.0 * beta;
    return bc;
}

double holdoutGammaV1(const GaussianPrior& prior, const FrequencyGrid& grid, double gamma_v1, int n,
                      std::uint64_t seed) {
    std::mt19937_64 rng = makeStream(seed, streams::kHoldout, 1);
    const TransferData nominal = transfer_matrices(prior.Ahat(), prior.Bhat(), grid);
    int bad = 0;
    for (int i = 0; i < n; ++i) {
        MatrixXd Theta = samplePriorInRegion(prior, rng);
        const MatrixXd A = Theta.leftCols(prior.nx()), B = Theta.rightCols(1);
        if (!isSchur(A)) {
            ++bad;
            continue;
        }
        if (relativeTransferError(nominal.V, transfer_matrices(A, B, grid).V) > gamma_v1) ++bad;
    }
    return static_cast<double>(bad) / n;
}

double holdoutL1(int nx, const FrequencyGrid& grid, double sigma_wbar, double l1, int n, std::uint64_t seed) {
    std::mt19937_64 rng = makeStream(seed, streams::kHoldout, 2);
    int bad = 0;
    for (int i = 0; i < n; ++i)
        if (noiseLineNormSample(nx, grid, sigma_wbar, rng) > l1) ++bad;
    return static_cast<double>(bad) / n;
}

} // namespace dualctl
