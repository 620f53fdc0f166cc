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
#include "doctest.h"

#include "dualctl/bounds.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <random>

using namespace dualctl;

namespace {

MatrixXd randomMatrix(int r, int c, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    MatrixXd M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M(i, j) = nd(rng);
    return M;
}

double opNorm(const MatrixXcd& M) { return Eigen::JacobiSVD<MatrixXcd>(M).singularValues()(0); }
double opNorm(const MatrixXd& M) { return Eigen::JacobiSVD<MatrixXd>(M).singularValues()(0); }

MatrixXd invSqrt(const MatrixXd& D) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(D);
    return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
           es.eigenvectors().transpose();
}

// Perturbation with Delta' Delta <= D0^{-1}, on the boundary.
MatrixXd boundaryPerturbation(int nx, const MatrixXd& D0, std::mt19937_64& rng) {
    MatrixXd S = randomMatrix(nx, static_cast<int>(D0.rows()), rng);
    S /= opNorm(S);
    return S * invSqrt(D0);
}

MatrixXd chainedA() {
    MatrixXd A = MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) {
        A(i, i) = 0.49;
        if (i < 3) A(i, i + 1) = 0.49;
    }
    return A;
}

FrequencyGrid paperGrid() { return FrequencyGrid::fromOmegas(100, {0.0, 0.1, 0.2, 0.3, 0.4}); }

} // namespace

TEST_CASE("noise line radius") {
    CHECK(noise_line_radius(0.0, 100) == 0.0);
    CHECK(noise_line_radius(1.0, 100) == doctest::Approx(0.1).epsilon(1e-15));

    // DFT line statistics of white noise at an interior bin.
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    const int T = 100, trials = 10000;
    double re2 = 0.0, im2 = 0.0, mag2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> w(T);
        for (double& v : w) v = nd(rng);
        const cplx c = spectral_line(w, 0.1);
        re2 += c.real() * c.real() / trials;
        im2 += c.imag() * c.imag() / trials;
        mag2 += std::norm(c) / trials;
    }
    const double r = noise_line_radius(1.0, T);
    CHECK(std::sqrt(re2) == doctest::Approx(r / std::sqrt(2.0)).epsilon(0.05));
    CHECK(std::sqrt(im2) == doctest::Approx(r / std::sqrt(2.0)).epsilon(0.05));
    CHECK(mag2 == doctest::Approx(r * r).epsilon(0.05));
}

TEST_CASE("scenario sample count") {
    CHECK(scenario_sample_count(0.01, 1e-10, 1) == 4806);
    CHECK(scenario_sample_count(0.5, std::exp(-1.0), 1) == 8);
    for (double delta : {0.2, 0.05, 0.01}) {
        const long a = scenario_sample_count(delta, 1e-6, 1), b = scenario_sample_count(delta / 2.0, 1e-6, 1);
        CHECK(std::abs(b - 2 * a) <= 1);
    }
    CHECK_THROWS(scenario_sample_count(0.0, 0.1, 1));
}

TEST_CASE("scenario quantile") {
    CHECK(scenarioQuantile(std::vector<double>(50, 3.25), 0.01) == 3.25);
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    CHECK(scenarioQuantile(v, 0.01) == 99.0);
    CHECK(scenarioQuantile(v, 0.1) == 90.0);
    CHECK(scenarioQuantile(v, 0.0) == 100.0);
}

TEST_CASE("analytic noise bound") {
    CHECK(l1_analytic(5, 0.1, 2.0 - 1e-12, 0.3, 0.7) == doctest::Approx(4.0 * 0.3 * 0.7 * std::sqrt(5.0)).epsilon(1e-5));
    double prev = 0.0;
    for (double delta : {0.5, 0.1, 0.01, 1e-4}) {
        const double v = l1_analytic(5, 0.1, delta, 1.0, 1.0);
        CHECK(v > prev);
        prev = v;
    }
    // Calibrated with C_w L_w = sigma_wbar the bound holds with probability >= 1 - delta.
    const FrequencyGrid g = paperGrid();
    const double sw = noise_line_radius(1.0, 100), delta = 0.01;
    const double l1 = l1_analytic(g.size(), sw, delta, sw, 1.0);
    std::mt19937_64 rng(3);
    int ok = 0;
    for (int t = 0; t < 10000; ++t) ok += noiseLineNormSample(4, g, sw, rng) <= l1;
    CHECK(ok >= 9900);
}

TEST_CASE("scenario noise bound") {
    const FrequencyGrid g = paperGrid();
    CHECK(l1_scenario(4, g, 0.0, 0.01, 1e-10, 1) == 0.0);
    const double sw = noise_line_radius(1.0, 100);
    const double l1 = l1_scenario(4, g, sw, 0.01, 1e-10, 7);
    CHECK(l1 > 0.0);
    const double viol = holdoutL1(4, g, sw, l1, 10000, 8);
    CHECK(viol <= 0.01 + 3.0 * std::sqrt(0.01 / 10000.0));
}

TEST_CASE("relative transfer error forms agree") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        const MatrixXcd Vh = MatrixXcd::Random(4, 4) + 2.0 * MatrixXcd::Identity(4, 4);
        const MatrixXcd V = Vh + 0.1 * MatrixXcd::Random(4, 4);
        CHECK(relativeTransferError(Vh, V) == doctest::Approx(relativeTransferErrorX(Vh, V)).epsilon(1e-9));
    }
    // Unitary-invariant factor: ||E Vhat^{-1}|| <= ||E|| / sigma_min(Vhat).
    const MatrixXcd Vh = MatrixXcd::Random(3, 3) + 2.0 * MatrixXcd::Identity(3, 3);
    const MatrixXcd V = Vh + 0.2 * MatrixXcd::Random(3, 3);
    const double smin = Eigen::JacobiSVD<MatrixXcd>(Vh).singularValues()(2);
    CHECK(relativeTransferError(Vh, V) <= opNorm(MatrixXcd(V - Vh)) / smin + 1e-12);
}

TEST_CASE("block aggregation") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 100; ++t) {
        const int n = 5;
        MatrixXd M(4, n);
        double g = 0.0;
        for (int i = 0; i < n; ++i) {
            M.col(i) = randomMatrix(4, 1, rng);
            g = std::max(g, M.col(i).norm());
        }
        CHECK(opNorm(M) <= g * std::sqrt(static_cast<double>(n)) * (1.0 + 1e-12));
    }
    const VectorXd c = randomMatrix(4, 1, rng);
    const MatrixXd same = c.replicate(1, 5);
    CHECK(opNorm(same) == doctest::Approx(c.norm() * std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("transfer error LMI") {
    std::mt19937_64 rng(9);
    SUBCASE("small uncertainty gives a small bound") {
        const MatrixXd A = 0.5 * MatrixXd::Identity(2, 2);
        const MatrixXd B = MatrixXd::Ones(2, 1);
        const GammaBound b = gamma_v_lmi(A, B, 1e6 * MatrixXd::Identity(3, 3), 5);
        CHECK(b.feasible);
        CHECK(b.gamma == doctest::Approx(b.gamma_bar * std::sqrt(5.0)));
        // The rank-one boundary perturbation aligned with the DC response attains
        // 2 * 3 * 1e-3, so the bound is tight and cannot drop below it.
        VectorXd phi(3);
        phi << 2.0, 2.0, 1.0;
        const MatrixXd Delta = 1e-3 * VectorXd::Ones(2).normalized() * phi.transpose() / phi.norm();
        const FrequencyGrid g(50, {0});
        const VectorXcd dv = transfer_matrices(A + Delta.leftCols(2), B + Delta.rightCols(1), g).V.col(0) -
                             transfer_matrices(A, B, g).V.col(0);
        CHECK(dv.norm() <= b.gamma_bar + 1e-9);
        CHECK(b.gamma_bar <= 1.01 * dv.norm());
    }
    SUBCASE("bounds sampled frequency responses") {
        const FrequencyGrid g(60, {0, 6, 13, 30});
        for (int t = 0; t < 3; ++t) {
            MatrixXd A = randomMatrix(2, 2, rng);
            A *= 0.6 / spectralRadius(A);
            const MatrixXd B = randomMatrix(2, 1, rng);
            const MatrixXd D0 = 200.0 * MatrixXd::Identity(3, 3) + 20.0 * randomMatrix(3, 3, rng).cwiseAbs();
            const MatrixXd D0s = 0.5 * (D0 + D0.transpose());
            const GammaBound b = gamma_v_lmi(A, B, D0s, 4);
            const GammaBound y = gamma_y_lmi(A, D0s, 4);
            const TransferData nom = transfer_matrices(A, B, g);
            double worstV = 0.0, worstY = 0.0;
            for (int s = 0; s < 500; ++s) {
                const MatrixXd Delta = boundaryPerturbation(2, D0s, rng);
                const MatrixXd Ap = A + Delta.leftCols(2), Bp = B + Delta.rightCols(1);
                REQUIRE(isSchur(Ap));
                const TransferData td = transfer_matrices(Ap, Bp, g);
                for (int i = 0; i < g.size(); ++i) {
                    worstV = std::max(worstV, (td.V.col(i) - nom.V.col(i)).norm());
                    worstY = std::max(worstY, opNorm(MatrixXcd(td.Yblock(i))));
                }
            }
            CHECK(worstV <= b.gamma_bar + 1e-6);
            CHECK(worstY <= y.gamma_bar + 1e-6);
        }
    }
}

TEST_CASE("resolvent LMI") {
    const MatrixXd big = 1e8 * MatrixXd::Identity(2, 2);
    CHECK(gamma_y_lmi(MatrixXd::Zero(1, 1), big, 3).gamma_bar == doctest::Approx(1.0).epsilon(1e-3));
    MatrixXd a(1, 1);
    a << 0.5;
    CHECK(gamma_y_lmi(a, big, 3).gamma_bar == doctest::Approx(2.0).epsilon(1e-3));
    a << -0.3;
    CHECK(gamma_y_lmi(a, big, 3).gamma_bar == doctest::Approx(1.0 / 0.7).epsilon(1e-3));
}

TEST_CASE("scenario transfer constants") {
    const FrequencyGrid g = paperGrid();
    MatrixXd B = MatrixXd::Zero(4, 1);
    B(3) = 0.49;
    SUBCASE("vanishing prior variance") {
        const GaussianPrior p = GaussianPrior::fromShape(stackAB(chainedA(), B), 1e14 * MatrixXd::Identity(5, 5), 0.01);
        const ScenarioSet s = gamma_v1_scenario(p, g, 0.01, 1e-10, 1);
        CHECK(s.gamma_v1 <= 1e-4);
        CHECK(s.samples == 4806);
    }
    SUBCASE("hard-to-learn system with D0 = 1000 I") {
        const GaussianPrior p = GaussianPrior::fromShape(stackAB(chainedA(), B), 1e3 * MatrixXd::Identity(5, 5), 0.01);
        const ScenarioSet s = gamma_v1_scenario(p, g, 0.01, 1e-10, 2);
        CHECK(s.gamma_v1 > 0.0);
        CHECK(s.gamma_v1 < 0.5);
        const double viol = holdoutGammaV1(p, g, s.gamma_v1, 10000, 3);
        CHECK(viol <= 0.01 + 3.0 * std::sqrt(0.01 / 10000.0));
    }
    SUBCASE("scenario value below the LMI route") {
        std::mt19937_64 rng(10);
        const FrequencyGrid g2(60, {0, 6, 13});
        MatrixXd A = randomMatrix(2, 2, rng);
        A *= 0.6 / spectralRadius(A);
        const MatrixXd b = randomMatrix(2, 1, rng);
        for (double scale : {100.0, 1000.0}) {
            const MatrixXd D0 = scale * MatrixXd::Identity(3, 3);
            const GaussianPrior p = GaussianPrior::fromShape(stackAB(A, b), D0, 0.01);
            const ScenarioSet s = gamma_v1_scenario(p, g2, 0.01, 1e-10, 4);
            const GammaBound lmi = gamma_v_lmi(A, b, D0, 3);
            const MatrixXcd Vh = transfer_matrices(A, b, g2).V;
            const double smin = Eigen::JacobiSVD<MatrixXcd>(Vh).singularValues()(2);
            CHECK(s.gamma_v1 <= lmi.gamma / smin + 1e-9);
            CHECK(s.gamma_v_blocks <= lmi.gamma_bar + 1e-6);
        }
    }
}

TEST_CASE("constants for the exploration problem") {
    MatrixXd B = MatrixXd::Zero(4, 1);
    B(3) = 0.49;
    const GaussianPrior p = GaussianPrior::fromShape(stackAB(chainedA(), B), 1e3 * MatrixXd::Identity(5, 5), 0.01);
    const BoundConstants c = computeConstants(p, paperGrid(), 1.0, 1e-10, 0.5, 11);
    CHECK(c.samples == 4806);
    CHECK(c.l == doctest::Approx(c.gamma_y * c.l1));
    CHECK(c.gamma_v1 < 0.5);
    CHECK(c.confidence > 0.0);
}
