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

#include "dualctl/hinf.hpp"
#include "dualctl/synthesis.hpp"

#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <random>

using namespace dualctl;
using namespace oracle;
using sdp::Affine;

namespace {

Affine constant(double v) { return Affine(MatrixXd::Constant(1, 1, v)); }

struct SmallInstance {
    MatrixXd A, B;
    FrequencyGrid grid;
    PerformanceIndex perf;
    GaussianPrior prior;
    BoundConstants bc;
};

SmallInstance smallInstance() {
    SmallInstance s;
    s.A = chainedA(2, 0.5);
    s.B = MatrixXd::Zero(2, 1);
    s.B(1) = 0.5;
    s.grid = FrequencyGrid::fromOmegas(50, {0.0, 0.1, 0.2});
    s.perf = PerformanceIndex::stateInput(2);
    s.prior = GaussianPrior::fromShape(stackAB(s.A, s.B), 1e3 * MatrixXd::Identity(3, 3), 0.01);
    s.bc = computeConstants(s.prior, s.grid, 1.0, 1e-10, 0.5, 1);
    return s;
}

} // namespace

TEST_CASE("energy LMI") {
    SUBCASE("zero amplitudes need zero energy") {
        const MatrixXd F = energy_bound_lmi(Affine(MatrixXd::Zero(3, 1)), constant(0.0)).constant();
        CHECK(minEig(F) >= 0.0);
    }
    SUBCASE("diag(3, 4) gives gamma 5") {
        sdp::Problem p;
        const Affine g = p.scalar("gamma_e");
        MatrixXd a(2, 1);
        a << 3.0, 4.0;
        p.addLmi(energy_bound_lmi(Affine(a), g), 0.0, "energy");
        p.minimize(g);
        const sdp::Result r = p.solve();
        REQUIRE(r.status == sdp::Status::Optimal);
        CHECK(g.value(r.y)(0, 0) == doctest::Approx(5.0).epsilon(1e-6));
    }
    SUBCASE("feasibility matches the Euclidean norm") {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> ud(0.9, 1.1);
        int both = 0;
        for (int t = 0; t < 200; ++t) {
            const VectorXd a = randomMatrix(4, 1, rng);
            const double gamma = a.norm() * ud(rng);
            const bool lmi = minEig(energy_bound_lmi(Affine(MatrixXd(a)), constant(gamma)).constant()) >= -1e-12;
            CHECK(lmi == (a.squaredNorm() <= gamma * gamma));
            both += lmi;
        }
        CHECK(both > 20);
        CHECK(both < 180);
    }
}

TEST_CASE("exploration LMI") {
    std::mt19937_64 rng(2);
    const FrequencyGrid g(40, {0, 3, 7, 20});
    const int n = 4;
    SUBCASE("zero data and zero goal") {
        const Affine F = exploration_lmi(0.5, VectorXd::Zero(n), Affine(MatrixXd::Zero(n, 1)),
                                         MatrixXcd::Identity(n, n), g, 0.0, Affine(MatrixXd::Zero(n, n)), 0.2, 40, 1.0,
                                         constant(0.0));
        CHECK(minEig(F.constant()) >= -1e-12);
    }
    SUBCASE("assembled matrix matches the expanded requirement") {
        int feasible = 0;
        for (int t = 0; t < 200; ++t) {
            const MatrixXcd Vh = randomComplex(n, n, rng) + 3.0 * MatrixXcd::Identity(n, n);
            const VectorXd a = randomMatrix(n, 1, rng).cwiseAbs() * 3.0;
            const VectorXd lam = a.cwiseProduct(g.coefficients()) + 0.3 * randomMatrix(n, 1, rng);
            const MatrixXd Dbar = randomPd(n, rng, 0.01) * std::pow(10.0, 2.0 * randomMatrix(1, 1, rng)(0));
            const double l = 0.2, eps = 0.3, gv1 = 0.25, cbar = 7.0, mu = std::abs(randomMatrix(1, 1, rng)(0)) * 10.0;
            const Affine F = exploration_lmi(eps, lam, Affine(MatrixXd(a)), Vh, g, l, Affine(Dbar), gv1, 40, cbar,
                                             constant(mu));
            MatrixXcd Psi = MatrixXcd::Zero(n, n);
            for (int i = 0; i < n; ++i) {
                const double m = 2.0 * g.coefficient(i) * lam(i) * a(i) - lam(i) * lam(i);
                Psi += m * Vh.col(i) * Vh.col(i).adjoint();
            }
            const MatrixXd G = (cbar * n / (40.0 * (1.0 - eps))) * Dbar + (l * l / eps) * MatrixXd::Identity(n, n);
            const MatrixXcd H = excitationBlock(Psi, G, gv1, mu);
            const double e1 = minEig(F.constant()), e2 = minEig(H);
            CHECK(e1 == doctest::Approx(e2).epsilon(1e-9).scale(1.0 + H.norm()));
            CHECK((e1 >= 0.0) == (e2 >= 0.0));
            feasible += e2 >= 0.0;
        }
        CHECK(feasible > 0);
        CHECK(feasible < 200);
    }
    SUBCASE("robust to every admissible transfer error") {
        int checked = 0;
        for (int t = 0; t < 200; ++t) {
            const MatrixXcd Vh = randomComplex(n, n, rng) + 3.0 * MatrixXcd::Identity(n, n);
            const VectorXd p = randomMatrix(n, 1, rng).cwiseAbs() + VectorXd::Constant(n, 0.5);
            MatrixXcd Psi = MatrixXcd::Zero(n, n);
            for (int i = 0; i < n; ++i) Psi += p(i) * Vh.col(i) * Vh.col(i).adjoint();
            const double gv1 = 0.3;
            const MatrixXd G = 0.3 * minEig(Psi) * randomPd(n, rng, 0.5) / n;
            std::vector<Affine> powers;
            for (int i = 0; i < n; ++i) powers.push_back(constant(p(i)));
            double mu_ok = -1.0;
            for (double mu = 1e-3; mu < 1e4; mu *= 1.5)
                if (minEig(robustExcitationLmi(powers, Vh, Affine(G), gv1, constant(mu)).constant()) >= 0.0) {
                    mu_ok = mu;
                    break;
                }
            if (mu_ok < 0.0) continue;
            ++checked;
            for (int s = 0; s < 20; ++s) {
                MatrixXcd E = randomComplex(n, n, rng);
                E *= gv1 / opNorm(E);
                const MatrixXcd I = MatrixXcd::Identity(n, n);
                const MatrixXcd lhs = (I + E) * Psi * (I + E).adjoint() - G.cast<cplx>();
                CHECK(minEig(lhs) >= -1e-9 * Psi.norm());
            }
        }
        CHECK(checked > 50);
        CHECK_THROWS(exploration_lmi(0.5, VectorXd::Ones(n), Affine(MatrixXd::Ones(n, 1)), MatrixXcd::Identity(n, n),
                                     g, 0.0, Affine(MatrixXd::Zero(n, n)), 0.5, 40, 1.0, constant(1.0)));
    }
}

TEST_CASE("gain-scheduling LMI matches the dissipation inequality") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ud(0.7, 1.6);
    const int n = 2;
    const PerformanceIndex perf = PerformanceIndex::stateInput(n);
    int negative = 0, trials = 0;
    while (trials < 200) {
        // Points around a solved design, so both outcomes occur.
        MatrixXd A = randomMatrix(n, n, rng);
        A *= 0.7 / spectralRadius(A);
        const MatrixXd B = randomMatrix(n, 1, rng);
        const MatrixXd Rs_inv = 50.0 * randomPd(n + 1, rng, 1.0), Ru_inv = 50.0 * randomPd(n + 1, rng, 1.0);
        const GsDesign d = minimizeGainScheduling(A, B, perf, Rs_inv, Ru_inv, 1.0, 1.0, ChannelSet{});
        if (!d.feasible) continue;
        for (int k = 0; k < 20 && trials < 200; ++k, ++trials) {
            GainScheduledController c = d.controller;
            c.gamma_p *= ud(rng);
            c.lambda_s *= ud(rng);
            c.lambda_u *= ud(rng);
            c.N += 0.05 * c.N.norm() * randomPd(n, rng, 0.0) / n;
            c.M += 0.05 * c.M.norm() * randomMatrix(1, n, rng);
            c.Ks += 0.05 * (1.0 + c.Ks.norm()) * randomMatrix(1, n, rng);
            const MatrixXd F = gainSchedulingMatrix(A, B, perf, Rs_inv, Ru_inv, c, ChannelSet{});

            const MatrixXd Q = dissipation(A, B, perf, c.N, c.M, c.Ks, c.lambda_s, c.lambda_u, c.gamma_p, Rs_inv, Ru_inv);
            const bool lmi = maxEig(F) < 0.0, diss = maxEig(Q) < 0.0;
            CHECK(lmi == diss);
            negative += lmi;
        }
    }
    CHECK(negative > 10);
    CHECK(negative < 190);
}

TEST_CASE("H-infinity baselines") {
    SUBCASE("scalar plant against a brute-force gain search") {
        MatrixXd a(1, 1), b(1, 1);
        a << 0.5;
        b << 1.0;
        const PerformanceIndex perf = PerformanceIndex::stateInput(1);
        const GsDesign d = h_infinity_baseline(a, b, perf, BaselineMode::Nominal);
        REQUIRE(d.feasible);
        double best = 1e9;
        for (double k = -1.49; k < 0.49; k += 1e-4) {
            MatrixXd K(1, 1);
            K << k;
            const MatrixXd Acl = a + b * K;
            best = std::min(best, peakGainFrequency(Acl, MatrixXd::Identity(1, 1), perf.C + perf.Du * K, perf.Dw, 2000).gain);
        }
        CHECK(d.controller.gamma_p == doctest::Approx(best).epsilon(1e-3));
        // Deadbeat K = -0.5 is optimal: z = (1, -0.5) x, gain sqrt(1.25).
        CHECK(d.controller.gamma_p == doctest::Approx(std::sqrt(1.25)).epsilon(1e-6));
        CHECK(closedLoopHinf(a, b, d.controller.Kx(), perf) <= d.controller.gamma_p * (1.0 + 1e-5));
    }
    SUBCASE("static channel") {
        MatrixXd a = MatrixXd::Zero(1, 1), b = MatrixXd::Ones(1, 1), Dw(1, 1);
        Dw << 0.7;
        const PerformanceIndex perf = PerformanceIndex::l2Gain(MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1), Dw, 1.0);
        const GsDesign d = h_infinity_baseline(a, b, perf, BaselineMode::Nominal);
        CHECK(d.controller.gamma_p == doctest::Approx(0.7).epsilon(1e-3));
    }
    SUBCASE("robust is never below nominal and shrinks to it") {
        const SmallInstance s = smallInstance();
        const double nom = h_infinity_baseline(s.A, s.B, s.perf, BaselineMode::Nominal).controller.gamma_p;
        const double rob = h_infinity_baseline(s.A, s.B, s.perf, BaselineMode::Robust, s.prior.D0).controller.gamma_p;
        CHECK(rob >= nom);
        const MatrixXd huge = 1e8 * MatrixXd::Identity(3, 3);
        const GsDesign tiny = bestGainScheduling(s.A, s.B, s.perf, huge, huge, ChannelSet{});
        REQUIRE(tiny.feasible);
        CHECK(std::abs(tiny.controller.gamma_p / nom - 1.0) <= 0.02);
    }
    SUBCASE("robust design holds on sampled plants") {
        const SmallInstance s = smallInstance();
        const MatrixXd D0 = 200.0 * MatrixXd::Identity(3, 3);
        const GsDesign d = bestGainScheduling(s.A, s.B, s.perf, D0, D0, ChannelSet{false, true});
        REQUIRE(d.feasible);
        const MatrixXd K = d.controller.Kx();
        std::mt19937_64 rng(4);
        for (int t = 0; t < 100; ++t) {
            const MatrixXd Delta = boundaryPerturbation(2, D0, rng);
            const double h = closedLoopHinf(s.A + Delta.leftCols(2), s.B + Delta.rightCols(1), K, s.perf);
            CHECK(h <= d.controller.gamma_p + 1e-4);
        }
    }
}

TEST_CASE("controller extraction") {
    std::mt19937_64 rng(5);
    GainScheduledController c;
    c.N = randomPd(3, rng, 0.5);
    c.M = randomMatrix(1, 3, rng);
    c.Ks = MatrixXd::Zero(1, 3);
    const MatrixXd A0 = randomMatrix(3, 3, rng), B0 = randomMatrix(3, 1, rng);
    CHECK((extract_controller(c, A0, B0, A0 + randomMatrix(3, 3, rng), B0 + randomMatrix(3, 1, rng)) - c.Kx()).norm() <=
          1e-12 * c.Kx().norm());
    c.Ks = randomMatrix(1, 3, rng);
    CHECK((extract_controller(c, A0, B0, A0, B0) - c.Kx()).norm() <= 1e-12 * c.Kx().norm());

    for (int t = 0; t < 20; ++t) {
        c.Ks = 0.3 * randomMatrix(1, 3, rng);
        const MatrixXd At = A0 + 0.3 * randomMatrix(3, 3, rng), Bt = B0 + 0.3 * randomMatrix(3, 1, rng);
        const MatrixXd K = extract_controller(c, A0, B0, At, Bt);
        for (int k = 0; k < 10; ++k) {
            const VectorXd x = randomMatrix(3, 1, rng);
            // Implicit law u = Kx x + Ks w_s, w_s = (At - A0) x + (Bt - B0) u, by fixed-point iteration.
            double u = 0.0;
            for (int it = 0; it < 200; ++it) u = (c.Kx() * x + c.Ks * ((At - A0) * x + (Bt - B0) * u))(0);
            const double gain = std::abs((c.Ks * (Bt - B0))(0));
            if (gain < 0.5) CHECK(std::abs((K * x)(0) - u) <= 1e-10 * (1.0 + std::abs(u)));
        }
    }
}

TEST_CASE("exploration design") {
    const SmallInstance s = smallInstance();
    SUBCASE("zero goal needs no energy") {
        const ExplorationResult r = solve_exploration_problem(s.prior, s.grid, s.bc, 1.0, MatrixXd::Zero(3, 3));
        REQUIRE(r.status == sdp::Status::Optimal);
        CHECK(r.plan.gamma_e <= 1e-6);
        CHECK(r.plan.amplitudes.norm() <= 1e-6);
    }
    SUBCASE("energy is non-increasing over tangent updates") {
        MatrixXd goal = MatrixXd::Zero(3, 3);
        goal(0, 0) = 1e5;
        const ExplorationResult r = solve_exploration_problem(s.prior, s.grid, s.bc, 1.0, goal);
        REQUIRE(r.status == sdp::Status::Optimal);
        REQUIRE(r.plan.gamma_e_history.size() >= 2u);
        for (size_t i = 1; i < r.plan.gamma_e_history.size(); ++i)
            CHECK(r.plan.gamma_e_history[i] <= r.plan.gamma_e_history[i - 1] * (1.0 + 1e-6));
    }
    SUBCASE("amplitudes scale with the square root of the goal without noise") {
        BoundConstants bc = s.bc;
        bc.l = 0.0;
        MatrixXd goal = MatrixXd::Zero(3, 3);
        goal(0, 0) = 1e4;
        const ExplorationResult r1 = solve_exploration_problem(s.prior, s.grid, bc, 1.0, goal);
        const ExplorationResult r2 = solve_exploration_problem(s.prior, s.grid, bc, 1.0, 9.0 * goal);
        REQUIRE(r1.status == sdp::Status::Optimal);
        REQUIRE(r2.status == sdp::Status::Optimal);
        CHECK(r2.plan.gamma_e / r1.plan.gamma_e == doctest::Approx(3.0).epsilon(1e-3));
    }
}

TEST_CASE("dual design") {
    const SmallInstance s = smallInstance();
    REQUIRE(s.bc.gamma_v1 < 0.5);
    const double nom = h_infinity_baseline(s.A, s.B, s.perf, BaselineMode::Nominal).controller.gamma_p;
    const double rob = h_infinity_baseline(s.A, s.B, s.perf, BaselineMode::Robust, s.prior.D0).controller.gamma_p;
    const GsDesign lim = schedulingLimit(s.A, s.B, s.perf, s.prior.D0);
    REQUIRE(lim.feasible);
    REQUIRE(lim.controller.gamma_p < rob);

    SUBCASE("robust level needs no exploration") {
        const DualResult r = solve_dual_problem(s.prior, s.grid, s.bc, 1.0, s.perf, rob * (1.0 + 1e-4));
        REQUIRE(r.status == sdp::Status::Optimal);
        CHECK(r.no_exploration);
        CHECK(r.plan.gamma_e <= 1e-4);
    }
    SUBCASE("below the nominal level is infeasible") {
        const DualResult r = solve_dual_problem(s.prior, s.grid, s.bc, 1.0, s.perf, 0.9 * nom);
        CHECK(r.status != sdp::Status::Optimal);
    }
    SUBCASE("solution satisfies both requirements") {
        const double gamma_p = 0.5 * (lim.controller.gamma_p + rob);
        const DualResult r = solve_dual_problem(s.prior, s.grid, s.bc, 1.0, s.perf, gamma_p);
        REQUIRE(r.status == sdp::Status::Optimal);
        CHECK(!r.no_exploration);
        CHECK(r.plan.gamma_e > 0.0);
        CHECK(r.controller.gamma_p <= gamma_p * (1.0 + 1e-6));
        CHECK(r.plan.gamma_e == doctest::Approx(r.plan.amplitudes.norm()).epsilon(1e-4));

        // Gain scheduling with the post-exploration shape.
        const MatrixXd Ru_inv = s.prior.D0 + r.plan.Dbar_T;
        const MatrixXd F = gainSchedulingMatrix(s.A, s.B, s.perf, s.prior.D0, Ru_inv, r.controller, ChannelSet{});
        CHECK(maxEig(F) < 0.0);

        // Guaranteed excitation at the achieved line powers, for sampled transfer errors.
        const MatrixXcd Vh = transfer_matrices(s.A, s.B, s.grid).V;
        const VectorXd p = r.plan.powers();
        MatrixXcd Psi = MatrixXcd::Zero(3, 3);
        for (int i = 0; i < 3; ++i) Psi += p(i) * Vh.col(i) * Vh.col(i).adjoint();
        const double cbar = s.prior.c_delta;
        const MatrixXd G = excitationTarget(Affine(r.plan.Dbar_T), r.multipliers.eps, s.bc.l, s.grid.T, cbar).constant();
        std::mt19937_64 rng(6);
        for (int t = 0; t < 200; ++t) {
            MatrixXcd E = randomComplex(3, 3, rng);
            E *= s.bc.gamma_v1 / opNorm(E);
            const MatrixXcd I = MatrixXcd::Identity(3, 3);
            CHECK(minEig(MatrixXcd((I + E) * Psi * (I + E).adjoint() - G.cast<cplx>())) >= -1e-6 * G.norm());
        }

        // Scheduled controller on sampled plants: estimate inside the prior set, truth around it.
        for (int t = 0; t < 100; ++t) {
            const MatrixXd Ds = boundaryPerturbation(2, s.prior.D0, rng);
            const MatrixXd Du = boundaryPerturbation(2, Ru_inv, rng);
            const MatrixXd At = s.A + Ds.leftCols(2), Bt = s.B + Ds.rightCols(1);
            const MatrixXd K = extract_controller(r.controller, s.A, s.B, At, Bt);
            const double h = closedLoopHinf(At + Du.leftCols(2), Bt + Du.rightCols(1), K, s.perf);
            CHECK(h <= gamma_p + 1e-4);
        }
    }
}
