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

#include "dualctl/estimation.hpp"

#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

using namespace dualctl;
using namespace oracle;

TEST_CASE("chi-squared critical values") {
    CHECK(chi2_critical(1, 0.3173) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(chi2_critical(2, std::exp(-1.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(chi2_critical(20, 0.01) == doctest::Approx(37.566).epsilon(1e-4));
    CHECK(chi2_critical(1, 0.05) == doctest::Approx(3.841458820694124).epsilon(1e-12));
    // Gaussian-square inversion: P(|N| > sqrt(c)) = delta.
    for (double delta : {0.01, 0.1, 0.5}) {
        const double c = chi2_critical(1, delta);
        CHECK(std::erfc(std::sqrt(c / 2.0)) == doctest::Approx(delta).epsilon(1e-10));
    }
    CHECK_THROWS(chi2_critical(0, 0.1));
    CHECK_THROWS(chi2_critical(3, 1.0));
}

TEST_CASE("vec stacks columns") {
    MatrixXd M(2, 3);
    M << 1, 2, 3, 4, 5, 6;
    VectorXd v(6);
    v << 1, 4, 2, 5, 3, 6;
    CHECK((vec(M) - v).norm() == 0.0);
    CHECK((unvec(v, 2) - M).norm() == 0.0);
}

TEST_CASE("MAP estimate") {
    std::mt19937_64 rng(3);
    SUBCASE("empty data returns the prior") {
        const GaussianPrior p = GaussianPrior::fromShape(randomMatrix(2, 3, rng), randomPd(3, rng), 0.05);
        const MapResult r = map_estimate(p, Dataset{}, 1.0);
        CHECK((r.theta_hat - p.theta_prior).norm() == 0.0);
        CHECK(r.D_T.norm() == 0.0);
    }
    SUBCASE("noise-free data at the prior center") {
        const MatrixXd Theta = randomMatrix(3, 4, rng);
        const GaussianPrior p = GaussianPrior::fromShape(Theta, randomPd(4, rng), 0.05);
        const Dataset d = randomData(Theta, 20, 0.0, rng);
        CHECK((map_estimate(p, d, 1.0).theta_hat - Theta).norm() <= 1e-10 * Theta.norm());
        CHECK((map_estimate(p, d, 0.0).theta_hat - Theta).norm() <= 1e-10 * Theta.norm());
    }
    SUBCASE("noise-free limit recovers the truth from an offset prior") {
        const MatrixXd Theta = randomMatrix(2, 3, rng);
        const GaussianPrior p = GaussianPrior::fromShape(Theta + randomMatrix(2, 3, rng), randomPd(3, rng), 0.05);
        const Dataset d = randomData(Theta, 10, 0.0, rng);
        CHECK((map_estimate(p, d, 0.0).theta_hat - Theta).norm() <= 1e-9 * Theta.norm());
    }
    SUBCASE("matches the stacked normal equations") {
        for (int t = 0; t < 5; ++t) {
            const MatrixXd Theta = randomMatrix(3, 4, rng);
            const GaussianPrior p = GaussianPrior::fromShape(randomMatrix(3, 4, rng), randomPd(4, rng), 0.01);
            const Dataset d = randomData(Theta, 30, 0.5, rng);
            const MapResult r = map_estimate(p, d, 0.5);
            const VectorXd ref = denseMap(p, d, 0.5);
            CHECK((vec(r.theta_hat) - ref).norm() <= 1e-8 * ref.norm());
            const MatrixXd grad = mapObjectiveGradient(p, d, 0.5, r.theta_hat);
            CHECK(grad.norm() <= 1e-8 * (1.0 + r.theta_hat.norm()) * (1.0 + r.D_post.norm()));
            MatrixXd G = MatrixXd::Zero(4, 4);
            for (const auto& phi : d.phi) G += phi * phi.transpose();
            CHECK((r.D_T - G / (p.c_delta * 0.25)).norm() <= 1e-12 * G.norm() / p.c_delta);
            CHECK((r.D_post - (p.D0 + r.D_T)).norm() <= 1e-12 * r.D_post.norm());
        }
    }
    SUBCASE("posterior is additive over data chunks") {
        const MatrixXd Theta = randomMatrix(2, 3, rng);
        const GaussianPrior p = GaussianPrior::fromShape(randomMatrix(2, 3, rng), randomPd(3, rng), 0.05);
        const Dataset d1 = randomData(Theta, 15, 0.3, rng), d2 = randomData(Theta, 25, 0.3, rng);
        Dataset all = d1;
        all.append(d2);
        const MapResult batch = map_estimate(p, all, 0.3);
        const MapResult first = map_estimate(p, d1, 0.3);
        const GaussianPrior mid = GaussianPrior::fromShape(first.theta_hat, first.D_post, 0.05);
        const MapResult second = map_estimate(mid, d2, 0.3);
        CHECK((second.D_post - batch.D_post).norm() <= 1e-12 * batch.D_post.norm());
        CHECK((second.theta_hat - batch.theta_hat).norm() <= 1e-10 * (1.0 + batch.theta_hat.norm()));
    }
}

TEST_CASE("prior from seed data") {
    std::mt19937_64 rng(8);
    const MatrixXd Theta = randomMatrix(2, 3, rng);
    const Dataset d = randomData(Theta, 40, 0.0, rng);
    const GaussianPrior p = GaussianPrior::fromData(d.phi, d.xnext, 1.0, 0.05);
    CHECK((p.theta_prior - Theta).norm() <= 1e-10);
    std::vector<VectorXd> flat(5, VectorXd::Unit(3, 0));
    std::vector<VectorXd> xs(5, VectorXd::Zero(2));
    CHECK_THROWS(GaussianPrior::fromData(flat, xs, 1.0, 0.05));
}

TEST_CASE("credibility region") {
    std::mt19937_64 rng(5);
    const MatrixXd c = randomMatrix(2, 3, rng);
    const UncertaintyEllipsoid e = credibility_region(c, randomPd(3, rng), 0.05);
    CHECK(e.contains(c));
    CHECK(e.prob == doctest::Approx(0.95));
    const UncertaintyEllipsoid z = credibility_region(c, MatrixXd::Zero(3, 3), 0.05);
    CHECK(z.contains(c + 1e6 * randomMatrix(2, 3, rng)));

    // Posterior coverage.
    const double delta = 0.05;
    const GaussianPrior post = GaussianPrior::fromShape(c, randomPd(3, rng), delta);
    const UncertaintyEllipsoid region = credibility_region(c, post.D0, delta);
    const int n = 10000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += region.contains(samplePrior(post, rng));
    const double freq = static_cast<double>(hits) / n;
    CHECK(freq >= 1.0 - delta - 2.0 * std::sqrt(delta * (1.0 - delta) / n));
}

TEST_CASE("projection onto the ellipsoid") {
    std::mt19937_64 rng(13);
    SUBCASE("inside points are unchanged") {
        const UncertaintyEllipsoid e = credibility_region(randomMatrix(2, 3, rng), randomPd(3, rng), 0.05);
        const MatrixXd inside = sampleUniformEllipsoid(e, rng);
        CHECK((project_parameters(inside, e, randomPd(3, rng)) - inside).norm() == 0.0);
    }
    SUBCASE("spherical case is a radial shrink") {
        const MatrixXd c = MatrixXd::Zero(2, 3);
        const UncertaintyEllipsoid e = credibility_region(c, MatrixXd::Identity(3, 3), 0.05);
        const MatrixXd x = 4.0 * randomMatrix(2, 3, rng);
        const MatrixXd p = project_parameters(x, e, MatrixXd::Identity(3, 3));
        CHECK((p - x / x.norm()).norm() <= 1e-9);
    }
    SUBCASE("one-state instances against a boundary search") {
        for (int t = 0; t < 10; ++t) {
            const MatrixXd c = randomMatrix(1, 2, rng);
            const MatrixXd D = randomPd(2, rng);
            const MatrixXd P = randomPd(2, rng);
            const UncertaintyEllipsoid e = credibility_region(c, D, 0.05);
            MatrixXd x = c + 5.0 * randomMatrix(1, 2, rng);
            if (e.contains(x)) x = c + 100.0 * (x - c);
            REQUIRE(!e.contains(x));
            const MatrixXd ref = boundaryProjection(x, c, D, P);
            const MatrixXd got = project_parameters(x, e, P);
            CHECK((got - ref).norm() <= 1e-6 * (1.0 + ref.norm()));
        }
    }
    SUBCASE("membership and non-expansiveness") {
        for (int t = 0; t < 1000; ++t) {
            const int nx = 1 + t % 3;
            const UncertaintyEllipsoid e =
                credibility_region(randomMatrix(nx, nx + 1, rng), randomPd(nx + 1, rng), 0.05);
            const MatrixXd P = randomPd(nx + 1, rng);
            MatrixXd hat = e.center + 3.0 * randomMatrix(nx, nx + 1, rng);
            while (e.contains(hat)) hat = e.center + 2.0 * (hat - e.center);
            const MatrixXd inside = sampleUniformEllipsoid(e, rng);
            const MatrixXd proj = project_parameters(hat, e, P);
            CHECK(e.quadraticForm(proj) <= 1.0 + 1e-9);
            auto dist = [&](const MatrixXd& d) { return std::sqrt((d * P * d.transpose()).trace()); };
            CHECK(dist(inside - proj) <= dist(inside - hat) + 1e-9);
        }
    }
}

TEST_CASE("uniform ellipsoid samples stay inside") {
    std::mt19937_64 rng(21);
    const UncertaintyEllipsoid e = credibility_region(randomMatrix(3, 4, rng), randomPd(4, rng), 0.05);
    double maxq = 0.0, meanq = 0.0;
    const int n = 5000;
    for (int i = 0; i < n; ++i) {
        const double q = e.quadraticForm(sampleUniformEllipsoid(e, rng));
        maxq = std::max(maxq, q);
        meanq += q / n;
    }
    CHECK(maxq <= 1.0 + 1e-12);
    // E[r^2] for uniform in a 12-ball is 12/14.
    CHECK(meanq == doctest::Approx(12.0 / 14.0).epsilon(0.02));
}
