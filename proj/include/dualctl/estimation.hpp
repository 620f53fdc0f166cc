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
#ifndef DUALCTL_ESTIMATION_HPP
#define DUALCTL_ESTIMATION_HPP

#include "dualctl/model.hpp"

#include <random>
#include <vector>

namespace dualctl {

/**
 * Parameters are kept in matrix form Theta = [A B] (n_x x n_phi). The vector
 * theta = vec(Theta) stacks columns, so a shape matrix D acts on the vector as
 * kron(D, I_{n_x}) and the quadratic form is trace(Delta D Delta').
 */
VectorXd vec(const MatrixXd& Theta);
MatrixXd unvec(const VectorXd& theta, int nx);
MatrixXd stackAB(const MatrixXd& A, const MatrixXd& B);

/// (1 - delta) quantile of the chi-squared distribution with `dof` degrees of freedom.
double chi2_critical(int dof, double delta);

struct GaussianPrior {
    MatrixXd theta_prior;  ///< [A0 B0]
    MatrixXd Dtilde0;      ///< prior precision is kron(Dtilde0, I)
    double delta = 0.01;
    double c_delta = 0.0;
    MatrixXd D0;           ///< Dtilde0 / c_delta

    int nx() const { return static_cast<int>(theta_prior.rows()); }
    int nphi() const { return static_cast<int>(theta_prior.cols()); }
    MatrixXd Ahat() const { return theta_prior.leftCols(nx()); }
    MatrixXd Bhat() const { return theta_prior.rightCols(1); }

    /// Prior with credibility shape D0 at level delta (Dtilde0 = c_delta * D0).
    static GaussianPrior fromShape(const MatrixXd& center, const MatrixXd& D0, double delta);
    /// Least-squares prior from a seed data set; rejects rank-deficient data.
    static GaussianPrior fromData(const std::vector<VectorXd>& phi, const std::vector<VectorXd>& xnext,
                                  double sigma_w, double delta);
    void validate() const;
};

struct UncertaintyEllipsoid {
    MatrixXd center;  ///< [A B]
    MatrixXd shape;   ///< D
    double prob = 0.0;

    /// trace((Theta - center) D (Theta - center)').
    double quadraticForm(const MatrixXd& Theta) const;
    bool contains(const MatrixXd& Theta, double tol = 0.0) const { return quadraticForm(Theta) <= 1.0 + tol; }
    /// Delta' D Delta with Delta = (Theta - center)'; <= I for every member.
    MatrixXd matrixForm(const MatrixXd& Theta) const;
};

struct Dataset {
    std::vector<VectorXd> phi;
    std::vector<VectorXd> xnext;

    int size() const { return static_cast<int>(phi.size()); }
    static Dataset fromTrajectory(const Trajectory& tr);
    void append(const Dataset& other);
};

struct MapResult {
    MatrixXd theta_hat;
    MatrixXd D_T;
    MatrixXd D_post;
    double condition = 1.0;
    bool ill_conditioned = false;
};

/**
 * @brief Posterior mean of Theta and the excitation D_T = sum phi phi' / (c_delta sigma_w^2).
 *
 * sigma_w = 0 gives the noise-free limit: the closest Theta (in the prior metric)
 * that fits the data exactly, with D_T reported at unit noise scale.
 */
MapResult map_estimate(const GaussianPrior& prior, const Dataset& data, double sigma_w);

/// Gradient of the negative log posterior (up to a factor) at Theta.
MatrixXd mapObjectiveGradient(const GaussianPrior& prior, const Dataset& data, double sigma_w, const MatrixXd& Theta);

UncertaintyEllipsoid credibility_region(const MatrixXd& center, const MatrixXd& D, double delta);

/// Prior credibility set: center theta_prior, shape D0.
UncertaintyEllipsoid priorRegion(const GaussianPrior& prior);

/**
 * @brief Metric projection onto an ellipsoid.
 *
 * Minimizes trace((Theta - theta_hat) P (Theta - theta_hat)') over the ellipsoid.
 * Points inside are returned unchanged; otherwise the multiplier of the single
 * constraint is found by bracketed root finding.
 */
MatrixXd project_parameters(const MatrixXd& theta_hat, const UncertaintyEllipsoid& region, const MatrixXd& metric);

/// Draw from N(theta_prior, kron(Dtilde0, I)^{-1}).
MatrixXd samplePrior(const GaussianPrior& prior, std::mt19937_64& rng);
/// Draw from the prior restricted to its credibility set (rejection). `rejected` counts discarded draws.
MatrixXd samplePriorInRegion(const GaussianPrior& prior, std::mt19937_64& rng, long* rejected = nullptr);
/// Uniform draw from the solid ellipsoid.
MatrixXd sampleUniformEllipsoid(const UncertaintyEllipsoid& region, std::mt19937_64& rng);

} // namespace dualctl

#endif // DUALCTL_ESTIMATION_HPP
