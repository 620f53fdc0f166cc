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
#include "dualctl/estimation.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/tools/roots.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace dualctl {

VectorXd vec(const MatrixXd& Theta) { return Eigen::Map<const VectorXd>(Theta.data(), Theta.size()); }

MatrixXd unvec(const VectorXd& theta, int nx) {
    if (nx <= 0 || theta.size() % nx != 0) throw std::invalid_argument("unvec: bad length");
    return Eigen::Map<const MatrixXd>(theta.data(), nx, theta.size() / nx);
}

MatrixXd stackAB(const MatrixXd& A, const MatrixXd& B) {
    MatrixXd T(A.rows(), A.cols() + B.cols());
    T << A, B;
    return T;
}

double chi2_critical(int dof, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("chi2_critical: delta must lie in (0, 1)");
    if (dof < 1) throw std::invalid_argument("chi2_critical: dof must be positive");
    boost::math::chi_squared dist(dof);
    return boost::math::quantile(boost::math::complement(dist, delta));
}

namespace {

void requirePd(const MatrixXd& D, const char* what) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (D + D.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) <= 0.0) throw std::invalid_argument(std::string(what) + " must be positive definite");
}

// M with M D M' = I (D = L L', M = L^{-1}).
MatrixXd whitening(const MatrixXd& D) {
    Eigen::LLT<MatrixXd> llt(0.5 * (D + D.transpose()));
    if (llt.info() != Eigen::Success) throw std::invalid_argument("shape matrix must be positive definite");
    MatrixXd L = llt.matrixL();
    return L.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(D.rows(), D.cols()));
}

MatrixXd gaussianMatrix(int r, int c, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    MatrixXd Z(r, c);
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < r; ++i) Z(i, j) = nd(rng);
    return Z;
}

} // namespace

GaussianPrior GaussianPrior::fromShape(const MatrixXd& center, const MatrixXd& D0, double delta) {
    GaussianPrior p;
    p.theta_prior = center;
    p.delta = delta;
    p.c_delta = chi2_critical(static_cast<int>(center.size()), delta);
    p.D0 = D0;
    p.Dtilde0 = p.c_delta * D0;
    p.validate();
    return p;
}

GaussianPrior GaussianPrior::fromData(const std::vector<VectorXd>& phi, const std::vector<VectorXd>& xnext,
                                      double sigma_w, double delta) {
    if (phi.empty() || phi.size() != xnext.size()) throw std::invalid_argument("fromData: empty or mismatched data");
    const int nphi = static_cast<int>(phi[0].size());
    const int nx = static_cast<int>(xnext[0].size());
    MatrixXd G = MatrixXd::Zero(nphi, nphi), Xp = MatrixXd::Zero(nx, nphi);
    for (size_t k = 0; k < phi.size(); ++k) {
        G += phi[k] * phi[k].transpose();
        Xp += xnext[k] * phi[k].transpose();
    }
    Eigen::FullPivLU<MatrixXd> lu(G);
    if (lu.rank() < nphi) throw std::invalid_argument("fromData: seed data are rank deficient");
    MatrixXd center = Xp * lu.inverse();
    GaussianPrior p;
    p.theta_prior = center;
    p.delta = delta;
    p.c_delta = chi2_critical(static_cast<int>(center.size()), delta);
    p.Dtilde0 = G / (sigma_w * sigma_w);
    p.D0 = p.Dtilde0 / p.c_delta;
    p.validate();
    return p;
}

void GaussianPrior::validate() const {
    if (theta_prior.cols() != theta_prior.rows() + 1) throw std::invalid_argument("prior: center must be n_x x (n_x+1)");
    if (Dtilde0.rows() != nphi() || Dtilde0.cols() != nphi()) throw std::invalid_argument("prior: shape has wrong size");
    requirePd(Dtilde0, "prior precision");
    if (!(c_delta > 0.0)) throw std::invalid_argument("prior: c_delta must be positive");
}

double UncertaintyEllipsoid::quadraticForm(const MatrixXd& Theta) const {
    const MatrixXd Delta = Theta - center;
    return (Delta * shape * Delta.transpose()).trace();
}

MatrixXd UncertaintyEllipsoid::matrixForm(const MatrixXd& Theta) const {
    const MatrixXd Delta = (Theta - center).transpose();
    return Delta.transpose() * shape * Delta;
}

Dataset Dataset::fromTrajectory(const Trajectory& tr) {
    Dataset d;
    for (int k = 0; k < tr.horizon(); ++k) {
        d.phi.push_back(tr.regressor(k));
        d.xnext.push_back(tr.x[k + 1]);
    }
    return d;
}

void Dataset::append(const Dataset& other) {
    phi.insert(phi.end(), other.phi.begin(), other.phi.end());
    xnext.insert(xnext.end(), other.xnext.begin(), other.xnext.end());
}

MapResult map_estimate(const GaussianPrior& prior, const Dataset& data, double sigma_w) {
    if (!(sigma_w >= 0.0)) throw std::invalid_argument("map_estimate: sigma_w must be nonnegative");
    const int nphi = prior.nphi(), nx = prior.nx();
    MatrixXd G = MatrixXd::Zero(nphi, nphi), Xp = MatrixXd::Zero(nx, nphi);
    for (int k = 0; k < data.size(); ++k) {
        G.noalias() += data.phi[k] * data.phi[k].transpose();
        Xp.noalias() += data.xnext[k] * data.phi[k].transpose();
    }
    if (sigma_w == 0.0) {
        // Noise-free limit: the data are fitted exactly and the prior picks the
        // closest such Theta, Theta = Theta0 + (Xp - Theta0 G) (G W G)^+ G W with W = Dtilde0^{-1}.
        const MatrixXd W = prior.Dtilde0.ldlt().solve(MatrixXd::Identity(nphi, nphi));
        const MatrixXd GWG = G * W * G;
        const MatrixXd pinv = GWG.completeOrthogonalDecomposition().pseudoInverse();
        MapResult r;
        r.theta_hat = prior.theta_prior + (Xp - prior.theta_prior * G) * pinv * G * W;
        r.D_T = G / prior.c_delta;
        r.D_post = prior.D0 + r.D_T;
        return r;
    }
    const double s2 = sigma_w * sigma_w;
    // Normal equations for the correction: (Theta - Theta0) (Dtilde0 + G / s2) = (Xp - Theta0 G) / s2.
    const MatrixXd H = prior.Dtilde0 + G / s2;
    const MatrixXd rhs = (Xp - prior.theta_prior * G) / s2;
    Eigen::LDLT<MatrixXd> ldlt(H);
    MapResult r;
    r.theta_hat = prior.theta_prior + ldlt.solve(rhs.transpose()).transpose();
    r.D_T = G / (prior.c_delta * s2);
    r.D_post = prior.D0 + r.D_T;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(H, Eigen::EigenvaluesOnly);
    r.condition = es.eigenvalues()(nphi - 1) / es.eigenvalues()(0);
    r.ill_conditioned = r.condition > 1e12;
    return r;
}

MatrixXd mapObjectiveGradient(const GaussianPrior& prior, const Dataset& data, double sigma_w, const MatrixXd& Theta) {
    MatrixXd g = 2.0 * (Theta - prior.theta_prior) * prior.Dtilde0;
    for (int k = 0; k < data.size(); ++k)
        g -= (2.0 / (sigma_w * sigma_w)) * (data.xnext[k] - Theta * data.phi[k]) * data.phi[k].transpose();
    return g;
}

UncertaintyEllipsoid credibility_region(const MatrixXd& center, const MatrixXd& D, double delta) {
    UncertaintyEllipsoid e;
    e.center = center;
    e.shape = 0.5 * (D + D.transpose());
    e.prob = 1.0 - delta;
    return e;
}

UncertaintyEllipsoid priorRegion(const GaussianPrior& prior) {
    return credibility_region(prior.theta_prior, prior.D0, prior.delta);
}

MatrixXd project_parameters(const MatrixXd& theta_hat, const UncertaintyEllipsoid& region, const MatrixXd& metric) {
    requirePd(region.shape, "projection region shape");
    if (region.contains(theta_hat)) return theta_hat;
    const MatrixXd& D = region.shape;
    const MatrixXd& P = metric;
    auto at = [&](double mu) -> MatrixXd {
        MatrixXd H = P + mu * D;
        MatrixXd rhs = theta_hat * P + mu * region.center * D;
        return H.ldlt().solve(rhs.transpose()).transpose();
    };
    // Constraint residual is decreasing in the multiplier.
    auto residual = [&](double mu) { return region.quadraticForm(at(mu)) - 1.0; };
    double lo = 0.0, hi = 1.0;
    while (residual(hi) > 0.0) {
        lo = hi;
        hi *= 4.0;
        if (hi > 1e300) throw std::runtime_error("project_parameters: multiplier bracket failed");
    }
    boost::uintmax_t max_iter = 300;
    auto sol = boost::math::tools::toms748_solve(residual, lo, hi, boost::math::tools::eps_tolerance<double>(50),
                                                 max_iter);
    // The larger end of the bracket is on the feasible side.
    return at(sol.second);
}

MatrixXd samplePrior(const GaussianPrior& prior, std::mt19937_64& rng) {
    const MatrixXd M = whitening(prior.Dtilde0);
    return prior.theta_prior + gaussianMatrix(prior.nx(), prior.nphi(), rng) * M;
}

MatrixXd samplePriorInRegion(const GaussianPrior& prior, std::mt19937_64& rng, long* rejected) {
    const UncertaintyEllipsoid region = priorRegion(prior);
    const MatrixXd M = whitening(prior.Dtilde0);
    for (;;) {
        MatrixXd Theta = prior.theta_prior + gaussianMatrix(prior.nx(), prior.nphi(), rng) * M;
        if (region.contains(Theta)) return Theta;
        if (rejected) ++*rejected;
    }
}

MatrixXd sampleUniformEllipsoid(const UncertaintyEllipsoid& region, std::mt19937_64& rng) {
    const int nx = static_cast<int>(region.center.rows()), nphi = static_cast<int>(region.center.cols());
    MatrixXd G = gaussianMatrix(nx, nphi, rng);
    G /= G.norm();
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const double r = std::pow(ud(rng), 1.0 / (nx * nphi));
    return region.center + r * G * whitening(region.shape);
}

} // namespace dualctl
