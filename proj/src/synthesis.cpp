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
#include "dualctl/synthesis.hpp"
#include "dualctl/hinf.hpp"
#include "dualctl/search.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace dualctl {

using sdp::Affine;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGammaCap = 1e6;

Affine scalarConst(double v) { return Affine(MatrixXd::Constant(1, 1, v)); }

Affine entry(const Affine& col, int i) { return col.block(i, 0, 1, 1); }

// Tangent points of the candidate U = s I, with s large enough that the candidate
// itself meets the robust requirement: equal line powers s^2 give
// (I + E) Psi (I + E)^H >= s^2 sigma_min(Vhat)^2 (1 - gamma_v1)^2 I.
VectorXd initialTangent(const MatrixXcd& Vhat, const MatrixXd& goal, const BoundConstants& bc,
                        const FrequencyGrid& grid, double cbar) {
    const int n = static_cast<int>(Vhat.rows());
    const MatrixXd G = excitationTarget(Affine(goal), bc.eps, bc.l, grid.T, cbar).constant();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eg(G, Eigen::EigenvaluesOnly);
    Eigen::JacobiSVD<MatrixXcd> sv(Vhat);
    const double smin = sv.singularValues()(n - 1);
    const double s = std::sqrt(2.0 * std::max(eg.eigenvalues()(n - 1), 1e-12)) / (smin * (1.0 - bc.gamma_v1));
    return VectorXd::Constant(n, s);
}

} // namespace

Affine energy_bound_lmi(const Affine& amplitudes, const Affine& gamma_e) {
    const int n = amplitudes.rows();
    return sdp::blocks({{gamma_e, amplitudes.transpose()}, {amplitudes, sdp::kron(gamma_e, MatrixXd::Identity(n, n))}});
}

Affine excitationTarget(const Affine& Dbar_T, double eps, double l, int T, double cbar) {
    const int n = Dbar_T.rows();
    return (cbar * n / (T * (1.0 - eps))) * Dbar_T + Affine((l * l / eps) * MatrixXd::Identity(n, n));
}

Affine robustExcitationLmi(const std::vector<Affine>& line_power, const MatrixXcd& Vhat, const Affine& G,
                           double gamma_v1, const Affine& mu) {
    const int n = static_cast<int>(Vhat.rows());
    if (static_cast<int>(line_power.size()) != Vhat.cols()) throw std::invalid_argument("robustExcitationLmi: size");
    Affine rePsi(n, n), imPsi(n, n);
    for (int i = 0; i < Vhat.cols(); ++i) {
        const MatrixXcd vv = Vhat.col(i) * Vhat.col(i).adjoint();
        rePsi += sdp::kron(line_power[i], vv.real());
        imPsi += sdp::kron(line_power[i], vv.imag());
    }
    const MatrixXd I = MatrixXd::Identity(n, n);
    Affine re = sdp::blocks({{rePsi - G - sdp::kron(mu, gamma_v1 * gamma_v1 * I), rePsi},
                             {rePsi, rePsi + sdp::kron(mu, I)}});
    Affine im = sdp::blocks({{imPsi, imPsi}, {imPsi, imPsi}});
    return sdp::hermitianEmbedding(re, im);
}

Affine exploration_lmi(double eps, const VectorXd& lambda, const Affine& amplitudes, const MatrixXcd& Vhat,
                       const FrequencyGrid& grid, double l, const Affine& Dbar_T, double gamma_v1, int T, double cbar,
                       const Affine& mu) {
    if (!(gamma_v1 < 0.5)) throw std::runtime_error("prior uncertainty too large for exploration guarantees");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("exploration_lmi: eps must lie in (0, 1)");
    std::vector<Affine> m;
    for (int i = 0; i < grid.size(); ++i) {
        const double c = grid.coefficient(i);
        m.push_back((2.0 * c * lambda(i)) * entry(amplitudes, i) - scalarConst(lambda(i) * lambda(i)));
    }
    return robustExcitationLmi(m, Vhat, excitationTarget(Dbar_T, eps, l, T, cbar), gamma_v1, mu);
}

ExplorationResult solve_exploration_problem(const GaussianPrior& prior, const FrequencyGrid& grid,
                                            const BoundConstants& constants, double sigma_w, const MatrixXd& goal,
                                            const VectorXd& lambda_init, int max_iters) {
    const int n = prior.nphi();
    grid.validate(n);
    ExplorationResult res;
    res.plan.grid = grid;
    res.plan.amplitudes = VectorXd::Zero(n);
    res.plan.Dbar_T = goal;
    if (!(constants.gamma_v1 < 0.5)) {
        res.status = sdp::Status::Infeasible;
        res.message = "prior uncertainty too large for exploration guarantees";
        return res;
    }
    if (goal.cwiseAbs().maxCoeff() == 0.0) {
        // D_T >= 0 always holds.
        res.status = sdp::Status::Optimal;
        res.plan.gamma_e = 0.0;
        res.plan.gamma_e_history = {0.0};
        return res;
    }

    const TransferData nominal = transfer_matrices(prior.Ahat(), prior.Bhat(), grid);
    const double cbar = sigma_w * sigma_w * prior.c_delta;
    const VectorXd c = grid.coefficients();
    VectorXd lambda = lambda_init.size() == n ? lambda_init : initialTangent(nominal.V, goal, constants, grid, cbar);

    for (int it = 0; it < max_iters; ++it) {
        sdp::Problem p;
        Affine a = p.matrix("a", n, 1);
        Affine g = p.scalar("gamma_e");
        Affine mu = p.scalar("mu");
        p.addLmi(energy_bound_lmi(a, g), 0.0, "energy");
        p.addLmi(mu, 0.0, "mu");
        p.addLmi(exploration_lmi(constants.eps, lambda, a, nominal.V, grid, constants.l, Affine(goal),
                                 constants.gamma_v1, grid.T, cbar, mu),
                 0.0, "exploration");
        p.minimize(g);
        const sdp::Result r = p.solve();
        if (r.status != sdp::Status::Optimal) {
            if (it == 0) {
                res.status = r.status;
                res.message = "exploration SDP: " + sdp::statusName(r.status) + " " + r.message;
                return res;
            }
            res.message = "stopped after round " + std::to_string(it) + ": " + sdp::statusName(r.status);
            break;
        }
        const VectorXd a_new = a.value(r.y);
        const VectorXd a_old = res.plan.amplitudes;
        // The previous plan is feasible for this round (its tangent is tight), so a
        // worse value can only be solver inaccuracy; keep the previous plan then.
        if (it > 0 && g.value(r.y)(0, 0) > res.plan.gamma_e) break;
        res.plan.amplitudes = a_new;
        res.plan.gamma_e = g.value(r.y)(0, 0);
        res.plan.gamma_e_history.push_back(res.plan.gamma_e);
        res.mu = mu.value(r.y)(0, 0);
        res.iterations = it + 1;
        res.status = sdp::Status::Optimal;
        lambda = c.cwiseProduct(a_new);
        if (it > 0 && (a_new - a_old).norm() <= 1e-6 * std::max(1.0, a_new.norm())) break;
    }
    return res;
}

MatrixXd GainScheduledController::Kx() const {
    return N.transpose().ldlt().solve(M.transpose()).transpose();
}

GsVariables addGsVariables(sdp::Problem& p, int nx, bool scheduling) {
    GsVariables v;
    v.N = p.symmetric("N", nx);
    v.M = p.matrix("M", 1, nx);
    v.Ks = scheduling ? p.matrix("Ks", 1, nx) : Affine(1, nx);
    return v;
}

Affine gain_scheduling_lmi(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const PerformanceIndex& perf,
                           const MatrixXd& Rs_inv, const Affine& Ru_inv, double lambda_s, double lambda_u,
                           const GsVariables& v, const Affine& gamma, ChannelSet ch) {
    const int n = static_cast<int>(Ahat0.rows());
    const int nphi = n + 1;
    const int nz = perf.nz();
    const MatrixXd I = MatrixXd::Identity(n, n);
    const Affine NM = sdp::blocks({{v.N}, {v.M}});
    const Affine KsCol = sdp::blocks({{Affine(n, n)}, {v.Ks}});

    std::vector<Affine> ul{-v.N}, lr{-v.N};
    std::vector<std::vector<Affine>> rows;
    // Row x+.
    std::vector<Affine> rx{Ahat0 * v.N + Bhat0 * v.M};
    std::vector<Affine> rz{perf.C * v.N + perf.Du * v.M};
    if (ch.scheduling) {
        ul.push_back(Affine(-lambda_s * I));
        rx.push_back(Affine(I) + Bhat0 * v.Ks);
        rz.push_back(perf.Du * v.Ks);
    }
    if (ch.uncertainty) {
        ul.push_back(Affine(-lambda_u * I));
        rx.push_back(Affine(I));
        rz.push_back(Affine(nz, n));
    }
    ul.push_back(sdp::kron(-gamma, I));
    rx.push_back(Affine(I));
    rz.push_back(Affine(perf.Dw));
    rows.push_back(rx);

    auto phiRow = [&]() {
        std::vector<Affine> r{NM};
        if (ch.scheduling) r.push_back(KsCol);
        if (ch.uncertainty) r.push_back(Affine(nphi, n));
        r.push_back(Affine(nphi, n));
        return r;
    };
    if (ch.scheduling) {
        rows.push_back(phiRow());
        lr.push_back(Affine(-(1.0 / lambda_s) * Rs_inv));
    }
    if (ch.uncertainty) {
        rows.push_back(phiRow());
        lr.push_back((-1.0 / lambda_u) * Ru_inv);
    }
    rows.push_back(rz);
    lr.push_back(sdp::kron(-gamma, MatrixXd::Identity(nz, nz)));

    const Affine UL = sdp::blockDiag(ul);
    const Affine LR = sdp::blockDiag(lr);
    const Affine LL = sdp::blocks(rows);
    return sdp::symmetricBlocks({{UL}, {LL, LR}});
}

MatrixXd gainSchedulingMatrix(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const PerformanceIndex& perf,
                              const MatrixXd& Rs_inv, const MatrixXd& Ru_inv, const GainScheduledController& c,
                              ChannelSet channels) {
    GsVariables v{Affine(c.N), Affine(c.M), Affine(c.Ks.size() ? c.Ks : MatrixXd::Zero(1, Ahat0.rows()))};
    Affine F = gain_scheduling_lmi(Ahat0, Bhat0, perf, Rs_inv, Affine(Ru_inv), c.lambda_s, c.lambda_u, v,
                                   scalarConst(c.gamma_p), channels);
    return F.constant();
}

GsDesign minimizeGainScheduling(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const PerformanceIndex& perf,
                                const MatrixXd& Rs_inv, const MatrixXd& Ru_inv, double lambda_s, double lambda_u,
                                ChannelSet channels) {
    const int n = static_cast<int>(Ahat0.rows());
    sdp::Problem p;
    GsVariables v = addGsVariables(p, n, channels.scheduling);
    Affine g = p.scalar("gamma_p");
    p.addNegativeLmi(
        sdp::jacobiScaled(gain_scheduling_lmi(Ahat0, Bhat0, perf, Rs_inv, Affine(Ru_inv), lambda_s, lambda_u, v, g, channels)),
        kStrictMargin, "gain-scheduling");
    p.addLmi(scalarConst(kGammaCap) - g, 0.0, "cap");
    p.minimize(g);
    const sdp::Result r = p.solve();
    GsDesign d;
    if (r.status != sdp::Status::Optimal) return d;
    d.feasible = true;
    d.controller.N = v.N.value(r.y);
    d.controller.M = v.M.value(r.y);
    d.controller.Ks = v.Ks.value(r.y);
    d.controller.lambda_s = lambda_s;
    d.controller.lambda_u = lambda_u;
    d.controller.gamma_p = g.value(r.y)(0, 0);
    // Accept only designs that pass an independent eigenvalue check.
    const MatrixXd F = gainSchedulingMatrix(Ahat0, Bhat0, perf, Rs_inv, Ru_inv, d.controller, channels);
    Eigen::SelfAdjointEigenSolver<MatrixXd> ef(F, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<MatrixXd> en(d.controller.N, Eigen::EigenvaluesOnly);
    if (!(d.controller.gamma_p > 0.0) || ef.eigenvalues().maxCoeff() >= 0.0 || en.eigenvalues().minCoeff() <= 0.0)
        d.feasible = false;
    return d;
}

GsDesign bestGainScheduling(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const PerformanceIndex& perf,
                            const MatrixXd& Rs_inv, const MatrixXd& Ru_inv, ChannelSet ch) {
    const std::vector<double> grid = logspace(1e-3, 1e3, 13);
    GsDesign best;
    std::map<std::pair<double, double>, GsDesign> cache;
    auto eval = [&](double ls, double lu) -> double {
        auto key = std::make_pair(ls, lu);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, minimizeGainScheduling(Ahat0, Bhat0, perf, Rs_inv, Ru_inv, ls, lu, ch)).first;
        const GsDesign& d = it->second;
        if (d.feasible && (!best.feasible || d.controller.gamma_p < best.controller.gamma_p)) best = d;
        return d.feasible ? d.controller.gamma_p : kInf;
    };

    if (!ch.scheduling && !ch.uncertainty) {
        eval(1.0, 1.0);
        return best;
    }
    if (ch.scheduling != ch.uncertainty) {
        // One multiplier.
        auto f = [&](double x) { return ch.scheduling ? eval(x, 1.0) : eval(1.0, x); };
        scanAndRefine(f, grid, 30);
        return best;
    }
    double ls = 1.0, lu = 1.0, fbest = kInf;
    for (double a : grid)
        for (double b : grid) {
            const double v = eval(a, b);
            if (v < fbest) {
                fbest = v;
                ls = a;
                lu = b;
            }
        }
    if (!best.feasible) return best;
    for (int sweep = 0; sweep < 3; ++sweep) {
        const double before = fbest;
        ScalarMin m1 = goldenLog([&](double x) { return eval(x, lu); }, ls / 10.0, ls * 10.0, {ls, fbest}, 25);
        ls = m1.x;
        fbest = m1.f;
        ScalarMin m2 = goldenLog([&](double x) { return eval(ls, x); }, lu / 10.0, lu * 10.0, {lu, fbest}, 25);
        lu = m2.x;
        fbest = m2.f;
        if (before - fbest <= 1e-9 * before) break;
    }
    return best;
}

GsDesign h_infinity_baseline(const MatrixXd& A, const MatrixXd& B, const PerformanceIndex& perf, BaselineMode mode,
                             const MatrixXd& D0) {
    const int n = static_cast<int>(A.rows());
    ChannelSet ch{false, mode == BaselineMode::Robust};
    const MatrixXd Dz = mode == BaselineMode::Robust ? D0 : MatrixXd::Identity(n + 1, n + 1);
    if (mode == BaselineMode::Robust && (D0.rows() != n + 1 || D0.cols() != n + 1))
        throw std::invalid_argument("h_infinity_baseline: robust mode needs an n_phi x n_phi shape");
    GsDesign d = bestGainScheduling(A, B, perf, Dz, Dz, ch);
    if (!d.feasible) throw std::runtime_error("h_infinity_baseline: not stabilizable at gamma = 1e6");
    return d;
}

MatrixXd extract_controller(const GainScheduledController& ctrl, const MatrixXd& Ahat0, const MatrixXd& Bhat0,
                            const MatrixXd& Atilde, const MatrixXd& Btilde) {
    const MatrixXd Kx = ctrl.Kx();
    if (ctrl.Ks.size() == 0) return Kx;
    const double den = 1.0 - (ctrl.Ks * (Btilde - Bhat0))(0, 0);
    if (std::abs(den) < 1e-10) throw std::runtime_error("extract_controller: singular scheduling factor");
    return (Kx + ctrl.Ks * (Atilde - Ahat0)) / den;
}

double closedLoopHinf(const MatrixXd& A, const MatrixXd& B, const MatrixXd& K, const PerformanceIndex& perf) {
    const int n = static_cast<int>(A.rows());
    return hinfNorm(A + B * K, MatrixXd::Identity(n, n), perf.C + perf.Du * K, perf.Dw);
}

DualSearchOptions DualSearchOptions::defaults() {
    DualSearchOptions o;
    o.eps_grid = {0.02, 0.05};
    for (int i = 1; i <= 9; ++i) o.eps_grid.push_back(0.1 * i);
    o.lambda_grid = logspace(1e-2, 1e6, 9);
    return o;
}

DualResult solveDualFixed(const GaussianPrior& prior, const FrequencyGrid& grid, const BoundConstants& constants,
                          double sigma_w, const PerformanceIndex& perf, double gamma_p, const Multipliers& m) {
    const int n = prior.nphi(), nx = prior.nx();
    DualResult res;
    res.multipliers = m;
    res.solves = 1;
    if (!(constants.gamma_v1 < 0.5)) {
        res.status = sdp::Status::Infeasible;
        res.message = "prior uncertainty too large for exploration guarantees";
        return res;
    }
    const TransferData nominal = transfer_matrices(prior.Ahat(), prior.Bhat(), grid);
    const double cbar = sigma_w * sigma_w * prior.c_delta;
    const VectorXd c = grid.coefficients();

    // Balanced units. At a fixed lambda_u the useful information scales like
    // lambda_u^2 (the w_u and z_u channels trade 1 / lambda_u against lambda_u / Dbar),
    // so Dbar = lambda_u^2 Dt; powers and mu follow the size of the excitation target.
    const double lu = m.lambda_u;
    const double kD = cbar * n / (grid.T * (1.0 - m.eps));
    const double gs = std::max(kD * lu * lu, constants.l * constants.l / m.eps);
    const Eigen::JacobiSVD<MatrixXcd> sv(nominal.V);
    const double sp = gs / std::pow(sv.singularValues()(n - 1), 2);

    sdp::Problem p;
    Affine pt = p.matrix("p", n, 1);
    Affine mut = p.scalar("mu");
    Affine Dt = p.symmetric("Dbar", n);
    GsVariables v = addGsVariables(p, nx, true);
    const Affine Dbar = (lu * lu) * Dt;

    std::vector<Affine> powers;
    Affine energy(1, 1);
    for (int i = 0; i < n; ++i) {
        powers.push_back((sp / gs) * entry(pt, i));
        p.addLmi(entry(pt, i), 0.0, "p" + std::to_string(i));
        energy += (1.0 / (c(i) * c(i))) * entry(pt, i);
    }
    p.addLmi(mut, 0.0, "mu");
    p.addLmi(Dt, 0.0, "Dbar");
    p.addLmi(robustExcitationLmi(powers, nominal.V, (1.0 / gs) * excitationTarget(Dbar, m.eps, constants.l, grid.T, cbar),
                                 constants.gamma_v1, mut),
             0.0, "exploration");

    Affine F = gain_scheduling_lmi(prior.Ahat(), prior.Bhat(), perf, prior.D0, Affine(prior.D0) + Dbar, m.lambda_s, lu,
                                   v, scalarConst(gamma_p), ChannelSet{true, true});
    // Congruence: 1 / sqrt(lambda_u) on w_u and z_u, Jacobi elsewhere.
    {
        const int nphi = n;
        VectorXd d = VectorXd::Ones(F.rows());
        const VectorXd diag = F.constant().diagonal().cwiseAbs();
        for (int i = 0; i < F.rows(); ++i)
            if (diag(i) > 0.0) d(i) = 1.0 / std::sqrt(diag(i));
        d.segment(2 * nx, nx).setConstant(1.0 / std::sqrt(lu));
        d.segment(4 * nx + nx + nphi, nphi).setConstant(1.0 / std::sqrt(lu));
        const MatrixXd Dd = d.asDiagonal();
        F = Dd * F * Dd;
    }
    p.addNegativeLmi(F, kStrictMargin, "gain-scheduling");
    p.minimize(energy);
    sdp::Options opts;
    opts.auto_scale = false;
    const sdp::Result r = p.solve(opts);
    res.status = r.status;
    if (r.status != sdp::Status::Optimal) {
        res.message = r.message;
        return res;
    }
    const VectorXd pv = sp * pt.value(r.y);
    res.plan.grid = grid;
    res.plan.amplitudes = VectorXd(n);
    for (int i = 0; i < n; ++i) res.plan.amplitudes(i) = std::sqrt(std::max(0.0, pv(i))) / c(i);
    res.plan.gamma_e = res.plan.amplitudes.norm();
    res.plan.gamma_e_history = {res.plan.gamma_e};
    res.plan.Dbar_T = Dbar.value(r.y);
    res.controller.N = v.N.value(r.y);
    res.controller.M = v.M.value(r.y);
    res.controller.Ks = v.Ks.value(r.y);
    res.controller.lambda_s = m.lambda_s;
    res.controller.lambda_u = m.lambda_u;
    res.controller.gamma_p = gamma_p;
    return res;
}

DualResult solve_dual_problem(const GaussianPrior& prior, const FrequencyGrid& grid, const BoundConstants& constants,
                              double sigma_w, const PerformanceIndex& perf, double gamma_p,
                              const DualSearchOptions& options) {
    const int n = prior.nphi();
    grid.validate(n);
    DualResult best;
    best.status = sdp::Status::Infeasible;

    // No exploration: the robust design on the prior set.
    const GsDesign robust = options.robust ? *options.robust
                                           : h_infinity_baseline(prior.Ahat(), prior.Bhat(), perf, BaselineMode::Robust,
                                                                 prior.D0);
    if (robust.feasible && robust.controller.gamma_p <= gamma_p) {
        best.status = sdp::Status::Optimal;
        best.no_exploration = true;
        best.plan.grid = grid;
        best.plan.amplitudes = VectorXd::Zero(n);
        best.plan.gamma_e = 0.0;
        best.plan.gamma_e_history = {0.0};
        best.plan.Dbar_T = MatrixXd::Zero(n, n);
        best.controller = robust.controller;
        best.controller.Ks = MatrixXd::Zero(1, prior.nx());
        best.controller.gamma_p = gamma_p;
        best.message = "no exploration required";
        return best;
    }
    if (!(constants.gamma_v1 < 0.5)) {
        best.message = "prior uncertainty too large for exploration guarantees";
        return best;
    }

    std::map<std::tuple<double, double, double>, double> cache;
    int solves = 0;
    auto eval = [&](const Multipliers& m) -> double {
        const auto key = std::make_tuple(m.eps, m.lambda_s, m.lambda_u);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        DualResult r = solveDualFixed(prior, grid, constants, sigma_w, perf, gamma_p, m);
        ++solves;
        const double v = r.status == sdp::Status::Optimal ? r.plan.gamma_e : kInf;
        cache.emplace(key, v);
        if (r.status == sdp::Status::Optimal &&
            (best.status != sdp::Status::Optimal || r.plan.gamma_e < best.plan.gamma_e))
            best = r;
        return v;
    };

    Multipliers cur;
    double fcur = kInf;
    auto consider = [&](const Multipliers& m) {
        const double v = eval(m);
        if (v < fcur) {
            fcur = v;
            cur = m;
        }
    };
    for (double ls : options.lambda_grid)
        for (double lu : options.lambda_grid) consider({0.5, ls, lu});
    for (const Multipliers& m : options.extra_starts) consider(m);
    // Near the limit only a narrow band of lambda_s works; take it from the limit design.
    const GsDesign lim = schedulingLimit(prior.Ahat(), prior.Bhat(), perf, prior.D0);
    if (lim.feasible)
        for (double lu : options.lambda_grid) consider({0.5, lim.controller.lambda_s, lu});

    if (std::isfinite(fcur)) {
        auto nearest = [](const std::vector<double>& g, double x) {
            size_t k = 0;
            for (size_t i = 0; i < g.size(); ++i)
                if (std::abs(std::log(g[i] / x)) < std::abs(std::log(g[k] / x))) k = i;
            return k;
        };
        auto refine = [&](const std::vector<double>& g, auto setter, double x0) {
            auto f = [&](double x) {
                Multipliers m = cur;
                setter(m, x);
                return eval(m);
            };
            ScalarMin s{x0, fcur};
            for (double x : g) {
                const double v = f(x);
                if (v < s.f) s = {x, v};
            }
            const size_t kb = nearest(g, s.x);
            const double lo2 = g[kb > 0 ? kb - 1 : kb], hi2 = g[kb + 1 < g.size() ? kb + 1 : kb];
            if (lo2 < hi2) s = goldenLog(f, lo2, hi2, s, options.golden_iterations);
            if (s.f < fcur) {
                setter(cur, s.x);
                fcur = s.f;
            }
        };
        for (int sweep = 0; sweep < options.coordinate_sweeps; ++sweep) {
            const double before = fcur;
            refine(options.eps_grid, [](Multipliers& m, double x) { m.eps = x; }, cur.eps);
            refine(options.lambda_grid, [](Multipliers& m, double x) { m.lambda_s = x; }, cur.lambda_s);
            refine(options.lambda_grid, [](Multipliers& m, double x) { m.lambda_u = x; }, cur.lambda_u);
            if (before - fcur <= 1e-6 * before) break;
        }
    }
    best.solves = solves;
    if (best.status != sdp::Status::Optimal) {
        best.status = sdp::Status::Infeasible;
        best.message = "performance target unreachable";
    }
    return best;
}

GsDesign schedulingLimit(const MatrixXd& Ahat0, const MatrixXd& Bhat0, const PerformanceIndex& perf,
                         const MatrixXd& D0) {
    return bestGainScheduling(Ahat0, Bhat0, perf, D0, D0, ChannelSet{true, false});
}

} // namespace dualctl
