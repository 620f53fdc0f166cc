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
#include "dualctl/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace dualctl {
namespace sdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Affine expressions
// ---------------------------------------------------------------------------

Affine::Affine(int rows, int cols) : constant_(MatrixXd::Zero(rows, cols)) {}

Affine::Affine(const MatrixXd& constant) : constant_(constant) {}

Affine Affine::identity(int n) { return Affine(MatrixXd::Identity(n, n)); }

Affine Affine::scalarVariable(int index) {
    Affine a(1, 1);
    a.coef_[index] = MatrixXd::Ones(1, 1);
    return a;
}

MatrixXd Affine::value(const VectorXd& y) const {
    MatrixXd out = constant_;
    for (const auto& [i, M] : coef_) {
        if (i >= y.size()) throw std::runtime_error("Affine::value: variable index out of range");
        out += y(i) * M;
    }
    return out;
}

Affine Affine::transpose() const {
    Affine t(constant_.transpose());
    for (const auto& [i, M] : coef_) t.coef_[i] = M.transpose();
    return t;
}

Affine Affine::block(int r, int c, int nr, int nc) const {
    Affine b(constant_.block(r, c, nr, nc));
    for (const auto& [i, M] : coef_) {
        MatrixXd sub = M.block(r, c, nr, nc);
        if (sub.cwiseAbs().maxCoeff() > 0.0) b.coef_[i] = sub;
    }
    return b;
}

void Affine::addTerm(int index, const MatrixXd& M) {
    if (M.rows() != rows() || M.cols() != cols())
        throw std::runtime_error("Affine::addTerm: dimension mismatch");
    auto it = coef_.find(index);
    if (it == coef_.end()) coef_[index] = M;
    else it->second += M;
}

Affine& Affine::operator+=(const Affine& other) {
    if (rows() != other.rows() || cols() != other.cols())
        throw std::runtime_error("Affine: dimension mismatch in +");
    constant_ += other.constant_;
    for (const auto& [i, M] : other.coef_) addTerm(i, M);
    return *this;
}

Affine& Affine::operator-=(const Affine& other) {
    if (rows() != other.rows() || cols() != other.cols())
        throw std::runtime_error("Affine: dimension mismatch in -");
    constant_ -= other.constant_;
    for (const auto& [i, M] : other.coef_) addTerm(i, -M);
    return *this;
}

Affine& Affine::operator*=(double s) {
    constant_ *= s;
    for (auto& [i, M] : coef_) M *= s;
    return *this;
}

Affine operator+(Affine a, const Affine& b) { return a += b; }
Affine operator-(Affine a, const Affine& b) { return a -= b; }
Affine operator-(const Affine& a) { return -1.0 * a; }
Affine operator*(double s, Affine a) { return a *= s; }
Affine operator*(const Affine& a, double s) { return s * a; }

Affine operator*(const MatrixXd& L, const Affine& a) {
    if (L.cols() != a.rows()) throw std::runtime_error("Affine: dimension mismatch in left product");
    Affine out(L * a.constant_);
    for (const auto& [i, M] : a.coef_) out.coef_[i] = L * M;
    return out;
}

Affine operator*(const Affine& a, const MatrixXd& R) {
    if (a.cols() != R.rows()) throw std::runtime_error("Affine: dimension mismatch in right product");
    Affine out(a.constant_ * R);
    for (const auto& [i, M] : a.coef_) out.coef_[i] = M * R;
    return out;
}

Affine kron(const Affine& scalar, const MatrixXd& M) {
    if (scalar.rows() != 1 || scalar.cols() != 1)
        throw std::runtime_error("kron: left factor must be 1x1");
    Affine out(scalar.constant()(0, 0) * M);
    for (const auto& [i, c] : scalar.coefficients()) out.addTerm(i, c(0, 0) * M);
    return out;
}

Affine blocks(const std::vector<std::vector<Affine>>& grid) {
    const size_t nr = grid.size();
    if (nr == 0) return Affine();
    const size_t nc = grid[0].size();
    std::vector<int> rh(nr, -1), cw(nc, -1);
    for (size_t r = 0; r < nr; ++r) {
        if (grid[r].size() != nc) throw std::runtime_error("blocks: ragged grid");
        for (size_t c = 0; c < nc; ++c) {
            const Affine& b = grid[r][c];
            if (b.rows() == 0 && b.cols() == 0) continue;
            if (rh[r] >= 0 && rh[r] != b.rows()) throw std::runtime_error("blocks: row height mismatch");
            if (cw[c] >= 0 && cw[c] != b.cols()) throw std::runtime_error("blocks: column width mismatch");
            rh[r] = b.rows();
            cw[c] = b.cols();
        }
    }
    for (int h : rh) if (h < 0) throw std::runtime_error("blocks: undetermined row height");
    for (int w : cw) if (w < 0) throw std::runtime_error("blocks: undetermined column width");
    int R = 0, C = 0;
    for (int h : rh) R += h;
    for (int w : cw) C += w;
    Affine out(R, C);
    int r0 = 0;
    for (size_t r = 0; r < nr; ++r) {
        int c0 = 0;
        for (size_t c = 0; c < nc; ++c) {
            const Affine& b = grid[r][c];
            if (b.rows() > 0 || b.cols() > 0) {
                MatrixXd big = MatrixXd::Zero(R, C);
                big.block(r0, c0, rh[r], cw[c]) = b.constant();
                Affine piece(big);
                for (const auto& [i, M] : b.coefficients()) {
                    MatrixXd Mi = MatrixXd::Zero(R, C);
                    Mi.block(r0, c0, rh[r], cw[c]) = M;
                    piece.addTerm(i, Mi);
                }
                out += piece;
            }
            c0 += cw[c];
        }
        r0 += rh[r];
    }
    return out;
}

Affine blockDiag(const std::vector<Affine>& diag) {
    const size_t n = diag.size();
    std::vector<std::vector<Affine>> grid(n, std::vector<Affine>(n));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i == j) grid[i][j] = diag[i];
            else grid[i][j] = Affine(diag[i].rows(), diag[j].cols());
        }
    }
    return blocks(grid);
}

Affine symmetricBlocks(const std::vector<std::vector<Affine>>& lower) {
    const size_t n = lower.size();
    std::vector<std::vector<Affine>> grid(n, std::vector<Affine>(n));
    for (size_t i = 0; i < n; ++i) {
        if (lower[i].size() < i + 1) throw std::runtime_error("symmetricBlocks: row too short");
        for (size_t j = 0; j <= i; ++j) {
            grid[i][j] = lower[i][j];
            if (i != j) grid[j][i] = lower[i][j].transpose();
        }
    }
    return blocks(grid);
}

Affine hermitianEmbedding(const Affine& re, const Affine& im) {
    return blocks({{re, -im}, {im, re}});
}

Affine jacobiScaled(const Affine& F) {
    const VectorXd diag = F.constant().diagonal().cwiseAbs();
    VectorXd d = VectorXd::Ones(diag.size());
    for (int i = 0; i < diag.size(); ++i)
        if (diag(i) > 0.0) d(i) = 1.0 / std::sqrt(diag(i));
    const MatrixXd D = d.asDiagonal();
    return D * F * D;
}

std::string statusName(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Problem construction
// ---------------------------------------------------------------------------

Affine Problem::scalar(const std::string& name) {
    names_.push_back(name);
    return Affine::scalarVariable(static_cast<int>(names_.size()) - 1);
}

Affine Problem::matrix(const std::string& name, int rows, int cols) {
    Affine a(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) {
            names_.push_back(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]");
            MatrixXd E = MatrixXd::Zero(rows, cols);
            E(i, j) = 1.0;
            a.addTerm(static_cast<int>(names_.size()) - 1, E);
        }
    }
    return a;
}

Affine Problem::symmetric(const std::string& name, int n) {
    Affine a(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = j; i < n; ++i) {
            names_.push_back(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]");
            MatrixXd E = MatrixXd::Zero(n, n);
            E(i, j) = 1.0;
            E(j, i) = 1.0;
            a.addTerm(static_cast<int>(names_.size()) - 1, E);
        }
    }
    return a;
}

namespace {

double asymmetry(const MatrixXd& M) {
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    return (M - M.transpose()).cwiseAbs().maxCoeff() / scale;
}

} // namespace

void Problem::addLmi(const Affine& F, double margin, const std::string& label) {
    if (F.rows() != F.cols()) throw std::runtime_error("addLmi: matrix not square (" + label + ")");
    if (asymmetry(F.constant()) > 1e-10)
        throw std::runtime_error("addLmi: constant part not symmetric (" + label + ")");
    for (const auto& [i, M] : F.coefficients()) {
        if (asymmetry(M) > 1e-10)
            throw std::runtime_error("addLmi: coefficient of " + names_.at(i) + " not symmetric (" + label + ")");
    }
    cons_.push_back({F, margin, label});
}

void Problem::addNegativeLmi(const Affine& F, double margin, const std::string& label) {
    addLmi(-F, margin, label);
}

void Problem::minimize(const Affine& objective) {
    if (objective.rows() != 1 || objective.cols() != 1)
        throw std::runtime_error("minimize: objective must be 1x1");
    objective_ = objective;
}

std::vector<double> Problem::check(const VectorXd& y) const {
    std::vector<double> out;
    out.reserve(cons_.size());
    for (const auto& c : cons_) {
        MatrixXd F = c.F.value(y);
        const int n = static_cast<int>(F.rows());
        F = 0.5 * (F + F.transpose());
        double scale = c.F.constant().norm() + std::abs(c.margin) * std::sqrt(static_cast<double>(n));
        for (const auto& [i, M] : c.F.coefficients()) scale += std::abs(y(i)) * M.norm();
        scale = std::max(scale, 1e-12);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(F - c.margin * MatrixXd::Identity(n, n),
                                                   Eigen::EigenvaluesOnly);
        out.push_back(es.eigenvalues()(0) / scale);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Interior-point solver
//
// Data are brought into the standard dual form
//     max b'y  s.t.  S = C - sum_i y_i A_i >= 0
// with primal  min <C,X>  s.t.  <A_i,X> = b_i, X >= 0,
// and solved by an infeasible primal-dual path-following method with the
// HKM direction and Mehrotra predictor-corrector steps.
// ---------------------------------------------------------------------------

namespace {

struct BlockData {
    int n = 0;
    MatrixXd C;
    std::vector<int> vars;       // reduced variable indices present in this block
    std::vector<MatrixXd> A;     // matching coefficient matrices
};

double maxStep(const MatrixXd& X, const MatrixXd& dX) {
    Eigen::LLT<MatrixXd> llt(X);
    if (llt.info() != Eigen::Success) return 0.0;
    MatrixXd Linv_dX = llt.matrixL().solve(dX);
    MatrixXd W = llt.matrixL().solve(Linv_dX.transpose());
    W = 0.5 * (W + W.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(W, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

double inner(const MatrixXd& A, const MatrixXd& B) { return A.cwiseProduct(B).sum(); }

struct IpmOutcome {
    Status status;
    VectorXd y;
    int iterations;
    std::string message;
};

IpmOutcome runIpm(const std::vector<BlockData>& blocks, const VectorXd& b, const Options& opts) {
    const int m = static_cast<int>(b.size());
    const int K = static_cast<int>(blocks.size());

    int ntot = 0;
    double normC = 0.0;
    for (const auto& bl : blocks) {
        ntot += bl.n;
        normC += bl.C.squaredNorm();
    }
    normC = std::sqrt(normC);
    const double normb = b.norm();

    std::vector<MatrixXd> X(K), S(K);
    VectorXd y = VectorXd::Zero(m);
    for (int k = 0; k < K; ++k) {
        const int n = blocks[k].n;
        double maxA = 0.0;
        for (const auto& Ai : blocks[k].A) maxA = std::max(maxA, Ai.norm());
        const double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
        const double eta = std::max({10.0, std::sqrt(static_cast<double>(n)), blocks[k].C.norm(), maxA});
        X[k] = xi * MatrixXd::Identity(n, n);
        S[k] = eta * MatrixXd::Identity(n, n);
    }

    auto A_of = [&](const std::vector<MatrixXd>& Y) {
        VectorXd out = VectorXd::Zero(m);
        for (int k = 0; k < K; ++k) {
            const auto& bl = blocks[k];
            for (size_t t = 0; t < bl.vars.size(); ++t) out(bl.vars[t]) += inner(bl.A[t], Y[k]);
        }
        return out;
    };
    auto At_of = [&](const VectorXd& v, int k) {
        const auto& bl = blocks[k];
        MatrixXd out = MatrixXd::Zero(bl.n, bl.n);
        for (size_t t = 0; t < bl.vars.size(); ++t) out += v(bl.vars[t]) * bl.A[t];
        return out;
    };

    VectorXd best_y = y;
    double best_score = std::numeric_limits<double>::infinity();
    bool have_best = false;
    // Stalled iterates are usable when y is feasible and the gap is small.
    VectorXd stall_y;
    double stall_gap = std::numeric_limits<double>::infinity();

    for (int it = 0; it < opts.max_iterations; ++it) {
        // Residuals.
        VectorXd rp = b - A_of(X);
        std::vector<MatrixXd> Rd(K);
        double normRd = 0.0, xs = 0.0, pobj = 0.0;
        for (int k = 0; k < K; ++k) {
            Rd[k] = blocks[k].C - At_of(y, k) - S[k];
            normRd += Rd[k].squaredNorm();
            xs += inner(X[k], S[k]);
            pobj += inner(blocks[k].C, X[k]);
        }
        normRd = std::sqrt(normRd);
        const double dobj = b.dot(y);
        const double mu = xs / ntot;
        const double pinf = rp.norm() / (1.0 + normb);
        const double dinf = normRd / (1.0 + normC);
        const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        const double cgap = xs / (1.0 + std::abs(pobj) + std::abs(dobj));

        if (opts.verbose) {
            std::cerr << "ipm it " << it << " pobj " << pobj << " dobj " << dobj << " pinf " << pinf
                      << " dinf " << dinf << " gap " << relgap << " mu " << mu << "\n";
        }

        const double score = std::max({pinf, dinf, std::max(relgap, cgap)});
        if (dinf < 1e-5 && score < best_score) {
            best_score = score;
            best_y = y;
            have_best = true;
        }
        if (dinf < 1e-8 && pinf < 1e-6 && std::max(relgap, cgap) < std::min(stall_gap, 1e-2)) {
            stall_gap = std::max(relgap, cgap);
            stall_y = y;
        }
        if (pinf < opts.feasibility_tol && dinf < opts.feasibility_tol && relgap < opts.gap_tol &&
            cgap < opts.gap_tol) {
            return {Status::Optimal, y, it, "converged"};
        }

        // Infeasibility certificates.
        double normX = 0.0;
        for (int k = 0; k < K; ++k) normX += X[k].norm();
        if (pobj < 0.0) {
            VectorXd AX = A_of(X);
            if (AX.norm() / (-pobj) < 1e-8 && normX / (-pobj) < 1e10 && dinf > 1e-6) {
                return {Status::Infeasible, y, it, "primal ray certifies infeasible constraints"};
            }
        }
        if (dobj > 0.0) {
            double normAty = 0.0;
            for (int k = 0; k < K; ++k) normAty += (At_of(y, k) + S[k]).norm();
            if (normAty / dobj < 1e-8 && pinf > 1e-6) {
                return {Status::Unbounded, y, it, "dual ray certifies unbounded objective"};
            }
        }

        // Schur complement matrix.
        std::vector<MatrixXd> Sinv(K);
        bool chol_ok = true;
        for (int k = 0; k < K; ++k) {
            Eigen::LLT<MatrixXd> llt(S[k]);
            if (llt.info() != Eigen::Success) {
                chol_ok = false;
                break;
            }
            Sinv[k] = llt.solve(MatrixXd::Identity(blocks[k].n, blocks[k].n));
            Sinv[k] = 0.5 * (Sinv[k] + Sinv[k].transpose());
        }
        if (!chol_ok) break;

        MatrixXd M = MatrixXd::Zero(m, m);
        for (int k = 0; k < K; ++k) {
            const auto& bl = blocks[k];
            const int mk = static_cast<int>(bl.vars.size());
            std::vector<MatrixXd> G(mk);
            for (int t = 0; t < mk; ++t) G[t] = X[k] * bl.A[t] * Sinv[k];
            for (int s = 0; s < mk; ++s) {
                for (int t = s; t < mk; ++t) {
                    const double v = inner(bl.A[s], G[t]);
                    M(bl.vars[s], bl.vars[t]) += v;
                    if (s != t) M(bl.vars[t], bl.vars[s]) += v;
                }
            }
        }
        M = 0.5 * (M + M.transpose());
        Eigen::LDLT<MatrixXd> ldlt;
        {
            const double reg = 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
            ldlt.compute(M + reg * MatrixXd::Identity(m, m));
            if (ldlt.info() != Eigen::Success) break;
        }

        // XRdSinv terms are shared by predictor and corrector.
        VectorXd base = rp;
        std::vector<MatrixXd> XRdSinv(K);
        for (int k = 0; k < K; ++k) XRdSinv[k] = X[k] * Rd[k] * Sinv[k];
        base += A_of(XRdSinv);

        auto direction = [&](const std::vector<MatrixXd>& Rc, VectorXd& dy, std::vector<MatrixXd>& dX,
                             std::vector<MatrixXd>& dS) {
            VectorXd rhs = base - A_of(Rc);
            dy = ldlt.solve(rhs);
            for (int k = 0; k < K; ++k) {
                dS[k] = Rd[k] - At_of(dy, k);
                MatrixXd T = Rc[k] - X[k] * dS[k] * Sinv[k];
                dX[k] = 0.5 * (T + T.transpose());
            }
        };

        // Predictor.
        std::vector<MatrixXd> Rc(K), dX(K), dS(K);
        VectorXd dy;
        for (int k = 0; k < K; ++k) Rc[k] = -X[k];
        direction(Rc, dy, dX, dS);
        double ap = 1.0, ad = 1.0;
        for (int k = 0; k < K; ++k) {
            ap = std::min(ap, maxStep(X[k], dX[k]));
            ad = std::min(ad, maxStep(S[k], dS[k]));
        }
        double xs_aff = 0.0;
        for (int k = 0; k < K; ++k) xs_aff += inner(X[k] + ap * dX[k], S[k] + ad * dS[k]);
        double sigma = std::pow(std::max(0.0, xs_aff) / xs, 2.0 + std::min(ap, ad));
        sigma = std::clamp(sigma, 0.0, 1.0);
        if (pinf > 1e-2 || dinf > 1e-2) sigma = std::max(sigma, 0.1 * (1.0 - std::min(ap, ad)));

        // Corrector.
        for (int k = 0; k < K; ++k) Rc[k] = sigma * mu * Sinv[k] - X[k] - dX[k] * dS[k] * Sinv[k];
        std::vector<MatrixXd> dX2(K), dS2(K);
        VectorXd dy2;
        direction(Rc, dy2, dX2, dS2);

        const double gamma = 0.9 + 0.09 * std::min(ap, ad);
        double ap2 = std::numeric_limits<double>::infinity(), ad2 = ap2;
        for (int k = 0; k < K; ++k) {
            ap2 = std::min(ap2, maxStep(X[k], dX2[k]));
            ad2 = std::min(ad2, maxStep(S[k], dS2[k]));
        }
        ap2 = std::min(1.0, gamma * ap2);
        ad2 = std::min(1.0, gamma * ad2);
        if (!(ap2 > 1e-12) && !(ad2 > 1e-12)) break;

        for (int k = 0; k < K; ++k) {
            X[k] += ap2 * dX2[k];
            S[k] += ad2 * dS2[k];
            X[k] = 0.5 * (X[k] + X[k].transpose());
            S[k] = 0.5 * (S[k] + S[k].transpose());
        }
        y += ad2 * dy2;
    }

    if (have_best && best_score < 1e-5) {
        return {Status::Optimal, best_y, opts.max_iterations, "stalled at reduced accuracy"};
    }
    if (stall_y.size() > 0) {
        return {Status::Optimal, stall_y, opts.max_iterations,
                "stalled with relative gap " + std::to_string(stall_gap)};
    }
    return {Status::NumericalFailure, have_best ? best_y : y, opts.max_iterations, "no convergence"};
}

} // namespace

Result Problem::solve(const Options& opts) const {
    const int nvar = numVariables();
    Result res;
    res.y = VectorXd::Zero(nvar);

    // Objective vector.
    VectorXd c = VectorXd::Zero(nvar);
    for (const auto& [i, M] : objective_.coefficients()) c(i) += M(0, 0);

    // Block scaling.
    struct Raw {
        MatrixXd C;
        std::map<int, MatrixXd> A;
    };
    std::vector<Raw> raw;
    raw.reserve(cons_.size());
    for (const auto& con : cons_) {
        const int n = con.F.rows();
        Raw r;
        r.C = con.F.constant() - con.margin * MatrixXd::Identity(n, n);
        r.C = 0.5 * (r.C + r.C.transpose());
        double maxA = 0.0;
        for (const auto& [i, M] : con.F.coefficients()) {
            MatrixXd Ms = 0.5 * (M + M.transpose());
            if (Ms.cwiseAbs().maxCoeff() == 0.0) continue;
            r.A[i] = -Ms;
            maxA = std::max(maxA, Ms.norm());
        }
        // Normalize the constant part; variable scaling below rebalances the coefficients.
        double s = r.C.norm();
        if (s < 1e-8 * maxA) s = maxA;
        if (s <= 0.0 || !opts.auto_scale) s = 1.0;
        r.C /= s;
        for (auto& [i, M] : r.A) M /= s;
        raw.push_back(std::move(r));
    }

    // Variable scaling and elimination of unused variables.
    VectorXd dscale = VectorXd::Zero(nvar);
    for (const auto& r : raw)
        for (const auto& [i, M] : r.A) dscale(i) = std::max(dscale(i), opts.auto_scale ? M.norm() : 1.0);
    std::vector<int> to_reduced(nvar, -1), to_full;
    for (int i = 0; i < nvar; ++i) {
        if (dscale(i) > 0.0) {
            to_reduced[i] = static_cast<int>(to_full.size());
            to_full.push_back(i);
        } else if (c(i) != 0.0) {
            res.status = Status::Unbounded;
            res.message = "variable " + names_[i] + " is unconstrained but in the objective";
            return res;
        }
    }
    const int m = static_cast<int>(to_full.size());

    std::vector<BlockData> blocks;
    blocks.reserve(raw.size());
    for (const auto& r : raw) {
        BlockData bl;
        bl.n = static_cast<int>(r.C.rows());
        bl.C = r.C;
        for (const auto& [i, M] : r.A) {
            bl.vars.push_back(to_reduced[i]);
            bl.A.push_back(M / dscale(i));
        }
        blocks.push_back(std::move(bl));
    }
    VectorXd b(m);
    for (int t = 0; t < m; ++t) b(t) = -c(to_full[t]) / dscale(to_full[t]);
    const double bscale = std::max(1e-300, b.cwiseAbs().maxCoeff());
    if (b.cwiseAbs().maxCoeff() > 0.0) b /= bscale;

    if (m == 0) {
        // Pure feasibility of constant matrices.
        res.status = Status::Optimal;
        for (const auto& bl : blocks) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(bl.C, Eigen::EigenvaluesOnly);
            if (es.eigenvalues()(0) < -opts.recheck_margin) res.status = Status::Infeasible;
        }
        res.objective = objective_.constant()(0, 0);
        res.relative_min_eig = check(res.y);
        return res;
    }

    IpmOutcome out = runIpm(blocks, b, opts);
    for (int t = 0; t < m; ++t) res.y(to_full[t]) = out.y(t) / dscale(to_full[t]);
    res.status = out.status;
    res.iterations = out.iterations;
    res.message = out.message;
    res.objective = objective_.value(res.y)(0, 0);
    res.relative_min_eig = check(res.y);

    if (res.status == Status::Optimal) {
        for (size_t k = 0; k < cons_.size(); ++k) {
            if (res.relative_min_eig[k] < -opts.recheck_margin) {
                res.status = Status::NumericalFailure;
                res.message = "independent eigenvalue re-check failed for constraint '" + cons_[k].label +
                              "' (relative min eig " + std::to_string(res.relative_min_eig[k]) + ")";
                break;
            }
        }
    }
    return res;
}

} // namespace sdp
} // namespace dualctl
