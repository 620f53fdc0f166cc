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
#include "dualctl/model.hpp"
#include "dualctl/hinf.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace dualctl {

std::mt19937_64 makeStream(std::uint64_t master, std::uint64_t stream, std::uint64_t counter) {
    // seed_seq mixes all 32-bit words, so nearby ids give unrelated streams.
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32)};
    return std::mt19937_64(seq);
}

SystemModel::SystemModel(MatrixXd A_, MatrixXd B_, double sigma) : A(std::move(A_)), B(std::move(B_)), sigma_w(sigma) {
    validate();
}

void SystemModel::validate() const {
    if (A.rows() == 0 || A.rows() != A.cols()) throw std::invalid_argument("SystemModel: A must be square");
    if (B.rows() != A.rows() || B.cols() != 1) throw std::invalid_argument("SystemModel: B must be n_x x 1");
    if (!(sigma_w >= 0.0)) throw std::invalid_argument("SystemModel: sigma_w must be nonnegative");
}

void PerformanceIndex::validate(int nx) const {
    if (C.cols() != nx) throw std::invalid_argument("PerformanceIndex: C has wrong column count");
    if (Du.rows() != C.rows() || Du.cols() != 1) throw std::invalid_argument("PerformanceIndex: D_u must be n_z x 1");
    if (Dw.rows() != C.rows() || Dw.cols() != nx) throw std::invalid_argument("PerformanceIndex: D_w must be n_z x n_x");
    if (Rp.size() > 0) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(Rp, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) <= 0.0) throw std::invalid_argument("PerformanceIndex: R_p must be positive definite");
    }
}

PerformanceIndex PerformanceIndex::l2Gain(const MatrixXd& C, const MatrixXd& Du, const MatrixXd& Dw, double gamma) {
    PerformanceIndex p;
    p.C = C;
    p.Du = Du;
    p.Dw = Dw;
    const int nz = static_cast<int>(C.rows());
    const int nw = static_cast<int>(C.cols());
    p.Qp = -gamma * MatrixXd::Identity(nw, nw);
    p.Sp = MatrixXd::Zero(nw, nz);
    p.Rp = MatrixXd::Identity(nz, nz) / gamma;
    return p;
}

PerformanceIndex PerformanceIndex::stateInput(int nx, double gamma) {
    MatrixXd C = MatrixXd::Zero(nx + 1, nx);
    C.topRows(nx).setIdentity();
    MatrixXd Du = MatrixXd::Zero(nx + 1, 1);
    Du(nx, 0) = 1.0;
    return l2Gain(C, Du, MatrixXd::Zero(nx + 1, nx), gamma);
}

VectorXd Trajectory::regressor(int k) const {
    VectorXd phi(x[k].size() + 1);
    phi << x[k], u[k];
    return phi;
}

MatrixXd Trajectory::gram() const {
    const int n = static_cast<int>(x.front().size()) + 1;
    MatrixXd G = MatrixXd::Zero(n, n);
    for (int k = 0; k < horizon(); ++k) {
        VectorXd phi = regressor(k);
        G.noalias() += phi * phi.transpose();
    }
    return G;
}

Trajectory simulateWithNoise(const SystemModel& model, const std::vector<double>& inputs, const VectorXd& x0,
                             const std::vector<VectorXd>& noise) {
    model.validate();
    const int T = static_cast<int>(inputs.size());
    if (T < 1) throw std::invalid_argument("simulate: need at least one input");
    if (x0.size() != model.nx()) throw std::invalid_argument("simulate: x0 has wrong size");
    if (static_cast<int>(noise.size()) != T) throw std::invalid_argument("simulate: noise length mismatch");
    Trajectory tr;
    tr.u = inputs;
    tr.w = noise;
    tr.x.reserve(T + 1);
    tr.x.push_back(x0);
    for (int k = 0; k < T; ++k) {
        if (noise[k].size() != model.nx()) throw std::invalid_argument("simulate: noise has wrong size");
        tr.x.push_back(model.A * tr.x[k] + model.B.col(0) * inputs[k] + noise[k]);
    }
    return tr;
}

Trajectory simulate(const SystemModel& model, const std::vector<double>& inputs, const VectorXd& x0,
                    std::mt19937_64& rng) {
    model.validate();
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<VectorXd> w(inputs.size(), VectorXd::Zero(model.nx()));
    for (auto& wk : w)
        for (int i = 0; i < wk.size(); ++i) wk(i) = model.sigma_w * nd(rng);
    return simulateWithNoise(model, inputs, x0, w);
}

Trajectory simulate(const SystemModel& model, const std::vector<double>& inputs, const VectorXd& x0,
                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return simulate(model, inputs, x0, rng);
}

Trajectory simulateFeedback(const SystemModel& model, const MatrixXd& K, const VectorXd& x0,
                            const std::vector<VectorXd>& noise) {
    model.validate();
    if (K.rows() != 1 || K.cols() != model.nx()) throw std::invalid_argument("simulateFeedback: K must be 1 x n_x");
    Trajectory tr;
    tr.w = noise;
    tr.x.push_back(x0);
    for (size_t k = 0; k < noise.size(); ++k) {
        const double u = (K * tr.x[k])(0);
        tr.u.push_back(u);
        tr.x.push_back(model.A * tr.x[k] + model.B.col(0) * u + noise[k]);
    }
    return tr;
}

VectorXd performance_output(const PerformanceIndex& perf, const VectorXd& x, double u, const VectorXd& w) {
    if (x.size() != perf.C.cols() || w.size() != perf.Dw.cols() || perf.Du.cols() != 1)
        throw std::invalid_argument("performance_output: dimension mismatch");
    return perf.C * x + perf.Du.col(0) * u + perf.Dw * w;
}

double spectralRadius(const MatrixXd& A) {
    Eigen::EigenSolver<MatrixXd> es(A, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool isSchur(const MatrixXd& A) { return spectralRadius(A) < 1.0; }

double sequenceGain(const SystemModel& model, const MatrixXd& K, const PerformanceIndex& perf,
                    const std::vector<VectorXd>& w) {
    Trajectory tr = simulateFeedback(model, K, VectorXd::Zero(model.nx()), w);
    double zz = 0.0, ww = 0.0;
    for (size_t k = 0; k < w.size(); ++k) {
        zz += performance_output(perf, tr.x[k], tr.u[k], w[k]).squaredNorm();
        ww += w[k].squaredNorm();
    }
    if (ww == 0.0) return 0.0;
    return std::sqrt(zz / ww);
}

double empirical_l2_gain(const SystemModel& model, const MatrixXd& K, const PerformanceIndex& perf, int horizon,
                         std::uint64_t seed, int samples) {
    const int n = model.nx();
    const MatrixXd Acl = model.A + model.B * K;
    if (!isSchur(Acl)) throw std::runtime_error("closed loop not Schur");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    double best = 0.0;

    for (int i = 0; i < n; ++i) {
        std::vector<VectorXd> w(horizon, VectorXd::Zero(n));
        w[0](i) = 1.0;
        best = std::max(best, sequenceGain(model, K, perf, w));
    }
    for (int s = 0; s < samples; ++s) {
        std::vector<VectorXd> w(horizon, VectorXd::Zero(n));
        for (auto& wk : w)
            for (int i = 0; i < n; ++i) wk(i) = nd(rng);
        best = std::max(best, sequenceGain(model, K, perf, w));
    }

    // Sinusoid along the top singular direction at the peak frequency.
    const MatrixXd Ccl = perf.C + perf.Du * K;
    const PeakFrequency pk = peakGainFrequency(Acl, MatrixXd::Identity(n, n), Ccl, perf.Dw, 512);
    std::vector<VectorXd> w(horizon, VectorXd::Zero(n));
    for (int k = 0; k < horizon; ++k) {
        const std::complex<double> e = std::exp(std::complex<double>(0.0, pk.theta * k));
        w[k] = (pk.direction * e).real();
    }
    best = std::max(best, sequenceGain(model, K, perf, w));
    return best;
}

} // namespace dualctl
