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
#include "dualctl/experiments.hpp"
#include "dualctl/hinf.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace dualctl {

namespace {

// Counter layout for per-(alpha, trial) streams.
std::uint64_t key(std::uint64_t group, std::uint64_t trial) { return (group << 32) | trial; }

double inputEnergy(const std::vector<double>& u) {
    double e = 0.0;
    for (double v : u) e += v * v;
    return e;
}

bool isSorted(const std::vector<double>& v) { return std::is_sorted(v.begin(), v.end()); }

} // namespace

void ExperimentConfig::resolve() {
    if (A.size() == 0 || A.rows() != A.cols()) throw std::invalid_argument("config: A must be square");
    if (B.rows() != A.rows() || B.cols() != 1) throw std::invalid_argument("config: B must be n_x x 1");
    if (!(sigma_w >= 0.0)) throw std::invalid_argument("config: sigma_w must be nonnegative");
    const int n = nphi();
    if (D0.size() == 0) D0 = 1e3 * MatrixXd::Identity(n, n);
    if (D0.rows() != n || D0.cols() != n) throw std::invalid_argument("config: D0 must be n_phi x n_phi");
    if (prior_center && (prior_center->rows() != nx() || prior_center->cols() != n))
        throw std::invalid_argument("config: prior center must be n_x x n_phi");
    if (frequencies.empty())
        for (int i = 0; i < n; ++i) frequencies.push_back(i / (2.0 * n));
    if (goal.size() == 0) {
        goal = MatrixXd::Zero(n, n);
        goal(0, 0) = 1e7;
    }
    if (goal.rows() != n || goal.cols() != n) throw std::invalid_argument("config: goal must be n_phi x n_phi");
    if (perf.C.size() == 0) perf = PerformanceIndex::stateInput(nx());
    if (perf.C.cols() != nx()) throw std::invalid_argument("config: performance C must have n_x columns");
    if (T < 1) throw std::invalid_argument("config: T must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("config: delta must lie in (0, 1)");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("config: beta must lie in (0, 1)");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("config: eps must lie in (0, 1)");
    if (trials < 1) throw std::invalid_argument("config: trials must be at least 1");
    if (threads < 1) throw std::invalid_argument("config: threads must be at least 1");
    if (!isSorted(alphas) || !isSorted(gamma_p_list)) throw std::invalid_argument("config: sweep lists must be sorted");
    for (double a : alphas)
        if (!(a > 0.0)) throw std::invalid_argument("config: alphas must be positive");
    grid().validate(n);
}

std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t tag, std::uint64_t counter) {
    std::mt19937_64 rng = makeStream(master, tag, counter);
    return rng();
}

GaussianPrior trialPrior(const ExperimentConfig& cfg, const MatrixXd& D0, std::uint64_t counter) {
    MatrixXd center;
    if (cfg.prior_center) {
        center = *cfg.prior_center;
    } else {
        std::mt19937_64 rng = makeStream(cfg.seed, streams::kPriorCenter, counter);
        center = sampleUniformEllipsoid(credibility_region(stackAB(cfg.A, cfg.B), D0, cfg.delta), rng);
    }
    return GaussianPrior::fromShape(center, D0, cfg.delta);
}

Trajectory explorationRun(const ExperimentConfig& cfg, const std::vector<double>& inputs, std::uint64_t counter) {
    std::mt19937_64 rng = makeStream(cfg.seed, streams::kNoise, counter);
    return simulate(cfg.truth(), inputs, VectorXd::Zero(cfg.nx()), rng);
}

bool dominates(const MatrixXd& D_T, const MatrixXd& goal, double rel_tol) {
    const MatrixXd d = D_T - goal;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (d + d.transpose()), Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, std::max(D_T.norm(), goal.norm()));
    return es.eigenvalues()(0) >= -rel_tol * scale;
}

TrialResult run_algorithm1(const ExperimentConfig& cfg, std::uint64_t trial) {
    TrialResult res;
    res.dual = std::isfinite(cfg.gamma_p);
    res.gamma_p = cfg.gamma_p;
    auto fail = [&](const std::string& status, const std::string& stage, const std::string& msg) {
        res.status = status;
        res.stage = stage;
        res.message = msg;
        return res;
    };
    const FrequencyGrid grid = cfg.grid();

    try {
        res.prior = trialPrior(cfg, cfg.D0, trial);
    } catch (const std::exception& e) {
        return fail("error", "prior", e.what());
    }

    try {
        res.constants = computeConstants(res.prior, grid, cfg.sigma_w, cfg.beta, cfg.eps,
                                         deriveSeed(cfg.seed, streams::kScenarioV, trial));
    } catch (const std::exception& e) {
        return fail("error", "constants", e.what());
    }
    if (!(res.constants.gamma_v1 < 0.5))
        return fail("infeasible", "constants", "prior uncertainty too large for exploration guarantees");

    MatrixXd Dbar;
    try {
        if (res.dual) {
            const DualResult d = solve_dual_problem(res.prior, grid, res.constants, cfg.sigma_w, cfg.perf, cfg.gamma_p);
            if (d.status != sdp::Status::Optimal) return fail("infeasible", "synthesis", d.message);
            res.plan = d.plan;
            res.controller = d.controller;
            res.no_exploration = d.no_exploration;
            Dbar = d.plan.Dbar_T;
        } else {
            const ExplorationResult e =
                solve_exploration_problem(res.prior, grid, res.constants, cfg.sigma_w, cfg.goal);
            if (e.status != sdp::Status::Optimal) return fail("infeasible", "exploration", e.message);
            res.plan = e.plan;
            Dbar = cfg.goal;
        }
    } catch (const std::exception& e) {
        return fail("error", "synthesis", e.what());
    }
    res.gamma_e = res.plan.gamma_e;

    const std::vector<double> u = generate_input(res.plan);
    res.energy = inputEnergy(u);
    MapResult post;
    try {
        const Trajectory tr = explorationRun(cfg, u, trial);
        post = map_estimate(res.prior, Dataset::fromTrajectory(tr), cfg.sigma_w);
    } catch (const std::exception& e) {
        return fail("error", "estimation", e.what());
    }
    res.D_T = post.D_T;
    res.DT11 = post.D_T(0, 0);
    res.goal_met = dominates(post.D_T, Dbar);
    res.theta_hat = post.theta_hat;
    res.theta_tilde = project_parameters(post.theta_hat, priorRegion(res.prior), res.prior.D0 + Dbar);
    if (!res.dual) return res;

    try {
        const int nx = cfg.nx();
        res.K = extract_controller(res.controller, res.prior.Ahat(), res.prior.Bhat(), res.theta_tilde.leftCols(nx),
                                   res.theta_tilde.rightCols(1));
    } catch (const std::exception& e) {
        return fail("error", "controller", e.what());
    }
    try {
        res.hinf_truth = closedLoopHinf(cfg.A, cfg.B, res.K, cfg.perf);
    } catch (const std::exception& e) {
        res.hinf_truth = std::numeric_limits<double>::infinity();
        return fail("error", "feedback", e.what());
    }
    return res;
}

std::vector<double> scaledRandomInput(int T, double energy, std::mt19937_64& rng) {
    if (energy < 0.0) throw std::invalid_argument("scaledRandomInput: negative energy");
    std::normal_distribution<double> n01;
    std::vector<double> u(T);
    for (double& v : u) v = n01(rng);
    if (energy == 0.0) return std::vector<double>(T, 0.0);
    const double s = std::sqrt(energy / inputEnergy(u));
    for (double& v : u) v *= s;
    return u;
}

TrialResult random_exploration_baseline(const ExperimentConfig& cfg, const GaussianPrior& prior, double energy_budget,
                                        std::uint64_t trial) {
    TrialResult res;
    res.prior = prior;
    std::mt19937_64 rng = makeStream(cfg.seed, streams::kRandomInput, trial);
    const std::vector<double> u = scaledRandomInput(cfg.T, energy_budget, rng);
    res.energy = inputEnergy(u);
    const Trajectory tr = explorationRun(cfg, u, trial);
    const MapResult post = map_estimate(prior, Dataset::fromTrajectory(tr), cfg.sigma_w);
    res.D_T = post.D_T;
    res.DT11 = post.D_T(0, 0);
    res.goal_met = dominates(post.D_T, cfg.goal);
    res.theta_hat = post.theta_hat;
    return res;
}

void parallelFor(int n, int threads, const std::function<void(int)>& f) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (int i = next++; i < n; i = next++) f(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

Fig3Table fig3_harness(const ExperimentConfig& cfg) {
    const FrequencyGrid grid = cfg.grid();
    const int na = static_cast<int>(cfg.alphas.size());
    const double g11 = cfg.goal(0, 0) > 0.0 ? cfg.goal(0, 0) : 1.0;
    std::vector<Fig3Row> targeted(na * cfg.trials), random(na * cfg.trials);
    std::vector<char> feasible(na * cfg.trials, 1);

    parallelFor(na * cfg.trials, cfg.threads, [&](int job) {
        const int ai = job / cfg.trials, t = job % cfg.trials;
        const double alpha = cfg.alphas[ai];
        const std::uint64_t k = key(ai, t);
        Fig3Row& tr = targeted[job];
        Fig3Row& rr = random[job];
        tr = {alpha, t, "targeted", 0.0, 0.0, 0.0, false, "ok"};
        rr = {alpha, t, "random", 0.0, 0.0, 0.0, false, "ok"};

        const GaussianPrior prior = trialPrior(cfg, alpha * cfg.D0, k);
        const BoundConstants bc =
            computeConstants(prior, grid, cfg.sigma_w, cfg.beta, cfg.eps, deriveSeed(cfg.seed, streams::kScenarioV, k));
        if (!(bc.gamma_v1 < 0.5)) {
            feasible[job] = 0;
            tr.status = rr.status = "infeasible";
            return;
        }
        const ExplorationResult ex = solve_exploration_problem(prior, grid, bc, cfg.sigma_w, cfg.goal);
        if (ex.status != sdp::Status::Optimal) {
            feasible[job] = 0;
            tr.status = rr.status = "infeasible";
            return;
        }
        const std::vector<double> u = generate_input(ex.plan);
        const Trajectory run = explorationRun(cfg, u, k);
        const MapResult post = map_estimate(prior, Dataset::fromTrajectory(run), cfg.sigma_w);
        tr.DT11 = post.D_T(0, 0);
        tr.energy = inputEnergy(u);
        tr.goal_ratio = tr.DT11 / g11;
        tr.goal_met = dominates(post.D_T, cfg.goal);

        const TrialResult rnd = random_exploration_baseline(cfg, prior, tr.energy, k);
        rr.DT11 = rnd.DT11;
        rr.energy = rnd.energy;
        rr.goal_ratio = rr.DT11 / g11;
        rr.goal_met = rnd.goal_met;
    });

    Fig3Table table;
    for (int ai = 0; ai < na; ++ai) {
        Fig3Summary s;
        s.alpha = cfg.alphas[ai];
        std::vector<double> dt, dr;
        for (int t = 0; t < cfg.trials; ++t) {
            const int job = ai * cfg.trials + t;
            table.rows.push_back(targeted[job]);
            table.rows.push_back(random[job]);
            if (!feasible[job]) {
                s.feasible = false;
                continue;
            }
            dt.push_back(targeted[job].DT11);
            dr.push_back(random[job].DT11);
            s.goal_met += targeted[job].goal_met ? 1 : 0;
        }
        s.trials = static_cast<int>(dt.size());
        auto meanStd = [](const std::vector<double>& v, double& m, double& sd) {
            m = sd = 0.0;
            if (v.empty()) return;
            for (double x : v) m += x;
            m /= v.size();
            for (double x : v) sd += (x - m) * (x - m);
            sd = v.size() > 1 ? std::sqrt(sd / (v.size() - 1)) : 0.0;
        };
        meanStd(dt, s.targeted_mean, s.targeted_std);
        meanStd(dr, s.random_mean, s.random_std);
        s.ratio = s.random_mean > 0.0 ? s.targeted_mean / s.random_mean : 0.0;
        table.summary.push_back(s);
    }
    return table;
}

std::vector<double> defaultGammaSweep(double nominal, double limit, double robust) {
    std::vector<double> g;
    // Probes below the limit; the lowest sits just above the nominal level.
    g.push_back(nominal + 0.5 * (limit - nominal));
    g.push_back(limit - 1e-3 * (robust - limit) - 1e-6);
    const int inner = 6;
    for (int i = 1; i <= inner; ++i) g.push_back(limit + (robust - limit) * i / (inner + 1.0));
    g.push_back(robust);
    std::sort(g.begin(), g.end());
    return g;
}

Fig4Table fig4_harness(const ExperimentConfig& cfg) {
    const FrequencyGrid grid = cfg.grid();
    Fig4Table table;
    const GaussianPrior prior = trialPrior(cfg, cfg.D0, 0);
    const BoundConstants bc = computeConstants(prior, grid, cfg.sigma_w, cfg.beta, cfg.eps,
                                               deriveSeed(cfg.seed, streams::kScenarioV, 0));
    table.nominal = h_infinity_baseline(cfg.A, cfg.B, cfg.perf, BaselineMode::Nominal).controller.gamma_p;
    const GsDesign robust = h_infinity_baseline(prior.Ahat(), prior.Bhat(), cfg.perf, BaselineMode::Robust, prior.D0);
    table.robust = robust.controller.gamma_p;
    const GsDesign lim = schedulingLimit(prior.Ahat(), prior.Bhat(), cfg.perf, prior.D0);
    table.limit = lim.feasible ? lim.controller.gamma_p : kNaN;

    const std::vector<double> levels = cfg.gamma_p_list.empty()
                                           ? defaultGammaSweep(table.nominal, std::isfinite(table.limit) ? table.limit : table.nominal, table.robust)
                                           : cfg.gamma_p_list;
    DualSearchOptions opts = DualSearchOptions::defaults();
    opts.robust = robust;
    for (double gp : levels) {
        Fig4Row row;
        row.gamma_p = gp;
        const DualResult d = solve_dual_problem(prior, grid, bc, cfg.sigma_w, cfg.perf, gp, opts);
        if (d.status == sdp::Status::Optimal) {
            row.status = "optimal";
            row.gamma_e = d.plan.gamma_e;
            row.multipliers = d.multipliers;
            row.no_exploration = d.no_exploration;
            if (!d.no_exploration) opts.extra_starts.push_back(d.multipliers);
        } else {
            row.status = "infeasible";
            row.gamma_e = std::numeric_limits<double>::infinity();
        }
        table.rows.push_back(row);
    }
    return table;
}

ValidationReport validate_closed_loop(const GainScheduledController& ctrl, const GaussianPrior& prior,
                                      const MatrixXd& theta_tilde, const MatrixXd& Dbar, const PerformanceIndex& perf,
                                      int samples, std::uint64_t seed, bool outside) {
    ValidationReport rep;
    rep.gamma_p = ctrl.gamma_p;
    const int nx = prior.nx();
    const MatrixXd K = extract_controller(ctrl, prior.Ahat(), prior.Bhat(), theta_tilde.leftCols(nx),
                                          theta_tilde.rightCols(1));
    const UncertaintyEllipsoid prior_set = priorRegion(prior);
    MatrixXd shape = prior.D0 + Dbar;
    if (outside) shape /= 16.0;
    const UncertaintyEllipsoid post_set = credibility_region(theta_tilde, shape, prior.delta);
    std::mt19937_64 rng = makeStream(seed, streams::kValidation, outside ? 1 : 0);
    long attempts = 0;
    while (static_cast<int>(rep.plants.size()) < samples) {
        if (++attempts > 1000L * samples) throw std::runtime_error("validate_closed_loop: sampling region empty");
        const MatrixXd th = sampleUniformEllipsoid(post_set, rng);
        if (!outside && !prior_set.contains(th)) continue;
        double g;
        try {
            g = closedLoopHinf(th.leftCols(nx), th.rightCols(1), K, perf);
        } catch (const std::exception&) {
            g = std::numeric_limits<double>::infinity();
            ++rep.unstable;
        }
        rep.plants.push_back(th);
        rep.gains.push_back(g);
        rep.max_gain = std::max(rep.max_gain, g);
        if (!(g <= rep.gamma_p + rep.slack)) ++rep.violations;
    }
    return rep;
}

int guaranteeHits(const ExperimentConfig& cfg, const GaussianPrior& prior, const ExplorationPlan& plan,
                  const MatrixXd& goal, int runs, std::uint64_t seed) {
    const std::vector<double> u = generate_input(plan);
    const SystemModel truth = cfg.truth();
    int hits = 0;
    for (int r = 0; r < runs; ++r) {
        std::mt19937_64 rng = makeStream(seed, streams::kNoise, key(7, r));
        const Trajectory tr = simulate(truth, u, VectorXd::Zero(cfg.nx()), rng);
        const MatrixXd D_T = tr.gram() / (prior.c_delta * cfg.sigma_w * cfg.sigma_w);
        hits += dominates(D_T, goal) ? 1 : 0;
    }
    return hits;
}

double credibilityCoverage(const ExperimentConfig& cfg, int trials, std::uint64_t seed) {
    const GaussianPrior prior = GaussianPrior::fromShape(stackAB(cfg.A, cfg.B), cfg.D0, cfg.delta);
    const int nx = cfg.nx();
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng = makeStream(seed, streams::kTruth, t);
        const MatrixXd theta = samplePrior(prior, rng);
        const SystemModel model(theta.leftCols(nx), theta.rightCols(1), cfg.sigma_w);
        const std::vector<double> u = scaledRandomInput(cfg.T, cfg.T, rng);
        const Trajectory tr = simulate(model, u, VectorXd::Zero(nx), rng);
        const MapResult post = map_estimate(prior, Dataset::fromTrajectory(tr), cfg.sigma_w);
        hits += credibility_region(post.theta_hat, post.D_post, cfg.delta).contains(theta) ? 1 : 0;
    }
    return static_cast<double>(hits) / trials;
}

} // namespace dualctl
