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
#include "dualctl/cli.hpp"
#include "dualctl/config.hpp"
#include "dualctl/experiments.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace dualctl {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Csv {
public:
    Csv(const fs::path& path, const std::string& header) : path_(path), out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        out_ << header << "\n";
    }
    template <class... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << "\n";
    }
    const fs::path& path() const { return path_; }

private:
    static std::string cell(double v) { return num(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(bool b) { return b ? "1" : "0"; }

    fs::path path_;
    std::ofstream out_;
};

struct Outputs {
    fs::path dir;
    std::vector<std::string> files;
    fs::path add(const std::string& name) {
        files.push_back(name);
        return dir / name;
    }
};

void writePlan(Outputs& o, const ExplorationPlan& plan) {
    Csv csv(o.add("plan.csv"), "omega,bin,amplitude");
    for (int i = 0; i < plan.grid.size(); ++i) csv.row(plan.grid.omega(i), plan.grid.bins[i], plan.amplitudes(i));
}

void writeManifest(const Outputs& o, const ExperimentConfig& cfg, const std::string& command) {
    nlohmann::json m;
    m["command"] = command;
    m["outputs"] = o.files;
    m["note"] = "resolved configuration; rerun with --config on this file";
    std::ofstream(o.dir / "manifest.json") << configToJson(cfg, m.dump());
}

int runExplore(const ExperimentConfig& c, Outputs& o, std::ostream& out) {
    ExperimentConfig cfg = c;
    cfg.gamma_p = kNaN;
    const TrialResult r = run_algorithm1(cfg, 0);
    Csv csv(o.add("explore.csv"), "status,stage,gamma_e,energy,DT11,goal_met,gamma_v1,l");
    csv.row(r.status, r.stage, r.gamma_e, r.energy, r.DT11, r.goal_met, r.constants.gamma_v1, r.constants.l);
    if (r.status == "ok") writePlan(o, r.plan);
    out << "explore: " << r.status << (r.message.empty() ? "" : " (" + r.message + ")") << "\n"
        << "  gamma_e " << num(r.gamma_e) << "  energy " << num(r.energy) << "  D_T,11 " << num(r.DT11)
        << "  goal met " << (r.goal_met ? "yes" : "no") << "\n"
        << "  gamma_v1 " << num(r.constants.gamma_v1) << "  l " << num(r.constants.l) << "  guarantee level 1-2delta "
        << num(1.0 - 2.0 * cfg.delta) << "\n";
    if (r.status == "infeasible") return kExitInfeasible;
    return r.status == "ok" ? kExitOk : kExitError;
}

int runDesign(const ExperimentConfig& cfg, Outputs& o, std::ostream& out) {
    const GaussianPrior prior = trialPrior(cfg, cfg.D0, 0);
    const GsDesign nom = h_infinity_baseline(cfg.A, cfg.B, cfg.perf, BaselineMode::Nominal);
    const GsDesign rob = h_infinity_baseline(prior.Ahat(), prior.Bhat(), cfg.perf, BaselineMode::Robust, prior.D0);
    const GsDesign lim = schedulingLimit(prior.Ahat(), prior.Bhat(), cfg.perf, prior.D0);
    Csv csv(o.add("design.csv"), "design,gamma,lambda_s,lambda_u,feasible");
    csv.row("nominal", nom.controller.gamma_p, nom.controller.lambda_s, nom.controller.lambda_u, nom.feasible);
    csv.row("robust", rob.controller.gamma_p, rob.controller.lambda_s, rob.controller.lambda_u, rob.feasible);
    csv.row("scheduling_limit", lim.feasible ? lim.controller.gamma_p : kNaN, lim.controller.lambda_s,
            lim.controller.lambda_u, lim.feasible);
    out << "design: nominal " << num(nom.controller.gamma_p) << "  robust " << num(rob.controller.gamma_p)
        << "  scheduling limit " << (lim.feasible ? num(lim.controller.gamma_p) : "none") << "\n";
    return kExitOk;
}

int runDual(const ExperimentConfig& cfg, Outputs& o, std::ostream& out, std::ostream& err, bool validate) {
    if (!std::isfinite(cfg.gamma_p)) {
        err << "error: the dual and validate commands need gamma_p in the config\n";
        return kExitError;
    }
    const TrialResult r = run_algorithm1(cfg, 0);
    Csv csv(o.add("dual.csv"), "status,stage,gamma_p,gamma_e,energy,no_exploration,lambda_s,lambda_u,DT11,hinf_truth");
    csv.row(r.status, r.stage, r.gamma_p, r.gamma_e, r.energy, r.no_exploration, r.controller.lambda_s,
            r.controller.lambda_u, r.DT11, r.hinf_truth);
    if (r.status == "infeasible") {
        out << "dual: performance target unreachable (" << r.message << ")\n";
        return kExitInfeasible;
    }
    if (r.status != "ok") {
        err << "error: stage " << r.stage << ": " << r.message << "\n";
        return kExitError;
    }
    writePlan(o, r.plan);
    out << "dual: gamma_p " << num(r.gamma_p) << "  gamma_e " << num(r.gamma_e)
        << (r.no_exploration ? "  (no exploration needed)" : "") << "\n"
        << "  closed-loop gain on the true system " << num(r.hinf_truth) << "\n"
        << "  guarantee levels: excitation 1-2delta = " << num(1.0 - 2.0 * cfg.delta)
        << ", performance 1-3delta = " << num(1.0 - 3.0 * cfg.delta) << "\n";
    if (!validate) return kExitOk;

    const ValidationReport rep = validate_closed_loop(r.controller, r.prior, r.theta_tilde, r.plan.Dbar_T, cfg.perf,
                                                      cfg.validation_samples, cfg.seed);
    Csv v(o.add("validation.csv"), "sample,gain,within");
    for (std::size_t i = 0; i < rep.gains.size(); ++i)
        v.row(static_cast<int>(i), rep.gains[i], rep.gains[i] <= rep.gamma_p + rep.slack);
    out << "validate: " << rep.gains.size() << " plants, max gain " << num(rep.max_gain) << ", violations "
        << rep.violations << "\n";
    return rep.violations == 0 ? kExitOk : kExitError;
}

int runFig3(const ExperimentConfig& cfg, Outputs& o, std::ostream& out) {
    const Fig3Table t = fig3_harness(cfg);
    Csv csv(o.add("fig3.csv"), "alpha,trial,method,DT11,energy,goal_met,status");
    for (const auto& r : t.rows) csv.row(r.alpha, r.trial, r.method, r.DT11, r.energy, r.goal_met, r.status);
    Csv s(o.add("fig3_summary.csv"),
          "alpha,feasible,trials,goal_met,targeted_mean,targeted_std,random_mean,random_std,ratio");
    out << "fig3:\n";
    for (const auto& r : t.summary) {
        s.row(r.alpha, r.feasible, r.trials, r.goal_met, r.targeted_mean, r.targeted_std, r.random_mean, r.random_std,
              r.ratio);
        out << "  alpha " << num(r.alpha) << (r.feasible ? "" : " (infeasible trials)") << ": goal met " << r.goal_met
            << "/" << r.trials << ", mean D_T,11 targeted " << num(r.targeted_mean) << ", random "
            << num(r.random_mean) << "\n";
    }
    return kExitOk;
}

int runFig4(const ExperimentConfig& cfg, Outputs& o, std::ostream& out) {
    const Fig4Table t = fig4_harness(cfg);
    Csv csv(o.add("fig4.csv"), "gamma_p,gamma_e,status");
    for (const auto& r : t.rows) csv.row(r.gamma_p, r.gamma_e, r.status);
    Csv b(o.add("fig4_baselines.csv"), "design,gamma");
    b.row("nominal", t.nominal);
    b.row("robust", t.robust);
    b.row("scheduling_limit", t.limit);
    out << "fig4: nominal " << num(t.nominal) << "  robust " << num(t.robust) << "  limit " << num(t.limit) << "\n";
    for (const auto& r : t.rows) out << "  gamma_p " << num(r.gamma_p) << "  gamma_e " << num(r.gamma_e) << "  " << r.status << "\n";
    return kExitOk;
}

} // namespace

const std::vector<std::string>& commandNames() {
    static const std::vector<std::string> names{"explore", "design", "dual", "fig3", "fig4", "validate"};
    return names;
}

int dispatch(const RunConfig& run, std::ostream& out, std::ostream& err) {
    std::ostringstream sink;
    std::ostream& summary = run.quiet ? sink : out;
    try {
        ExperimentConfig cfg = parse_config(run.config_path);
        if (run.seed) cfg.seed = *run.seed;
        if (run.threads) {
            if (*run.threads < 1) throw std::invalid_argument("--threads must be at least 1");
            cfg.threads = *run.threads;
        }
        Outputs o{run.out_dir, {}};
        fs::create_directories(o.dir);
        int code;
        if (run.command == "explore") code = runExplore(cfg, o, summary);
        else if (run.command == "design") code = runDesign(cfg, o, summary);
        else if (run.command == "dual") code = runDual(cfg, o, summary, err, false);
        else if (run.command == "validate") code = runDual(cfg, o, summary, err, true);
        else if (run.command == "fig3") code = runFig3(cfg, o, summary);
        else if (run.command == "fig4") code = runFig4(cfg, o, summary);
        else throw std::invalid_argument("unknown command '" + run.command + "'");
        writeManifest(o, cfg, run.command);
        summary << "  files:";
        for (const auto& f : o.files) summary << " " << (o.dir / f).string();
        summary << " " << (o.dir / "manifest.json").string() << "\n";
        return code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

} // namespace dualctl
