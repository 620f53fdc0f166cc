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
#include "dualctl/config.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dualctl {

using nlohmann::json;

namespace {

const std::set<std::string> kTopKeys{"system", "prior", "T", "frequencies", "delta", "beta", "eps", "goal",
                                     "gamma_p", "gamma_p_list", "alphas", "trials", "guarantee_runs",
                                     "validation_samples", "holdout", "seed", "threads", "performance"};
const std::set<std::string> kSystemKeys{"A", "B", "sigma_w"};
const std::set<std::string> kPriorKeys{"D0", "center"};
const std::set<std::string> kPerfKeys{"C", "Du", "Dw"};

int lineAt(const std::string& text, std::size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

// Line of the value under a key path, found by scanning for each quoted key in turn.
int lineOf(const std::string& text, const std::vector<std::string>& path) {
    std::size_t pos = 0;
    for (const auto& k : path) {
        const std::size_t p = text.find("\"" + k + "\"", pos);
        if (p == std::string::npos) return 0;
        pos = p + 1;
    }
    return lineAt(text, pos);
}

std::string joinKeys(const std::set<std::string>& keys) {
    std::string s;
    for (const auto& k : keys) s += (s.empty() ? "" : ", ") + k;
    return s;
}

std::string joinPath(const std::vector<std::string>& path) {
    std::string s;
    for (const auto& k : path) s += (s.empty() ? "" : ".") + k;
    return s;
}

struct Reader {
    const std::string& text;

    [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
        throw ConfigError(joinPath(path) + ": " + msg, lineOf(text, path));
    }

    void checkKeys(const json& obj, const std::set<std::string>& valid, const std::vector<std::string>& path) const {
        if (!obj.is_object()) fail(path, "expected an object");
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!it.key().empty() && it.key()[0] == '_') continue;
            if (!valid.count(it.key())) {
                auto p = path;
                p.push_back(it.key());
                throw ConfigError("unknown key '" + joinPath(p) + "'; valid keys: " + joinKeys(valid),
                                  lineOf(text, p));
            }
        }
    }

    double number(const json& v, const std::vector<std::string>& path) const {
        if (!v.is_number()) fail(path, "expected a number");
        return v.get<double>();
    }

    std::vector<double> list(const json& v, const std::vector<std::string>& path) const {
        if (!v.is_array()) fail(path, "expected a list of numbers");
        std::vector<double> out;
        for (const auto& e : v) out.push_back(number(e, path));
        return out;
    }

    // `n` is the implied size for the scaled_identity and diag forms (0 if unknown).
    MatrixXd matrix(const json& v, const std::vector<std::string>& path, int n = 0) const {
        if (v.is_object()) {
            if (v.size() == 1 && v.contains("scaled_identity")) {
                if (n <= 0) fail(path, "scaled_identity needs a known size here");
                return number(v["scaled_identity"], path) * MatrixXd::Identity(n, n);
            }
            if (v.size() == 1 && v.contains("diag")) {
                const std::vector<double> d = list(v["diag"], path);
                return Eigen::Map<const VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())).asDiagonal();
            }
            fail(path, "malformed matrix literal (use nested lists, {\"scaled_identity\": c} or {\"diag\": [...]})");
        }
        if (!v.is_array() || v.empty()) fail(path, "malformed matrix literal (expected a nonempty list of rows)");
        const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
        if (cols == 0) fail(path, "malformed matrix literal (rows must be nonempty lists)");
        MatrixXd M(v.size(), cols);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_array() || v[i].size() != cols)
                fail(path, "malformed matrix literal (row " + std::to_string(i + 1) + " has the wrong length)");
            for (std::size_t j = 0; j < cols; ++j) {
                if (!v[i][j].is_number()) fail(path, "malformed matrix literal (non-numeric entry)");
                M(i, j) = v[i][j].get<double>();
            }
        }
        return M;
    }
};

json matrixJson(const MatrixXd& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

} // namespace

ExperimentConfig parseConfigText(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what(), lineAt(text, e.byte > 0 ? e.byte - 1 : 0));
    }
    const Reader rd{text};
    rd.checkKeys(j, kTopKeys, {});
    ExperimentConfig c;

    if (!j.contains("system")) throw ConfigError("missing required key 'system'");
    const json& sys = j["system"];
    rd.checkKeys(sys, kSystemKeys, {"system"});
    if (!sys.contains("A")) throw ConfigError("missing required key 'system.A'");
    if (!sys.contains("B")) throw ConfigError("missing required key 'system.B'");
    c.A = rd.matrix(sys["A"], {"system", "A"});
    c.B = rd.matrix(sys["B"], {"system", "B"});
    if (c.A.rows() != c.A.cols()) rd.fail({"system", "A"}, "must be square");
    if (c.B.rows() != c.A.rows() || c.B.cols() != 1) rd.fail({"system", "B"}, "must be n_x x 1");
    if (sys.contains("sigma_w")) c.sigma_w = rd.number(sys["sigma_w"], {"system", "sigma_w"});
    const int nx = c.nx(), nphi = c.nphi();

    if (!j.contains("T")) throw ConfigError("missing required key 'T'");
    const double T = rd.number(j["T"], {"T"});
    if (T != std::floor(T)) rd.fail({"T"}, "must be an integer");
    c.T = static_cast<int>(T);

    if (j.contains("prior")) {
        rd.checkKeys(j["prior"], kPriorKeys, {"prior"});
        if (j["prior"].contains("D0")) c.D0 = rd.matrix(j["prior"]["D0"], {"prior", "D0"}, nphi);
        if (j["prior"].contains("center")) c.prior_center = rd.matrix(j["prior"]["center"], {"prior", "center"});
    }
    if (j.contains("frequencies")) c.frequencies = rd.list(j["frequencies"], {"frequencies"});
    if (j.contains("delta")) c.delta = rd.number(j["delta"], {"delta"});
    if (j.contains("beta")) c.beta = rd.number(j["beta"], {"beta"});
    if (j.contains("eps")) c.eps = rd.number(j["eps"], {"eps"});
    if (j.contains("goal")) c.goal = rd.matrix(j["goal"], {"goal"}, nphi);
    if (j.contains("gamma_p") && !j["gamma_p"].is_null()) c.gamma_p = rd.number(j["gamma_p"], {"gamma_p"});
    if (j.contains("gamma_p_list")) c.gamma_p_list = rd.list(j["gamma_p_list"], {"gamma_p_list"});
    if (j.contains("alphas")) c.alphas = rd.list(j["alphas"], {"alphas"});
    auto integer = [&](const char* k, int& out) {
        if (!j.contains(k)) return;
        const double v = rd.number(j[k], {k});
        if (v != std::floor(v)) rd.fail({k}, "must be an integer");
        out = static_cast<int>(v);
    };
    integer("trials", c.trials);
    integer("guarantee_runs", c.guarantee_runs);
    integer("validation_samples", c.validation_samples);
    integer("holdout", c.holdout);
    integer("threads", c.threads);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
            rd.fail({"seed"}, "must be an unsigned 64-bit integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("performance")) {
        const json& p = j["performance"];
        rd.checkKeys(p, kPerfKeys, {"performance"});
        if (!p.contains("C") || !p.contains("Du")) throw ConfigError("performance needs C and Du", lineOf(text, {"performance"}));
        const MatrixXd C = rd.matrix(p["C"], {"performance", "C"}, nx);
        const MatrixXd Du = rd.matrix(p["Du"], {"performance", "Du"});
        const MatrixXd Dw = p.contains("Dw") ? rd.matrix(p["Dw"], {"performance", "Dw"}) : MatrixXd::Zero(C.rows(), nx);
        if (C.cols() != nx) rd.fail({"performance", "C"}, "must have n_x columns");
        if (Du.rows() != C.rows() || Du.cols() != 1) rd.fail({"performance", "Du"}, "must be n_z x 1");
        if (Dw.rows() != C.rows() || Dw.cols() != nx) rd.fail({"performance", "Dw"}, "must be n_z x n_x");
        c.perf = PerformanceIndex::l2Gain(C, Du, Dw, 1.0);
    }
    try {
        c.resolve();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parseConfigText(ss.str());
}

std::string configToJson(const ExperimentConfig& c, const std::string& extra_json) {
    json j;
    j["system"] = {{"A", matrixJson(c.A)}, {"B", matrixJson(c.B)}, {"sigma_w", c.sigma_w}};
    j["prior"]["D0"] = matrixJson(c.D0);
    if (c.prior_center) j["prior"]["center"] = matrixJson(*c.prior_center);
    j["T"] = c.T;
    j["frequencies"] = c.frequencies;
    j["delta"] = c.delta;
    j["beta"] = c.beta;
    j["eps"] = c.eps;
    j["goal"] = matrixJson(c.goal);
    j["gamma_p"] = std::isfinite(c.gamma_p) ? json(c.gamma_p) : json(nullptr);
    j["gamma_p_list"] = c.gamma_p_list;
    j["alphas"] = c.alphas;
    j["trials"] = c.trials;
    j["guarantee_runs"] = c.guarantee_runs;
    j["validation_samples"] = c.validation_samples;
    j["holdout"] = c.holdout;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["performance"] = {{"C", matrixJson(c.perf.C)}, {"Du", matrixJson(c.perf.Du)}, {"Dw", matrixJson(c.perf.Dw)}};
    if (!extra_json.empty()) j["_manifest"] = json::parse(extra_json);
    return j.dump(2) + "\n";
}

} // namespace dualctl
