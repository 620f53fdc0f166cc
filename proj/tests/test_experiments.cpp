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

#include "dualctl/cli.hpp"
#include "dualctl/config.hpp"
#include "dualctl/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dualctl;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"({
  "system": {"A": [[0.5, 0.5], [0, 0.5]], "B": [[0], [0.5]], "sigma_w": 1},
  "prior": {"D0": {"scaled_identity": 1000}},
  "T": 50,
  "frequencies": [0, 0.1, 0.2],
  "goal": {"diag": [1e4, 0, 0]},
  "seed": 3
})";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dualctl_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path writeText(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
    return p;
}

std::string readText(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& command, const fs::path& config, const fs::path& out, std::string* err = nullptr) {
    RunConfig rc;
    rc.command = command;
    rc.config_path = config.string();
    rc.out_dir = out.string();
    rc.quiet = true;
    std::ostringstream o, e;
    const int code = dispatch(rc, o, e);
    if (err) *err = e.str();
    return code;
}

} // namespace

TEST_CASE("random input energy") {
    std::mt19937_64 rng(1);
    for (double E : {1.0, 37.5, 1e6}) {
        const std::vector<double> u = scaledRandomInput(80, E, rng);
        double s = 0.0;
        for (double v : u) s += v * v;
        CHECK(u.size() == 80u);
        CHECK(s == doctest::Approx(E).epsilon(1e-12));
    }
    for (double v : scaledRandomInput(10, 0.0, rng)) CHECK(v == 0.0);
}

TEST_CASE("seed derivation and domination") {
    CHECK(deriveSeed(0, 1, 0) != deriveSeed(0, 2, 0));
    CHECK(deriveSeed(0, 1, 0) != deriveSeed(0, 1, 1));
    CHECK(deriveSeed(7, 3, 9) == deriveSeed(7, 3, 9));
    MatrixXd goal = MatrixXd::Zero(2, 2);
    goal(0, 0) = 4.0;
    CHECK(dominates(5.0 * MatrixXd::Identity(2, 2), goal));
    CHECK(!dominates(3.0 * MatrixXd::Identity(2, 2), goal));
    MatrixXd off = 5.0 * MatrixXd::Identity(2, 2);
    off(0, 1) = off(1, 0) = 3.0;
    CHECK(!dominates(off, goal));
}

TEST_CASE("config parsing") {
    SUBCASE("defaults on a four-state system") {
        const ExperimentConfig c = parseConfigText(R"({
          "system": {"A": [[0.49,0.49,0,0],[0,0.49,0.49,0],[0,0,0.49,0.49],[0,0,0,0.49]], "B": [[0],[0],[0],[0.49]]},
          "T": 100})");
        CHECK(c.D0.isApprox(1e3 * MatrixXd::Identity(5, 5)));
        REQUIRE(c.frequencies.size() == 5u);
        for (int i = 0; i < 5; ++i) CHECK(c.frequencies[i] == doctest::Approx(0.1 * i));
        CHECK(c.goal(0, 0) == 1e7);
        CHECK(c.goal.sum() == 1e7);
        CHECK(c.delta == 0.01);
        CHECK(c.beta == 1e-10);
        CHECK(c.eps == 0.5);
        CHECK(std::isnan(c.gamma_p));
        CHECK(c.perf.C.rows() == 5);
        CHECK(c.sigma_w == 1.0);
    }
    SUBCASE("unknown key") {
        try {
            parseConfigText(R"({"system": {"A": [[0.5]], "B": [[1]]}, "T": 10, "sigma": 2})");
            FAIL("expected an error");
        } catch (const ConfigError& e) {
            const std::string w = e.what();
            CHECK(w.find("unknown key 'sigma'") != std::string::npos);
            CHECK(w.find("valid keys") != std::string::npos);
            CHECK(w.find("frequencies") != std::string::npos);
        }
    }
    SUBCASE("malformed matrix literal reports its line") {
        const std::string text = "{\n  \"T\": 10,\n  \"system\": {\n    \"A\": [[0.5, 0], [1]],\n    \"B\": [[1], [0]]\n  }\n}";
        try {
            parseConfigText(text);
            FAIL("expected an error");
        } catch (const ConfigError& e) {
            CHECK(e.line() == 4);
            CHECK(std::string(e.what()).find("malformed matrix literal") != std::string::npos);
        }
    }
    SUBCASE("syntax error reports its line") {
        try {
            parseConfigText("{\n  \"T\": 10,\n  \"system\": {,\n}");
            FAIL("expected an error");
        } catch (const ConfigError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("example config round trip") {
        const ExperimentConfig c = parse_config(DUALCTL_SOURCE_DIR "/configs/paper.json");
        CHECK(c.T == 100);
        CHECK(c.gamma_p == doctest::Approx(3.96));
        CHECK(c.A(0, 1) == doctest::Approx(0.49));
        const ExperimentConfig d = parseConfigText(configToJson(c, R"({"command": "dual"})"));
        CHECK(configToJson(d) == configToJson(c));
    }
}

TEST_CASE("pipeline determinism") {
    const ExperimentConfig cfg = parseConfigText(kSmall);
    const TrialResult a = run_algorithm1(cfg, 1);
    (void)run_algorithm1(cfg, 2);
    const TrialResult b = run_algorithm1(cfg, 1);
    REQUIRE(a.status == "ok");
    CHECK(a.goal_met);
    CHECK(a.DT11 == b.DT11);
    CHECK(a.energy == b.energy);
    CHECK((a.theta_hat - b.theta_hat).norm() == 0.0);
    CHECK((a.plan.amplitudes - b.plan.amplitudes).norm() == 0.0);
    // Energy of the applied input equals the line energy of the plan.
    double lines = 0.0;
    for (int i = 0; i < a.plan.grid.size(); ++i)
        lines += 2.0 * cfg.T * a.plan.grid.coefficient(i) * a.plan.amplitudes(i) * a.plan.amplitudes(i);
    CHECK(a.energy == doctest::Approx(lines).epsilon(1e-10));
}

TEST_CASE("command line dispatch") {
    const fs::path dir = scratch("cli");
    const fs::path cfg = writeText(dir / "small.json", kSmall);
    std::string err;

    CHECK(run("explore", dir / "missing.json", dir / "o0", &err) == kExitError);
    CHECK(err.find("cannot open") != std::string::npos);
    CHECK(run("bogus", cfg, dir / "o0", &err) == kExitError);

    REQUIRE(run("explore", cfg, dir / "o1") == kExitOk);
    CHECK(fs::exists(dir / "o1" / "explore.csv"));
    CHECK(fs::exists(dir / "o1" / "plan.csv"));
    CHECK(fs::exists(dir / "o1" / "manifest.json"));

    // A rerun from the manifest reproduces every file.
    REQUIRE(run("explore", dir / "o1" / "manifest.json", dir / "o2") == kExitOk);
    for (const char* f : {"explore.csv", "plan.csv", "manifest.json"})
        CHECK(readText(dir / "o1" / f) == readText(dir / "o2" / f));

    std::string text = kSmall;
    text.insert(text.rfind('}'), ", \"gamma_p\": 1.0");
    const fs::path low = writeText(dir / "low.json", text);
    CHECK(run("dual", low, dir / "o3") == kExitInfeasible);
    CHECK(fs::exists(dir / "o3" / "dual.csv"));

    CHECK(run("dual", cfg, dir / "o4", &err) == kExitError);
    CHECK(err.find("gamma_p") != std::string::npos);
}
