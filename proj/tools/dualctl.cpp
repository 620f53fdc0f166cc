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

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"dualctl: targeted exploration and gain-scheduled robust control"};
    app.require_subcommand(1);
    dualctl::RunConfig run;
    std::uint64_t seed = 0;
    int threads = 1;

    for (const auto& name : dualctl::commandNames()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", run.config_path, "JSON config file")->required();
        sub->add_option("--out", run.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "master seed (overrides the config)");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", run.quiet, "no summary");
        sub->callback([&, name, sub] {
            run.command = name;
            if (sub->count("--seed")) run.seed = seed;
            if (sub->count("--threads")) run.threads = threads;
        });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : dualctl::kExitError;
    }
    return dualctl::dispatch(run, std::cout, std::cerr);
}
