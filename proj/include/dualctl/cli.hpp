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
#ifndef DUALCTL_CLI_HPP
#define DUALCTL_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dualctl {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct RunConfig {
    std::string command;  ///< explore | design | dual | fig3 | fig4 | validate
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool quiet = false;
};

const std::vector<std::string>& commandNames();

/**
 * @brief Runs one command and writes its CSV files and manifest.json into out_dir.
 *
 * Returns 0 on success, 2 when the problem is infeasible, 1 on any error. The
 * summary goes to `out` unless quiet; errors always go to `err`.
 */
int dispatch(const RunConfig& run, std::ostream& out, std::ostream& err);

} // namespace dualctl

#endif // DUALCTL_CLI_HPP
