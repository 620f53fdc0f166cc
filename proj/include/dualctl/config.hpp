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
#ifndef DUALCTL_CONFIG_HPP
#define DUALCTL_CONFIG_HPP

#include "dualctl/experiments.hpp"

#include <stdexcept>
#include <string>

namespace dualctl {

/// Config error; `line` is 0 when no position is known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/**
 * @brief JSON config to a resolved ExperimentConfig.
 *
 * Matrices are row-major nested lists, or {"scaled_identity": c}, or {"diag": [...]}.
 * Required: system.A, system.B, T. Keys starting with '_' are ignored, so a run
 * manifest is itself a valid config.
 */
ExperimentConfig parseConfigText(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

/// Every resolved value, as JSON text (the inverse of parseConfigText).
std::string configToJson(const ExperimentConfig& cfg, const std::string& extra_json = "");

} // namespace dualctl

#endif // DUALCTL_CONFIG_HPP
