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
#ifndef DUALCTL_SEARCH_HPP
#define DUALCTL_SEARCH_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace dualctl {

/// n points spaced evenly in log10 between lo and hi.
inline std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v;
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : std::pow(10.0, a + (b - a) * i / (n - 1)));
    return v;
}

struct ScalarMin {
    double x = std::numeric_limits<double>::quiet_NaN();
    double f = std::numeric_limits<double>::infinity();
};

/**
 * @brief Golden-section search of f(10^t) over t in [log10(lo), log10(hi)].
 *
 * Infeasible points return +inf. `start` is kept if nothing better is found.
 */
inline ScalarMin goldenLog(const std::function<double(double)>& f, double lo, double hi, ScalarMin start,
                           int iterations = 20) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::log10(lo), b = std::log10(hi);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(std::pow(10.0, c)), fd = f(std::pow(10.0, d));
    ScalarMin best = start;
    auto keep = [&](double t, double v) {
        if (v < best.f) {
            best.f = v;
            best.x = std::pow(10.0, t);
        }
    };
    keep(c, fc);
    keep(d, fd);
    for (int i = 0; i < iterations; ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(std::pow(10.0, c));
            keep(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(std::pow(10.0, d));
            keep(d, fd);
        }
    }
    return best;
}

/// Scan a log grid, then refine between the neighbours of the best grid point.
inline ScalarMin scanAndRefine(const std::function<double(double)>& f, const std::vector<double>& grid,
                               int refine_iterations = 20) {
    ScalarMin best;
    int bi = -1;
    for (size_t i = 0; i < grid.size(); ++i) {
        const double v = f(grid[i]);
        if (v < best.f) {
            best.f = v;
            best.x = grid[i];
            bi = static_cast<int>(i);
        }
    }
    if (bi < 0 || refine_iterations <= 0 || grid.size() < 2) return best;
    const double lo = grid[bi > 0 ? bi - 1 : bi];
    const double hi = grid[bi + 1 < static_cast<int>(grid.size()) ? bi + 1 : bi];
    return goldenLog(f, lo, hi, best, refine_iterations);
}

} // namespace dualctl

#endif // DUALCTL_SEARCH_HPP
