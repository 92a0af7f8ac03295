// Copyright 2026 The cavityherald Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace cavityherald::numerics {

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(lo);
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return out;
}

inline std::vector<double> logspace(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi > 0.0)) {
        throw std::domain_error("logspace: bounds must be positive");
    }
    std::vector<double> out = linspace(std::log(lo), std::log(hi), count);
    for (double &v : out) {
        v = std::exp(v);
    }
    // Pin the endpoints so exp(log(.)) round-off cannot push them outside [lo, hi].
    out.front() = lo;
    if (count > 1) {
        out.back() = hi;
    }
    return out;
}

/// Bracket [feasible, infeasible] around the boundary of a monotone predicate.
/// The returned bracket always keeps `feasible` on the side where `pred` holds.
struct Bracket {
    double feasible;
    double infeasible;
};

template <class Pred>
Bracket bisect_boundary(Pred &&pred, double feasible, double infeasible, double tol, int max_iter = 200) {
    for (int i = 0; i < max_iter && std::abs(infeasible - feasible) > tol; ++i) {
        const double mid = 0.5 * (feasible + infeasible);
        if (pred(mid)) {
            feasible = mid;
        } else {
            infeasible = mid;
        }
    }
    return {feasible, infeasible};
}

struct ScalarMax {
    double argmax;
    double value;
};

/// Golden-section maximization of a unimodal function on [lo, hi].
template <class F>
ScalarMax golden_section_max(F &&f, double lo, double hi, double tol, int max_iter = 300) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < max_iter && (hi - lo) > tol; ++i) {
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return fc >= fd ? ScalarMax{c, fc} : ScalarMax{d, fd};
}

}  // namespace cavityherald::numerics
