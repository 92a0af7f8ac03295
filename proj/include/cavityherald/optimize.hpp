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

// Maximize the heralding probability subject to a fidelity floor.
//
// Every scheme has a fidelity that is monotone in each search variable, so
// the constraint is solved by bisection and only the remaining free variable
// is line-searched (coarse log grid, then golden section).

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cavityherald/core_model.hpp"
#include "cavityherald/numerics.hpp"
#include "cavityherald/protocol.hpp"

namespace cavityherald {

enum class Scheme { fock_single, fock_double, coherent_single, coherent_double };

inline std::string_view scheme_name(Scheme s) {
    switch (s) {
    case Scheme::fock_single:
        return "fock-single";
    case Scheme::fock_double:
        return "fock-double";
    case Scheme::coherent_single:
        return "coherent-single";
    case Scheme::coherent_double:
        return "coherent-double";
    }
    return "unknown";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
    for (Scheme s : {Scheme::fock_single, Scheme::fock_double, Scheme::coherent_single, Scheme::coherent_double}) {
        if (scheme_name(s) == name) {
            return s;
        }
    }
    return std::nullopt;
}

inline bool uses_photon_budget(Scheme s) { return s == Scheme::coherent_single || s == Scheme::coherent_double; }

enum class OptimizationStatus {
    ok,
    /// Optimum pinned at the photon-budget ceiling.
    at_ceiling,
    infeasible,
};

inline std::string_view status_name(OptimizationStatus s) {
    switch (s) {
    case OptimizationStatus::ok:
        return "ok";
    case OptimizationStatus::at_ceiling:
        return "ceiling";
    case OptimizationStatus::infeasible:
        return "infeasible";
    }
    return "unknown";
}

struct OptimizationResult {
    double x = 0.0;
    Scheme scheme = Scheme::fock_single;
    double eta = 1.0;
    double f_target = 0.0;
    OptimizationStatus status = OptimizationStatus::infeasible;
    double phi_opt = 0.0;
    std::optional<double> n_max_opt;
    double p_success = 0.0;
    double fidelity_achieved = 0.0;

    bool feasible() const { return status != OptimizationStatus::infeasible; }
};

struct OptimizerSettings {
    double n_max_ceiling = 1e3;
    double n_max_floor = 1e-6;
    double constraint_tol = 1e-9;
    double objective_tol = 1e-7;
    std::size_t seed_points = 200;
};

/// Raised when a structural assumption of the search (monotone fidelity) fails.
class OptimizationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_target(double f_target) {
    if (!(f_target > 0.5 && f_target < 1.0)) {
        throw DomainError("fidelity target must lie in (0.5, 1)");
    }
}

inline OptimizationResult blank_result(const CavityParams &params, Scheme scheme, double f_target) {
    OptimizationResult r;
    r.x = params.cooperativity();
    r.scheme = scheme;
    r.eta = params.eta;
    r.f_target = f_target;
    return r;
}

}  // namespace detail

/// The single-click Fock fidelity fixes the angle through
/// tan^2 phi = 2 (R1/R2) (1 - F) / F, and P_s grows with phi, so the
/// constraint is active at the optimum.
inline OptimizationResult optimize_fock_single(const CavityParams &params, double f_target) {
    params.validate();
    detail::check_target(f_target);
    OptimizationResult result = detail::blank_result(params, Scheme::fock_single, f_target);
    const ResonantResponse resp = ResonantResponse::of(params);
    if (!(resp.R1 > 0.0)) {
        return result;
    }
    const double tan2 = 2.0 * (resp.R1 / resp.R2) * (1.0 - f_target) / f_target;
    double phi = std::atan(std::sqrt(tan2));
    SchemeOutcome out = fock_single(params, phi);
    // Step off the boundary by a few ulps if round-off left F just below target.
    for (int i = 0; i < 64 && out.defined() && *out.fidelity < f_target; ++i) {
        phi = std::nextafter(phi, 0.0);
        out = fock_single(params, phi);
    }
    if (!out.defined()) {
        return result;
    }
    result.status = OptimizationStatus::ok;
    result.phi_opt = phi;
    result.p_success = out.p_success;
    result.fidelity_achieved = *out.fidelity;
    return result;
}

/// Fixed preparation phi = pi/4; nothing to optimize beyond feasibility.
inline OptimizationResult optimize_fock_double(const CavityParams &params, double f_target) {
    params.validate();
    detail::check_target(f_target);
    OptimizationResult result = detail::blank_result(params, Scheme::fock_double, f_target);
    result.phi_opt = std::numbers::pi / 4;
    const SchemeOutcome out = fock_double(params);
    if (!out.defined() || *out.fidelity < f_target) {
        return result;
    }
    result.status = OptimizationStatus::ok;
    result.p_success = out.p_success;
    result.fidelity_achieved = *out.fidelity;
    return result;
}

namespace detail {

/// Largest preparation angle meeting the fidelity floor at a given budget,
/// or nullopt when even phi -> 0 falls short.
inline std::optional<double> coherent_single_angle(const CavityParams &params, double n_max, double f_target,
                                                   double tol) {
    const ResonantResponse resp = ResonantResponse::of(params);
    const double a = params.eta * resp.R1;
    const double clicks = one_minus_exp(a * n_max);
    if (!(clicks > 0.0)) {
        return std::nullopt;
    }
    // phi -> 0 limit: the two-atom sector vanishes and p1c -> 1.
    const double decohering = a + resp.lambda;
    const double best = 0.5 * (1.0 + a / decohering * one_minus_exp(decohering * n_max) / clicks);
    if (best < f_target) {
        return std::nullopt;
    }
    auto meets = [&](double phi) {
        const SchemeOutcome out = coherent_single(params, phi, n_max);
        return out.defined() && *out.fidelity >= f_target;
    };
    const numerics::Bracket br = numerics::bisect_boundary(meets, 0.0, std::numbers::pi / 2, tol);
    if (!(br.feasible > 0.0)) {
        return std::nullopt;
    }
    return br.feasible;
}

}  // namespace detail

/// Maximize P_s over (phi, n_max) subject to F >= f_target. For each budget
/// the fidelity decreases in phi while P_s increases, so the inner problem is
/// a bisection; the budget is searched on a log grid and refined by golden
/// section in log n_max.
inline OptimizationResult optimize_coherent_single(const CavityParams &params, double f_target,
                                                   const OptimizerSettings &settings = {}) {
    params.validate();
    detail::check_target(f_target);
    OptimizationResult result = detail::blank_result(params, Scheme::coherent_single, f_target);

    const double angle_tol = 1e-13;
    auto objective = [&](double log_n) {
        const double n = std::exp(log_n);
        const std::optional<double> phi = detail::coherent_single_angle(params, n, f_target, angle_tol);
        if (!phi) {
            return -1.0;
        }
        return coherent_single(params, *phi, n).p_success;
    };

    const std::vector<double> grid =
        numerics::linspace(std::log(settings.n_max_floor), std::log(settings.n_max_ceiling), settings.seed_points);
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = objective(grid[i]);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    if (!(best_value > 0.0)) {
        return result;
    }

    double log_n = grid[best];
    if (best + 1 == grid.size()) {
        result.status = OptimizationStatus::at_ceiling;
    } else {
        const double lo = grid[best == 0 ? 0 : best - 1];
        const double hi = grid[best + 1];
        const numerics::ScalarMax refined = numerics::golden_section_max(objective, lo, hi, settings.objective_tol);
        if (refined.value >= best_value) {
            log_n = refined.argmax;
        }
        result.status = OptimizationStatus::ok;
    }

    const double n_max = std::exp(log_n);
    const double phi = *detail::coherent_single_angle(params, n_max, f_target, angle_tol);
    const SchemeOutcome out = coherent_single(params, phi, n_max);
    result.phi_opt = phi;
    result.n_max_opt = n_max;
    result.p_success = out.p_success;
    result.fidelity_achieved = *out.fidelity;
    return result;
}

/// Maximize P_s over n_max at phi = pi/4. P_s increases and F decreases with
/// n_max, so the optimum is the budget where F meets the floor, or the
/// ceiling when the floor never binds.
inline OptimizationResult optimize_coherent_double(const CavityParams &params, double f_target,
                                                   const OptimizerSettings &settings = {}) {
    params.validate();
    detail::check_target(f_target);
    OptimizationResult result = detail::blank_result(params, Scheme::coherent_double, f_target);
    result.phi_opt = std::numbers::pi / 4;

    if (!coherent_double(params, settings.n_max_ceiling).defined()) {
        return result;
    }

    double previous = 1.0;
    for (double n : numerics::logspace(settings.n_max_floor, settings.n_max_ceiling, 64)) {
        const SchemeOutcome out = coherent_double(params, n);
        if (!out.defined()) {
            continue;
        }
        if (*out.fidelity > previous + 1e-12) {
            throw OptimizationError("coherent double-click fidelity is not monotone in n_max (n_max = " +
                                    std::to_string(n) + ")");
        }
        previous = *out.fidelity;
    }

    double n_max = settings.n_max_ceiling;
    if (*coherent_double(params, n_max).fidelity >= f_target) {
        result.status = OptimizationStatus::at_ceiling;
    } else {
        auto meets = [&](double n) {
            const SchemeOutcome out = coherent_double(params, n);
            return out.defined() && *out.fidelity >= f_target;
        };
        const numerics::Bracket br = numerics::bisect_boundary(meets, 0.0, n_max, settings.constraint_tol);
        if (!(br.feasible > 0.0)) {
            return result;
        }
        n_max = br.feasible;
        result.status = OptimizationStatus::ok;
    }
    const SchemeOutcome out = coherent_double(params, n_max);
    result.n_max_opt = n_max;
    result.p_success = out.p_success;
    result.fidelity_achieved = *out.fidelity;
    return result;
}

inline OptimizationResult optimize(Scheme scheme, const CavityParams &params, double f_target,
                                   const OptimizerSettings &settings = {}) {
    switch (scheme) {
    case Scheme::fock_single:
        return optimize_fock_single(params, f_target);
    case Scheme::fock_double:
        return optimize_fock_double(params, f_target);
    case Scheme::coherent_single:
        return optimize_coherent_single(params, f_target, settings);
    case Scheme::coherent_double:
        return optimize_coherent_double(params, f_target, settings);
    }
    throw DomainError("unknown scheme");
}

struct SweepSpec {
    std::vector<double> x_grid;
    double eta = 1.0;
    double f_target = 0.9;
    Scheme scheme = Scheme::fock_single;
    /// Supplies kappa_a, kappa_b, f and the ring-cavity mode; g is set per row.
    CavityParams base = {};

    void validate() const {
        if (x_grid.empty()) {
            throw DomainError("sweep grid is empty");
        }
        for (std::size_t i = 0; i < x_grid.size(); ++i) {
            if (!(x_grid[i] >= 0.0)) {
                throw DomainError("sweep grid values must be non-negative");
            }
            if (i > 0 && !(x_grid[i] > x_grid[i - 1])) {
                throw DomainError("sweep grid must be strictly increasing");
            }
        }
        detail::check_target(f_target);
    }
};

/// Parameters for one sweep row: the base cavity with g chosen so that
/// g^2 / (kappa gamma) = x.
inline CavityParams params_at(const CavityParams &base, double x, double eta) {
    CavityParams p = base;
    p.g = std::sqrt(x * base.kappa() * base.gamma);
    p.eta = eta;
    return p;
}

/// Rows are independent and come back in grid order.
inline std::vector<OptimizationResult> sweep(const SweepSpec &spec, const OptimizerSettings &settings = {}) {
    spec.validate();
    std::vector<OptimizationResult> rows;
    rows.reserve(spec.x_grid.size());
    for (double x : spec.x_grid) {
        OptimizationResult row = optimize(spec.scheme, params_at(spec.base, x, spec.eta), spec.f_target, settings);
        row.x = x;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace cavityherald
