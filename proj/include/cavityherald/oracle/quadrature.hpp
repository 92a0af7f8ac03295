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

// Adaptive quadrature of the first-click statistics of continuous coherent
// probing, as an independent route to the single-click closed forms.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cavityherald/oracle/error.hpp"
#include "cavityherald/protocol.hpp"

namespace cavityherald::oracle {

struct QuadratureOptions {
    /// Replace the resonant loss probability in the coherence factor.
    std::optional<double> lambda_override;
    double tolerance = 1e-13;
    unsigned max_depth = 20;
};

/// P_s = int_0^n_max dP_f/dn dn and F P_s = int_0^n_max F_c(n) dP_f/dn dn.
inline SchemeOutcome quadrature_single(const CavityParams &params, double phi, double n_max,
                                       const QuadratureOptions &options = {}) {
    params.validate();
    if (!(n_max > 0.0)) {
        throw DomainError("photon budget must be positive");
    }
    const double lambda = options.lambda_override.value_or(ResonantResponse::of(params).lambda);

    using Integrator = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto integrate = [&](auto &&integrand, const char *what) {
        // Integrate over u = n / n_max in [0, 1]; the library's error estimate
        // is not rescaled with the interval length, so short budgets would
        // otherwise recurse to full depth.
        double error = 0.0;
        const double value =
            n_max * Integrator::integrate([&](double u) { return integrand(n_max * u); }, 0.0, 1.0, options.max_depth,
                                          options.tolerance, &error);
        error *= n_max;
        if (!(error <= 1e-10 * std::max(1.0, std::abs(value)))) {
            throw OracleError(std::string("quadrature of ") + what + " did not converge; error estimate " +
                              std::to_string(error));
        }
        return value;
    };

    const double p_success = integrate([&](double n) { return first_click_density(params, phi, n); }, "click density");
    const double one_sector = integrate(
        [&](double n) {
            const std::optional<double> p1c = coherent_conditional_population(params, phi, n);
            return p1c ? *p1c * first_click_density(params, phi, n) : 0.0;
        },
        "one-atom click density");
    const double weighted_fidelity = integrate(
        [&](double n) {
            const std::optional<double> p1c = coherent_conditional_population(params, phi, n);
            if (!p1c) {
                return 0.0;
            }
            return *p1c * (1.0 + std::exp(-lambda * n)) / 2.0 * first_click_density(params, phi, n);
        },
        "fidelity-weighted click density");

    if (!(p_success > 0.0)) {
        return SchemeOutcome::undefined_outcome();
    }
    SchemeOutcome out;
    out.status = OutcomeStatus::ok;
    out.p_success = p_success;
    out.fidelity = weighted_fidelity / p_success;
    out.p1c = one_sector / p_success;
    out.re_xi = *out.fidelity - *out.p1c / 2.0;
    return out;
}

}  // namespace cavityherald::oracle
