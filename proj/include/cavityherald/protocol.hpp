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

// Success probability and fidelity of heralded two-atom entanglement for
// single-photon (Fock) and coherent-state probing, with one or two heralding
// clicks.
//
// The number of atoms in |1> is a conserved quantity of the scattering
// dynamics, so a product preparation enters every formula as a classical
// mixture over the 0-, 1- and 2-atom sectors.

#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "cavityherald/core_model.hpp"

namespace cavityherald {

struct Preparation {
    double phi = 0.0;
    double p0 = 1.0;  ///< both atoms in |0>
    double p1 = 0.0;  ///< exactly one atom in |1>
    double p2 = 0.0;  ///< both atoms in |1>
};

/// Populations of the product state (cos phi |0> + sin phi |1>)^{(x)2}.
inline Preparation initial_populations(double phi) {
    if (!(phi >= 0.0 && phi <= std::numbers::pi / 2)) {
        throw DomainError("preparation angle must lie in [0, pi/2]");
    }
    const double c2 = std::cos(phi) * std::cos(phi);
    const double s2 = std::sin(phi) * std::sin(phi);
    return {phi, c2 * c2, 2.0 * s2 * c2, s2 * s2};
}

enum class OutcomeStatus {
    ok,
    /// No heralding click is possible, so the conditional state is undefined.
    undefined,
};

struct SchemeOutcome {
    OutcomeStatus status = OutcomeStatus::undefined;
    double p_success = 0.0;
    std::optional<double> fidelity;
    /// Conditional probability of the one-atom sector after the herald.
    std::optional<double> p1c;
    /// Real part of the conditional |01><10| coherence.
    std::optional<double> re_xi;

    bool defined() const { return status == OutcomeStatus::ok; }

    static SchemeOutcome undefined_outcome(double p_success = 0.0) {
        SchemeOutcome out;
        out.p_success = p_success;
        return out;
    }
};

/// Resonant response quantities every protocol needs, evaluated at the
/// effective cooperativity (which includes a ring cavity's backward mode).
struct ResonantResponse {
    double x = 0.0;
    double R1 = 0.0;
    double R2 = 0.0;
    double lambda = 0.0;

    static ResonantResponse of(const CavityParams &params) {
        const double x = effective_cooperativity_ring(params);
        return {x, reflection_probability(x, 1), reflection_probability(x, 2), scattering_loss(x, 1)};
    }
};

namespace detail {

/// 1 - exp(-y), accurate for small y.
inline double one_minus_exp(double y) { return -std::expm1(-y); }

/// Erlang-2 cumulative distribution 1 - (1 + y) e^{-y}, accurate for small y.
inline double erlang2_cdf(double y) {
    if (y < 0.1) {
        // sum_{m>=2} (-1)^m (m-1) y^m / m!
        double term = y * y / 2.0;  // y^m / m! at m = 2
        double sum = 0.0;
        for (int m = 2; m < 30; ++m) {
            sum += ((m % 2 == 0) ? 1.0 : -1.0) * (m - 1) * term;
            term *= y / (m + 1);
        }
        return sum;
    }
    return one_minus_exp(y) - y * std::exp(-y);
}

inline void check_photon_number(double n, const char *name) {
    if (!(n >= 0.0)) {
        throw DomainError(std::string(name) + " must be non-negative");
    }
}

}  // namespace detail

/// One incident photon, success on a reflected click.
inline SchemeOutcome fock_single(const CavityParams &params, double phi) {
    params.validate();
    const Preparation prep = initial_populations(phi);
    const ResonantResponse resp = ResonantResponse::of(params);
    const double one = prep.p1 * resp.R1;
    const double reflected = one + prep.p2 * resp.R2;
    if (!(reflected > 0.0)) {
        return SchemeOutcome::undefined_outcome();
    }
    SchemeOutcome out;
    out.status = OutcomeStatus::ok;
    out.p_success = params.eta * reflected;
    out.p1c = one / reflected;
    // No spontaneous emission can precede the only photon being detected.
    out.re_xi = *out.p1c / 2.0;
    out.fidelity = *out.p1c;
    return out;
}

/// Fidelity of the double-click Fock scheme when a fraction `f` of incident
/// photons is reflected regardless of the atoms. Returns nullopt when no
/// two-click event is possible (R1 = 0 and f = 0).
inline std::optional<double> false_reflection_fidelity(const CavityParams &params, double f) {
    params.validate();
    if (!(f >= 0.0 && f < 1.0)) {
        throw DomainError("spurious reflection fraction must lie in [0, 1)");
    }
    const ResonantResponse resp = ResonantResponse::of(params);
    const double one = resp.R1 * (1.0 - f) + f;
    const double wanted = one * one;
    const double spurious = f * (resp.R2 * (1.0 - f) + f);
    if (!(wanted + spurious > 0.0)) {
        return std::nullopt;
    }
    return wanted / (wanted + spurious);
}

/// Two single-photon probes at phi = pi/4 with the atomic states swapped in
/// between; success needs a click in both rounds.
///
/// The |01>+|10> sector clicks twice with probability R1'^2, while |00> and
/// |11> (weight 1/4 each) click once through the spurious channel and once
/// through R2', giving P_s = eta^2/2 * (R1'^2 + f R2') with
/// R_N' = R_N (1 - f) + f. This is eta^2 R1^2 / 2 at f = 0.
inline SchemeOutcome fock_double(const CavityParams &params) {
    params.validate();
    const ResonantResponse resp = ResonantResponse::of(params);
    const double f = params.f;
    const double one = resp.R1 * (1.0 - f) + f;
    const double two = resp.R2 * (1.0 - f) + f;
    const double heralded = 0.5 * (one * one + f * two);
    const double p_success = params.eta * params.eta * heralded;
    const std::optional<double> fid = false_reflection_fidelity(params, f);
    if (!fid || !(p_success > 0.0)) {
        return SchemeOutcome::undefined_outcome(p_success);
    }
    SchemeOutcome out;
    out.status = OutcomeStatus::ok;
    out.p_success = p_success;
    out.fidelity = fid;
    out.p1c = fid;
    out.re_xi = *fid / 2.0;
    return out;
}

/// Probability of the one-atom sector given that the first click arrives
/// after a mean photon number `n`.
inline std::optional<double> coherent_conditional_population(const CavityParams &params, double phi, double n) {
    params.validate();
    detail::check_photon_number(n, "mean photon number");
    const Preparation prep = initial_populations(phi);
    const ResonantResponse resp = ResonantResponse::of(params);
    const double one = prep.p1 * resp.R1 * std::exp(-params.eta * resp.R1 * n);
    const double two = prep.p2 * resp.R2 * std::exp(-params.eta * resp.R2 * n);
    if (!(one + two > 0.0)) {
        return std::nullopt;
    }
    return one / (one + two);
}

/// Fidelity conditioned on a first click after mean photon number `n`:
/// p1c (1 + e^{-lambda n}) / 2.
inline std::optional<double> coherent_conditional_fidelity(const CavityParams &params, double phi, double n) {
    const std::optional<double> p1c = coherent_conditional_population(params, phi, n);
    if (!p1c) {
        return std::nullopt;
    }
    const double lambda = ResonantResponse::of(params).lambda;
    return *p1c * (1.0 + std::exp(-lambda * n)) / 2.0;
}

/// Probability density of the first click per unit mean photon number.
inline double first_click_density(const CavityParams &params, double phi, double n) {
    params.validate();
    detail::check_photon_number(n, "mean photon number");
    const Preparation prep = initial_populations(phi);
    const ResonantResponse resp = ResonantResponse::of(params);
    const double a = params.eta * resp.R1;
    const double b = params.eta * resp.R2;
    return prep.p1 * a * std::exp(-a * n) + prep.p2 * b * std::exp(-b * n);
}

/// Continuous coherent probing, stopped at the first click or after a mean
/// photon number `n_max`, whichever comes first.
inline SchemeOutcome coherent_single(const CavityParams &params, double phi, double n_max) {
    params.validate();
    if (!(n_max > 0.0)) {
        throw DomainError("photon budget must be positive");
    }
    const Preparation prep = initial_populations(phi);
    const ResonantResponse resp = ResonantResponse::of(params);
    const double a = params.eta * resp.R1;
    const double b = params.eta * resp.R2;
    const double decohering = a + resp.lambda;

    const double clicks_one = detail::one_minus_exp(a * n_max);
    const double p_success = prep.p1 * clicks_one + prep.p2 * detail::one_minus_exp(b * n_max);
    if (!(p_success > 0.0)) {
        return SchemeOutcome::undefined_outcome();
    }
    const double coherent = decohering > 0.0 ? a / decohering * detail::one_minus_exp(decohering * n_max) : 0.0;

    SchemeOutcome out;
    out.status = OutcomeStatus::ok;
    out.p_success = p_success;
    out.fidelity = prep.p1 * (clicks_one + coherent) / (2.0 * p_success);
    out.p1c = prep.p1 * clicks_one / p_success;
    out.re_xi = prep.p1 * coherent / (2.0 * p_success);
    return out;
}

/// Two rounds of coherent probing at phi = pi/4 with the atomic states
/// swapped after the first click. Success iff both clicks arrive within a
/// combined mean photon number n_max.
///
/// Only the one-atom sector (weight 1/2) can click twice, and the total
/// photon number S = n1 + n2 at success is Erlang-2 distributed with rate
/// a = eta R1. The fidelity is 1/2 + E[e^{-lambda S} | S <= n_max] / 2:
///
///   P_s = (1 - (1 + a n) e^{-a n}) / 2
///   F   = 1/2 + a^2 (1 - (1 + b n) e^{-b n}) / (4 b^2 P_s),  b = a + lambda.
inline SchemeOutcome coherent_double(const CavityParams &params, double n_max) {
    params.validate();
    if (!(n_max > 0.0)) {
        throw DomainError("photon budget must be positive");
    }
    const ResonantResponse resp = ResonantResponse::of(params);
    const double a = params.eta * resp.R1;
    const double b = a + resp.lambda;
    const double clicked = detail::erlang2_cdf(a * n_max);
    if (!(clicked > 0.0)) {
        return SchemeOutcome::undefined_outcome();
    }
    const double ratio = a / b;
    const double coherence = ratio * ratio * detail::erlang2_cdf(b * n_max) / clicked;

    SchemeOutcome out;
    out.status = OutcomeStatus::ok;
    out.p_success = 0.5 * clicked;
    out.fidelity = 0.5 + 0.5 * coherence;
    out.p1c = 1.0;
    out.re_xi = 0.5 * coherence;
    return out;
}

/// The double-click coherent fidelity with the coherence term normalized by
/// 2 P_s instead of 4 P_s. This form is not bounded by 1 (it tends to 3/2 as
/// n_max -> 0) and is kept only to report its disagreement with
/// coherent_double. Returns nullopt when P_s = 0.
inline std::optional<double> coherent_double_fidelity_uncorrected(const CavityParams &params, double n_max) {
    const SchemeOutcome out = coherent_double(params, n_max);
    if (!out.defined()) {
        return std::nullopt;
    }
    return 0.5 + 2.0 * *out.re_xi;
}

}  // namespace cavityherald
