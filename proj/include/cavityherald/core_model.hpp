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

// Resonant and off-resonant response of a two-mirror cavity holding N atoms
// on the |1> <-> |e> transition, in the weak-drive (single-excitation) limit.
//
// All rates are in units of the atomic decay rate gamma.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace cavityherald {

/// Thrown when an argument lies outside the domain of a physical formula.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

struct CavityParams {
    double g = 1.0;        ///< atom-cavity coupling
    double kappa_a = 0.5;  ///< input/reflection mirror decay rate
    double kappa_b = 0.5;  ///< output/transmission mirror decay rate
    double gamma = 1.0;    ///< atomic decay rate; the unit of every other rate
    double delta = 0.0;    ///< cavity-atom detuning
    double eta = 1.0;      ///< detector efficiency, including losses on the way to it
    double f = 0.0;        ///< fraction of incident photons reflected by imperfections
    double g_tilde = 0.0;      ///< counter-propagating-mode coupling (ring cavity)
    double kappa_tilde = 0.0;  ///< counter-propagating-mode decay rate

    double kappa() const { return kappa_a + kappa_b; }
    double cooperativity() const { return g * g / (kappa() * gamma); }

    /// Symmetric cavity with the requested cooperativity at total decay `kappa`.
    static CavityParams from_cooperativity(double x, double eta = 1.0, double kappa = 1.0) {
        if (!(x >= 0.0)) {
            throw DomainError("cooperativity must be non-negative");
        }
        CavityParams p;
        p.kappa_a = 0.5 * kappa;
        p.kappa_b = 0.5 * kappa;
        p.g = std::sqrt(x * kappa);
        p.eta = eta;
        return p;
    }

    /// Rescale raw rates so that gamma becomes 1.
    CavityParams normalized() const {
        if (!(gamma > 0.0)) {
            throw DomainError("gamma must be positive");
        }
        CavityParams p = *this;
        p.g = g / gamma;
        p.g_tilde = g_tilde / gamma;
        p.kappa_a = kappa_a / gamma;
        p.kappa_b = kappa_b / gamma;
        p.kappa_tilde = kappa_tilde / gamma;
        p.delta = delta / gamma;
        p.gamma = 1.0;
        return p;
    }

    void validate() const {
        auto require = [](bool ok, const char *what) {
            if (!ok) {
                throw DomainError(std::string("invalid cavity parameters: ") + what);
            }
        };
        require(g >= 0.0, "g must be >= 0");
        require(kappa_a > 0.0, "kappa_a must be > 0");
        require(kappa_b > 0.0, "kappa_b must be > 0");
        require(gamma == 1.0, "gamma must be 1 (normalize rates first)");
        require(std::isfinite(delta), "delta must be finite");
        require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
        require(f >= 0.0 && f < 1.0, "f must lie in [0, 1)");
        require(g_tilde >= 0.0, "g_tilde must be >= 0");
        require(kappa_tilde >= 0.0, "kappa_tilde must be >= 0");
        require(!(g_tilde > 0.0 && kappa_tilde == 0.0), "g_tilde > 0 requires kappa_tilde > 0");
    }
};

struct SpectrumPoint {
    double omega = 0.0;
    std::complex<double> r;
    std::complex<double> t;
    double R = 0.0;
    double T = 0.0;
    double lambda = 0.0;
};

namespace detail {

inline void check_response_args(double x, int atoms) {
    if (!(x >= 0.0)) {
        throw DomainError("cooperativity must be non-negative");
    }
    if (atoms < 0) {
        throw DomainError("atom count must be non-negative");
    }
}

}  // namespace detail

/// Resonant reflection probability (4Nx / (1 + 4Nx))^2.
inline double reflection_probability(double x, int atoms) {
    detail::check_response_args(x, atoms);
    const double c = 4.0 * atoms * x;
    const double r = c / (1.0 + c);
    return r * r;
}

/// Resonant transmission probability 1 / (1 + 4Nx)^2.
inline double transmission_probability(double x, int atoms) {
    detail::check_response_args(x, atoms);
    const double t = 1.0 / (1.0 + 4.0 * atoms * x);
    return t * t;
}

/// Probability that a resonant photon is lost to spontaneous emission,
/// 1 - R_N - T_N = 2C / (1 + C)^2 with C = 4Nx. Peaks at 1/2 when C = 1.
inline double scattering_loss(double x, int atoms) {
    detail::check_response_args(x, atoms);
    const double c = 4.0 * atoms * x;
    return 2.0 * c / ((1.0 + c) * (1.0 + c));
}

/// Complex reflection and transmission amplitudes at probe detuning `omega`.
///
/// With N atoms in |1> and one excitation at most, eliminating the atomic
/// coherences from the cavity equation of motion leaves
///
///   c(w) = [sqrt(ka) a_in + sqrt(kb) b_in] / D(w),
///   D(w) = kappa/2 - i w + N g^2 / (gamma/2 + i (delta - w)),
///
/// where the atomic noise term is dropped because it carries no coherent
/// amplitude. With b_in in vacuum and the boundary conditions
/// a_out = a_in - sqrt(ka) c, b_out = b_in - sqrt(kb) c:
///
///   r(w) = 1 - ka / D(w),   t(w) = -sqrt(ka kb) / D(w).
///
/// On resonance with ka = kb this gives r = 4Nx/(1+4Nx), t = -1/(1+4Nx).
/// Only |r|^2 and |t|^2 carry physical meaning; the sign of t follows the
/// boundary-condition convention above.
inline SpectrumPoint scattering_amplitudes(const CavityParams &params, double omega, int atoms) {
    params.validate();
    if (atoms < 0) {
        throw DomainError("atom count must be non-negative");
    }
    using cd = std::complex<double>;
    const cd i(0.0, 1.0);
    const cd atomic = cd(0.5 * params.gamma, 0.0) + i * (params.delta - omega);
    const cd denom = 0.5 * params.kappa() - i * omega + double(atoms) * params.g * params.g / atomic;

    SpectrumPoint p;
    p.omega = omega;
    p.r = 1.0 - params.kappa_a / denom;
    p.t = -std::sqrt(params.kappa_a * params.kappa_b) / denom;
    p.R = std::norm(p.r);
    p.T = std::norm(p.t);
    p.lambda = 1.0 - p.R - p.T;
    // Round-off can leave -1e-17 for an empty cavity.
    p.lambda = std::max(0.0, p.lambda);
    return p;
}

/// Cooperativity seen by the heralding mode of a ring cavity once photons
/// leaving through the counter-propagating mode are counted as loss:
/// g^2 / (kappa gamma + 4 g_tilde^2 kappa / kappa_tilde).
inline double effective_cooperativity_ring(const CavityParams &params) {
    params.validate();
    const double kappa = params.kappa();
    double denom = kappa * params.gamma;
    if (params.g_tilde > 0.0) {
        denom += 4.0 * params.g_tilde * params.g_tilde * kappa / params.kappa_tilde;
    }
    return params.g * params.g / denom;
}

}  // namespace cavityherald
