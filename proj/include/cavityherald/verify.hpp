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

// End-to-end comparison of the closed forms against the independent oracles.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cavityherald/core_model.hpp"
#include "cavityherald/oracle/lindblad.hpp"
#include "cavityherald/oracle/monte_carlo.hpp"
#include "cavityherald/oracle/quadrature.hpp"
#include "cavityherald/protocol.hpp"

namespace cavityherald {

enum class Comparison {
    within,  ///< |observed - expected| <= tolerance
    below,   ///< observed < expected
    above,   ///< observed > expected
};

inline const char *comparison_name(Comparison c) {
    switch (c) {
    case Comparison::within:
        return "within";
    case Comparison::below:
        return "below";
    case Comparison::above:
        return "above";
    }
    return "unknown";
}

struct CheckResult {
    std::string name;
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    Comparison comparison = Comparison::within;
    bool pass = false;
    std::string note;
};

struct VerifyOptions {
    std::uint64_t seed = 20020101;
    std::size_t samples = 1'000'000;
    /// Multiplies every absolute tolerance; 0 turns the suite into a failure drill.
    double tolerance_scale = 1.0;
};

struct QuadraturePoint {
    double x;
    double eta;
    double phi;
    double n_max;
};

/// 20 points spanning weak to strong coupling, both detector efficiencies,
/// small and balanced preparations, and short to long photon budgets.
inline std::vector<QuadraturePoint> quadrature_grid() {
    const std::array<double, 5> xs{0.1, 0.3, 1.0, 2.0, 5.0};
    const std::array<std::array<double, 3>, 4> settings{{
        {1.0, 0.2, 0.5},
        {0.5, 0.3, 2.0},
        {1.0, std::numbers::pi / 4, 1.0},
        {0.5, std::numbers::pi / 4, 10.0},
    }};
    std::vector<QuadraturePoint> grid;
    for (double x : xs) {
        for (const auto &s : settings) {
            grid.push_back({x, s[0], s[1], s[2]});
        }
    }
    return grid;
}

namespace detail {

inline std::string label(const std::string &base, std::initializer_list<std::pair<const char *, double>> tags) {
    std::ostringstream os;
    os << base;
    for (const auto &[key, value] : tags) {
        os << '/' << key << '=' << value;
    }
    return os.str();
}

class CheckLog {
  public:
    explicit CheckLog(double scale) : scale_(scale) {}

    void within(std::string name, double expected, double observed, double tolerance, std::string note = {}) {
        const double tol = tolerance * scale_;
        push({std::move(name), expected, observed, tol, Comparison::within, std::abs(observed - expected) <= tol,
              std::move(note)});
    }
    void below(std::string name, double bound, double observed, std::string note = {}) {
        push({std::move(name), bound, observed, 0.0, Comparison::below, observed < bound, std::move(note)});
    }
    void above(std::string name, double bound, double observed, std::string note = {}) {
        push({std::move(name), bound, observed, 0.0, Comparison::above, observed > bound, std::move(note)});
    }
    void failed(std::string name, std::string note) {
        push({std::move(name), 0.0, 0.0, 0.0, Comparison::within, false, std::move(note)});
    }

    std::vector<CheckResult> take() { return std::move(results_); }

  private:
    void push(CheckResult r) { results_.push_back(std::move(r)); }

    double scale_;
    std::vector<CheckResult> results_;
};

}  // namespace detail

inline double max_relative_deviation(const oracle::SteadyStateResponse &s, double x, int atoms) {
    return std::max({std::abs(s.R / reflection_probability(x, atoms) - 1.0),
                     std::abs(s.T / transmission_probability(x, atoms) - 1.0),
                     std::abs(s.lambda / scattering_loss(x, atoms) - 1.0)});
}

/// Steady-state master-equation response against the resonant closed forms.
inline void verify_steady_state(detail::CheckLog &log) {
    using detail::label;
    {
        const auto empty = oracle::steady_state_rt_auto(CavityParams::from_cooperativity(1.0), 0, 1e-3);
        log.within("steady_state/empty_cavity/R", 0.0, empty.R, 1e-4);
        log.within("steady_state/empty_cavity/T", 1.0, empty.T, 1e-3);
    }
    for (int atoms : {1, 2}) {
        for (double x : {0.25, 1.0, 2.0}) {
            const CavityParams params = CavityParams::from_cooperativity(x);
            const auto coarse = oracle::steady_state_rt_auto(params, atoms, 1e-3);
            const auto fine = oracle::steady_state_rt_auto(params, atoms, 1e-4);
            const double r = reflection_probability(x, atoms);
            const double t = transmission_probability(x, atoms);
            const double l = scattering_loss(x, atoms);
            log.within(label("steady_state/R", {{"N", atoms}, {"x", x}, {"flux", 1e-3}}), r, coarse.R, 0.01 * r);
            log.within(label("steady_state/T", {{"N", atoms}, {"x", x}, {"flux", 1e-3}}), t, coarse.T, 0.01 * t);
            log.within(label("steady_state/lambda", {{"N", atoms}, {"x", x}, {"flux", 1e-3}}), l, coarse.lambda,
                       0.01 * l);
            log.within(label("steady_state/flux_conservation", {{"N", atoms}, {"x", x}, {"flux", 1e-3}}), 1.0,
                       coarse.R + coarse.T + coarse.lambda, 1e-3);
            log.within(label("steady_state/trace", {{"N", atoms}, {"x", x}}), 1.0, 1.0 - coarse.trace_error, 1e-10);
            log.above(label("steady_state/min_eigenvalue", {{"N", atoms}, {"x", x}}), -1e-10, coarse.min_eigenvalue);
            log.below(label("steady_state/weak_drive_convergence", {{"N", atoms}, {"x", x}}),
                      max_relative_deviation(coarse, x, atoms), max_relative_deviation(fine, x, atoms),
                      "max relative deviation at flux 1e-4 must be below that at 1e-3");
        }
    }
}

inline void verify_coherence_decay(detail::CheckLog &log) {
    for (double x : {0.25, 1.0}) {
        const auto sys = oracle::build_system(CavityParams::from_cooperativity(x), 1, 3, 1e-3);
        const oracle::CoherenceDecayFit fit = oracle::coherence_decay_rate(sys);
        log.within(detail::label("coherence_decay/rate", {{"x", x}, {"flux", 1e-3}}), fit.predicted, fit.rate,
                   0.02 * fit.predicted, "fitted decay of |xi| against lambda * flux");
    }
}

inline void verify_quadrature(detail::CheckLog &log) {
    for (const QuadraturePoint &q : quadrature_grid()) {
        const CavityParams params = CavityParams::from_cooperativity(q.x, q.eta);
        const SchemeOutcome closed = coherent_single(params, q.phi, q.n_max);
        const SchemeOutcome quad = oracle::quadrature_single(params, q.phi, q.n_max);
        const auto tags = {std::pair<const char *, double>{"x", q.x},
                           {"eta", q.eta},
                           {"phi", q.phi},
                           {"n_max", q.n_max}};
        log.within(detail::label("quadrature/P_s", tags), closed.p_success, quad.p_success, 1e-8);
        log.within(detail::label("quadrature/F_times_P_s", tags), *closed.fidelity * closed.p_success,
                   *quad.fidelity * quad.p_success, 1e-8);
    }
}

inline void verify_double_click(detail::CheckLog &log, const VerifyOptions &options) {
    const CavityParams params = CavityParams::from_cooperativity(1.0, 1.0);
    const double n_max = 2.0;
    const SchemeOutcome closed = coherent_double(params, n_max);
    const oracle::MonteCarloOutcome mc = oracle::monte_carlo_double(params, n_max, options.samples, options.seed);
    log.within("monte_carlo_double/P_s/x=1/eta=1/n_max=2", closed.p_success, mc.estimate.p_success,
               3.0 * mc.p_success_stderr, "3 standard errors");
    if (mc.estimate.defined()) {
        log.within("monte_carlo_double/F/x=1/eta=1/n_max=2", *closed.fidelity, *mc.estimate.fidelity,
                   3.0 * mc.fidelity_stderr, "3 standard errors");
    } else {
        log.failed("monte_carlo_double/F/x=1/eta=1/n_max=2", "no heralded samples");
    }
    const double uncorrected = *coherent_double_fidelity_uncorrected(params, n_max);
    log.above("double_click/uncorrected_fidelity_exceeds_one/x=1/eta=1/n_max=2", 1.0, uncorrected,
              "the coherence term normalized by 2 P_s is not a valid fidelity; coherent_double uses 4 P_s");
}

inline void verify_false_reflection(detail::CheckLog &log) {
    const CavityParams params = CavityParams::from_cooperativity(1.0);
    log.within("false_reflection/x=1/f=0.01", 0.98, *false_reflection_fidelity(params, 0.01), 0.005);
    log.within("false_reflection/x=1/f=0.1", 0.85, *false_reflection_fidelity(params, 0.1), 0.005);
}

/// Runs every oracle comparison. Oracle failures become failed checks rather
/// than exceptions so the report is always complete.
inline std::vector<CheckResult> run_verification(const VerifyOptions &options = {}) {
    detail::CheckLog log(options.tolerance_scale);
    auto guarded = [&](const char *name, auto &&body) {
        try {
            body();
        } catch (const std::exception &e) {
            log.failed(name, e.what());
        }
    };
    guarded("false_reflection", [&] { verify_false_reflection(log); });
    guarded("steady_state", [&] { verify_steady_state(log); });
    guarded("coherence_decay", [&] { verify_coherence_decay(log); });
    guarded("quadrature", [&] { verify_quadrature(log); });
    guarded("monte_carlo_double", [&] { verify_double_click(log, options); });
    return log.take();
}

inline bool all_passed(const std::vector<CheckResult> &checks) {
    for (const CheckResult &c : checks) {
        if (!c.pass) {
            return false;
        }
    }
    return !checks.empty();
}

}  // namespace cavityherald
