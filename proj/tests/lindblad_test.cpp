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

#include "cavityherald/oracle/lindblad.hpp"

#include <cmath>

#include "gtest/gtest.h"

using namespace cavityherald;
using namespace cavityherald::oracle;

TEST(BuildSystem, dimensions_and_hermiticity) {
    CavityParams p = CavityParams::from_cooperativity(0.8);
    p.delta = 0.3;
    const LindbladSystem sys = build_system(p, 1, 3, 1e-3, {.probe_detuning = 0.2});
    EXPECT_EQ(sys.layout.dim(), 9 * 4);
    EXPECT_EQ(sys.hamiltonian.rows(), 36);
    EXPECT_LT(hermiticity_error(sys.hamiltonian), 1e-12);
    EXPECT_EQ(sys.collapse_ops.size(), 4u);
    for (const Matrix &l : sys.collapse_ops) {
        EXPECT_GT(l.cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(l.rows(), 36);
    }
    EXPECT_EQ(sys.atoms_in_one(), 1);
}

TEST(BuildSystem, rejects_bad_arguments) {
    const CavityParams p = CavityParams::from_cooperativity(1.0);
    EXPECT_THROW(build_system(p, 1, 1, 1e-3), DomainError);
    EXPECT_THROW(build_system(p, 3, 3, 1e-3), DomainError);
    EXPECT_THROW(build_system(p, 1, 3, 0.05), DomainError);
    EXPECT_NO_THROW(build_system(p, 1, 3, 0.05, {.allow_strong_drive = true}));
}

TEST(Liouvillian, preserves_trace) {
    const LindbladSystem sys = build_system(CavityParams::from_cooperativity(1.0), 2, 2, 1e-2);
    const std::vector<int> basis = block_basis(sys.layout, {sys.coupled_atoms});
    std::vector<Matrix> jumps;
    for (const Matrix &l : sys.collapse_ops) {
        jumps.push_back(restrict_to(l, basis));
    }
    const Matrix gen = liouvillian(restrict_to(sys.hamiltonian, basis), jumps);
    const Eigen::Index d = Eigen::Index(basis.size());
    // The trace functional is a left null vector of any Lindblad generator.
    Vector trace_row = Vector::Zero(d * d);
    for (Eigen::Index k = 0; k < d; ++k) {
        trace_row(k * d + k) = 1.0;
    }
    EXPECT_LT((trace_row.transpose() * gen).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SteadyState, empty_cavity_transmits) {
    const SteadyStateResponse s = steady_state_rt(build_system(CavityParams::from_cooperativity(1.0), 0, 3, 1e-3));
    EXPECT_LT(s.R, 1e-4);
    EXPECT_NEAR(s.T, 1.0, 1e-3);
    EXPECT_LT(s.boundary_population, truncation_population_tol);
}

TEST(SteadyState, reproduces_resonant_closed_forms) {
    for (int atoms : {1, 2}) {
        for (double x : {0.25, 1.0, 2.0}) {
            const SteadyStateResponse s = steady_state_rt_auto(CavityParams::from_cooperativity(x), atoms, 1e-3);
            EXPECT_NEAR(s.R, reflection_probability(x, atoms), 0.01 * reflection_probability(x, atoms));
            EXPECT_NEAR(s.T, transmission_probability(x, atoms), 0.01 * transmission_probability(x, atoms));
            EXPECT_NEAR(s.lambda, scattering_loss(x, atoms), 0.01 * scattering_loss(x, atoms));
            EXPECT_NEAR(s.R + s.T + s.lambda, 1.0, 1e-3);
            EXPECT_LT(s.trace_error, 1e-10);
            EXPECT_GT(s.min_eigenvalue, -1e-10);
            EXPECT_LT(s.residual, steady_state_residual_tol);
        }
    }
}

TEST(SteadyState, saturation_error_is_linear_in_flux) {
    const CavityParams p = CavityParams::from_cooperativity(1.0);
    std::vector<double> deviation;
    for (double flux : {1e-2, 1e-3, 1e-4}) {
        const SteadyStateResponse s = steady_state_rt_auto(p, 1, flux);
        deviation.push_back(std::abs(s.R - 0.64));
    }
    // Each tenfold reduction in flux cuts the deviation about tenfold.
    EXPECT_NEAR(deviation[0] / deviation[1], 10.0, 1.0);
    EXPECT_NEAR(deviation[1] / deviation[2], 10.0, 1.0);
}

TEST(SteadyState, off_resonant_probe_matches_amplitudes) {
    CavityParams p = CavityParams::from_cooperativity(0.6);
    p.kappa_a = 0.3;
    p.kappa_b = 0.7;
    p.delta = 0.4;
    for (double omega : {-1.0, 0.0, 0.5}) {
        const SteadyStateResponse s = steady_state_rt(build_system(p, 1, 3, 1e-4, {.probe_detuning = omega}));
        const SpectrumPoint ref = scattering_amplitudes(p, omega, 1);
        EXPECT_NEAR(s.R, ref.R, 2e-3 * std::max(ref.R, 0.01)) << omega;
        EXPECT_NEAR(s.T, ref.T, 2e-3 * std::max(ref.T, 0.01)) << omega;
    }
}

TEST(SteadyState, needs_drive) {
    EXPECT_THROW(steady_state_rt(build_system(CavityParams::from_cooperativity(1.0), 1, 3, 0.0)), DomainError);
}

TEST(CoherenceDecay, matches_loss_rate) {
    for (double x : {0.25, 1.0}) {
        const CoherenceDecayFit fit = coherence_decay_rate(build_system(CavityParams::from_cooperativity(x), 1, 3, 1e-3));
        EXPECT_NEAR(fit.predicted, scattering_loss(x, 1) * 1e-3, 1e-15);
        EXPECT_NEAR(fit.rate, fit.predicted, 0.02 * fit.predicted) << x;
        EXPECT_LT(fit.residual_rms, coherence_fit_residual_tol);
    }
}

TEST(CoherenceDecay, no_light_no_decay) {
    const CoherenceDecayFit fit = coherence_decay_rate(build_system(CavityParams::from_cooperativity(1.0), 1, 3, 0.0));
    EXPECT_NEAR(fit.rate, 0.0, 1e-12);
}
