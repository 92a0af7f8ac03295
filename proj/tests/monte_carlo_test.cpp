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

#include "cavityherald/oracle/monte_carlo.hpp"

#include <cmath>

#include "gtest/gtest.h"

using namespace cavityherald;
using namespace cavityherald::oracle;

TEST(MonteCarloDouble, agrees_with_closed_form) {
    const CavityParams p = CavityParams::from_cooperativity(1.0);
    const MonteCarloOutcome mc = monte_carlo_double(p, 2.0, 1'000'000, 17);
    ASSERT_TRUE(mc.estimate.defined());
    EXPECT_NEAR(mc.estimate.p_success, 0.183037477483359, 3.0 * mc.p_success_stderr);
    EXPECT_NEAR(*mc.estimate.fidelity, 0.847170959765982, 3.0 * mc.fidelity_stderr);
    EXPECT_EQ(*mc.estimate.p1c, 1.0);
}

TEST(MonteCarloDouble, long_budget_reaches_one_half) {
    const MonteCarloOutcome mc = monte_carlo_double(CavityParams::from_cooperativity(1.0), 1e3, 200'000, 4);
    EXPECT_NEAR(mc.estimate.p_success, 0.5, 3.0 * mc.p_success_stderr);
}

TEST(MonteCarloDouble, dead_detector_never_heralds) {
    const MonteCarloOutcome mc = monte_carlo_double(CavityParams::from_cooperativity(1.0, 0.0), 2.0, 10'000, 1);
    EXPECT_EQ(mc.successes, 0u);
    EXPECT_FALSE(mc.estimate.defined());
}

TEST(MonteCarloDouble, reproducible_for_fixed_seed) {
    const CavityParams p = CavityParams::from_cooperativity(0.7, 0.6);
    const MonteCarloOutcome a = monte_carlo_double(p, 3.0, 50'000, 99);
    const MonteCarloOutcome b = monte_carlo_double(p, 3.0, 50'000, 99);
    const MonteCarloOutcome c = monte_carlo_double(p, 3.0, 50'000, 100);
    EXPECT_EQ(a.successes, b.successes);
    EXPECT_EQ(*a.estimate.fidelity, *b.estimate.fidelity);
    EXPECT_NE(*a.estimate.fidelity, *c.estimate.fidelity);
}

TEST(MonteCarloDouble, standard_error_scales_as_inverse_root_samples) {
    const CavityParams p = CavityParams::from_cooperativity(1.0);
    const MonteCarloOutcome small = monte_carlo_double(p, 2.0, 100'000, 8);
    const MonteCarloOutcome large = monte_carlo_double(p, 2.0, 400'000, 8);
    EXPECT_NEAR(small.p_success_stderr / large.p_success_stderr, 2.0, 0.4);
    EXPECT_NEAR(small.fidelity_stderr / large.fidelity_stderr, 2.0, 0.4);
}

TEST(MonteCarloDouble, rejects_small_sample_counts) {
    EXPECT_THROW(monte_carlo_double(CavityParams::from_cooperativity(1.0), 2.0, 100, 1), DomainError);
}

TEST(DoubleClickSampler, only_one_atom_sector_clicks_twice) {
    DoubleClickSampler sampler(CavityParams::from_cooperativity(1.0), 5);
    for (int i = 0; i < 10'000; ++i) {
        const TrajectorySample s = sampler.draw();
        if (s.n1 && s.n2) {
            ASSERT_EQ(s.subspace, 1);
            ASSERT_GT(s.coherence_weight, 0.0);
            ASSERT_LE(s.coherence_weight, 1.0);
        }
        if (s.subspace == 0) {
            ASSERT_FALSE(s.n1.has_value());
        }
    }
}
