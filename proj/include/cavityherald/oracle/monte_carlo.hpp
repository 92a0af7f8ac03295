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

// Monte Carlo sampling of the two-round coherent heralding process.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

#include "cavityherald/protocol.hpp"

namespace cavityherald::oracle {

/// Click coordinates (in mean incident photon number) of one attempt.
struct TrajectorySample {
    int subspace = 0;  ///< atoms in |1> during the first round
    std::optional<double> n1;
    std::optional<double> n2;
    double coherence_weight = 1.0;  ///< e^{-lambda (n1 + n2)}

    bool heralded(double n_max) const { return n1 && n2 && *n1 + *n2 <= n_max; }
};

struct MonteCarloOutcome {
    SchemeOutcome estimate;
    double p_success_stderr = 0.0;
    double fidelity_stderr = 0.0;
    std::size_t samples = 0;
    std::size_t successes = 0;
};

/// Draws attempts of the double-click scheme: preparation at phi = pi/4,
/// first click at rate eta R_N, swap |0> <-> |1> (N -> 2 - N), second click
/// at rate eta R_{2-N}.
class DoubleClickSampler {
  public:
    DoubleClickSampler(const CavityParams &params, std::uint64_t seed) : rng_(seed) {
        params.validate();
        const double x = effective_cooperativity_ring(params);
        for (int n = 0; n < 3; ++n) {
            rates_[n] = params.eta * reflection_probability(x, n);
        }
        lambda_ = scattering_loss(x, 1);
        const Preparation prep = initial_populations(std::numbers::pi / 4);
        sector_ = std::discrete_distribution<int>({prep.p0, prep.p1, prep.p2});
    }

    TrajectorySample draw() {
        TrajectorySample s;
        s.subspace = sector_(rng_);
        s.n1 = click(rates_[s.subspace]);
        if (s.n1) {
            s.n2 = click(rates_[2 - s.subspace]);
        }
        if (s.n1 && s.n2) {
            s.coherence_weight = std::exp(-lambda_ * (*s.n1 + *s.n2));
        }
        return s;
    }

  private:
    std::optional<double> click(double rate) {
        if (!(rate > 0.0)) {
            return std::nullopt;
        }
        return std::exponential_distribution<double>(rate)(rng_);
    }

    std::mt19937_64 rng_;
    std::discrete_distribution<int> sector_;
    double rates_[3] = {0.0, 0.0, 0.0};
    double lambda_ = 0.0;
};

/// Estimates P_s and F of the double-click coherent scheme with standard
/// errors. A heralded attempt from the one-atom sector contributes fidelity
/// 1/2 + e^{-lambda (n1 + n2)}/2; from the other sectors it contributes 0.
inline MonteCarloOutcome monte_carlo_double(const CavityParams &params, double n_max, std::size_t samples,
                                            std::uint64_t seed) {
    if (!(n_max > 0.0)) {
        throw DomainError("photon budget must be positive");
    }
    if (samples < 10000) {
        throw DomainError("Monte Carlo estimate needs at least 1e4 samples");
    }
    DoubleClickSampler sampler(params, seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    double p1_sum = 0.0;
    std::size_t successes = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const TrajectorySample s = sampler.draw();
        if (!s.heralded(n_max)) {
            continue;
        }
        ++successes;
        const double value = s.subspace == 1 ? 0.5 + 0.5 * s.coherence_weight : 0.0;
        sum += value;
        sum_sq += value * value;
        p1_sum += s.subspace == 1 ? 1.0 : 0.0;
    }

    MonteCarloOutcome out;
    out.samples = samples;
    out.successes = successes;
    const double p = double(successes) / double(samples);
    out.estimate.p_success = p;
    out.p_success_stderr = std::sqrt(p * (1.0 - p) / double(samples));
    if (successes == 0) {
        out.estimate.status = OutcomeStatus::undefined;
        return out;
    }
    const double k = double(successes);
    const double mean = sum / k;
    const double var = successes > 1 ? std::max(0.0, (sum_sq - k * mean * mean) / (k - 1.0)) : 0.0;
    out.estimate.status = OutcomeStatus::ok;
    out.estimate.fidelity = mean;
    out.estimate.p1c = p1_sum / k;
    out.estimate.re_xi = mean - *out.estimate.p1c / 2.0;
    out.fidelity_stderr = std::sqrt(var / k);
    return out;
}

}  // namespace cavityherald::oracle
