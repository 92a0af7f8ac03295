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

// Weak-drive Lindblad model of two three-level atoms in a driven cavity,
// used to check the closed-form cavity response and coherence decay.
//
// The populations of |0> and of the {|1>, |e>} manifold are conserved for
// each atom (closed transition), so every computation runs on the invariant
// block selected by the initial atomic configuration. Operators are built on
// the full space and then restricted; the restriction is exact because the
// block is invariant under the Hamiltonian and all collapse operators.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "cavityherald/core_model.hpp"
#include "cavityherald/oracle/error.hpp"

namespace cavityherald::oracle {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using cd = std::complex<double>;

enum Level : int { ground = 0, coupled = 1, excited = 2 };

/// Two atoms with levels {|0>, |1>, |e>} times a cavity Fock space {0..cutoff}.
struct HilbertLayout {
    int photon_cutoff = 3;

    int photon_states() const { return photon_cutoff + 1; }
    int dim() const { return 9 * photon_states(); }
    int index(int atom1, int atom2, int photons) const { return (atom1 * 3 + atom2) * photon_states() + photons; }
};

struct LindbladSystem {
    HilbertLayout layout;
    CavityParams params;
    /// Which atoms start in |1> (the others start in the uncoupled |0>).
    std::array<bool, 2> coupled_atoms{false, false};
    double drive_flux = 0.0;
    double probe_detuning = 0.0;

    Matrix annihilation;
    std::array<Matrix, 2> lowering;  ///< |1><e| for each atom
    Matrix hamiltonian;
    /// sqrt(kappa_a) c, sqrt(kappa_b) c, sqrt(gamma) |1><e|_1, sqrt(gamma) |1><e|_2
    std::vector<Matrix> collapse_ops;

    int atoms_in_one() const { return int(coupled_atoms[0]) + int(coupled_atoms[1]); }
};

struct BuildOptions {
    double probe_detuning = 0.0;
    /// Permit drive_flux above the weak-drive guard of 1e-2 gamma.
    bool allow_strong_drive = false;
};

inline constexpr double weak_drive_limit = 1e-2;

/// Assemble the generator for `atoms_in_one` atoms starting in |1>, a cavity
/// truncated at `photon_cutoff` photons, and a resonant coherent drive of
/// `drive_flux` photons per unit time entering through mirror a.
///
/// In the frame rotating at the probe frequency,
///   H = sum_k g (|e><1|_k c + c^dag |1><e|_k) + (delta - w) |e><e|_k
///       - w c^dag c + i sqrt(kappa_a Phi) (c^dag - c),
/// which gives dc/dt = -(kappa/2) c + sqrt(kappa_a) a_in + ... as assumed by
/// the input/output relations.
inline LindbladSystem build_system(const CavityParams &params, int atoms_in_one, int photon_cutoff,
                                   double drive_flux, const BuildOptions &options = {}) {
    params.validate();
    if (photon_cutoff < 2) {
        throw DomainError("photon truncation must be at least 2");
    }
    if (atoms_in_one < 0 || atoms_in_one > 2) {
        throw DomainError("atoms in |1> must be 0, 1 or 2");
    }
    if (!(drive_flux >= 0.0)) {
        throw DomainError("drive flux must be non-negative");
    }
    if (drive_flux / params.gamma > weak_drive_limit && !options.allow_strong_drive) {
        throw DomainError("drive flux exceeds the weak-drive limit of 1e-2 gamma");
    }

    LindbladSystem sys;
    sys.layout.photon_cutoff = photon_cutoff;
    sys.params = params;
    sys.coupled_atoms = {atoms_in_one >= 1, atoms_in_one >= 2};
    sys.drive_flux = drive_flux;
    sys.probe_detuning = options.probe_detuning;

    const HilbertLayout &L = sys.layout;
    const int dim = L.dim();
    sys.annihilation = Matrix::Zero(dim, dim);
    sys.lowering = {Matrix::Zero(dim, dim), Matrix::Zero(dim, dim)};
    for (int a1 = 0; a1 < 3; ++a1) {
        for (int a2 = 0; a2 < 3; ++a2) {
            for (int n = 0; n < L.photon_states(); ++n) {
                if (n > 0) {
                    sys.annihilation(L.index(a1, a2, n - 1), L.index(a1, a2, n)) = std::sqrt(double(n));
                }
                if (a1 == excited) {
                    sys.lowering[0](L.index(coupled, a2, n), L.index(excited, a2, n)) = 1.0;
                }
                if (a2 == excited) {
                    sys.lowering[1](L.index(a1, coupled, n), L.index(a1, excited, n)) = 1.0;
                }
            }
        }
    }

    const Matrix &c = sys.annihilation;
    const Matrix cdag = c.adjoint();
    const double w = options.probe_detuning;
    Matrix h = -w * (cdag * c);
    for (const Matrix &low : sys.lowering) {
        const Matrix raise = low.adjoint();
        h += params.g * (raise * c + cdag * low);
        h += (params.delta - w) * (raise * low);
    }
    const cd i(0.0, 1.0);
    h += i * std::sqrt(params.kappa_a * drive_flux) * (cdag - c);
    sys.hamiltonian = h;

    sys.collapse_ops = {std::sqrt(params.kappa_a) * c, std::sqrt(params.kappa_b) * c,
                        std::sqrt(params.gamma) * sys.lowering[0], std::sqrt(params.gamma) * sys.lowering[1]};
    return sys;
}

inline double hermiticity_error(const Matrix &m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

/// Basis indices (into the full space) of the block in which atom k is
/// confined to `manifolds[k]`.
inline std::vector<int> block_basis(const HilbertLayout &layout, const std::vector<std::array<bool, 2>> &blocks) {
    std::vector<int> basis;
    for (int a1 = 0; a1 < 3; ++a1) {
        for (int a2 = 0; a2 < 3; ++a2) {
            bool keep = false;
            for (const auto &coupled_atom : blocks) {
                const bool ok1 = coupled_atom[0] ? a1 != ground : a1 == ground;
                const bool ok2 = coupled_atom[1] ? a2 != ground : a2 == ground;
                keep = keep || (ok1 && ok2);
            }
            if (keep) {
                for (int n = 0; n < layout.photon_states(); ++n) {
                    basis.push_back(layout.index(a1, a2, n));
                }
            }
        }
    }
    return basis;
}

inline Matrix restrict_to(const Matrix &op, const std::vector<int> &basis) {
    const int d = int(basis.size());
    Matrix out(d, d);
    for (int r = 0; r < d; ++r) {
        for (int col = 0; col < d; ++col) {
            out(r, col) = op(basis[r], basis[col]);
        }
    }
    return out;
}

/// Superoperator acting on column-major vec(rho):
/// vec(A rho B) = (B^T (x) A) vec(rho).
inline Matrix liouvillian(const Matrix &h, const std::vector<Matrix> &jumps) {
    const Eigen::Index d = h.rows();
    const Matrix id = Matrix::Identity(d, d);
    const cd i(0.0, 1.0);
    auto kron = [](const Matrix &a, const Matrix &b) {
        Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            for (Eigen::Index c = 0; c < a.cols(); ++c) {
                out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
            }
        }
        return out;
    };
    Matrix gen = -i * (kron(id, h) - kron(h.transpose(), id));
    for (const Matrix &l : jumps) {
        const Matrix ldl = l.adjoint() * l;
        gen += kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
    }
    return gen;
}

inline Matrix unvec(const Vector &v, Eigen::Index d) {
    Matrix rho(d, d);
    for (Eigen::Index col = 0; col < d; ++col) {
        rho.col(col) = v.segment(col * d, d);
    }
    return rho;
}

inline Vector vec(const Matrix &rho) {
    const Eigen::Index d = rho.rows();
    Vector v(d * d);
    for (Eigen::Index col = 0; col < d; ++col) {
        v.segment(col * d, d) = rho.col(col);
    }
    return v;
}

struct SteadyStateResponse {
    double R = 0.0;
    double T = 0.0;
    double lambda = 0.0;
    /// max |L rho| of the returned state
    double residual = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;
    /// Total population in the highest retained photon number.
    double boundary_population = 0.0;
    bool used_time_integration = false;
    Matrix rho;  ///< restricted to the invariant block
};

inline constexpr double steady_state_residual_tol = 1e-10;
inline constexpr double truncation_population_tol = 1e-8;

namespace detail {

inline Vector solve_null_space(const Matrix &gen, Eigen::Index d) {
    Matrix a = gen;
    Vector rhs = Vector::Zero(gen.rows());
    // Replace one equation by the trace condition.
    a.row(0).setZero();
    for (Eigen::Index k = 0; k < d; ++k) {
        a(0, k * d + k) = 1.0;
    }
    rhs(0) = 1.0;
    return a.partialPivLu().solve(rhs);
}

inline Vector integrate_to_steady_state(const Matrix &gen, double slowest_rate) {
    Vector v = Vector::Zero(gen.rows());
    v(0) = 1.0;  // lowest basis state of the block, cavity vacuum
    Matrix step = (gen * (10.0 / slowest_rate)).exp();
    for (int i = 0; i < 60; ++i) {
        v = step * v;
        if ((gen * v).cwiseAbs().maxCoeff() < steady_state_residual_tol) {
            return v;
        }
        step = step * step;
    }
    throw OracleError("time integration did not reach steady state; residual " +
                      std::to_string((gen * v).cwiseAbs().maxCoeff()));
}

}  // namespace detail

/// Steady-state reflection, transmission and loss fractions of the drive.
///
/// T = kappa_b <c^dag c> / Phi,
/// R = (Phi - 2 sqrt(kappa_a) Re(alpha^* <c>) + kappa_a <c^dag c>) / Phi,
/// lambda = gamma sum_k <|e><e|_k> / Phi, with alpha = sqrt(Phi).
inline SteadyStateResponse steady_state_rt(const LindbladSystem &sys) {
    if (!(sys.drive_flux > 0.0)) {
        throw DomainError("steady-state response needs a positive drive flux");
    }
    const std::vector<int> basis = block_basis(sys.layout, {sys.coupled_atoms});
    const Eigen::Index d = Eigen::Index(basis.size());

    std::vector<Matrix> jumps;
    for (const Matrix &l : sys.collapse_ops) {
        jumps.push_back(restrict_to(l, basis));
    }
    const Matrix h = restrict_to(sys.hamiltonian, basis);
    const Matrix gen = liouvillian(h, jumps);

    SteadyStateResponse out;
    Vector v = detail::solve_null_space(gen, d);
    out.residual = (gen * v).cwiseAbs().maxCoeff();
    if (!(out.residual < steady_state_residual_tol)) {
        const double slowest = std::min({sys.params.kappa(), sys.params.gamma, 1.0});
        v = detail::integrate_to_steady_state(gen, slowest);
        out.residual = (gen * v).cwiseAbs().maxCoeff();
        out.used_time_integration = true;
    }

    Matrix rho = unvec(v, d);
    rho = 0.5 * (rho + rho.adjoint());
    out.trace_error = std::abs(rho.trace() - cd(1.0, 0.0));
    out.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(rho).eigenvalues().minCoeff();

    for (Eigen::Index k = 0; k < d; ++k) {
        if (basis[k] % sys.layout.photon_states() == sys.layout.photon_cutoff) {
            out.boundary_population += rho(k, k).real();
        }
    }

    const Matrix c = restrict_to(sys.annihilation, basis);
    const double photons = (rho * c.adjoint() * c).trace().real();
    const cd field = (rho * c).trace();
    const double flux = sys.drive_flux;
    const double alpha = std::sqrt(flux);
    const double ka = sys.params.kappa_a;
    out.T = sys.params.kappa_b * photons / flux;
    out.R = (flux - 2.0 * std::sqrt(ka) * alpha * field.real() + ka * photons) / flux;
    double emitted = 0.0;
    for (const Matrix &low : sys.lowering) {
        const Matrix l = restrict_to(low, basis);
        emitted += (rho * l.adjoint() * l).trace().real();
    }
    out.lambda = sys.params.gamma * emitted / flux;
    out.rho = rho;
    return out;
}

/// Steady-state response with the photon truncation raised from 3 until the
/// boundary population falls below 1e-8.
inline SteadyStateResponse steady_state_rt_auto(const CavityParams &params, int atoms_in_one, double drive_flux,
                                                const BuildOptions &options = {}, int max_cutoff = 12) {
    for (int cutoff = 3; cutoff <= max_cutoff; ++cutoff) {
        SteadyStateResponse out = steady_state_rt(build_system(params, atoms_in_one, cutoff, drive_flux, options));
        if (out.boundary_population < truncation_population_tol) {
            return out;
        }
    }
    throw OracleError("photon truncation did not converge up to " + std::to_string(max_cutoff) + " photons");
}

struct CoherenceDecayFit {
    double rate = 0.0;           ///< fitted decay rate of |xi(t)|
    double predicted = 0.0;      ///< lambda_1 * Phi from the closed form
    double window_start = 0.0;
    double window_end = 0.0;
    double residual_rms = 0.0;   ///< of the log-linear fit
    std::size_t samples = 0;
};

inline constexpr double coherence_fit_residual_tol = 1e-3;

/// Evolve (|01> + |10>)/sqrt(2) with the cavity in vacuum under the system's
/// drive and fit the decay of xi = <0_1 1_2| rho_atoms |1_1 0_2> over the
/// window [10/kappa, 10/kappa + 5/(lambda Phi)].
///
/// The system may be built with any atom count; only its operators are used.
inline CoherenceDecayFit coherence_decay_rate(const LindbladSystem &sys, std::size_t samples = 200) {
    const HilbertLayout &layout = sys.layout;
    const std::vector<int> basis = block_basis(layout, {{false, true}, {true, false}});
    const Eigen::Index d = Eigen::Index(basis.size());

    std::vector<Matrix> jumps;
    for (const Matrix &l : sys.collapse_ops) {
        jumps.push_back(restrict_to(l, basis));
    }
    const Matrix gen = liouvillian(restrict_to(sys.hamiltonian, basis), jumps);

    auto position = [&](int full_index) {
        for (Eigen::Index k = 0; k < d; ++k) {
            if (basis[k] == full_index) {
                return k;
            }
        }
        throw OracleError("state outside the coherence block");
    };
    Vector psi = Vector::Zero(d);
    psi(position(layout.index(ground, coupled, 0))) = 1.0 / std::sqrt(2.0);
    psi(position(layout.index(coupled, ground, 0))) = 1.0 / std::sqrt(2.0);
    Vector v = vec(psi * psi.adjoint());

    std::vector<std::array<Eigen::Index, 2>> xi_entries;
    for (int n = 0; n < layout.photon_states(); ++n) {
        xi_entries.push_back({position(layout.index(ground, coupled, n)), position(layout.index(coupled, ground, n))});
    }
    auto coherence = [&](const Vector &state) {
        cd xi = 0.0;
        for (const auto &[row, col] : xi_entries) {
            xi += state(col * d + row);
        }
        return std::abs(xi);
    };

    CoherenceDecayFit fit;
    const double x = sys.params.cooperativity();
    fit.predicted = scattering_loss(x, 1) * sys.drive_flux;
    fit.window_start = 10.0 / sys.params.kappa();
    const double span = fit.predicted > 0.0 ? 5.0 / fit.predicted : 1e4;
    fit.window_end = fit.window_start + span;
    fit.samples = samples;

    v = (gen * fit.window_start).exp() * v;
    const double dt = span / double(samples - 1);
    const Matrix step = (gen * dt).exp();

    std::vector<double> ts, ys;
    for (std::size_t k = 0; k < samples; ++k) {
        if (k > 0) {
            v = step * v;
        }
        ts.push_back(fit.window_start + dt * double(k));
        ys.push_back(std::log(coherence(v)));
    }

    double t_mean = 0.0, y_mean = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        t_mean += ts[k];
        y_mean += ys[k];
    }
    t_mean /= double(samples);
    y_mean /= double(samples);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        sxy += (ts[k] - t_mean) * (ys[k] - y_mean);
        sxx += (ts[k] - t_mean) * (ts[k] - t_mean);
    }
    const double slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double r = ys[k] - (y_mean + slope * (ts[k] - t_mean));
        ss += r * r;
    }
    fit.rate = -slope;
    fit.residual_rms = std::sqrt(ss / double(samples));
    if (!(fit.residual_rms < coherence_fit_residual_tol)) {
        throw OracleError("coherence decay is not exponential over the fit window; rms residual " +
                          std::to_string(fit.residual_rms));
    }
    return fit;
}

}  // namespace cavityherald::oracle
