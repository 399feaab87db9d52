// swt.hpp: discrete reservoirs and the Schrieffer-Wolff elimination of the B site.
//
// A DiscreteReservoir is a finite level set {eps_j, g_j}. It appears in two roles:
//  * raw: g_j couples level j to the B site of the same cell (full three-band model);
//  * reduced: g_j is the k-independent factor of the effective coupling,
//    eta_j(k) = v(k) g_j, between the A site and level j.
// discretize_spectral_law() produces the reduced role; raw_reservoir() inverts the
// elimination so the full model can be simulated with the same effective couplings.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "kernel.hpp"
#include "model.hpp"

namespace nmwalk {

struct DiscreteReservoir {
    std::vector<double> eps;
    std::vector<double> g;

    std::size_t size() const noexcept { return eps.size(); }

    void validate() const {
        if (eps.size() != g.size()) throw ConfigError("reservoir: eps and g differ in length");
        if (eps.empty()) throw ConfigError("reservoir: no levels");
    }
};

// Midpoint discretization of J_alpha eps^alpha on (0, Delta]: eps_j = (j - 1/2) Delta/N
// with |eta_j(k)|^2 = J(k, eps_j) Delta/N. No level sits at eps = 0, which would be
// degenerate with the walker level.
inline DiscreteReservoir discretize_spectral_law(const SpectralLaw& law, std::size_t n_levels) {
    if (n_levels < 1) throw ConfigError("discretize: need at least one level");
    if (!(law.alpha >= 0.0) || !(law.j_alpha > 0.0) || !(law.delta > 0.0)) {
        throw ConfigError("discretize: invalid spectral law (need alpha >= 0, J_alpha > 0, Delta > 0)");
    }
    DiscreteReservoir out;
    out.eps.resize(n_levels);
    out.g.resize(n_levels);
    const double width = law.delta / static_cast<double>(n_levels);
    for (std::size_t j = 0; j < n_levels; ++j) {
        const double e = (static_cast<double>(j) + 0.5) * width;
        out.eps[j] = e;
        out.g[j] = std::sqrt(law.j_alpha * std::pow(e, law.alpha) * width);
    }
    return out;
}

// Effective single-level-plus-reservoir model after eliminating B.
//   eta_j(k)   = v(k) * eta_base[j]
//   eps_A(k)   = eps_A - |v(k)|^2 / omega   (diagnostic; dynamics uses eps_A_tilde)
// t_cross is the Hermitian part of t_jj' (zero diagonal); the Hamiltonian term
// sum_{j != j'} t_jj' |j><j'| + h.c. has matrix element 2 * t_cross(j, j').
struct ReducedModel {
    double eps_A_tilde{0.0};
    std::vector<double> eps_tilde;
    std::vector<std::complex<double>> eta_tilde_base;
    Eigen::MatrixXcd t_cross;
    double eps_A{0.0};
    double omega{std::numeric_limits<double>::infinity()};

    std::size_t size() const noexcept { return eps_tilde.size(); }

    double eps_A_tilde_at(double vk2) const noexcept {
        return std::isinf(omega) ? eps_A : eps_A - vk2 / omega;
    }

    // SW validity horizon heuristic tau_A ~ omega / |v(k)|^2 (no prefactor implied).
    double validity_horizon(double vk2) const noexcept {
        return vk2 > 0.0 ? omega / vk2 : std::numeric_limits<double>::infinity();
    }

    std::complex<double> eta(const WalkParams& p, std::size_t j, double k) const {
        return hopping_amplitude(p, k) * eta_tilde_base.at(j);
    }
};

// A reduced model built directly from reduced-role couplings (no B site to eliminate).
inline ReducedModel reduced_from_reservoir(const DiscreteReservoir& reduced) {
    reduced.validate();
    ReducedModel m;
    m.eps_tilde = reduced.eps;
    m.eta_tilde_base.assign(reduced.g.begin(), reduced.g.end());
    const auto n = static_cast<Eigen::Index>(reduced.size());
    m.t_cross = Eigen::MatrixXcd::Zero(n, n);
    return m;
}

inline constexpr double resonance_tolerance = 1e-9;
inline constexpr double perturbative_warning = 0.2;

// Second-order elimination of the B site from the raw three-band model.
inline ReducedModel reduce(const WalkParams& params, const DiscreteReservoir& raw,
                           std::ostream* warnings = &std::cerr) {
    params.validate();
    raw.validate();
    if (std::isinf(params.omega)) throw ConfigError("reduce: omega must be finite");
    const double omega = params.omega;
    const std::size_t n = raw.size();

    std::vector<double> detuning(n);  // eps_A + omega - eps_j
    double g_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        detuning[j] = params.eps_A + omega - raw.eps[j];
        if (std::abs(detuning[j]) < resonance_tolerance) {
            throw DegenerateError("reduce: level " + std::to_string(j) + " resonant with the B site");
        }
        g_max = std::max(g_max, std::abs(raw.g[j]));
    }
    const double v_max = params.v * (1.0 + params.u);
    if (warnings != nullptr && (v_max / omega > perturbative_warning || g_max / omega > perturbative_warning)) {
        *warnings << "warning: Schrieffer-Wolff expansion parameter exceeds " << perturbative_warning
                  << " (max|v(k)|/omega = " << v_max / omega << ", max|g|/omega = " << g_max / omega << ")\n";
    }

    ReducedModel m;
    m.eps_A = params.eps_A;
    m.omega = omega;
    m.eps_A_tilde = 0.0;
    m.eps_tilde.resize(n);
    m.eta_tilde_base.resize(n);
    m.t_cross = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const double g = raw.g[j];
        m.eps_tilde[j] = raw.eps[j] - 0.5 * g * g / detuning[j];
        m.eta_tilde_base[j] = -0.5 * g * (1.0 / omega + 1.0 / detuning[j]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t jp = 0; jp < n; ++jp) {
            if (j == jp) continue;
            const double gg = raw.g[j] * raw.g[jp];
            m.t_cross(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(jp)) =
                -0.25 * gg * (1.0 / detuning[j] + 1.0 / detuning[jp]);
        }
    }
    return m;
}

// Inverse of the eta formula: raw couplings whose reduced image has the requested
// |eta_j(k)| / |v(k)|. Energies are kept (eps_j raw = eps_j reduced).
inline DiscreteReservoir raw_reservoir(const DiscreteReservoir& reduced, const WalkParams& params) {
    reduced.validate();
    params.validate();
    if (std::isinf(params.omega)) throw ConfigError("raw_reservoir: omega must be finite");
    DiscreteReservoir raw;
    raw.eps = reduced.eps;
    raw.g.resize(reduced.size());
    for (std::size_t j = 0; j < reduced.size(); ++j) {
        const double detuning = params.eps_A + params.omega - reduced.eps[j];
        if (std::abs(detuning) < resonance_tolerance) {
            throw DegenerateError("raw_reservoir: level resonant with the B site");
        }
        raw.g[j] = std::abs(reduced.g[j]) / (0.5 * (1.0 / params.omega + 1.0 / detuning));
    }
    return raw;
}

struct EnergyBins {
    double lo{0.0};
    double width{1.0};
    std::size_t count{0};

    double centre(std::size_t i) const noexcept { return lo + (static_cast<double>(i) + 0.5) * width; }
};

// Histogram of |eta_j(k)|^2 over energy, normalized by the bin width.
inline std::vector<double> effective_spectral_density(const ReducedModel& model, const WalkParams& params,
                                                      double k, const EnergyBins& bins) {
    std::vector<double> density(bins.count, 0.0);
    const double vk2 = hopping_modulus_squared(params, k);
    for (std::size_t j = 0; j < model.size(); ++j) {
        const double pos = (model.eps_tilde[j] - bins.lo) / bins.width;
        if (pos < 0.0) continue;
        const auto idx = static_cast<std::size_t>(pos);
        if (idx >= bins.count) continue;
        density[idx] += vk2 * std::norm(model.eta_tilde_base[j]) / bins.width;
    }
    return density;
}

}  // namespace nmwalk
