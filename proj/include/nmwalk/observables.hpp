// observables.hpp: zone-integrated observables built from per-k traces.
//
// With rho_A(k, 0) = 1/2pi, the zone integral of f(k) rho(k) on an n-point periodic
// grid is (1/n) sum_i f(k_i) * (2 pi rho(k_i)), so every quantity here works with the
// 2 pi-normalized populations directly.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gme.hpp"
#include "kernel.hpp"
#include "model.hpp"
#include "numeric.hpp"
#include "parallel.hpp"

namespace nmwalk {

struct PhaseCell {
    double u{0.0};
    double alpha{0.0};
    double mean_displacement{0.0};
};

// Diagonal state p_A |A><A| + (1 - p_A) |C><C|.
struct ReducedDensity2 {
    double p_A{1.0};

    void validate() const {
        if (!(p_A >= 0.0 && p_A <= 1.0)) throw ConfigError("reduced density: p_A outside [0, 1]");
    }
};

struct WitnessTrace {
    std::vector<double> times;
    std::vector<double> sigma;
    double n_lower{0.0};  // lower bound on the non-Markovianity measure for the fixed state pair
};

inline void check_traces(std::span<const KTrace> traces, const KGrid& kgrid, std::size_t t_index) {
    if (traces.size() != kgrid.n) {
        throw ConfigError("grid mismatch: " + std::to_string(traces.size()) + " traces for " +
                          std::to_string(kgrid.n) + " k points");
    }
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (std::abs(traces[i].k - kgrid.points[i]) > 1e-12) {
            throw ConfigError("grid mismatch: trace " + std::to_string(i) + " is at k = " +
                              std::to_string(traces[i].k));
        }
        if (t_index >= traces[i].size()) throw ConfigError("grid mismatch: time index out of range");
    }
}

// <m(t)> = zone integral of phi'(k) rho_Abar(k, t).
inline double mean_displacement(std::span<const KTrace> traces, const WalkParams& params, const KGrid& kgrid,
                                std::size_t t_index) {
    check_traces(traces, kgrid, t_index);
    CompensatedSum acc;
    for (std::size_t i = 0; i < kgrid.n; ++i) {
        const double dphi = phase_and_derivative(params, kgrid.points[i]).derivative;
        acc.add(dphi * (1.0 - traces[i].population[t_index]));
    }
    return acc.value() / static_cast<double>(kgrid.n);
}

// p_A(t) = zone integral of rho_A(k, t).
inline double survival_probability(std::span<const KTrace> traces, const KGrid& kgrid, std::size_t t_index) {
    check_traces(traces, kgrid, t_index);
    CompensatedSum acc;
    for (const auto& trace : traces) acc.add(trace.population[t_index]);
    return acc.value() / static_cast<double>(kgrid.n);
}

// Volterra traces for every k of the grid. Each trace depends on k only through
// |v(k)|^2, so the unit kernel is sampled once and -k reuses the trace of k.
inline std::vector<KTrace> evolve_zone(const WalkParams& params, const SpectralLaw& law, const KGrid& kgrid,
                                       const TimeGrid& grid, std::size_t workers = 0) {
    params.validate();
    law.validate();
    check_step(grid.step, law.delta);
    const auto unit_kernel = memory_kernel_samples(law, 1.0, grid.step, grid.count);
    std::vector<std::size_t> owners;
    for (std::size_t i = 0; i < kgrid.n; ++i) {
        if (kgrid.mirror(i) >= i) owners.push_back(i);
    }
    auto computed = parallel_map<KTrace>(owners.size(), workers, [&](std::size_t o) {
        const double k = kgrid.points[owners[o]];
        return evolve_volterra_scaled(unit_kernel, hopping_modulus_squared(params, k), grid, k);
    });
    std::vector<KTrace> out(kgrid.n);
    for (std::size_t o = 0; o < owners.size(); ++o) {
        const std::size_t i = owners[o];
        const std::size_t m = kgrid.mirror(i);
        if (m != i) {
            out[m] = computed[o];
            out[m].k = kgrid.points[m];
        }
        out[i] = std::move(computed[o]);
    }
    return out;
}

inline std::vector<double> mean_displacement_series(std::span<const KTrace> traces, const WalkParams& params,
                                                    const KGrid& kgrid) {
    if (traces.empty()) return {};
    std::vector<double> out(traces.front().size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = mean_displacement(traces, params, kgrid, n);
    return out;
}

inline std::vector<double> survival_series(std::span<const KTrace> traces, const KGrid& kgrid) {
    if (traces.empty()) return {};
    std::vector<double> out(traces.front().size());
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = survival_probability(traces, kgrid, n);
    return out;
}

// Long-time average of <m> from the residue values of rho_A(k). Complete decay
// (alpha <= 1) leaves rho_Abar = 1/2pi everywhere and the result is the winding number.
inline double mean_displacement_longtime(const WalkParams& params, const SpectralLaw& law, const KGrid& kgrid) {
    params.validate();
    law.validate();
    if (params.degenerate()) throw DegenerateError("mean displacement undefined at u = 1");
    if (law.alpha <= 1.0 && law.j_alpha > 0.0) return static_cast<double>(winding_number(params));
    CompensatedSum acc;
    for (double k : kgrid.points) {
        const auto [phase, dphi] = phase_and_derivative(params, k);
        const double retained = two_pi * steady_average(law, hopping_modulus_squared(params, k));
        acc.add(dphi * (1.0 - retained));
    }
    return acc.value() / static_cast<double>(kgrid.n);
}

// One cell per (u, alpha), u-major. The law template supplies J_alpha and Delta.
inline std::vector<PhaseCell> phase_diagram(std::span<const double> u_grid, std::span<const double> alpha_grid,
                                            const SpectralLaw& law_template, const KGrid& kgrid,
                                            std::size_t workers = 0) {
    const std::size_t n_alpha = alpha_grid.size();
    return parallel_map<PhaseCell>(u_grid.size() * n_alpha, workers, [&](std::size_t idx) {
        const double u = u_grid[idx / n_alpha];
        const double alpha = alpha_grid[idx % n_alpha];
        WalkParams params;
        params.u = u;
        SpectralLaw law = law_template;
        law.alpha = alpha;
        return PhaseCell{u, alpha, mean_displacement_longtime(params, law, kgrid)};
    });
}

// D = 1/2 Tr|rho1 - rho2| for two states diagonal in {A, C}.
inline double trace_distance(const ReducedDensity2& r1, const ReducedDensity2& r2) {
    r1.validate();
    r2.validate();
    return std::abs(r1.p_A - r2.p_A);
}

// sigma = dp_A/dt by central differences (one-sided at the ends); n_lower is the
// trapezoid integral of max(sigma, 0).
inline WitnessTrace witness(std::span<const double> p_A, std::span<const double> times) {
    if (p_A.size() != times.size()) throw ConfigError("witness: series and times differ in length");
    WitnessTrace out;
    out.times.assign(times.begin(), times.end());
    const std::size_t n = p_A.size();
    out.sigma.assign(n, 0.0);
    if (n < 2) return out;
    const double h = times[1] - times[0];
    if (!(h > 0.0)) throw ConfigError("witness: times must increase");
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs((times[i] - times[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(times[i]))) {
            throw ConfigError("witness: time grid must be uniform");
        }
    }
    out.sigma[0] = (p_A[1] - p_A[0]) / h;
    out.sigma[n - 1] = (p_A[n - 1] - p_A[n - 2]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) out.sigma[i] = (p_A[i + 1] - p_A[i - 1]) / (2.0 * h);

    CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        acc.add(w * std::max(out.sigma[i], 0.0));
    }
    out.n_lower = h * acc.value();
    return out;
}

}  // namespace nmwalk
