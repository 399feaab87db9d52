// oracle.hpp: brute-force exact references by dense Hermitian eigendecomposition.
//
// Three single-excitation problems:
//  * the reduced (A + reservoir) model at fixed k;
//  * the full three-band (A, B, reservoir) model at fixed k;
//  * a finite open chain of M cells in real space.
// They share no code with the master-equation solvers they are used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "gme.hpp"
#include "model.hpp"
#include "numeric.hpp"
#include "swt.hpp"

namespace nmwalk::oracle {

inline constexpr std::size_t dense_dimension_budget = 4000;

// Eigen-representation of the A-site return amplitude:
// psi_A(t) = sum_n weights[n] exp(-i energies[n] t).
struct ExactSpectrum {
    std::vector<double> energies;
    std::vector<double> weights;

    std::complex<double> amplitude(double t) const {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t n = 0; n < energies.size(); ++n) acc += weights[n] * std::polar(1.0, -energies[n] * t);
        return acc;
    }
};

inline void check_budget(std::size_t dimension) {
    if (dimension > dense_dimension_budget) {
        throw BudgetError("dense eigensolve dimension " + std::to_string(dimension) + " exceeds budget " +
                          std::to_string(dense_dimension_budget));
    }
}

template <typename Matrix>
ExactSpectrum spectrum_of(const Matrix& hamiltonian, Eigen::Index initial) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian);
    if (solver.info() != Eigen::Success) throw BudgetError("eigendecomposition failed");
    ExactSpectrum out;
    const auto dim = hamiltonian.rows();
    out.energies.resize(static_cast<std::size_t>(dim));
    out.weights.resize(static_cast<std::size_t>(dim));
    for (Eigen::Index n = 0; n < dim; ++n) {
        out.energies[static_cast<std::size_t>(n)] = solver.eigenvalues()(n);
        out.weights[static_cast<std::size_t>(n)] = std::norm(solver.eigenvectors()(initial, n));
    }
    return out;
}

struct ReducedOptions {
    bool include_cross{false};     // add the reservoir-reservoir couplings t_jj'
    bool k_resolved_eps_A{false};  // use eps_A - |v(k)|^2/omega instead of eps_A_tilde
};

// Basis {A, j = 0..N-1}. The phase of v(k) is a gauge choice on the reservoir and is
// dropped: only |v(k)| enters the A-site return amplitude.
inline Eigen::MatrixXcd reduced_hamiltonian(const ReducedModel& model, double vk2, const ReducedOptions& options) {
    const std::size_t n = model.size();
    check_budget(n + 1);
    const auto dim = static_cast<Eigen::Index>(n + 1);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    const double abs_v = std::sqrt(vk2);
    h(0, 0) = options.k_resolved_eps_A ? model.eps_A_tilde_at(vk2) : model.eps_A_tilde;
    for (std::size_t j = 0; j < n; ++j) {
        const auto row = static_cast<Eigen::Index>(j + 1);
        h(row, row) = model.eps_tilde[j];
        h(0, row) = abs_v * model.eta_tilde_base[j];
        h(row, 0) = std::conj(h(0, row));
    }
    if (options.include_cross) {
        h.block(1, 1, dim - 1, dim - 1) += model.t_cross + model.t_cross.adjoint();
    }
    return h;
}

inline ExactSpectrum exact_spectrum_reduced(const ReducedModel& model, double vk2,
                                            const ReducedOptions& options = {}) {
    return spectrum_of(reduced_hamiltonian(model, vk2, options), 0);
}

inline KTrace trace_from_spectrum(const ExactSpectrum& spectrum, double k, std::span<const double> times) {
    KTrace trace;
    trace.k = k;
    trace.times.assign(times.begin(), times.end());
    trace.population.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) trace.population[i] = std::norm(spectrum.amplitude(times[i]));
    flag_bounds(trace);
    return trace;
}

inline KTrace exact_evolve_reduced(const ReducedModel& model, const WalkParams& params, double k,
                                   std::span<const double> times, const ReducedOptions& options = {}) {
    const double vk2 = hopping_modulus_squared(params, k);
    return trace_from_spectrum(exact_spectrum_reduced(model, vk2, options), k, times);
}

inline constexpr double degeneracy_gap = 1e-10;

// (1/2pi) sum_n c_n^2: the infinite-time average of |psi_A|^2 for a nondegenerate spectrum.
inline double exact_longtime_average(const ExactSpectrum& spectrum) {
    std::vector<double> sorted = spectrum.energies;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t n = 1; n < sorted.size(); ++n) {
        if (sorted[n] - sorted[n - 1] < degeneracy_gap) {
            throw DegenerateError("exact long-time average needs a nondegenerate spectrum (gap " +
                                  std::to_string(sorted[n] - sorted[n - 1]) + ")");
        }
    }
    CompensatedSum acc;
    for (double c : spectrum.weights) acc.add(c * c);
    return acc.value() / two_pi;
}

// Basis {A, B, j = 0..N-1} with raw couplings g_j between B and level j.
inline Eigen::MatrixXd full_hamiltonian(const WalkParams& params, const DiscreteReservoir& raw, double k) {
    params.validate();
    raw.validate();
    const std::size_t n = raw.size();
    check_budget(n + 2);
    const auto dim = static_cast<Eigen::Index>(n + 2);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    const double abs_v = std::sqrt(hopping_modulus_squared(params, k));
    h(0, 0) = params.eps_A;
    h(1, 1) = params.eps_A + params.omega;
    h(0, 1) = h(1, 0) = abs_v;
    for (std::size_t j = 0; j < n; ++j) {
        const auto row = static_cast<Eigen::Index>(j + 2);
        h(row, row) = raw.eps[j];
        h(row, 1) = h(1, row) = raw.g[j];
    }
    return h;
}

inline KTrace exact_evolve_full(const WalkParams& params, const DiscreteReservoir& raw, double k,
                                std::span<const double> times) {
    return trace_from_spectrum(spectrum_of(full_hamiltonian(params, raw, k), 0), k, times);
}

struct ChainModel {
    std::size_t m_cells{41};
    WalkParams params;
    DiscreteReservoir reservoir;  // raw role, replicated in every cell

    std::size_t cell_dimension() const noexcept { return reservoir.size() + 2; }
    std::size_t dimension() const noexcept { return m_cells * cell_dimension(); }
    long centre() const noexcept { return static_cast<long>(m_cells / 2); }
};

struct ChainTrace {
    std::vector<double> times;
    std::vector<double> mean_m;
    std::vector<std::vector<double>> reservoir_occupation;  // [time][cell], cell index 0 is m = -(M-1)/2
    std::vector<double> boundary_occupation;                // total weight in the two edge cells
    std::vector<double> norm;
};

inline constexpr double boundary_limit = 1e-6;

// Open chain; cell c holds A at offset 0, B at 1 and the reservoir at 2..N+1.
// A_c couples to B_c with v and to B_{c+1} with v' = u v.
inline Eigen::MatrixXd chain_hamiltonian(const ChainModel& chain) {
    chain.params.validate();
    chain.reservoir.validate();
    if (chain.m_cells % 2 == 0 || chain.m_cells < 3) throw ConfigError("chain: m_cells must be odd and >= 3");
    check_budget(chain.dimension());
    const auto dim = static_cast<Eigen::Index>(chain.dimension());
    const auto stride = static_cast<Eigen::Index>(chain.cell_dimension());
    const auto& p = chain.params;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(chain.m_cells); ++c) {
        const Eigen::Index a = c * stride;
        const Eigen::Index b = a + 1;
        h(a, a) = p.eps_A;
        h(b, b) = p.eps_A + p.omega;
        h(a, b) = h(b, a) = p.v;
        if (c + 1 < static_cast<Eigen::Index>(chain.m_cells)) {
            const Eigen::Index b_next = b + stride;
            h(a, b_next) = h(b_next, a) = p.intercell();
        }
        for (std::size_t j = 0; j < chain.reservoir.size(); ++j) {
            const Eigen::Index r = a + 2 + static_cast<Eigen::Index>(j);
            h(r, r) = chain.reservoir.eps[j];
            h(r, b) = h(b, r) = chain.reservoir.g[j];
        }
    }
    return h;
}

// Real-space <m(t)> = sum_m m rho_{Abar,m}(t) from |A, m = 0> at t = 0. Throws once
// the edge cells hold more than 1e-6 of the probability (the open boundary would
// start to matter).
inline ChainTrace exact_evolve_chain(const ChainModel& chain, std::span<const double> times) {
    const Eigen::MatrixXd h = chain_hamiltonian(chain);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) throw BudgetError("chain eigendecomposition failed");
    const auto& u_mat = solver.eigenvectors();
    const auto& energies = solver.eigenvalues();
    const auto stride = chain.cell_dimension();
    const Eigen::Index start = chain.centre() * static_cast<Eigen::Index>(stride);
    const Eigen::VectorXd overlap = u_mat.row(start).transpose();

    ChainTrace out;
    out.times.assign(times.begin(), times.end());
    const auto dim = h.rows();
    for (double t : times) {
        Eigen::VectorXcd coeff(dim);
        for (Eigen::Index n = 0; n < dim; ++n) coeff(n) = overlap(n) * std::polar(1.0, -energies(n) * t);
        const Eigen::VectorXcd psi = u_mat.cast<std::complex<double>>() * coeff;

        std::vector<double> occupation(chain.m_cells, 0.0);
        CompensatedSum total;
        double edge = 0.0;
        for (std::size_t c = 0; c < chain.m_cells; ++c) {
            double cell_total = 0.0;
            double reservoir = 0.0;
            for (std::size_t l = 0; l < stride; ++l) {
                const double w = std::norm(psi(static_cast<Eigen::Index>(c * stride + l)));
                cell_total += w;
                if (l != 0) reservoir += w;
            }
            occupation[c] = reservoir;
            total.add(cell_total);
            if (c == 0 || c + 1 == chain.m_cells) edge += cell_total;
        }
        if (edge > boundary_limit) {
            throw BudgetError("chain: boundary occupation " + std::to_string(edge) + " at t = " +
                              std::to_string(t) + " exceeds 1e-6; enlarge m_cells or shorten the horizon");
        }
        CompensatedSum mean;
        for (std::size_t c = 0; c < chain.m_cells; ++c) {
            mean.add(static_cast<double>(static_cast<long>(c) - chain.centre()) * occupation[c]);
        }
        out.mean_m.push_back(mean.value());
        out.reservoir_occupation.push_back(std::move(occupation));
        out.boundary_occupation.push_back(edge);
        out.norm.push_back(total.value());
    }
    return out;
}

}  // namespace nmwalk::oracle
