// gme.hpp: Born generalized master equation for the A-site population at fixed k.
//
//   d rho_A(k,t)/dt = - int_0^t K(t - t') rho_A(k,t') dt',   rho_A(k,0) = 1/2pi.
//
// Populations are carried as 2 pi rho_A (starts at 1). The time-domain Volterra
// solver is the primary engine; Bromwich inversion of the Laplace-domain solution
// rho~(s) = rho_A(0) / (s + i Sigma~(s)) is an independent cross-check.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "kernel.hpp"
#include "numeric.hpp"
#include "swt.hpp"

namespace nmwalk {

struct KTrace {
    double k{0.0};
    std::vector<double> times;
    std::vector<double> population;  // 2 pi rho_A(k, t)
    bool bounds_flag{false};         // population left [-1e-3, 1 + 1e-3]

    double rho_A(std::size_t i) const { return population.at(i) / two_pi; }
    double rho_A_bar(std::size_t i) const { return (1.0 - population.at(i)) / two_pi; }
    std::size_t size() const noexcept { return population.size(); }
};

inline constexpr double max_step_times_bandwidth = 0.2;
inline constexpr double population_bound_slack = 1e-3;

inline void flag_bounds(KTrace& trace) {
    for (double y : trace.population) {
        if (y < -population_bound_slack || y > 1.0 + population_bound_slack) {
            trace.bounds_flag = true;
            return;
        }
    }
}

// Trapezoidal product integration of y' = -int_0^t K(t-t') y(t') dt' with y(0) = 1.
// The convolution uses trapezoid weights (half weight at both ends, including t' = t)
// and the outer step is the trapezoid rule, which makes each step a scalar implicit
// update. Second order in the step; O(n^2) work.
inline std::vector<double> solve_volterra(std::span<const double> kernel, double step) {
    const std::size_t n = kernel.size();
    std::vector<double> y(n, 0.0);
    if (n == 0) return y;
    y[0] = 1.0;
    const double h = step;
    const double k0 = kernel[0];
    const double denom = 1.0 + 0.25 * h * h * k0;
    double integral_prev = 0.0;  // I_0 = 0
    for (std::size_t m = 0; m + 1 < n; ++m) {
        const std::size_t next = m + 1;
        // S_{m+1} = h [ K_{m+1} y_0 / 2 + sum_{j=1}^{m} K_{m+1-j} y_j ]
        double acc = 0.5 * kernel[next] * y[0];
        const double* kp = kernel.data() + next;
        for (std::size_t j = 1; j <= m; ++j) acc += kp[-static_cast<std::ptrdiff_t>(j)] * y[j];
        const double partial = h * acc;
        y[next] = (y[m] - 0.5 * h * (integral_prev + partial)) / denom;
        integral_prev = partial + 0.5 * h * k0 * y[next];
    }
    return y;
}

inline void check_step(double step, double bandwidth) {
    if (step * bandwidth > max_step_times_bandwidth * (1.0 + 1e-12)) {
        throw BudgetError("time step too coarse: dt * Delta = " + std::to_string(step * bandwidth) +
                          " exceeds " + std::to_string(max_step_times_bandwidth));
    }
}

inline KTrace make_trace(double k, const TimeGrid& grid, std::vector<double> population) {
    KTrace trace;
    trace.k = k;
    trace.times = grid.points();
    trace.population = std::move(population);
    flag_bounds(trace);
    return trace;
}

// Continuum power-law reservoir.
inline KTrace evolve_volterra(const SpectralLaw& law, double vk2, const TimeGrid& grid, double k = 0.0) {
    law.validate();
    check_step(grid.step, law.delta);
    const auto kernel = memory_kernel_samples(law, vk2, grid.step, grid.count);
    return make_trace(k, grid, solve_volterra(kernel, grid.step));
}

// K is linear in |v(k)|^2, so a zone sweep samples the unit kernel once and rescales.
inline KTrace evolve_volterra_scaled(std::span<const double> unit_kernel, double vk2, const TimeGrid& grid,
                                     double k) {
    if (unit_kernel.size() != grid.count) throw ConfigError("kernel samples do not match the time grid");
    std::vector<double> kernel(unit_kernel.begin(), unit_kernel.end());
    for (double& x : kernel) x *= vk2;
    return make_trace(k, grid, solve_volterra(kernel, grid.step));
}

// Discrete reservoir in the reduced role: K(t) = 2 |v(k)|^2 sum_j |g_j|^2 cos(eps_j t).
inline std::vector<double> discrete_kernel_samples(const DiscreteReservoir& reduced, double vk2, double step,
                                                   std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t n = 0; n < count; ++n) {
        const double t = static_cast<double>(n) * step;
        CompensatedSum acc;
        for (std::size_t j = 0; j < reduced.size(); ++j) {
            acc.add(reduced.g[j] * reduced.g[j] * std::cos(reduced.eps[j] * t));
        }
        out[n] = 2.0 * vk2 * acc.value();
    }
    return out;
}

inline KTrace evolve_volterra(const DiscreteReservoir& reduced, double vk2, const TimeGrid& grid,
                              double k = 0.0) {
    reduced.validate();
    double bandwidth = 0.0;
    for (double e : reduced.eps) bandwidth = std::max(bandwidth, std::abs(e));
    check_step(grid.step, bandwidth);
    const auto kernel = discrete_kernel_samples(reduced, vk2, grid.step, grid.count);
    return make_trace(k, grid, solve_volterra(kernel, grid.step));
}

// rho~(s) in 2 pi units: 1 / (s + i Sigma~(s)).
inline std::complex<double> population_laplace(const SpectralLaw& law, double vk2, std::complex<double> s) {
    const std::complex<double> i{0.0, 1.0};
    return 1.0 / (s + i * self_energy_laplace(law, vk2, s));
}

struct BromwichConfig {
    double gamma{0.0};
    std::size_t n_nodes{1024};  // initial node count on Im s >= 0; doubled until the tail bound holds
    double t_max{0.0};

    static constexpr double max_gamma_t = 30.0;
    static constexpr double tail_tolerance = 1e-6;
    static constexpr std::size_t node_cap = std::size_t{1} << 22;

    // gamma * period = 18 bounds the aliasing error by ~3e-8.
    static BromwichConfig for_horizon(double t_max) {
        if (!(t_max > 0.0)) throw ConfigError("Bromwich: t_max must be positive");
        return BromwichConfig{9.0 / t_max, 1024, t_max};
    }

    void validate() const {
        if (!(gamma > 0.0)) throw ConfigError("Bromwich: gamma must be positive");
        if (!(t_max > 0.0)) throw ConfigError("Bromwich: t_max must be positive");
        if (gamma * t_max > max_gamma_t) throw ConfigError("Bromwich: gamma * t_max exceeds 30");
        if (n_nodes == 0 || n_nodes % 2 != 0) throw ConfigError("Bromwich: n_nodes must be even and positive");
    }
};

// Trapezoid rule along Re s = gamma with node spacing pi / t_max (period 2 t_max).
// The asymptote s / (s^2 + Omega+), whose inverse is cos(sqrt(Omega+) t), is
// subtracted first so the remaining integrand decays like |s|^-5.
inline KTrace invert_bromwich(const SpectralLaw& law, double vk2, const BromwichConfig& config,
                              std::span<const double> times, double k = 0.0) {
    law.validate();
    config.validate();
    for (double t : times) {
        if (t < 0.0 || t > config.t_max * (1.0 + 1e-12)) {
            throw ConfigError("Bromwich: requested time outside [0, t_max]");
        }
    }
    const double omega_p = omega_plus(law, vk2);
    const double gamma = config.gamma;
    const double dy = std::numbers::pi / config.t_max;
    auto remainder = [&](double y) {
        const std::complex<double> s{gamma, y};
        return population_laplace(law, vk2, s) - s / (s * s + omega_p);
    };

    std::vector<std::complex<double>> samples;
    samples.reserve(config.n_nodes + 1);
    samples.push_back(remainder(0.0));
    std::size_t nodes = config.n_nodes;
    const double amplification = std::exp(gamma * config.t_max) / std::numbers::pi;
    while (true) {
        for (std::size_t n = samples.size(); n <= nodes; ++n) samples.push_back(remainder(dy * n));
        const double big_l = dy * static_cast<double>(nodes);
        const double tail = amplification * std::abs(samples.back()) * big_l / 4.0;
        if (tail < BromwichConfig::tail_tolerance) break;
        nodes *= 2;
        if (nodes > BromwichConfig::node_cap) {
            throw BudgetError("Bromwich: tail bound not reached before the node cap (tail estimate " +
                              std::to_string(tail) + ")");
        }
    }

    KTrace trace;
    trace.k = k;
    trace.times.assign(times.begin(), times.end());
    trace.population.resize(times.size());
    const double root = std::sqrt(omega_p);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        std::complex<double> acc = 0.5 * samples[0];
        const std::complex<double> phase_step = std::polar(1.0, dy * t);
        std::complex<double> phase{1.0, 0.0};
        for (std::size_t n = 1; n < samples.size(); ++n) {
            phase *= phase_step;
            if (n % 64 == 0) phase = std::polar(1.0, dy * static_cast<double>(n) * t);
            acc += samples[n] * phase;
        }
        trace.population[i] = std::cos(root * t) + std::exp(gamma * t) / std::numbers::pi * dy * acc.real();
    }
    flag_bounds(trace);
    return trace;
}

// Long-time average of rho_A(k, t) from the residue at s = 0: zero for alpha <= 1,
// (1/2pi) / (1 + Omega^-_alpha(k)) for alpha > 1.
inline double steady_average(const SpectralLaw& law, double vk2) {
    law.validate();
    if (law.j_alpha == 0.0 || vk2 == 0.0) return 1.0 / two_pi;
    if (law.alpha <= 1.0) return 0.0;
    return 1.0 / (two_pi * (1.0 + omega_minus(law, vk2)));
}

// s rho~(s) in density units at a real positive s.
inline double residue_sample(const SpectralLaw& law, double vk2, double s) {
    return (s * population_laplace(law, vk2, {s, 0.0})).real() / two_pi;
}

namespace detail {

// Solve F(s_i) = F0 + a s_i^p1 + b s_i^p2 for F0.
inline double richardson_known_exponents(const std::array<double, 3>& s, const std::array<double, 3>& f,
                                         double p1, double p2) {
    Eigen::Matrix3d m;
    Eigen::Vector3d rhs;
    for (int i = 0; i < 3; ++i) {
        m(i, 0) = 1.0;
        m(i, 1) = std::pow(s[static_cast<std::size_t>(i)], p1);
        m(i, 2) = std::pow(s[static_cast<std::size_t>(i)], p2);
        rhs(i) = f[static_cast<std::size_t>(i)];
    }
    return m.colPivHouseholderQr().solve(rhs)(0);
}

}  // namespace detail

struct ResidueEstimate {
    std::array<double, 3> s{1e-3, 1e-4, 1e-5};
    std::array<double, 3> samples{};  // s rho~(s), density units
    double extrapolated{0.0};
};

// lim_{s->0} s rho~(s) from s in {1e-3, 1e-4, 1e-5}. For alpha > 1 the function
// F(s) = i Sigma~(s)/s has the small-s expansion F(0) + a s^(alpha-1) + b s^2 + ...,
// which Richardson extrapolation with those exponents removes. For alpha <= 1, F
// diverges (logarithmically at alpha = 1) and the estimate is the closed-form zero;
// the samples are still reported so the approach to zero can be inspected.
inline ResidueEstimate extrapolated_residue(const SpectralLaw& law, double vk2) {
    law.validate();
    ResidueEstimate out;
    std::array<double, 3> f{};
    const std::complex<double> i{0.0, 1.0};
    for (std::size_t n = 0; n < 3; ++n) {
        const double s = out.s[n];
        out.samples[n] = residue_sample(law, vk2, s);
        f[n] = (i * self_energy_laplace(law, vk2, {s, 0.0})).real() / s;
    }
    if (law.j_alpha == 0.0 || vk2 == 0.0) {
        out.extrapolated = 1.0 / two_pi;
        return out;
    }
    if (law.alpha <= 1.0) {
        out.extrapolated = 0.0;
        return out;
    }
    const double lead = law.alpha - 1.0;
    double p1 = std::min(lead, 2.0);
    double p2 = lead < 2.0 ? 2.0 : std::min(lead, 4.0);
    if (std::abs(p1 - p2) < 0.05) {
        p1 = 2.0;
        p2 = 4.0;
    }
    const double f0 = detail::richardson_known_exponents(out.s, f, p1, p2);
    out.extrapolated = 1.0 / (two_pi * (1.0 + f0));
    return out;
}

}  // namespace nmwalk
