// kernel.hpp: power-law reservoir. Memory kernel, Laplace-domain self-energy and
// the s -> 0 data that decides whether the walker decays completely.
//
// The spectral density is J(k, eps) = J_alpha |v(k)|^2 eps^alpha on [0, Delta] and
// zero above. Every quantity here is linear in |v(k)|^2, which is passed in as vk2.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"

namespace nmwalk {

struct SpectralLaw {
    double alpha{0.0};
    double j_alpha{0.0};
    double delta{1.0};

    void validate() const {
        if (!(alpha >= 0.0)) throw ConfigError("spectral law: alpha must be >= 0");
        if (!(j_alpha >= 0.0)) throw ConfigError("spectral law: J_alpha must be >= 0");
        if (!(delta > 0.0)) throw ConfigError("spectral law: Delta must be > 0");
    }

    double density(double vk2, double eps) const noexcept {
        if (eps < 0.0 || eps > delta) return 0.0;
        return j_alpha * vk2 * std::pow(eps, alpha);
    }
};

// Omega^{+-}_alpha(k) = 2 J_alpha |v(k)|^2 Delta^{alpha +- 1} / (alpha +- 1).
inline double omega_plus(const SpectralLaw& law, double vk2) noexcept {
    return 2.0 * law.j_alpha * vk2 * std::pow(law.delta, law.alpha + 1.0) / (law.alpha + 1.0);
}

// Infinite for alpha <= 1, where the integral of J/eps^2 diverges at eps -> 0.
inline double omega_minus(const SpectralLaw& law, double vk2) noexcept {
    if (law.alpha <= 1.0) return std::numeric_limits<double>::infinity();
    return 2.0 * law.j_alpha * vk2 * std::pow(law.delta, law.alpha - 1.0) / (law.alpha - 1.0);
}

namespace detail {

// sum_n (-1)^n a^{2n} / ((2n)! (alpha + 2n + 1)) = int_0^1 x^alpha cos(a x) dx, for a <~ 1.
inline double power_cosine_series(double alpha, double a) noexcept {
    const double a2 = a * a;
    double term = 1.0;  // (-1)^n a^{2n} / (2n)!
    double sum = 1.0 / (alpha + 1.0);
    for (int n = 1; n < 60; ++n) {
        term *= -a2 / static_cast<double>((2 * n - 1) * (2 * n));
        const double contribution = term / (alpha + 2.0 * n + 1.0);
        sum += contribution;
        if (std::abs(contribution) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

inline constexpr std::size_t filon_order = 16;

struct LegendreRule {
    std::array<double, filon_order> nodes{};
    std::array<double, filon_order> weights{};
    // legendre[m][q] = P_m(nodes[q])
    std::array<std::array<double, filon_order>, filon_order> legendre{};

    LegendreRule() {
        using rule = boost::math::quadrature::gauss<double, filon_order>;
        const auto& x = rule::abscissa();
        const auto& w = rule::weights();
        const std::size_t half = filon_order / 2;
        for (std::size_t i = 0; i < half; ++i) {
            nodes[half - 1 - i] = -x[i];
            weights[half - 1 - i] = w[i];
            nodes[half + i] = x[i];
            weights[half + i] = w[i];
        }
        for (std::size_t q = 0; q < filon_order; ++q) {
            double p_prev = 1.0;
            double p = nodes[q];
            legendre[0][q] = 1.0;
            legendre[1][q] = p;
            for (std::size_t m = 2; m < filon_order; ++m) {
                const double next = ((2.0 * m - 1.0) * nodes[q] * p - (m - 1.0) * p_prev) / m;
                p_prev = p;
                p = next;
                legendre[m][q] = p;
            }
        }
    }

    static const LegendreRule& instance() {
        static const LegendreRule rule;
        return rule;
    }
};

// j_0 .. j_{filon_order-1} at w. Upward recurrence is stable once w exceeds the order.
inline std::array<double, filon_order> spherical_bessel_table(double w) {
    std::array<double, filon_order> j{};
    if (w > static_cast<double>(filon_order)) {
        const double s = std::sin(w);
        const double c = std::cos(w);
        j[0] = s / w;
        j[1] = s / (w * w) - c / w;
        for (std::size_t m = 1; m + 1 < filon_order; ++m) {
            j[m + 1] = (2.0 * static_cast<double>(m) + 1.0) / w * j[m] - j[m - 1];
        }
    } else {
        for (std::size_t m = 0; m < filon_order; ++m) j[m] = std::sph_bessel(static_cast<unsigned>(m), w);
    }
    return j;
}

// int_lo^hi x^alpha cos(a x) dx by Legendre-Filon: x^alpha is interpolated in a
// Legendre basis and each basis function is integrated against the oscillation
// exactly, int_{-1}^{1} P_m(y) e^{i w y} dy = 2 i^m j_m(w).
inline double filon_panel(double alpha, double a, double lo, double hi) {
    const auto& rule = LegendreRule::instance();
    const double centre = 0.5 * (lo + hi);
    const double half_width = 0.5 * (hi - lo);
    std::array<double, filon_order> f{};
    for (std::size_t q = 0; q < filon_order; ++q) {
        f[q] = std::pow(centre + half_width * rule.nodes[q], alpha);
    }
    const double w = a * half_width;
    const auto bessel = spherical_bessel_table(w);
    std::complex<double> acc{0.0, 0.0};
    std::complex<double> i_pow{1.0, 0.0};
    for (std::size_t m = 0; m < filon_order; ++m) {
        double coefficient = 0.0;
        for (std::size_t q = 0; q < filon_order; ++q) {
            coefficient += rule.weights[q] * f[q] * rule.legendre[m][q];
        }
        coefficient *= (2.0 * m + 1.0) / 2.0;
        acc += coefficient * 2.0 * i_pow * bessel[m];
        i_pow *= std::complex<double>{0.0, 1.0};
    }
    return half_width * (std::polar(1.0, a * centre) * acc).real();
}

}  // namespace detail

// int_0^1 x^alpha cos(a x) dx for a >= 0. Series on [0, min(1, 1/a)], then
// Legendre-Filon on geometrically doubling panels, so the cost grows like log(a).
inline double power_cosine_integral(double alpha, double a) {
    a = std::abs(a);
    if (a <= 1.0) return detail::power_cosine_series(alpha, a);
    const double head_end = 1.0 / a;
    double total = std::pow(head_end, alpha + 1.0) * detail::power_cosine_series(alpha, 1.0);
    double lo = head_end;
    while (lo < 1.0) {
        const double hi = std::min(1.0, 2.0 * lo);
        total += detail::filon_panel(alpha, a, lo, hi);
        lo = hi;
    }
    return total;
}

// K(t) = 2 int_0^Delta J(k, eps) cos(eps t) d eps; the Born master equation reads
// d rho_A / dt = - int_0^t K(t - t') rho_A(t') dt'.
inline double memory_kernel(const SpectralLaw& law, double vk2, double t) {
    if (t < 0.0) throw ConfigError("memory kernel requires t >= 0");
    const double scale = 2.0 * law.j_alpha * vk2 * std::pow(law.delta, law.alpha + 1.0);
    return scale * power_cosine_integral(law.alpha, law.delta * t);
}

inline std::vector<double> memory_kernel_samples(const SpectralLaw& law, double vk2, double step,
                                                 std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t n = 0; n < count; ++n) {
        out[n] = memory_kernel(law, vk2, static_cast<double>(n) * step);
    }
    return out;
}

inline constexpr double branch_point_exclusion = 1e-6;

// Laplace transform of the self-energy,
//   Sigma~(s) = -2i int_0^Delta J(k, eps) s / (s^2 + eps^2) d eps,
// by adaptive Gauss-Kronrod after the substitution eps = Delta x^3, which tames the
// eps^alpha endpoint. The range is split where the Lorentzian factor peaks.
inline std::complex<double> self_energy_laplace(const SpectralLaw& law, double vk2,
                                                std::complex<double> s) {
    using boost::math::quadrature::gauss_kronrod;
    const double delta = law.delta;
    const double scale = std::max(1.0, std::abs(s));
    if (std::abs(s) == 0.0) throw DegenerateError("self-energy evaluated at s = 0");
    if (std::abs(s.real()) <= 1e-14 * scale && std::abs(s.imag()) <= delta) {
        throw DegenerateError("s on the branch cut s^2 in [-Delta^2, 0] of the self-energy");
    }
    const std::complex<double> i_delta{0.0, delta};
    if (std::abs(s - i_delta) < branch_point_exclusion || std::abs(s + i_delta) < branch_point_exclusion) {
        throw DegenerateError("s within the excluded band around the branch points +-i Delta");
    }
    if (law.j_alpha == 0.0 || vk2 == 0.0) return {0.0, 0.0};

    const double alpha = law.alpha;
    const std::complex<double> s2 = s * s;
    auto integrand = [&](double x) -> std::complex<double> {
        const double x2 = x * x;
        const double eps = delta * x2 * x;
        const double jac = 3.0 * delta * x2;
        return jac * std::pow(eps, alpha) * s / (s2 + eps * eps);
    };

    std::vector<double> cuts{0.0};
    for (double e : {std::abs(s.imag()), std::abs(s.real()), std::abs(s)}) {
        if (e > 0.0 && e < delta) cuts.push_back(std::cbrt(e / delta));
    }
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());

    std::complex<double> total{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] <= 0.0) continue;
        double error = 0.0;
        total += gauss_kronrod<double, 31>::integrate(integrand, cuts[i], cuts[i + 1], 15, 1e-12, &error);
    }
    return std::complex<double>{0.0, -2.0 * law.j_alpha * vk2} * total;
}

struct SelfEnergyData {
    double i_sigma_prime{0.0};  // i Sigma'_A(k) = lim_{s->0} i Sigma~(s)/s; +inf when divergent
    double omega_minus{0.0};
    double omega_plus{0.0};

    bool divergent() const noexcept { return std::isinf(i_sigma_prime); }
};

// i Sigma' = 2 int J / eps^2 = Omega^-_alpha(k), finite only for alpha > 1.
inline SelfEnergyData sigma_prime(const SpectralLaw& law, double vk2) {
    law.validate();
    SelfEnergyData out;
    out.omega_plus = omega_plus(law, vk2);
    out.omega_minus = omega_minus(law, vk2);
    if (law.alpha > 1.0 || law.j_alpha == 0.0 || vk2 == 0.0) {
        out.i_sigma_prime = (law.j_alpha == 0.0 || vk2 == 0.0) ? 0.0 : out.omega_minus;
    } else {
        out.i_sigma_prime = std::numeric_limits<double>::infinity();
    }
    return out;
}

}  // namespace nmwalk
