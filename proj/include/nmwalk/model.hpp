// model.hpp: walk parameters and the k-space kinematics of the extended SSH lattice.
//
// The intracell amplitude v sets the energy unit. The Bloch hopping amplitude is
// v(k) = v (1 + u e^{ik}) with u = v'/v, and its argument phi(k) winds once around
// the origin as k crosses the zone exactly when u > 1.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace nmwalk {

struct WalkParams {
    double v{1.0};
    double u{0.0};       // v'/v
    double omega{std::numeric_limits<double>::infinity()};  // B-site detuning
    double eps_A{0.0};

    void validate() const {
        if (!(v > 0.0)) throw ConfigError("walk parameters: v must be positive");
        if (!(u >= 0.0)) throw ConfigError("walk parameters: u must be non-negative");
        if (!(omega > 0.0)) throw ConfigError("walk parameters: omega must be positive");
    }

    double intercell() const noexcept { return u * v; }
    bool degenerate() const noexcept { return std::abs(u - 1.0) < 1e-12; }
};

inline constexpr double degeneracy_tolerance = 1e-12;

// Uniform periodic grid over the Brillouin zone: k_i = 2 pi (i - floor(n/2)) / n.
// Always contains k = 0 and is closed under k -> -k (mod 2 pi). For even n the
// first point is -pi; for odd n the grid is symmetric about 0 and avoids +-pi.
struct KGrid {
    std::size_t n{0};
    std::vector<double> points;

    explicit KGrid(std::size_t count) : n(count), points(count) {
        if (count < 2) throw ConfigError("k grid needs at least two points");
        const auto half = static_cast<double>(count / 2);
        for (std::size_t i = 0; i < count; ++i) {
            points[i] = two_pi * (static_cast<double>(i) - half) / static_cast<double>(count);
        }
    }

    double weight() const noexcept { return two_pi / static_cast<double>(n); }

    // Index of -k_i on the grid.
    std::size_t mirror(std::size_t i) const noexcept {
        const std::size_t zero = n / 2;
        const std::size_t offset = (i + n - zero) % n;
        return (zero + n - offset) % n;
    }
};

inline std::complex<double> hopping_amplitude(const WalkParams& p, double k) {
    return p.v * (1.0 + p.u * std::polar(1.0, k));
}

inline double hopping_modulus_squared(const WalkParams& p, double k) noexcept {
    return p.v * p.v * (1.0 + p.u * p.u + 2.0 * p.u * std::cos(k));
}

struct PhaseDerivative {
    double phase{0.0};
    double derivative{0.0};
};

inline PhaseDerivative phase_and_derivative(const WalkParams& p, double k) {
    const double mod2 = 1.0 + p.u * p.u + 2.0 * p.u * std::cos(k);
    if (p.v * std::sqrt(std::max(mod2, 0.0)) < degeneracy_tolerance) {
        throw DegenerateError("hopping amplitude vanishes at k = " + std::to_string(k) +
                              " (u = 1, gap closes); phase undefined");
    }
    return {std::atan2(p.u * std::sin(k), 1.0 + p.u * std::cos(k)),
            (p.u * std::cos(k) + p.u * p.u) / mod2};
}

// (1/2 pi) * closed contour integral of dphi/dk, by the periodic trapezoid rule on
// an n-point grid. Converges geometrically with rate min(u, 1/u).
inline double winding_integral(const WalkParams& p, std::size_t n) {
    const KGrid grid(n);
    CompensatedSum acc;
    for (double k : grid.points) acc.add(phase_and_derivative(p, k).derivative);
    return acc.value() / static_cast<double>(n);
}

inline int winding_number(const WalkParams& p) {
    p.validate();
    if (p.degenerate()) {
        throw DegenerateError("winding number undefined at |u| = 1");
    }
    double previous = winding_integral(p, 32);
    for (std::size_t n = 64; n <= (std::size_t{1} << 24); n *= 2) {
        const double current = winding_integral(p, n);
        if (std::abs(current - previous) < 1e-13 && std::abs(current - std::round(current)) < 1e-9) {
            return static_cast<int>(std::lround(current));
        }
        previous = current;
    }
    throw DegenerateError("winding integral did not converge to an integer; u too close to 1");
}

}  // namespace nmwalk
