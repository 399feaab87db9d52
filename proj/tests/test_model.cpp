#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nmwalk/model.hpp"

using namespace nmwalk;

namespace {

WalkParams with_u(double u) {
    WalkParams p;
    p.u = u;
    return p;
}

double arg_v(const WalkParams& p, double k) { return std::arg(hopping_amplitude(p, k)); }

}  // namespace

TEST(HoppingAmplitude, NoIntercellHopping) {
    for (double k : {-3.0, -0.4, 0.0, 1.1, 2.9}) {
        const auto v = hopping_amplitude(with_u(0.0), k);
        EXPECT_DOUBLE_EQ(v.real(), 1.0);
        EXPECT_DOUBLE_EQ(v.imag(), 0.0);
    }
}

TEST(HoppingAmplitude, ClosedFormValues) {
    const auto at_pi = hopping_amplitude(with_u(2.0), std::numbers::pi);
    EXPECT_NEAR(at_pi.real(), -1.0, 1e-15);
    EXPECT_NEAR(at_pi.imag(), 0.0, 1e-15);

    const auto quarter = hopping_amplitude(with_u(2.0), std::numbers::pi / 2);
    EXPECT_NEAR(quarter.real(), 1.0, 1e-15);
    EXPECT_NEAR(quarter.imag(), 2.0, 1e-15);
    EXPECT_NEAR(std::arg(quarter), 1.1071487177940904, 1e-15);
}

TEST(HoppingAmplitude, ModulusMatchesComplexNorm) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u_dist(0.0, 3.0), k_dist(-std::numbers::pi, std::numbers::pi);
    for (int i = 0; i < 500; ++i) {
        const auto p = with_u(u_dist(rng));
        const double k = k_dist(rng);
        EXPECT_NEAR(hopping_modulus_squared(p, k), std::norm(hopping_amplitude(p, k)), 1e-13);
    }
}

TEST(PhaseDerivative, TrivialAndClosedForm) {
    const auto flat = phase_and_derivative(with_u(0.0), 0.7);
    EXPECT_EQ(flat.phase, 0.0);
    EXPECT_EQ(flat.derivative, 0.0);

    const auto at_zero = phase_and_derivative(with_u(2.0), 0.0);
    EXPECT_DOUBLE_EQ(at_zero.phase, 0.0);
    EXPECT_DOUBLE_EQ(at_zero.derivative, 2.0 / 3.0);

    const auto quarter = phase_and_derivative(with_u(2.0), std::numbers::pi / 2);
    EXPECT_NEAR(quarter.phase, std::atan(2.0), 1e-15);
    EXPECT_NEAR(quarter.derivative, 4.0 / 5.0, 1e-15);
}

TEST(PhaseDerivative, CentralDifferencesConvergeQuadratically) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u_dist(0.0, 3.0), k_dist(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const double u = u_dist(rng);
        if (std::abs(u - 1.0) < 0.2) continue;
        const auto p = with_u(u);
        const double k = k_dist(rng);
        const double exact = phase_and_derivative(p, k).derivative;
        auto fd = [&](double h) {
            double diff = arg_v(p, k + h) - arg_v(p, k - h);
            diff = std::remainder(diff, 2.0 * std::numbers::pi);
            return diff / (2.0 * h);
        };
        const double e1 = std::abs(fd(1e-2) - exact);
        const double e2 = std::abs(fd(5e-3) - exact);
        if (e1 > 1e-9) {
            EXPECT_NEAR(e1 / e2, 4.0, 0.3) << "u = " << u << ", k = " << k;
        }
    }
}

TEST(PhaseDerivative, RefusesVanishingAmplitude) {
    EXPECT_THROW(phase_and_derivative(with_u(1.0), std::numbers::pi), DegenerateError);
}

TEST(Winding, KnownValues) {
    EXPECT_EQ(winding_number(with_u(0.5)), 0);
    EXPECT_EQ(winding_number(with_u(2.0)), 1);
    EXPECT_EQ(winding_number(with_u(0.0)), 0);
}

TEST(Winding, IntegralIsQuantizedAwayFromTransition) {
    for (double u : {0.0, 0.25, 0.5, 0.75, 0.9, 1.1, 1.5, 2.0, 2.5, 3.0}) {
        const double expected = u > 1.0 ? 1.0 : 0.0;
        EXPECT_NEAR(winding_integral(with_u(u), 4096), expected, 1e-9) << "u = " << u;
    }
}

TEST(Winding, RefusesTransitionPoint) {
    EXPECT_THROW(winding_number(with_u(1.0)), DegenerateError);
}

TEST(KGrid, ContainsZeroAndIsParityClosed) {
    for (std::size_t n : {2u, 7u, 128u, 129u, 256u}) {
        const KGrid grid(n);
        bool has_zero = false;
        for (std::size_t i = 0; i < n; ++i) {
            has_zero = has_zero || grid.points[i] == 0.0;
            const double k = grid.points[i];
            const double mk = grid.points[grid.mirror(i)];
            EXPECT_NEAR(std::remainder(k + mk, 2.0 * std::numbers::pi), 0.0, 1e-14);
            EXPECT_GE(k, -std::numbers::pi - 1e-15);
            EXPECT_LT(k, std::numbers::pi);
        }
        EXPECT_TRUE(has_zero);
    }
}

TEST(KGrid, ModulusIsEvenOnTheGrid) {
    const KGrid grid(129);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u_dist(0.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = with_u(u_dist(rng));
        for (std::size_t i = 0; i < grid.n; ++i) {
            EXPECT_NEAR(hopping_modulus_squared(p, grid.points[i]),
                        hopping_modulus_squared(p, grid.points[grid.mirror(i)]), 1e-13);
        }
    }
}

TEST(WalkParams, Validation) {
    WalkParams p;
    p.u = -0.1;
    EXPECT_THROW(p.validate(), ConfigError);
    p.u = 0.5;
    p.v = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    EXPECT_THROW(KGrid(1), ConfigError);
}
