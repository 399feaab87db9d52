// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nmwalk/gme.hpp"
#include "nmwalk/observables.hpp"
#include "nmwalk/oracle.hpp"
#include "nmwalk/swt.hpp"

using namespace nmwalk;

namespace {

struct Verdict {
    bool pass{false};
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof(buffer), format, args...);
    return buffer;
}

WalkParams walk(double u, double omega = std::numeric_limits<double>::infinity()) {
    WalkParams p;
    p.u = u;
    p.omega = omega;
    return p;
}

std::size_t zero_index(const KGrid& kgrid) { return kgrid.n / 2; }

Verdict winding_quantization() {
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double u = 0.5 + 0.05 * (i < 10 ? i : i + 1);  // 0.5 .. 0.95, 1.05 .. 1.5
        const auto p = walk(u);
        ok = ok && winding_number(p) == (u > 1.0 ? 1 : 0);
        const double integral = winding_integral(p, 4096);
        worst = std::max(worst, std::abs(integral - std::round(integral)));
    }
    return {ok && worst < 1e-9, fmt("20 u values in [0.5, 1.5]; max |integral - integer| = %.2e", worst)};
}

Verdict localization_dichotomy() {
    const double vk2 = hopping_modulus_squared(walk(2.0), 0.0);
    bool ok = true;
    for (double alpha : {0.0, 0.5, 1.0}) ok = ok && steady_average({alpha, 0.01, 5.0}, vk2) == 0.0;
    double worst_closed = 0.0, worst_residue = 0.0;
    for (double alpha : {1.5, 2.0, 3.0}) {
        const SpectralLaw law{alpha, 0.01, 5.0};
        const double closed = 1.0 / (two_pi * (1.0 + omega_minus(law, vk2)));
        worst_closed = std::max(worst_closed, std::abs(steady_average(law, vk2) - closed));
        worst_residue = std::max(worst_residue, std::abs(extrapolated_residue(law, vk2).extrapolated - closed));
    }
    ok = ok && worst_closed < 1e-15 && worst_residue < 1e-6;
    return {ok, fmt("zero for alpha <= 1; closed form err %.1e; Richardson residue err %.1e", worst_closed,
                    worst_residue)};
}

Verdict complete_decay() {
    const auto p = walk(2.0);
    const KGrid kgrid(129);
    const auto traces = evolve_zone(p, {0.0, 0.01, 5.0}, kgrid, TimeGrid::uniform(200.0, 0.04));
    const auto m = mean_displacement_series(traces, p, kgrid);
    const auto& rho0 = traces[zero_index(kgrid)].population;
    double late_max = 0.0;
    for (std::size_t n = rho0.size() / 2; n < rho0.size(); ++n) late_max = std::max(late_max, std::abs(rho0[n]));
    const bool ok = std::abs(m.back() - 1.0) < 0.02 && late_max < 0.02;
    return {ok, fmt("<m(200)> = %.5f; max |2 pi rho_A(0, t)| for t in [100, 200] = %.2e", m.back(), late_max)};
}

Verdict partial_decay() {
    const SpectralLaw law{2.0, 0.01, 5.0};
    const double vk2 = hopping_modulus_squared(walk(2.0), 0.0);
    const auto trace = evolve_volterra(law, vk2, TimeGrid::uniform(500.0, 0.04));
    CompensatedSum acc;
    for (std::size_t n = 0; n < trace.size(); ++n) acc.add((n == 0 || n + 1 == trace.size() ? 0.5 : 1.0) * trace.population[n]);
    const double average = acc.value() / static_cast<double>(trace.size() - 1);
    const double target = 1.0 / 1.9;
    // Oscillation: crossings of the mean over the second half of the run.
    std::size_t crossings = 0;
    for (std::size_t n = trace.size() / 2 + 1; n < trace.size(); ++n) {
        if ((trace.population[n] - target) * (trace.population[n - 1] - target) < 0.0) ++crossings;
    }
    const bool ok = std::abs(average - target) < 0.02 && crossings >= 10;
    return {ok, fmt("time average over [0, 500] = %.6f vs %.6f; %zu mean crossings after t = 250", average, target,
                    crossings)};
}

Verdict phase_diagram_cells() {
    std::vector<double> u, alpha;
    for (int i = 0; i < 40; ++i) u.push_back(0.075 + 0.05 * i);  // 0.05:2:0.05 shifted off u = 1
    for (int i = 0; i <= 40; ++i) alpha.push_back(0.05 * i);
    const KGrid kgrid(129);
    const auto cells = phase_diagram(u, alpha, {0.0, 0.01, 5.0}, kgrid, 8);
    double worst = 0.0;
    for (const auto& c : cells) {
        if (c.alpha <= 1.0 + 1e-12) worst = std::max(worst, std::abs(c.mean_displacement - (c.u > 1.0 ? 1.0 : 0.0)));
    }
    auto cut = [&](double a) {
        std::vector<double> out;
        for (const auto& c : cells) {
            if (std::abs(c.alpha - a) < 1e-9) out.push_back(c.mean_displacement);
        }
        return out;
    };
    auto largest_jump = [](const std::vector<double>& xs) {
        double j = 0.0;
        for (std::size_t i = 1; i < xs.size(); ++i) j = std::max(j, std::abs(xs[i] - xs[i - 1]));
        return j;
    };
    const auto c05 = cut(0.5), c15 = cut(1.5);
    const double step = largest_jump(c05), smooth = largest_jump(c15);
    const bool monotone = std::is_sorted(c15.begin(), c15.end());
    const bool ok = cells.size() == 40 * 41 && worst < 1e-3 && step > 0.99 && smooth < 0.2 && monotone &&
                    c15.front() > 0.0 && c15.back() < 1.0;
    return {ok, fmt("%zu cells; alpha <= 1 max deviation from {0,1} = %.1e; largest step between neighbouring u: "
                    "alpha=0.5 %.3f, alpha=1.5 %.3f (monotone %s, range %.3f..%.3f)",
                    cells.size(), worst, step, smooth, monotone ? "yes" : "no", c15.front(), c15.back())};
}

Verdict markovian_limit() {
    const SpectralLaw law{0.0, 0.01, 100.0};
    const double k = std::numbers::pi;
    const double vk2 = hopping_modulus_squared(walk(2.0), k);  // 1, so J |v(k)|^2 = 0.01
    const auto trace = evolve_volterra(law, vk2, TimeGrid::uniform(100.0, 0.002), k);
    double worst = 0.0;
    for (std::size_t n = 0; n < trace.size(); ++n) {
        const double exact = std::exp(-std::numbers::pi * law.j_alpha * vk2 * trace.times[n]);
        worst = std::max(worst, std::abs(trace.population[n] - exact) / exact);
    }
    return {worst < 0.02, fmt("u=2, k=pi (J|v|^2 = 0.01), t in [0, 100]: max relative deviation %.2e", worst)};
}

Verdict born_order() {
    const double k = std::numbers::pi;
    const auto p = walk(2.0);
    const double vk2 = hopping_modulus_squared(p, k);  // 1
    const std::size_t n_levels = 400;
    const double delta = 5.0;
    const double window = 0.95 * two_pi * static_cast<double>(n_levels) / delta;
    const auto grid = TimeGrid::uniform(window, 0.01);
    auto deviation = [&](double alpha, double j) {
        const auto reservoir = discretize_spectral_law({alpha, j, delta}, n_levels);
        const auto gme = evolve_volterra(reservoir, vk2, grid, k);
        const auto exact = oracle::exact_evolve_reduced(reduced_from_reservoir(reservoir), p, k, gme.times);
        double worst = 0.0;
        for (std::size_t n = 0; n < gme.size(); ++n) worst = std::max(worst, std::abs(gme.population[n] - exact.population[n]));
        return worst;
    };
    bool ok = true;
    std::string detail = fmt("N=400, t <= %.1f, J 2.5e-4 -> 1.25e-4:", window);
    for (double alpha : {0.5, 2.0}) {
        const double d1 = deviation(alpha, 2.5e-4), d2 = deviation(alpha, 1.25e-4);
        const double ratio = d1 / d2;
        ok = ok && ratio >= 3.0 && ratio <= 5.0;
        detail += fmt(" alpha=%.1f ratio %.2f (%.2e -> %.2e);", alpha, ratio, d1, d2);
    }
    return {ok, detail};
}

Verdict chain_identity() {
    const auto p = walk(2.0, 10.0);
    const auto raw = raw_reservoir(discretize_spectral_law({0.0, 0.01, 5.0}, 40), p);
    std::vector<double> times;
    for (int i = 0; i <= 24; ++i) times.push_back(0.5 * i);
    const auto chain = oracle::exact_evolve_chain({41, p, raw}, times);
    const KGrid kgrid(256);
    const auto traces = parallel_map<KTrace>(kgrid.n, 0, [&](std::size_t i) {
        return oracle::exact_evolve_full(p, raw, kgrid.points[i], times);
    });
    double worst = 0.0, edge = 0.0;
    for (std::size_t n = 0; n < times.size(); ++n) {
        worst = std::max(worst, std::abs(chain.mean_m[n] - mean_displacement(traces, p, kgrid, n)));
        edge = std::max(edge, chain.boundary_occupation[n]);
    }
    return {worst < 1e-3, fmt("M=41, N=40, t <= 12: max |chain - k-space| = %.2e (edge occupation %.1e)", worst, edge)};
}

Verdict schrieffer_wolff() {
    const SpectralLaw law{0.0, 1e-3, 5.0};
    const double k = 0.0;
    const auto reduced_levels = discretize_spectral_law(law, 200);
    std::vector<double> times;
    for (int i = 0; i <= 2000; ++i) times.push_back(0.01 * i);
    auto discrepancy = [&](double omega) {
        const auto p = walk(2.0, omega);
        const auto raw = raw_reservoir(reduced_levels, p);
        const auto full = oracle::exact_evolve_full(p, raw, k, times);
        const auto model = reduce(p, raw, nullptr);
        const auto red = oracle::exact_evolve_reduced(model, p, k, times, {true, true});
        double worst = 0.0;
        for (std::size_t n = 0; n < times.size(); ++n) worst = std::max(worst, std::abs(full.population[n] - red.population[n]));
        return worst;
    };
    const double at50 = discrepancy(50.0), at10 = discrepancy(10.0);
    return {at50 < 0.03 && at10 > at50,
            fmt("u=2, k=0, N=200, t <= 20: max |full - reduced| = %.4f at omega=50, %.4f at omega=10", at50, at10)};
}

Verdict witness_map() {
    const auto p = walk(2.0);
    const KGrid kgrid(129);
    const auto grid = TimeGrid::uniform(60.0, 0.04);
    const auto times = grid.points();
    std::vector<double> deltas;
    for (int i = 1; i <= 10; ++i) deltas.push_back(0.5 * i);
    std::vector<WitnessTrace> rows;
    for (double d : deltas) {
        const auto traces = evolve_zone(p, {0.5, 0.01, d}, kgrid, grid);
        rows.push_back(witness(survival_series(traces, kgrid), times));
    }
    const bool lobes = rows.front().n_lower > 0.0;
    // For every t, sigma <= 0 for all Delta from some threshold upward.
    double threshold = 0.0;
    for (std::size_t n = 0; n < times.size(); ++n) {
        std::size_t r = deltas.size();
        while (r > 0 && rows[r - 1].sigma[n] <= 0.0) --r;
        if (r == deltas.size()) {
            threshold = std::numeric_limits<double>::infinity();
            break;
        }
        threshold = std::max(threshold, deltas[r]);
    }
    const auto markov = evolve_zone(p, {0.0, 0.01, 100.0}, KGrid(32), TimeGrid::uniform(20.0, 0.002));
    const auto markov_witness = witness(survival_series(markov, KGrid(32)), markov.front().times);
    const bool ok = lobes && std::isfinite(threshold) && markov_witness.n_lower < 1e-6;
    return {ok, fmt("n_lower(Delta=0.5) = %.3e; sigma <= 0 at every t for Delta >= %.1f; Markovian n_lower = %.1e",
                    rows.front().n_lower, threshold, markov_witness.n_lower)};
}

}  // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"winding-quantization", winding_quantization},
        {"localization-dichotomy", localization_dichotomy},
        {"complete-decay-displacement", complete_decay},
        {"partial-decay-oscillation", partial_decay},
        {"phase-diagram", phase_diagram_cells},
        {"markovian-limit", markovian_limit},
        {"born-order-oracle", born_order},
        {"chain-identity", chain_identity},
        {"schrieffer-wolff", schrieffer_wolff},
        {"witness-map", witness_map},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), seconds);
        failures += v.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
