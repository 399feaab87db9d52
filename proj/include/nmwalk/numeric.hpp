// numeric.hpp: small numeric helpers: compensated summation and uniform time grids.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"

namespace nmwalk {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Neumaier summation; the result depends only on the order of the inputs.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_{0.0};
    double comp_{0.0};
};

inline double compensated_sum(std::span<const double> xs) noexcept {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

// Uniform grid t_n = n * step, n = 0 .. count-1.
struct TimeGrid {
    double step{0.0};
    std::size_t count{0};

    static TimeGrid uniform(double t_max, double step) {
        if (!(step > 0.0) || !(t_max >= 0.0)) {
            throw ConfigError("time grid requires step > 0 and t_max >= 0");
        }
        const auto n = static_cast<std::size_t>(std::llround(std::floor(t_max / step + 1e-9)));
        return TimeGrid{step, n + 1};
    }

    double at(std::size_t n) const noexcept { return static_cast<double>(n) * step; }
    double last() const noexcept { return count == 0 ? 0.0 : at(count - 1); }

    std::vector<double> points() const {
        std::vector<double> out(count);
        for (std::size_t n = 0; n < count; ++n) out[n] = at(n);
        return out;
    }
};

}  // namespace nmwalk
