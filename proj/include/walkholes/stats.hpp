#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace walkholes {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Least-squares line through (log x, log y). The exponent of a counting law
/// f(A) ~ A^(-xi/2) is xi = -2 * slope.
struct ExponentEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;  ///< standard error of the slope; 0 for two points
    double r_squared = 0.0;
    std::pair<double, double> x_range{0.0, 0.0};
    std::int64_t points_used = 0;

    double exponent() const noexcept { return -2.0 * slope; }
};

/// Throws ArgumentError for fewer than two distinct x, for nonpositive x or y,
/// or for a weights span whose size differs from x (empty means unweighted).
ExponentEstimate fit_exponent(std::span<const double> x, std::span<const double> y,
                              std::span<const double> weights = {});

double mean(std::span<const double> values) noexcept;
double median(std::vector<double> values);

/// Percentile bootstrap interval for the mean.
Interval bootstrap_mean_ci(std::span<const double> values, std::uint64_t seed, int resamples = 200,
                           double level = 0.95);

/// Wilson score interval for a binomial proportion (z = 1.96 for 95%).
Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959963984540054);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const char> bytes) noexcept;

}  // namespace walkholes
