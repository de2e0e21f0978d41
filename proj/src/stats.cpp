#include "walkholes/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "walkholes/errors.hpp"
#include "walkholes/rng.hpp"

namespace walkholes {

ExponentEstimate fit_exponent(std::span<const double> x, std::span<const double> y, std::span<const double> weights)
{
    if (x.size() != y.size()) throw ArgumentError("points: x and y differ in length");
    if (!weights.empty() && weights.size() != x.size()) throw ArgumentError("weights: length differs from points");
    std::set<double> distinct;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ArgumentError("points: coordinates must be positive");
        if (!weights.empty() && !(weights[i] > 0.0)) throw ArgumentError("weights: must be positive");
        distinct.insert(x[i]);
    }
    if (distinct.size() < 2) throw ArgumentError("points: need at least two distinct x values");

    const std::size_t m = x.size();
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        sw += w;
        sx += w * std::log(x[i]);
        sy += w * std::log(y[i]);
    }
    const double mx = sx / sw;
    const double my = sy / sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const double dx = std::log(x[i]) - mx;
        const double dy = std::log(y[i]) - my;
        sxx += w * dx * dx;
        sxy += w * dx * dy;
        syy += w * dy * dy;
    }
    ExponentEstimate fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const double r = std::log(y[i]) - fit.intercept - fit.slope * std::log(x[i]);
        sse += w * r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    // The ratio sse / sxx does not depend on the overall scale of the weights.
    fit.slope_stderr = m > 2 ? std::sqrt(sse / (static_cast<double>(m) - 2.0) / sxx) : 0.0;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    fit.x_range = {*lo, *hi};
    fit.points_used = static_cast<std::int64_t>(m);
    return fit;
}

double mean(std::span<const double> values) noexcept
{
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median(std::vector<double> values)
{
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

Interval bootstrap_mean_ci(std::span<const double> values, std::uint64_t seed, int resamples, double level)
{
    if (values.empty()) return {};
    Xoshiro256 rng(seed);
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& m : means) {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) s += values[rng.below(values.size())];
        m = s / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    const double alpha = (1.0 - level) / 2.0;
    const auto pick = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::clamp(std::floor(q * (resamples - 1) + 0.5), 0.0,
                                                             static_cast<double>(resamples - 1)));
        return means[idx];
    };
    return {pick(alpha), pick(1.0 - alpha)};
}

Interval wilson_interval(std::int64_t successes, std::int64_t trials, double z)
{
    if (trials <= 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::uint64_t fnv1a64(std::span<const char> bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace walkholes
