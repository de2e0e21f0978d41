#include "walkholes/exponent_mc.hpp"

#include <algorithm>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "walkholes/grid.hpp"

namespace walkholes {

namespace {

// Runs trial(t, scratch) -> bool over the range, split into contiguous blocks
// across threads.
template <class Trial>
std::int64_t count_successes(const TrialRange& range, Trial&& trial)
{
    if (range.trials < 0) throw ArgumentError("trials: must be nonnegative");
    const std::int64_t jobs = std::clamp<std::int64_t>(range.jobs, 1, std::max<std::int64_t>(range.trials, 1));
    std::vector<std::int64_t> partial(static_cast<std::size_t>(jobs), 0);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    const auto block = [&](std::int64_t j) {
        const std::int64_t lo = range.first_trial + range.trials * j / jobs;
        const std::int64_t hi = range.first_trial + range.trials * (j + 1) / jobs;
        std::vector<Point> scratch;
        try {
            for (std::int64_t t = lo; t < hi; ++t) partial[j] += trial(t, scratch) ? 1 : 0;
        } catch (...) {
            errors[j] = std::current_exception();
        }
    };
    if (jobs == 1) {
        block(0);
    } else {
        std::vector<std::thread> threads;
        for (std::int64_t j = 0; j < jobs; ++j) threads.emplace_back(block, j);
        for (auto& th : threads) th.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::int64_t total = 0;
    for (auto p : partial) total += p;
    return total;
}

std::uint64_t trial_seed(std::uint64_t seed, std::int64_t t) { return derive_seed(seed, static_cast<std::uint64_t>(t)); }

void run_fixed_time(StepSource& source, std::int64_t steps, std::vector<Point>& out)
{
    Point p{};
    out.push_back(p);
    for (std::int64_t k = 0; k < steps; ++k) {
        p = p + unit_step(source());
        out.push_back(p);
    }
}

}  // namespace

const char* to_string(DisconnectVariant v) noexcept
{
    switch (v) {
    case DisconnectVariant::one_sided_radius: return "one_sided_radius";
    case DisconnectVariant::two_sided_time: return "two_sided_time";
    case DisconnectVariant::two_sided_radius: return "two_sided_radius";
    case DisconnectVariant::beurling: return "beurling";
    }
    return "?";
}

DisconnectSample merge_samples(const DisconnectSample& a, const DisconnectSample& b)
{
    if (a.variant != b.variant || a.param != b.param) throw ConflictError("samples differ in variant or param");
    return {a.variant, a.param, a.trials + b.trials, a.successes + b.successes};
}

DisconnectSample one_sided_disconnect_prob(std::int64_t radius, const TrialRange& range, std::uint64_t seed,
                                           const ResourceBudget& budget)
{
    if (radius < 1) throw ArgumentError("radius: must be at least 1");
    DisconnectSample out{DisconnectVariant::one_sided_radius, radius, range.trials, 0};
    out.successes = count_successes(range, [&](std::int64_t t, std::vector<Point>& pos) {
        pos.clear();
        StepSource source(trial_seed(seed, t));
        walk_until_exit(source, {}, radius, pos, budget);
        const std::span<const Point> path(pos);
        const OccupancyGrid grid = build_grid(std::span<const std::span<const Point>>(&path, 1), budget);
        return site_touches_exterior(grid, {});
    });
    return out;
}

DisconnectSample two_sided_disconnect_prob(std::int64_t param, TwoSidedMode mode, const TrialRange& range,
                                           std::uint64_t seed, const ResourceBudget& budget)
{
    if (param < 1) throw ArgumentError("param: must be at least 1");
    if (mode == TwoSidedMode::fixed_time && static_cast<std::uint64_t>(param) > budget.max_steps) {
        throw ResourceError("param " + std::to_string(param) + " exceeds step budget");
    }
    const auto variant = mode == TwoSidedMode::fixed_time ? DisconnectVariant::two_sided_time
                                                          : DisconnectVariant::two_sided_radius;
    DisconnectSample out{variant, param, range.trials, 0};
    out.successes = count_successes(range, [&](std::int64_t t, std::vector<Point>& pos) {
        pos.clear();
        const std::uint64_t s = trial_seed(seed, t);
        std::size_t split = 0;
        for (std::uint64_t i = 0; i < 2; ++i) {
            StepSource source(derive_seed(s, i));
            if (mode == TwoSidedMode::fixed_time) {
                run_fixed_time(source, param, pos);
            } else {
                walk_until_exit(source, {}, param, pos, budget);
            }
            if (i == 0) split = pos.size();
        }
        const std::span<const Point> all(pos);
        const std::span<const Point> paths[2] = {all.first(split), all.subspan(split)};
        const OccupancyGrid grid = build_grid(std::span<const std::span<const Point>>(paths, 2), budget);
        return site_touches_exterior(grid, {});
    });
    return out;
}

DisconnectSample beurling_prob(Point x, std::int64_t n, Obstacle, const TrialRange& range, std::uint64_t seed,
                               const ResourceBudget& budget)
{
    if (n < 1) throw ArgumentError("n: must be at least 1");
    if (norm_squared(x) > n * n) throw ArgumentError("x: must satisfy |x| <= n");
    const auto on_obstacle = [n](Point p) { return p.y == 0 && p.x >= 0 && p.x <= n; };
    if (on_obstacle(x)) throw ArgumentError("x: lies on the obstacle, so the walk hits it at time 0");
    const std::int64_t param = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(norm_squared(x)))));
    DisconnectSample out{DisconnectVariant::beurling, param, range.trials, 0};
    const std::int64_t r2 = n * n;
    out.successes = count_successes(range, [&](std::int64_t t, std::vector<Point>&) {
        StepSource source(trial_seed(seed, t));
        Point p = x;
        std::uint64_t steps = 0;
        for (;;) {
            if (norm_squared(p) >= r2) return true;
            if (on_obstacle(p)) return false;
            if (++steps > budget.max_steps) throw ResourceError("beurling trial exceeded the step budget");
            p = p + unit_step(source());
        }
    });
    return out;
}

ExponentEstimate fit_samples(std::span<const DisconnectSample> samples)
{
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& s : samples) {
        if (s.successes == 0) {
            throw ArgumentError("samples: param " + std::to_string(s.param) + " has no successes");
        }
        x.push_back(static_cast<double>(s.param));
        y.push_back(s.p_hat());
    }
    return fit_exponent(x, y);
}

}  // namespace walkholes
