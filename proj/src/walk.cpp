#include "walkholes/walk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace walkholes {

WalkPath generate_walk(std::uint64_t seed, std::uint64_t step_count, const ResourceBudget& budget)
{
    if (step_count > budget.max_steps) {
        throw ResourceError("step_count " + std::to_string(step_count) + " exceeds budget of " +
                            std::to_string(budget.max_steps) + " steps");
    }
    WalkPath walk;
    walk.seed = seed;
    walk.steps.resize(step_count);
    walk.positions.resize(step_count + 1);
    StepSource source(seed);
    Point p{};
    for (std::size_t k = 0; k < step_count; ++k) {
        const Direction d = source();
        walk.steps[k] = d;
        p = p + unit_step(d);
        walk.positions[k + 1] = p;
    }
    return walk;
}

WalkPath walk_from_steps(std::span<const Direction> steps, std::uint64_t seed)
{
    WalkPath walk;
    walk.seed = seed;
    walk.steps.assign(steps.begin(), steps.end());
    walk.positions.reserve(steps.size() + 1);
    Point p{};
    for (Direction d : steps) {
        p = p + unit_step(d);
        walk.positions.push_back(p);
    }
    return walk;
}

std::size_t walk_until_exit(StepSource& source, Point start, std::int64_t radius, std::vector<Point>& out,
                            const ResourceBudget& budget)
{
    const std::int64_t r2 = radius * radius;
    Point p = start;
    out.push_back(p);
    std::size_t steps = 0;
    do {
        if (steps == budget.max_steps) {
            throw ResourceError("walk did not exit radius " + std::to_string(radius) + " within " +
                                std::to_string(budget.max_steps) + " steps");
        }
        p = p + unit_step(source());
        out.push_back(p);
        ++steps;
    } while (norm_squared(p) < r2);
    return steps;
}

bool is_valid_walk(const WalkPath& walk) noexcept
{
    if (walk.positions.size() != walk.steps.size() + 1) return false;
    if (walk.positions.front() != Point{}) return false;
    for (std::size_t k = 0; k < walk.steps.size(); ++k) {
        const Point d = walk.positions[k + 1] - walk.positions[k];
        if (std::abs(d.x) + std::abs(d.y) != 1) return false;
        if (d != unit_step(walk.steps[k])) return false;
    }
    return true;
}

RangeStats range_stats(std::span<const Point> positions) noexcept
{
    RangeStats stats;
    std::int64_t best = 0;
    for (Point p : positions) {
        stats.bbox.expand(p);
        best = std::max(best, norm_squared(p));
    }
    stats.max_radius = std::sqrt(static_cast<double>(best));
    return stats;
}

RangeStats range_stats(const WalkPath& walk) noexcept { return range_stats(walk.positions); }

}  // namespace walkholes
