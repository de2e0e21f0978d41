#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "walkholes/errors.hpp"
#include "walkholes/rng.hpp"

namespace walkholes {

struct Point {
    std::int32_t x = 0;
    std::int32_t y = 0;

    friend constexpr auto operator<=>(const Point&, const Point&) = default;
    friend constexpr Point operator+(Point a, Point b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) noexcept { return {a.x - b.x, a.y - b.y}; }
};

constexpr std::int64_t norm_squared(Point p) noexcept
{
    return std::int64_t{p.x} * p.x + std::int64_t{p.y} * p.y;
}

/// Closed integer rectangle [x_min, x_max] x [y_min, y_max].
struct Box {
    std::int32_t x_min = 0;
    std::int32_t y_min = 0;
    std::int32_t x_max = -1;
    std::int32_t y_max = -1;

    constexpr bool empty() const noexcept { return x_max < x_min || y_max < y_min; }
    constexpr std::int64_t width() const noexcept { return empty() ? 0 : std::int64_t{x_max} - x_min + 1; }
    constexpr std::int64_t height() const noexcept { return empty() ? 0 : std::int64_t{y_max} - y_min + 1; }
    constexpr bool contains(Point p) const noexcept
    {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
    constexpr bool contains(const Box& b) const noexcept
    {
        return b.empty() || (b.x_min >= x_min && b.x_max <= x_max && b.y_min >= y_min && b.y_max <= y_max);
    }
    constexpr void expand(Point p) noexcept
    {
        if (empty()) {
            *this = {p.x, p.y, p.x, p.y};
            return;
        }
        if (p.x < x_min) x_min = p.x;
        if (p.x > x_max) x_max = p.x;
        if (p.y < y_min) y_min = p.y;
        if (p.y > y_max) y_max = p.y;
    }
    constexpr Box padded(std::int32_t k) const noexcept { return {x_min - k, y_min - k, x_max + k, y_max + k}; }

    friend constexpr bool operator==(const Box&, const Box&) = default;
};

/// Step codes. The direction of a step is the two low bits of one
/// generator output: 0 = E, 1 = N, 2 = W, 3 = S.
enum class Direction : std::uint8_t { east = 0, north = 1, west = 2, south = 3 };

constexpr Point unit_step(Direction d) noexcept
{
    switch (d) {
    case Direction::east: return {1, 0};
    case Direction::north: return {0, 1};
    case Direction::west: return {-1, 0};
    case Direction::south: return {0, -1};
    }
    return {};
}

/// Infinite stream of uniformly random directions for a seed.
class StepSource {
public:
    explicit StepSource(std::uint64_t seed) noexcept : rng_(seed) {}
    Direction operator()() noexcept { return static_cast<Direction>(rng_() & 3u); }

private:
    Xoshiro256 rng_;
};

/// A planar simple random walk of step_count() steps started at the origin.
/// positions[k] = S(k); the interpolated path is the union of the unit edges
/// positions[k] -- positions[k+1].
struct WalkPath {
    std::uint64_t seed = 0;
    std::vector<Direction> steps;
    std::vector<Point> positions{Point{}};

    std::size_t step_count() const noexcept { return steps.size(); }
};

/// Seeded walk of exactly step_count steps.
/// Throws ResourceError when step_count exceeds budget.max_steps.
WalkPath generate_walk(std::uint64_t seed, std::uint64_t step_count, const ResourceBudget& budget = {});

/// Walk with the given step sequence (fixtures, embedded walks). seed is recorded as-is.
WalkPath walk_from_steps(std::span<const Direction> steps, std::uint64_t seed = 0);

/// Runs the step stream from `start` until |S(k)| >= radius (k > 0), appending
/// every position (including start) to `out`. Returns the number of steps taken.
std::size_t walk_until_exit(StepSource& source, Point start, std::int64_t radius, std::vector<Point>& out,
                            const ResourceBudget& budget = {});

/// True when positions[0] is the origin and consecutive positions are lattice
/// neighbours matching steps.
bool is_valid_walk(const WalkPath& walk) noexcept;

struct RangeStats {
    double max_radius = 0.0;  ///< max over visited sites of |S(k)|
    Box bbox;                 ///< tight box of visited sites
};

RangeStats range_stats(const WalkPath& walk) noexcept;
RangeStats range_stats(std::span<const Point> positions) noexcept;

}  // namespace walkholes
