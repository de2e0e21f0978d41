#include "walkholes/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace walkholes {

namespace {

// One driving path and the walk it embeds: the k-th exit of W from
// (R(k-1) - 1, R(k-1) + 1) happens at exits[k] at level R(k) = R(k-1) +- 1.
struct AxisEmbedding {
    std::vector<double> samples{0.0};
    std::vector<double> exits{0.0};
    std::vector<std::int32_t> levels{0};
};

void push_exit(AxisEmbedding& axis, double t, double level)
{
    axis.exits.push_back(t);
    axis.levels.push_back(static_cast<std::int32_t>(level));
}

// Samples W every dt and records exits. Besides crossings seen by the linear
// interpolation, a crossing between two samples inside the interval is drawn
// with the Brownian bridge probability exp(-2 a b / span); without it, exits
// are detected late and the walk's clock drifts behind W.
void extend(AxisEmbedding& axis, GaussianSource& gauss, Xoshiro256& bridge, double dt, std::size_t min_samples,
            std::size_t min_exits)
{
    const double sigma = std::sqrt(dt);
    while (axis.samples.size() < min_samples || axis.exits.size() < min_exits) {
        const std::size_t j = axis.samples.size();
        const double w0 = axis.samples.back();
        const double w1 = w0 + sigma * gauss();
        axis.samples.push_back(w1);
        // (ta, wa): start of the part of the segment after the last crossing.
        double ta = static_cast<double>(j - 1) * dt;
        double wa = w0;
        const double tb = static_cast<double>(j) * dt;
        for (;;) {
            const double level = axis.levels.back();
            if (w1 >= level + 1.0 || w1 <= level - 1.0) {
                const double target = w1 >= level + 1.0 ? level + 1.0 : level - 1.0;
                const double tc = std::clamp(ta + (target - wa) / (w1 - wa) * (tb - ta), ta, tb);
                push_exit(axis, tc, target);
                ta = tc;
                wa = target;
                continue;
            }
            const double span = tb - ta;
            bool crossed = false;
            for (const double target : {level + 1.0, level - 1.0}) {
                const double a = std::abs(target - wa);
                const double b = std::abs(target - w1);
                const double e = 2.0 * a * b / span;
                if (!(span > 0.0) || e > 40.0) continue;
                if (bridge.uniform() < std::exp(-e)) {
                    const double tc = a + b > 0.0 ? ta + span * a / (a + b) : ta;
                    push_exit(axis, tc, target);
                    ta = tc;
                    wa = target;
                    crossed = true;
                    break;
                }
            }
            if (!crossed) break;
        }
    }
}

double dist(Vec2 a, Vec2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) noexcept
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return dist(p, a);
    const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    return dist(p, {a.x + t * dx, a.y + t * dy});
}

std::size_t sample_count_to(const CouplingTrace& trace) noexcept
{
    const auto m = static_cast<std::size_t>(std::ceil(static_cast<double>(trace.n) / trace.bm_dt - 1e-9)) + 1;
    return std::min(m, trace.bm_samples.size());
}

std::span<const Vec2> bm_polyline(const CouplingTrace& trace) noexcept
{
    return {trace.bm_samples.data(), sample_count_to(trace)};
}

bool on_grid_line(double v, double h) noexcept
{
    const double q = v / h;
    return q == std::floor(q);
}

}  // namespace

CouplingTrace embed_walk(std::uint64_t seed, std::int64_t n, double dt, const ResourceBudget& budget)
{
    if (n < 1) throw ArgumentError("n: must be at least 1");
    if (!(dt > 0.0 && dt <= 0.25)) throw ArgumentError("dt: must lie in (0, 1/4]");
    const auto steps = static_cast<std::uint64_t>(2 * n);
    if (steps > budget.max_steps) {
        throw ResourceError("embedding " + std::to_string(steps) + " steps exceeds budget of " +
                            std::to_string(budget.max_steps));
    }
    const double horizon = 2.0 * static_cast<double>(n);
    const auto min_samples = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9)) + 1;
    if (min_samples > budget.max_steps) {
        throw ResourceError("driving paths of " + std::to_string(min_samples) + " samples exceed budget of " +
                            std::to_string(budget.max_steps));
    }

    CouplingTrace trace;
    trace.seed = seed;
    trace.n = n;
    trace.dt = dt;
    trace.bm_dt = dt / 2.0;

    std::array<AxisEmbedding, 2> axes;
    for (int i = 0; i < 2; ++i) {
        GaussianSource gauss(derive_seed(seed, static_cast<std::uint64_t>(i)));
        Xoshiro256 bridge(derive_seed(seed, static_cast<std::uint64_t>(i + 2)));
        axes[i].samples.reserve(min_samples + min_samples / 8);
        extend(axes[i], gauss, bridge, dt, min_samples, static_cast<std::size_t>(steps) + 1);
    }

    std::vector<Direction> dirs;
    dirs.reserve(static_cast<std::size_t>(steps));
    trace.tau.assign(static_cast<std::size_t>(steps) + 1, 0.0);
    for (std::size_t k = 1; k <= steps; ++k) {
        const int d1 = axes[0].levels[k] - axes[0].levels[k - 1];
        const int d2 = axes[1].levels[k] - axes[1].levels[k - 1];
        // ((d1 + d2) / 2, (d1 - d2) / 2)
        if (d1 > 0) {
            dirs.push_back(d2 > 0 ? Direction::east : Direction::north);
        } else {
            dirs.push_back(d2 > 0 ? Direction::south : Direction::west);
        }
        trace.tau[k] = std::max(axes[0].exits[k], axes[1].exits[k]) / 2.0;
    }
    trace.walk = walk_from_steps(dirs, seed);

    const std::size_t m = min_samples;
    trace.bm_samples.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double w1 = axes[0].samples[j];
        const double w2 = axes[1].samples[j];
        trace.bm_samples[j] = {(w1 + w2) / 2.0, (w1 - w2) / 2.0};
    }
    for (int i = 0; i < 2; ++i) {
        axes[i].exits.resize(static_cast<std::size_t>(steps) + 1);
        axes[i].levels.resize(static_cast<std::size_t>(steps) + 1);
        trace.exit_times[i] = std::move(axes[i].exits);
        trace.axis_walks[i] = std::move(axes[i].levels);
        trace.driving[i] = std::move(axes[i].samples);
    }
    return trace;
}

Vec2 bm_at(const CouplingTrace& trace, double t) noexcept
{
    const auto& s = trace.bm_samples;
    if (s.empty()) return {};
    const double u = std::clamp(t / trace.bm_dt, 0.0, static_cast<double>(s.size() - 1));
    const auto j = static_cast<std::size_t>(u);
    if (j + 1 >= s.size()) return s.back();
    const double f = u - static_cast<double>(j);
    return {s[j].x + f * (s[j + 1].x - s[j].x), s[j].y + f * (s[j + 1].y - s[j].y)};
}

Vec2 walk_at_half_time(const CouplingTrace& trace, double t) noexcept
{
    const auto& p = trace.walk.positions;
    const double u = std::clamp(2.0 * t, 0.0, static_cast<double>(p.size() - 1));
    const auto k = static_cast<std::size_t>(u);
    if (k + 1 >= p.size()) return {static_cast<double>(p.back().x), static_cast<double>(p.back().y)};
    const double f = u - static_cast<double>(k);
    return {p[k].x + f * (p[k + 1].x - p[k].x), p[k].y + f * (p[k + 1].y - p[k].y)};
}

double sup_distance(const CouplingTrace& trace)
{
    const double n = static_cast<double>(trace.n);
    const auto gap = [&](double t) { return dist(bm_at(trace, t), walk_at_half_time(trace, t)); };
    double best = 0.0;
    const std::size_t m = sample_count_to(trace);
    for (std::size_t j = 0; j < m; ++j) best = std::max(best, gap(std::min(static_cast<double>(j) * trace.bm_dt, n)));
    for (std::size_t k = 0; k < trace.walk.positions.size(); ++k) best = std::max(best, gap(static_cast<double>(k) / 2.0));
    for (double t : trace.tau) {
        if (t <= n) best = std::max(best, gap(t));
    }
    return best;
}

double sup_norm(const CouplingTrace& trace) noexcept
{
    double best = 0.0;
    for (Vec2 p : bm_polyline(trace)) best = std::max(best, std::hypot(p.x, p.y));
    return best;
}

Point Raster::cell_of(Vec2 p, double h) noexcept
{
    return {static_cast<std::int32_t>(std::floor(p.x / h)), static_cast<std::int32_t>(std::floor(p.y / h))};
}

bool Raster::is_marked(Point cell) const noexcept
{
    const std::int64_t x = std::int64_t{cell.x} - origin.x;
    const std::int64_t y = std::int64_t{cell.y} - origin.y;
    if (x < 0 || y < 0 || x >= marked.width() || y >= marked.height()) return false;
    return marked.test(x, y);
}

ComponentMap Raster::components() const { return label_faces(h_blocked, v_blocked, origin, HoleKind::planar); }

Raster rasterize(std::span<const Vec2> polyline, double h, const ResourceBudget& budget)
{
    if (!(h > 0.0)) throw ArgumentError("h: must be positive");
    Box cells;
    for (Vec2 p : polyline) cells.expand(Raster::cell_of(p, h));
    if (cells.empty()) cells.expand(Point{});
    const Box padded = cells.padded(2);
    const auto corners = static_cast<std::uint64_t>(padded.width() + 1) * static_cast<std::uint64_t>(padded.height() + 1);
    if (corners > budget.max_grid_cells) {
        throw ResourceError("raster of " + std::to_string(padded.width()) + "x" + std::to_string(padded.height()) +
                            " cells exceeds budget of " + std::to_string(budget.max_grid_cells) + " cells");
    }

    Raster r;
    r.h = h;
    r.origin = {padded.x_min, padded.y_min};
    r.marked = Bitmap2D(padded.width(), padded.height());
    r.h_blocked = Bitmap2D(padded.width() + 1, padded.height() + 1);
    r.v_blocked = Bitmap2D(padded.width() + 1, padded.height() + 1);
    const std::int64_t ox = r.origin.x;
    const std::int64_t oy = r.origin.y;
    const auto mark = [&](std::int64_t cx, std::int64_t cy) { r.marked.set(cx - ox, cy - oy); };

    if (polyline.size() == 1) {
        const Point c = Raster::cell_of(polyline.front(), h);
        mark(c.x, c.y);
    }
    for (std::size_t s = 1; s < polyline.size(); ++s) {
        const Vec2 a = polyline[s - 1];
        const Vec2 b = polyline[s];

        // A segment lying on a grid line touches the cells on both sides.
        if (a.x == b.x && on_grid_line(a.x, h)) {
            const auto col = static_cast<std::int64_t>(std::llround(a.x / h));
            const auto lo = static_cast<std::int64_t>(std::floor(std::min(a.y, b.y) / h));
            const auto hi = static_cast<std::int64_t>(std::ceil(std::max(a.y, b.y) / h));
            for (std::int64_t row = lo; row < hi; ++row) {
                mark(col - 1, row);
                mark(col, row);
            }
            if (lo == hi) mark(col, lo);
            continue;
        }
        if (a.y == b.y && on_grid_line(a.y, h)) {
            const auto row = static_cast<std::int64_t>(std::llround(a.y / h));
            const auto lo = static_cast<std::int64_t>(std::floor(std::min(a.x, b.x) / h));
            const auto hi = static_cast<std::int64_t>(std::ceil(std::max(a.x, b.x) / h));
            for (std::int64_t col = lo; col < hi; ++col) {
                mark(col, row - 1);
                mark(col, row);
            }
            continue;
        }

        // Amanatides-Woo traversal with a fixed number of unit moves; an exact
        // corner pass takes the x move first.
        const Point c0 = Raster::cell_of(a, h);
        const Point c1 = Raster::cell_of(b, h);
        std::int64_t cx = c0.x;
        std::int64_t cy = c0.y;
        std::int64_t nx = std::abs(std::int64_t{c1.x} - c0.x);
        std::int64_t ny = std::abs(std::int64_t{c1.y} - c0.y);
        const int sx = c1.x > c0.x ? 1 : -1;
        const int sy = c1.y > c0.y ? 1 : -1;
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        const double inf = std::numeric_limits<double>::infinity();
        const auto first = [&](double p, double d, std::int64_t c, int step) {
            if (d == 0.0) return inf;
            const double edge = static_cast<double>(step > 0 ? c + 1 : c) * h;
            return (edge - p) / d;
        };
        double tmax_x = first(a.x, dx, cx, sx);
        double tmax_y = first(a.y, dy, cy, sy);
        const double tdelta_x = dx == 0.0 ? inf : h / std::abs(dx);
        const double tdelta_y = dy == 0.0 ? inf : h / std::abs(dy);
        mark(cx, cy);
        while (nx + ny > 0) {
            const bool step_x = ny == 0 || (nx > 0 && tmax_x <= tmax_y);
            if (step_x) {
                cx += sx;
                tmax_x += tdelta_x;
                --nx;
            } else {
                cy += sy;
                tmax_y += tdelta_y;
                --ny;
            }
            mark(cx, cy);
        }
    }

    // Walls: the polyline snapped to its nearest cell corners, consecutive
    // corners joined by the 4-connected corner path closest to the chord.
    const auto corner_of = [&](Vec2 p) {
        return Point{static_cast<std::int32_t>(std::llround(p.x / h)), static_cast<std::int32_t>(std::llround(p.y / h))};
    };
    Point prev = corner_of(polyline.front());
    for (std::size_t s = 1; s < polyline.size(); ++s) {
        const Point next = corner_of(polyline[s]);
        const std::int64_t nx = std::abs(std::int64_t{next.x} - prev.x);
        const std::int64_t ny = std::abs(std::int64_t{next.y} - prev.y);
        const int sx = next.x > prev.x ? 1 : -1;
        const int sy = next.y > prev.y ? 1 : -1;
        std::int64_t cx = prev.x;
        std::int64_t cy = prev.y;
        for (std::int64_t ix = 0, iy = 0; ix < nx || iy < ny;) {
            // Compare (ix + 1/2) / nx with (iy + 1/2) / ny; ties step in x.
            if (iy == ny || (ix < nx && (2 * ix + 1) * ny <= (2 * iy + 1) * nx)) {
                r.h_blocked.set((sx > 0 ? cx : cx - 1) - ox, cy - oy);
                cx += sx;
                ++ix;
            } else {
                r.v_blocked.set(cx - ox, (sy > 0 ? cy : cy - 1) - oy);
                cy += sy;
                ++iy;
            }
        }
        prev = next;
    }
    return r;
}

std::vector<RasterHole> raster_holes(std::span<const Vec2> polyline, double h, const ResourceBudget& budget)
{
    const ComponentMap map = rasterize(polyline, h, budget).components();
    std::vector<RasterHole> out;
    out.reserve(map.holes().size());
    for (const auto& rec : map.holes()) out.push_back({rec, static_cast<double>(rec.area) * h * h});
    return out;
}

std::vector<RasterHole> bm_holes(const CouplingTrace& trace, double h, const ResourceBudget& budget)
{
    if (!(h > 0.0 && h <= 1.0)) throw ArgumentError("h: must lie in (0, 1]");
    return raster_holes(bm_polyline(trace), h, budget);
}

double distance_to_polyline(std::span<const Vec2> polyline, Vec2 p) noexcept
{
    if (polyline.empty()) return std::numeric_limits<double>::infinity();
    double best = dist(p, polyline.front());
    for (std::size_t s = 1; s < polyline.size(); ++s) {
        best = std::min(best, point_segment_distance(p, polyline[s - 1], polyline[s]));
        if (best == 0.0) break;
    }
    return best;
}

AreaComparison::AreaComparison(const CouplingTrace& trace, double h, const ResourceBudget& budget)
    : polyline_(bm_polyline(trace)), n_(trace.n), h_(h)
{
    if (!(h > 0.0 && h <= 1.0)) throw ArgumentError("h: must lie in (0, 1]");
    raster_ = rasterize(polyline_, h, budget);

    for (Vec2 p : polyline_) buckets_.expand(Raster::cell_of(p, 1.0));
    if (buckets_.empty()) buckets_.expand(Point{});
    const std::int64_t bw = buckets_.width();
    const std::int64_t bh = buckets_.height();
    if (static_cast<std::uint64_t>(bw * bh) > budget.max_grid_cells) throw ResourceError("segment index exceeds grid budget");
    const auto for_each_bucket = [&](std::size_t s, auto&& f) {
        const Vec2 a = polyline_[s - 1];
        const Vec2 b = polyline_[s];
        const Point lo = Raster::cell_of({std::min(a.x, b.x), std::min(a.y, b.y)}, 1.0);
        const Point hi = Raster::cell_of({std::max(a.x, b.x), std::max(a.y, b.y)}, 1.0);
        for (std::int64_t y = lo.y; y <= hi.y; ++y) {
            for (std::int64_t x = lo.x; x <= hi.x; ++x) f((y - buckets_.y_min) * bw + (x - buckets_.x_min));
        }
    };
    bucket_start_.assign(static_cast<std::size_t>(bw * bh) + 1, 0);
    for (std::size_t s = 1; s < polyline_.size(); ++s) for_each_bucket(s, [&](std::int64_t i) { ++bucket_start_[i + 1]; });
    for (std::size_t i = 1; i < bucket_start_.size(); ++i) bucket_start_[i] += bucket_start_[i - 1];
    bucket_segments_.resize(bucket_start_.back());
    std::vector<std::uint32_t> fill(bucket_start_.begin(), bucket_start_.end() - 1);
    for (std::size_t s = 1; s < polyline_.size(); ++s) {
        for_each_bucket(s, [&](std::int64_t i) { bucket_segments_[fill[i]++] = static_cast<std::uint32_t>(s); });
    }

    bm_cells_ = raster_.components();
    walk_grid_ = build_grid(trace.walk, budget);
    walk_faces_ = label_planar(walk_grid_);
    sup_distance_ = walkholes::sup_distance(trace);
    sup_norm_ = walkholes::sup_norm(trace);
}

double AreaComparison::bm_distance(Vec2 z) const
{
    if (polyline_.size() < 2) return distance_to_polyline(polyline_, z);
    // Rings of buckets by Chebyshev distance r from z's bucket. Every point of a
    // bucket in ring r + 1 or beyond lies at distance >= r from z.
    const Point c = Raster::cell_of(z, 1.0);
    const std::int64_t bw = buckets_.width();
    const auto gap = [](std::int64_t v, std::int64_t lo, std::int64_t hi) { return v < lo ? lo - v : (v > hi ? v - hi : 0); };
    const std::int64_t r0 = std::max(gap(c.x, buckets_.x_min, buckets_.x_max), gap(c.y, buckets_.y_min, buckets_.y_max));
    const std::int64_t r1 = std::max({std::abs(c.x - std::int64_t{buckets_.x_min}), std::abs(c.x - std::int64_t{buckets_.x_max}),
                                      std::abs(c.y - std::int64_t{buckets_.y_min}), std::abs(c.y - std::int64_t{buckets_.y_max})});
    double best = std::numeric_limits<double>::infinity();
    const auto visit = [&](std::int64_t x, std::int64_t y) {
        if (x < buckets_.x_min || x > buckets_.x_max || y < buckets_.y_min || y > buckets_.y_max) return;
        const std::int64_t i = (y - buckets_.y_min) * bw + (x - buckets_.x_min);
        for (std::uint32_t k = bucket_start_[i]; k < bucket_start_[i + 1]; ++k) {
            const std::uint32_t s = bucket_segments_[k];
            best = std::min(best, point_segment_distance(z, polyline_[s - 1], polyline_[s]));
        }
    };
    for (std::int64_t r = r0; r <= r1; ++r) {
        if (r == 0) {
            visit(c.x, c.y);
        } else {
            for (std::int64_t x = c.x - r; x <= c.x + r; ++x) {
                visit(x, c.y - r);
                visit(x, c.y + r);
            }
            for (std::int64_t y = c.y - r + 1; y <= c.y + r - 1; ++y) {
                visit(c.x - r, y);
                visit(c.x + r, y);
            }
        }
        if (best <= static_cast<double>(r)) break;
    }
    return best;
}

double AreaComparison::walk_distance(Point z) const
{
    // The nearest point of the walk's edge set to a lattice point is a visited site.
    double best = std::numeric_limits<double>::infinity();
    const Box& b = walk_grid_.bbox();
    walk_grid_.visited_bits().for_each_set([&](std::int64_t x, std::int64_t y) {
        const double ddx = static_cast<double>(x + b.x_min - z.x);
        const double ddy = static_cast<double>(y + b.y_min - z.y);
        best = std::min(best, std::hypot(ddx, ddy));
    });
    return best;
}

DeltaArea AreaComparison::at(Point z, double threshold_scale) const
{
    DeltaArea out;
    const Vec2 zp{static_cast<double>(z.x), static_cast<double>(z.y)};
    out.bm_boundary_distance = bm_distance(zp);
    out.walk_boundary_distance = walk_distance(z);

    if (out.bm_boundary_distance == 0.0) {
        out.bm_area = 0.0;
    } else {
        const std::int32_t id = bm_cells_.label(Raster::cell_of(zp, h_));
        if (id >= 0) out.bm_area = static_cast<double>(bm_cells_.holes()[id].area) * h_ * h_;
    }
    if (walk_grid_.visited(z)) {
        out.walk_area = 0;
    } else {
        // An unvisited site has all four incident faces in one component.
        const std::int32_t id = walk_faces_.label(z);
        if (id >= 0) out.walk_area = walk_faces_.holes()[id].area;
    }
    if (out.bm_area && out.walk_area) out.delta = std::abs(*out.bm_area - static_cast<double>(*out.walk_area));

    const double thr = coupling_scale(n_) * threshold_scale;
    const double nn = static_cast<double>(n_);
    out.flags.boundary_far_bm = out.bm_boundary_distance >= 100.0 * thr;
    out.flags.boundary_far_walk = out.walk_boundary_distance >= 100.0 * thr;
    out.flags.coupled = sup_distance_ <= thr;
    out.flags.both_finite = out.bm_area.has_value() && out.walk_area.has_value();
    out.flags.confined = sup_norm_ <= std::sqrt(nn) * std::log(nn);
    return out;
}

DeltaArea delta_area(const CouplingTrace& trace, Point z, double h) { return AreaComparison(trace, h).at(z); }

double coupling_scale(std::int64_t n) noexcept
{
    const double x = static_cast<double>(n);
    const double l = std::log(x);
    return std::pow(x, 0.25) * l * l;
}

}  // namespace walkholes
