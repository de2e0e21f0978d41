#include "walkholes/grid.hpp"

#include <algorithm>
#include <string>

namespace walkholes {

namespace {

class UnionFind {
public:
    std::int32_t make()
    {
        parent_.push_back(static_cast<std::int32_t>(parent_.size()));
        return parent_.back();
    }

    std::int32_t find(std::int32_t a) noexcept
    {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }

    /// Links the larger root under the smaller one and returns the survivor.
    std::int32_t join(std::int32_t a, std::int32_t b) noexcept
    {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
        return a;
    }

    std::size_t size() const noexcept { return parent_.size(); }

private:
    std::vector<std::int32_t> parent_;
};

// Hoshen-Kopelman: one raster pass assigning provisional labels with union-find,
// then a resolve pass that compacts roots to hole ids in order of first appearance.
// join_left(x, y) / join_down(x, y) report whether open cell (x, y) is connected
// to (x-1, y) / (x, y-1); they are only called when that neighbour exists.
template <class Open, class JoinLeft, class JoinDown>
ComponentMap hoshen_kopelman(HoleKind kind, Point origin, std::int64_t width, std::int64_t height, Open&& open,
                             JoinLeft&& join_left, JoinDown&& join_down)
{
    ComponentMap map(kind, origin, width, height);
    if (width == 0 || height == 0) return map;
    auto labels = map.labels();
    UnionFind uf;

    for (std::int64_t y = 0; y < height; ++y) {
        const std::int64_t row = y * width;
        for (std::int64_t x = 0; x < width; ++x) {
            if (!open(x, y)) continue;
            const bool left = x > 0 && join_left(x, y);
            const bool down = y > 0 && join_down(x, y);
            std::int32_t label;
            if (left && down) {
                label = uf.join(labels[row + x - 1], labels[row - width + x]);
            } else if (left) {
                label = labels[row + x - 1];
            } else if (down) {
                label = labels[row - width + x];
            } else {
                label = uf.make();
            }
            labels[row + x] = label;
        }
    }

    if (labels[0] < 0) throw ArgumentError("exterior corner cell of the labeling is blocked");

    std::vector<std::int32_t> final_id(uf.size(), ComponentMap::kBlocked);
    const std::int32_t exterior_root = uf.find(labels[0]);
    final_id[exterior_root] = ComponentMap::kExterior;
    auto& holes = map.holes();
    std::int64_t exterior_size = 0;
    for (std::int64_t y = 0; y < height; ++y) {
        for (std::int64_t x = 0; x < width; ++x) {
            const std::int64_t i = y * width + x;
            if (labels[i] < 0) continue;
            const std::int32_t root = uf.find(labels[i]);
            std::int32_t id = final_id[root];
            const Point cell{static_cast<std::int32_t>(origin.x + x), static_cast<std::int32_t>(origin.y + y)};
            if (id == ComponentMap::kBlocked) {
                id = static_cast<std::int32_t>(holes.size());
                final_id[root] = id;
                HoleRecord rec;
                rec.id = id;
                rec.kind = kind;
                rec.representative = cell;
                holes.push_back(rec);
            }
            labels[i] = id;
            if (id == ComponentMap::kExterior) {
                ++exterior_size;
            } else {
                auto& rec = holes[id];
                ++rec.area;
                rec.bbox.expand(cell);
            }
        }
    }
    map.set_exterior_size(exterior_size);
    return map;
}

void check_cells(std::int64_t width, std::int64_t height, const ResourceBudget& budget)
{
    const auto cells = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
    if (cells > budget.max_grid_cells) {
        throw ResourceError("grid of " + std::to_string(width) + "x" + std::to_string(height) +
                            " sites exceeds budget of " + std::to_string(budget.max_grid_cells) + " cells");
    }
}

}  // namespace

const char* to_string(HoleKind kind) noexcept { return kind == HoleKind::lattice ? "lattice" : "planar"; }

OccupancyGrid::OccupancyGrid(const Box& bbox)
    : bbox_(bbox), visited_(bbox.width(), bbox.height()), h_edges_(bbox.width(), bbox.height()),
      v_edges_(bbox.width(), bbox.height())
{
}

void OccupancyGrid::add_path(std::span<const Point> positions) noexcept
{
    if (positions.empty()) return;
    Point prev = positions.front();
    visited_.set(prev.x - bbox_.x_min, prev.y - bbox_.y_min);
    for (std::size_t k = 1; k < positions.size(); ++k) {
        const Point p = positions[k];
        const std::int64_t x = p.x - bbox_.x_min;
        const std::int64_t y = p.y - bbox_.y_min;
        visited_.set(x, y);
        if (p.y == prev.y) {
            h_edges_.set(std::min(p.x, prev.x) - bbox_.x_min, y);
        } else {
            v_edges_.set(x, std::min(p.y, prev.y) - bbox_.y_min);
        }
        prev = p;
    }
}

OccupancyGrid build_grid(std::span<const std::span<const Point>> paths, const ResourceBudget& budget)
{
    Box box;
    for (auto path : paths) {
        for (Point p : path) box.expand(p);
    }
    if (box.empty()) box.expand(Point{});
    const Box padded = box.padded(1);
    check_cells(padded.width(), padded.height(), budget);
    OccupancyGrid grid(padded);
    for (auto path : paths) grid.add_path(path);
    return grid;
}

OccupancyGrid build_grid(const WalkPath& walk, const ResourceBudget& budget)
{
    const std::span<const Point> path(walk.positions);
    return build_grid(std::span<const std::span<const Point>>(&path, 1), budget);
}

std::vector<std::vector<Point>> ComponentMap::hole_cells() const
{
    std::vector<std::vector<Point>> cells(holes_.size());
    for (std::size_t h = 0; h < holes_.size(); ++h) cells[h].reserve(static_cast<std::size_t>(holes_[h].area));
    for (std::int64_t y = 0; y < height_; ++y) {
        for (std::int64_t x = 0; x < width_; ++x) {
            const std::int32_t id = labels_[static_cast<std::size_t>(y * width_ + x)];
            if (id >= 0) {
                cells[id].push_back({static_cast<std::int32_t>(origin_.x + x), static_cast<std::int32_t>(origin_.y + y)});
            }
        }
    }
    return cells;
}

ComponentMap label_open_cells(const Bitmap2D& blocked, Point origin, HoleKind kind)
{
    const auto open = [&](std::int64_t x, std::int64_t y) { return !blocked.test(x, y); };
    const auto left = [&](std::int64_t x, std::int64_t y) { return !blocked.test(x - 1, y); };
    const auto down = [&](std::int64_t x, std::int64_t y) { return !blocked.test(x, y - 1); };
    return hoshen_kopelman(kind, origin, blocked.width(), blocked.height(), open, left, down);
}

ComponentMap label_lattice(const OccupancyGrid& grid)
{
    const Box& b = grid.bbox();
    return label_open_cells(grid.visited_bits(), {b.x_min, b.y_min}, HoleKind::lattice);
}

ComponentMap label_faces(const Bitmap2D& h_blocked, const Bitmap2D& v_blocked, Point origin, HoleKind kind)
{
    // Face (x, y) and (x-1, y) share the vertical edge at corner (x, y); face
    // (x, y) and (x, y-1) share the horizontal edge at corner (x, y).
    const auto open = [](std::int64_t, std::int64_t) { return true; };
    const auto left = [&](std::int64_t x, std::int64_t y) { return !v_blocked.test(x, y); };
    const auto down = [&](std::int64_t x, std::int64_t y) { return !h_blocked.test(x, y); };
    return hoshen_kopelman(kind, origin, h_blocked.width() - 1, h_blocked.height() - 1, open, left, down);
}

ComponentMap label_planar(const OccupancyGrid& grid)
{
    const Box& b = grid.bbox();
    return label_faces(grid.h_edge_bits(), grid.v_edge_bits(), {b.x_min, b.y_min}, HoleKind::planar);
}

std::vector<HoleRecord> lattice_holes(const OccupancyGrid& grid) { return label_lattice(grid).holes(); }

std::vector<HoleRecord> planar_holes(const OccupancyGrid& grid) { return label_planar(grid).holes(); }

ExteriorFaces::ExteriorFaces(const ComponentMap& faces)
    : origin_(faces.origin()),
      faces_{faces.origin().x, faces.origin().y, static_cast<std::int32_t>(faces.origin().x + faces.width() - 1),
             static_cast<std::int32_t>(faces.origin().y + faces.height() - 1)},
      bits_(faces.width(), faces.height()), size_(faces.exterior_size())
{
    const auto labels = faces.labels();
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(labels.size()); ++i) {
        if (labels[i] == ComponentMap::kExterior) bits_.set_index(i);
    }
}

bool ExteriorFaces::contains(Point face) const noexcept
{
    if (!faces_.contains(face)) return true;
    return bits_.test(face.x - origin_.x, face.y - origin_.y);
}

bool ExteriorFaces::touches_site(Point s) const noexcept
{
    return contains({s.x - 1, s.y - 1}) || contains({s.x, s.y - 1}) || contains({s.x - 1, s.y}) || contains(s);
}

ExteriorFaces unbounded_component(const OccupancyGrid& grid) { return ExteriorFaces(label_planar(grid)); }

bool site_touches_exterior(const OccupancyGrid& grid, Point site)
{
    const Box& b = grid.bbox();
    const std::int64_t fw = grid.width() - 1;
    const std::int64_t fh = grid.height() - 1;
    const auto& h = grid.h_edge_bits();
    const auto& v = grid.v_edge_bits();
    const std::int64_t sx = std::int64_t{site.x} - b.x_min;
    const std::int64_t sy = std::int64_t{site.y} - b.y_min;

    Bitmap2D seen(fw, fh);
    std::vector<std::int64_t> stack;
    for (std::int64_t dy = -1; dy <= 0; ++dy) {
        for (std::int64_t dx = -1; dx <= 0; ++dx) {
            const std::int64_t fx = sx + dx;
            const std::int64_t fy = sy + dy;
            if (fx <= 0 || fy <= 0 || fx >= fw - 1 || fy >= fh - 1) return true;
            if (!seen.test(fx, fy)) {
                seen.set(fx, fy);
                stack.push_back(fy * fw + fx);
            }
        }
    }
    // The outermost ring of faces lies outside the paths' box, so reaching it
    // means reaching the unbounded component.
    while (!stack.empty()) {
        const std::int64_t i = stack.back();
        stack.pop_back();
        const std::int64_t fx = i % fw;
        const std::int64_t fy = i / fw;
        if (fx == 0 || fy == 0 || fx == fw - 1 || fy == fh - 1) return true;
        const auto visit = [&](std::int64_t nx, std::int64_t ny) {
            if (!seen.test(nx, ny)) {
                seen.set(nx, ny);
                stack.push_back(ny * fw + nx);
            }
        };
        if (!v.test(fx, fy)) visit(fx - 1, fy);
        if (!v.test(fx + 1, fy)) visit(fx + 1, fy);
        if (!h.test(fx, fy)) visit(fx, fy - 1);
        if (!h.test(fx, fy + 1)) visit(fx, fy + 1);
    }
    return false;
}

BoundaryCount boundary_squares(const OccupancyGrid& grid, std::span<const HoleRecord> holes, std::int64_t min_area,
                               FrontierScope scope)
{
    const ComponentMap faces = label_planar(grid);
    std::vector<char> qualifies(faces.holes().size(), 0);
    BoundaryCount result;
    bool any = false;
    if (scope != FrontierScope::outer) {
        for (const auto& hole : holes) {
            if (hole.kind != HoleKind::planar) throw ArgumentError("holes: boundary_squares needs planar holes");
            if (hole.id < 0 || static_cast<std::size_t>(hole.id) >= qualifies.size() ||
                faces.holes()[hole.id] != hole) {
                throw ArgumentError("holes: hole " + std::to_string(hole.id) + " was not extracted from this grid");
            }
            if (hole.area >= min_area) {
                qualifies[hole.id] = 1;
                any = true;
            }
        }
        result.no_qualifying_hole = !holes.empty() && !any;
    }
    const bool outer = scope != FrontierScope::holes;
    const auto selected = [&](std::int64_t fx, std::int64_t fy) {
        const std::int32_t id = faces.labels()[static_cast<std::size_t>(fy * faces.width() + fx)];
        return id == ComponentMap::kExterior ? outer : (id >= 0 && qualifies[id]);
    };

    Bitmap2D counted(grid.width(), grid.height());
    grid.h_edge_bits().for_each_set([&](std::int64_t x, std::int64_t y) {
        if (selected(x, y - 1) || selected(x, y)) {
            counted.set(x, y);
            counted.set(x + 1, y);
        }
    });
    grid.v_edge_bits().for_each_set([&](std::int64_t x, std::int64_t y) {
        if (selected(x - 1, y) || selected(x, y)) {
            counted.set(x, y);
            counted.set(x, y + 1);
        }
    });
    // A visited site with no traversed edge (the empty walk) is itself boundary.
    const auto& h = grid.h_edge_bits();
    const auto& v = grid.v_edge_bits();
    grid.visited_bits().for_each_set([&](std::int64_t x, std::int64_t y) {
        if (h.test(x, y) || h.test(x - 1, y) || v.test(x, y) || v.test(x, y - 1)) return;
        if (selected(x - 1, y - 1) || selected(x, y - 1) || selected(x - 1, y) || selected(x, y)) counted.set(x, y);
    });
    result.count = counted.count();
    return result;
}

std::optional<std::size_t> first_enclosure_time(const WalkPath& walk, Point z, HoleKind kind)
{
    const auto& pos = walk.positions;
    // Once z is visited it is on the path and belongs to no component, so only
    // prefixes strictly before the first visit can enclose it. Before that,
    // enclosure is monotone in the prefix length.
    std::size_t last = walk.step_count();
    for (std::size_t k = 0; k < pos.size(); ++k) {
        if (pos[k] == z) {
            if (k == 0) return std::nullopt;
            last = k - 1;
            break;
        }
    }
    const auto enclosed = [&](std::size_t k) {
        const std::span<const Point> prefix(pos.data(), k + 1);
        const OccupancyGrid grid = build_grid(std::span<const std::span<const Point>>(&prefix, 1));
        if (!grid.bbox().padded(-1).contains(z)) return false;
        if (kind == HoleKind::planar) return !site_touches_exterior(grid, z);
        return label_lattice(grid).label(z) >= 0;
    };
    if (!enclosed(last)) return std::nullopt;
    std::size_t lo = 0;
    std::size_t hi = last;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (enclosed(mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return lo;
}

}  // namespace walkholes
