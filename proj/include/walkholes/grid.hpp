#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "walkholes/errors.hpp"
#include "walkholes/walk.hpp"

namespace walkholes {

/// Bit-packed width x height bitmap addressed by local (x, y).
class Bitmap2D {
public:
    Bitmap2D() = default;
    Bitmap2D(std::int64_t width, std::int64_t height)
        : width_(width), height_(height), words_(static_cast<std::size_t>((width * height + 63) / 64), 0)
    {
    }

    std::int64_t width() const noexcept { return width_; }
    std::int64_t height() const noexcept { return height_; }

    bool test(std::int64_t x, std::int64_t y) const noexcept
    {
        const std::uint64_t i = static_cast<std::uint64_t>(y * width_ + x);
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::int64_t x, std::int64_t y) noexcept
    {
        const std::uint64_t i = static_cast<std::uint64_t>(y * width_ + x);
        words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
    bool test_index(std::int64_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set_index(std::int64_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

    std::int64_t count() const noexcept
    {
        std::int64_t total = 0;
        for (auto w : words_) total += std::popcount(w);
        return total;
    }

    /// Calls f(x, y) for every set bit in row-major order.
    template <class F>
    void for_each_set(F&& f) const
    {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits != 0) {
                const auto i = static_cast<std::int64_t>(w * 64 + std::countr_zero(bits));
                f(i % width_, i / width_);
                bits &= bits - 1;
            }
        }
    }

    friend bool operator==(const Bitmap2D&, const Bitmap2D&) = default;

private:
    std::int64_t width_ = 0;
    std::int64_t height_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Visited sites and traversed unit edges of one or more lattice paths, stored
/// as dense bitmaps over bbox (the paths' box padded by one on every side).
///
/// Edge conventions, in site coordinates:
///   h_edge(p) is the edge p -- p + (1, 0)
///   v_edge(p) is the edge p -- p + (0, 1)
/// Face (i, j) is the unit square [i, i+1] x [j, j+1]; faces of the grid are
/// those with both corners' columns/rows inside bbox, i.e. (W-1) x (H-1) faces.
class OccupancyGrid {
public:
    OccupancyGrid() = default;
    explicit OccupancyGrid(const Box& bbox);

    const Box& bbox() const noexcept { return bbox_; }
    std::int64_t width() const noexcept { return bbox_.width(); }
    std::int64_t height() const noexcept { return bbox_.height(); }
    std::int64_t face_count() const noexcept { return (width() - 1) * (height() - 1); }

    bool visited(Point p) const noexcept { return bbox_.contains(p) && visited_.test(p.x - bbox_.x_min, p.y - bbox_.y_min); }
    bool h_edge(Point p) const noexcept { return bbox_.contains(p) && h_edges_.test(p.x - bbox_.x_min, p.y - bbox_.y_min); }
    bool v_edge(Point p) const noexcept { return bbox_.contains(p) && v_edges_.test(p.x - bbox_.x_min, p.y - bbox_.y_min); }

    const Bitmap2D& visited_bits() const noexcept { return visited_; }
    const Bitmap2D& h_edge_bits() const noexcept { return h_edges_; }
    const Bitmap2D& v_edge_bits() const noexcept { return v_edges_; }

    std::int64_t visited_count() const noexcept { return visited_.count(); }
    std::int64_t edge_count() const noexcept { return h_edges_.count() + v_edges_.count(); }

    /// Marks the site and the unit edges of a lattice polyline. Consecutive
    /// points must be lattice neighbours inside the (unpadded part of) bbox.
    void add_path(std::span<const Point> positions) noexcept;

    friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

private:
    Box bbox_;
    Bitmap2D visited_;
    Bitmap2D h_edges_;
    Bitmap2D v_edges_;
};

/// Grid for one walk. Throws ResourceError if the padded box exceeds budget.max_grid_cells.
OccupancyGrid build_grid(const WalkPath& walk, const ResourceBudget& budget = {});
/// Grid for the union of several lattice paths.
OccupancyGrid build_grid(std::span<const std::span<const Point>> paths, const ResourceBudget& budget = {});

enum class HoleKind : std::uint8_t { lattice, planar };

const char* to_string(HoleKind kind) noexcept;

/// One bounded complementary component. For lattice holes the cells are sites;
/// for planar holes they are unit faces named by their lower-left corner.
struct HoleRecord {
    std::int32_t id = 0;
    HoleKind kind = HoleKind::lattice;
    std::int64_t area = 0;
    Box bbox;              ///< box of the component's cells
    Point representative;  ///< first cell in row-major (y, then x) scan order

    friend bool operator==(const HoleRecord&, const HoleRecord&) = default;
};

/// Per-cell component labels of a grid's complement. Cells are sites (lattice)
/// or faces (planar); labels are hole ids, kExterior or kBlocked.
class ComponentMap {
public:
    static constexpr std::int32_t kExterior = -1;
    static constexpr std::int32_t kBlocked = -2;

    ComponentMap() = default;
    ComponentMap(HoleKind kind, Point origin, std::int64_t width, std::int64_t height)
        : kind_(kind), origin_(origin), width_(width), height_(height),
          labels_(static_cast<std::size_t>(width * height), kBlocked)
    {
    }

    HoleKind kind() const noexcept { return kind_; }
    Point origin() const noexcept { return origin_; }
    std::int64_t width() const noexcept { return width_; }
    std::int64_t height() const noexcept { return height_; }

    /// Label of the cell at absolute coordinates; cells outside the map are exterior.
    std::int32_t label(Point cell) const noexcept
    {
        const std::int64_t x = std::int64_t{cell.x} - origin_.x;
        const std::int64_t y = std::int64_t{cell.y} - origin_.y;
        if (x < 0 || y < 0 || x >= width_ || y >= height_) return kExterior;
        return labels_[static_cast<std::size_t>(y * width_ + x)];
    }

    std::span<const std::int32_t> labels() const noexcept { return labels_; }
    std::span<std::int32_t> labels() noexcept { return labels_; }
    const std::vector<HoleRecord>& holes() const noexcept { return holes_; }
    std::vector<HoleRecord>& holes() noexcept { return holes_; }
    std::int64_t exterior_size() const noexcept { return exterior_size_; }
    void set_exterior_size(std::int64_t n) noexcept { exterior_size_ = n; }

    /// Cells of every hole, indexed by hole id, each in scan order.
    std::vector<std::vector<Point>> hole_cells() const;

private:
    HoleKind kind_ = HoleKind::lattice;
    Point origin_;
    std::int64_t width_ = 0;
    std::int64_t height_ = 0;
    std::vector<std::int32_t> labels_;
    std::vector<HoleRecord> holes_;
    std::int64_t exterior_size_ = 0;
};

/// Scanline union-find labeling of the open cells of `blocked` under
/// 4-connectivity. The component containing local cell (0, 0) is the exterior
/// and must be open. Used for lattice sites and for raster cells.
ComponentMap label_open_cells(const Bitmap2D& blocked, Point origin, HoleKind kind);

/// Components of a face grid given blocked edges in the OccupancyGrid edge
/// convention: faces are (W-1) x (H-1) for W x H edge bitmaps, and face (x, y)
/// joins (x-1, y) unless v_blocked(x, y), (x, y-1) unless h_blocked(x, y).
ComponentMap label_faces(const Bitmap2D& h_blocked, const Bitmap2D& v_blocked, Point origin, HoleKind kind);

/// Components of Z^2 minus the visited sites.
ComponentMap label_lattice(const OccupancyGrid& grid);
/// Components of the face grid, faces adjacent through untraversed edges.
ComponentMap label_planar(const OccupancyGrid& grid);

std::vector<HoleRecord> lattice_holes(const OccupancyGrid& grid);
std::vector<HoleRecord> planar_holes(const OccupancyGrid& grid);

/// The faces of the unbounded component of the path complement.
class ExteriorFaces {
public:
    ExteriorFaces() = default;
    explicit ExteriorFaces(const ComponentMap& faces);

    /// Faces outside the grid are exterior.
    bool contains(Point face) const noexcept;
    /// A site lies in the closure of the unbounded component iff one of its
    /// four incident faces is exterior.
    bool touches_site(Point site) const noexcept;
    /// Number of exterior faces inside the grid.
    std::int64_t size() const noexcept { return size_; }

private:
    Point origin_;
    Box faces_;
    Bitmap2D bits_;
    std::int64_t size_ = 0;
};

ExteriorFaces unbounded_component(const OccupancyGrid& grid);

/// Early-exit search from the four faces around `site`: true iff one of them
/// connects to the grid border through untraversed edges.
bool site_touches_exterior(const OccupancyGrid& grid, Point site);

enum class FrontierScope : std::uint8_t {
    holes,            ///< qualifying holes only
    holes_and_outer,  ///< qualifying holes plus the unbounded component
    outer,            ///< the unbounded component only
};

struct BoundaryCount {
    std::int64_t count = 0;
    bool no_qualifying_hole = false;  ///< min_area exceeded every listed hole
};

/// Number of sites y whose closed unit square Sq(y) meets the boundary of the
/// union of the selected components. `holes` must be planar holes of `grid`.
BoundaryCount boundary_squares(const OccupancyGrid& grid, std::span<const HoleRecord> holes, std::int64_t min_area,
                               FrontierScope scope = FrontierScope::holes);

/// Smallest prefix length k such that z lies in a bounded component of the
/// complement of the first k steps, or nullopt.
std::optional<std::size_t> first_enclosure_time(const WalkPath& walk, Point z, HoleKind kind);

}  // namespace walkholes
