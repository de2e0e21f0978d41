#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "walkholes/grid.hpp"
#include "walkholes/walk.hpp"

namespace walkholes {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// A planar Brownian motion B on [0, n] coupled with a simple random walk S of
/// 2n steps, so that B(t) stays close to S(2t).
///
/// Two independent 1D Brownian motions W1, W2 are sampled every `dt`. The k-th
/// exit of W_i from the unit interval around its last exit level gives R_i(k),
/// a 1D simple random walk. Then
///     S(k) = ((R1(k) + R2(k)) / 2, (R1(k) - R2(k)) / 2)
///     B(t) = ((W1(2t) + W2(2t)) / 2, (W1(2t) - W2(2t)) / 2)
/// B is a standard planar Brownian motion and S a planar simple random walk.
struct CouplingTrace {
    std::uint64_t seed = 0;
    std::int64_t n = 0;
    double dt = 0.0;  ///< sampling step of W1, W2
    /// B at times k * bm_dt for k = 0 .. n / bm_dt, with bm_dt = dt / 2.
    std::vector<Vec2> bm_samples;
    double bm_dt = 0.0;
    WalkPath walk;  ///< the embedded walk, 2n steps
    /// tau[k]: time on B's clock at which step k is complete in both coordinates,
    /// max(exit1[k], exit2[k]) / 2. tau[0] = 0.
    std::vector<double> tau;
    /// Exit times of W1 and W2 (on their own clock); exit_times[i][0] = 0.
    std::array<std::vector<double>, 2> exit_times;
    /// R1, R2 at each step.
    std::array<std::vector<std::int32_t>, 2> axis_walks;
    /// W1, W2 samples at spacing dt; they may run past 2n.
    std::array<std::vector<double>, 2> driving;
};

/// Throws ArgumentError when dt > 1/4 or n < 1.
CouplingTrace embed_walk(std::uint64_t seed, std::int64_t n, double dt = 1.0 / 64.0,
                         const ResourceBudget& budget = {});

/// B(t) by linear interpolation of the samples; t is clamped to the sampled range.
Vec2 bm_at(const CouplingTrace& trace, double t) noexcept;
/// S(2t) with S interpolated linearly between integer times.
Vec2 walk_at_half_time(const CouplingTrace& trace, double t) noexcept;

/// max over t in [0, n] of |B(t) - S(2t)|, taken over the sample times of B and
/// the times k/2 at which S(2t) is a lattice point.
double sup_distance(const CouplingTrace& trace);

/// max over sampled t in [0, n] of |B(t)|.
double sup_norm(const CouplingTrace& trace) noexcept;

/// A polyline drawn on the grid of square cells of side h. Cell (i, j) is
/// [ih, (i+1)h] x [jh, (j+1)h]. Cells crossed by the polyline are marked. The
/// walls separating cells are the polyline snapped to its nearest cell corners,
/// consecutive corners joined by 4-connected corner paths; wall edges use the
/// OccupancyGrid convention on the corner lattice: v_blocked(i, j) is the edge
/// (i, j) -- (i, j+1) between cells (i-1, j) and (i, j), h_blocked(i, j) is the
/// edge (i, j) -- (i+1, j) between cells (i, j-1) and (i, j). Cell components
/// are then extracted exactly like planar holes. The raster is padded by two cells.
struct Raster {
    double h = 1.0;
    Point origin;       ///< cell index of local cell (0, 0)
    Bitmap2D marked;    ///< cells x rows
    Bitmap2D h_blocked; ///< (cells + 1) x (rows + 1)
    Bitmap2D v_blocked;

    /// Index of the cell containing a point (floor convention).
    static Point cell_of(Vec2 p, double h) noexcept;
    bool is_marked(Point cell) const noexcept;
    ComponentMap components() const;
};

Raster rasterize(std::span<const Vec2> polyline, double h, const ResourceBudget& budget = {});

struct RasterHole {
    HoleRecord cells;  ///< area in cells, cell-index bbox
    double area = 0.0; ///< cells * h^2
};

/// Bounded components of the complement of the rasterized polyline.
std::vector<RasterHole> raster_holes(std::span<const Vec2> polyline, double h, const ResourceBudget& budget = {});
/// Raster holes of B[0, n]. Throws ArgumentError when h is not in (0, 1].
std::vector<RasterHole> bm_holes(const CouplingTrace& trace, double h, const ResourceBudget& budget = {});

/// Events of the area comparison at a lattice point z.
struct DeltaFlags {
    bool boundary_far_bm = false;    ///< d(z, boundary of B's component) >= 100 n^{1/4} log^2 n
    bool boundary_far_walk = false;  ///< same for the walk's component
    bool coupled = false;            ///< sup |B(t) - S(2t)| <= n^{1/4} log^2 n
    bool both_finite = false;        ///< both components bounded (an empty component counts as bounded)
    bool confined = false;           ///< sup |B(t)| <= sqrt(n) log n
};

struct DeltaArea {
    std::optional<double> bm_area;          ///< nullopt: z in the unbounded component
    std::optional<std::int64_t> walk_area;  ///< nullopt: z in the unbounded component
    std::optional<double> delta;            ///< |bm_area - walk_area| when both are finite
    double bm_boundary_distance = 0.0;
    double walk_boundary_distance = 0.0;
    DeltaFlags flags;
};

/// Exact Euclidean distance from p to the polyline.
double distance_to_polyline(std::span<const Vec2> polyline, Vec2 p) noexcept;

/// Precomputed rasters and labels for comparing component areas at many points.
/// Keeps a reference to the trace, which must outlive it.
class AreaComparison {
public:
    AreaComparison(const CouplingTrace& trace, double h, const ResourceBudget& budget = {});

    /// threshold_scale multiplies n^{1/4} log^2 n in the boundary-distance and
    /// coupling events.
    DeltaArea at(Point z, double threshold_scale = 1.0) const;

    double sup_distance() const noexcept { return sup_distance_; }
    double sup_norm() const noexcept { return sup_norm_; }
    std::int64_t n() const noexcept { return n_; }
    const ComponentMap& walk_faces() const noexcept { return walk_faces_; }
    const ComponentMap& bm_cells() const noexcept { return bm_cells_; }

private:
    double bm_distance(Vec2 z) const;
    double walk_distance(Point z) const;

    std::span<const Vec2> polyline_;
    // Segments bucketed by the unit squares their bounding boxes meet (CSR layout).
    Box buckets_;
    std::vector<std::uint32_t> bucket_start_;
    std::vector<std::uint32_t> bucket_segments_;
    std::int64_t n_;
    double h_;
    Raster raster_;
    ComponentMap bm_cells_;
    OccupancyGrid walk_grid_;
    ComponentMap walk_faces_;
    double sup_distance_;
    double sup_norm_;
};

DeltaArea delta_area(const CouplingTrace& trace, Point z, double h = 0.5);

/// n^{1/4} log^2 n
double coupling_scale(std::int64_t n) noexcept;

}  // namespace walkholes
