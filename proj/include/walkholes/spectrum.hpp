#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <vector>

#include "walkholes/grid.hpp"
#include "walkholes/stats.hpp"

namespace walkholes {

/// Sorted multiset of hole areas of one walk of 2n steps (or a merge of several).
struct HoleSpectrum {
    std::int64_t n = 1;
    HoleKind kind = HoleKind::lattice;
    std::vector<std::int64_t> areas;  ///< nondecreasing
    std::int64_t replica_id = 0;

    static HoleSpectrum from_holes(std::int64_t n, HoleKind kind, std::span<const HoleRecord> holes,
                                   std::int64_t replica_id = 0);
};

/// Number of holes with area >= r.
std::int64_t count_at_least(const HoleSpectrum& spectrum, double r) noexcept;

struct AreaBin {
    double lo = 0.0;  ///< inclusive
    double hi = 0.0;  ///< exclusive
    std::int64_t count = 0;
};

/// Counts in the geometric bins [n^(1-delta) c^j, n^(1-delta) c^(j+1)), c = 1 + eps,
/// for j = 0, 1, ... up to the last nonempty bin.
std::vector<AreaBin> bin_counts(const HoleSpectrum& spectrum, double delta, double eps);

struct NormalizedCount {
    std::int64_t raw = 0;  ///< holes with area >= n^(1-delta)
    double gamma = 0.0;    ///< 2 pi n^delta / log^2(n^delta)
    double ratio = 0.0;    ///< raw * log^2(n^delta) / n^delta, which tends to 2 pi
};

NormalizedCount normalized_count(const HoleSpectrum& spectrum, double delta);

/// Pooled spectrum; requires equal n and kind. Order of inputs does not matter.
HoleSpectrum merge_spectra(std::span<const HoleSpectrum> spectra);

/// Translation class of a hole: its cells relative to the lexicographically
/// first point of its boundary.
struct ShapeKey {
    HoleKind kind = HoleKind::lattice;
    std::vector<Point> offsets;  ///< sorted

    friend auto operator<=>(const ShapeKey&, const ShapeKey&) = default;
    friend bool operator==(const ShapeKey&, const ShapeKey&) = default;
};

std::ostream& operator<<(std::ostream& os, const ShapeKey& key);

/// Shape of a single enclosed site (lattice) or a single enclosed face (planar).
ShapeKey single_cell_shape(HoleKind kind);

ShapeKey canonical_shape(HoleKind kind, std::span<const Point> cells);

using ShapeCensus = std::map<ShapeKey, std::int64_t>;

ShapeCensus shape_census(const ComponentMap& components);

}  // namespace walkholes
