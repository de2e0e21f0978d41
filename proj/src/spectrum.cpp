#include "walkholes/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace walkholes {

HoleSpectrum HoleSpectrum::from_holes(std::int64_t n, HoleKind kind, std::span<const HoleRecord> holes,
                                      std::int64_t replica_id)
{
    HoleSpectrum s;
    s.n = n;
    s.kind = kind;
    s.replica_id = replica_id;
    s.areas.reserve(holes.size());
    for (const auto& h : holes) s.areas.push_back(h.area);
    std::sort(s.areas.begin(), s.areas.end());
    return s;
}

std::int64_t count_at_least(const HoleSpectrum& spectrum, double r) noexcept
{
    const auto& a = spectrum.areas;
    const auto it = std::lower_bound(a.begin(), a.end(), r,
                                     [](std::int64_t area, double bound) { return static_cast<double>(area) < bound; });
    return static_cast<std::int64_t>(a.end() - it);
}

std::vector<AreaBin> bin_counts(const HoleSpectrum& spectrum, double delta, double eps)
{
    if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta: must lie in (0, 1)");
    if (!(eps > 0.0)) throw ArgumentError("eps: must be positive");
    const double lo = std::pow(static_cast<double>(spectrum.n), 1.0 - delta);
    const double c = 1.0 + eps;
    const auto edge = [&](std::int64_t j) { return lo * std::pow(c, static_cast<double>(j)); };

    std::vector<AreaBin> bins;
    for (std::int64_t area : spectrum.areas) {
        const double a = static_cast<double>(area);
        if (a < lo) continue;
        auto j = static_cast<std::int64_t>(std::floor(std::log(a / lo) / std::log(c)));
        while (j > 0 && edge(j) > a) --j;
        while (edge(j + 1) <= a) ++j;
        while (static_cast<std::int64_t>(bins.size()) <= j) {
            const auto k = static_cast<std::int64_t>(bins.size());
            bins.push_back({edge(k), edge(k + 1), 0});
        }
        ++bins[static_cast<std::size_t>(j)].count;
    }
    return bins;
}

NormalizedCount normalized_count(const HoleSpectrum& spectrum, double delta)
{
    if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta: must lie in (0, 1)");
    const double log_nd = delta * std::log(static_cast<double>(spectrum.n));
    if (log_nd == 0.0) throw ArgumentError("delta: n^delta must differ from 1");
    const double nd = std::exp(log_nd);
    NormalizedCount out;
    out.raw = count_at_least(spectrum, std::pow(static_cast<double>(spectrum.n), 1.0 - delta));
    out.gamma = 2.0 * std::numbers::pi * nd / (log_nd * log_nd);
    out.ratio = static_cast<double>(out.raw) * log_nd * log_nd / nd;
    return out;
}

HoleSpectrum merge_spectra(std::span<const HoleSpectrum> spectra)
{
    HoleSpectrum merged;
    if (spectra.empty()) return merged;
    merged.n = spectra.front().n;
    merged.kind = spectra.front().kind;
    merged.replica_id = spectra.front().replica_id;
    for (const auto& s : spectra) {
        if (s.n != merged.n || s.kind != merged.kind) throw ConflictError("spectra differ in n or kind");
        merged.replica_id = std::min(merged.replica_id, s.replica_id);
        merged.areas.insert(merged.areas.end(), s.areas.begin(), s.areas.end());
    }
    std::sort(merged.areas.begin(), merged.areas.end());
    return merged;
}

std::ostream& operator<<(std::ostream& os, const ShapeKey& key)
{
    os << to_string(key.kind) << '{';
    for (std::size_t i = 0; i < key.offsets.size(); ++i) {
        if (i) os << ' ';
        os << '(' << key.offsets[i].x << ',' << key.offsets[i].y << ')';
    }
    return os << '}';
}

ShapeKey single_cell_shape(HoleKind kind)
{
    // A lone site's first boundary point is its left neighbour; a lone face is
    // anchored at its own lower-left corner.
    return kind == HoleKind::lattice ? ShapeKey{kind, {Point{1, 0}}} : ShapeKey{kind, {Point{0, 0}}};
}

ShapeKey canonical_shape(HoleKind kind, std::span<const Point> cells)
{
    ShapeKey key{kind, {cells.begin(), cells.end()}};
    if (cells.empty()) return key;
    std::sort(key.offsets.begin(), key.offsets.end());
    Point anchor;
    if (kind == HoleKind::planar) {
        // The closure of a union of faces has its lexicographically first point
        // at the lower-left corner of its first face.
        anchor = key.offsets.front();
    } else {
        bool found = false;
        const auto inside = [&](Point p) { return std::binary_search(key.offsets.begin(), key.offsets.end(), p); };
        for (Point c : key.offsets) {
            for (Point d : {Point{-1, 0}, Point{0, -1}, Point{0, 1}, Point{1, 0}}) {
                const Point q = c + d;
                if (!inside(q) && (!found || q < anchor)) {
                    anchor = q;
                    found = true;
                }
            }
        }
    }
    for (auto& p : key.offsets) p = p - anchor;
    return key;
}

ShapeCensus shape_census(const ComponentMap& components)
{
    ShapeCensus census;
    for (const auto& cells : components.hole_cells()) ++census[canonical_shape(components.kind(), cells)];
    return census;
}

}  // namespace walkholes
