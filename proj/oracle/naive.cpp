#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <utility>

#include "walkholes/grid.hpp"
#include "walkholes/oracle.hpp"

namespace walkholes::oracle {

namespace {

using Edge = std::pair<Point, Point>;

Edge make_edge(Point a, Point b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Components of the cells of `box` accepted by open(), with adjacency step(a, b);
// components touching the border of box are exterior.
template <class Open, class Linked>
void flood(const Box& box, Open open, Linked linked, std::vector<std::int64_t>& holes, std::int64_t& exterior)
{
    std::set<Point> seen;
    for (std::int32_t y = box.y_min; y <= box.y_max; ++y) {
        for (std::int32_t x = box.x_min; x <= box.x_max; ++x) {
            const Point start{x, y};
            if (!open(start) || seen.count(start)) continue;
            std::deque<Point> queue{start};
            seen.insert(start);
            std::int64_t size = 0;
            bool border = false;
            while (!queue.empty()) {
                const Point c = queue.front();
                queue.pop_front();
                ++size;
                if (c.x == box.x_min || c.x == box.x_max || c.y == box.y_min || c.y == box.y_max) border = true;
                for (Point d : {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}}) {
                    const Point q = c + d;
                    if (!box.contains(q) || !open(q) || seen.count(q) || !linked(c, q)) continue;
                    seen.insert(q);
                    queue.push_back(q);
                }
            }
            if (border) {
                exterior += size;
            } else {
                holes.push_back(size);
            }
        }
    }
    std::sort(holes.begin(), holes.end());
}

}  // namespace

NaiveHoles naive_holes(const WalkPath& walk)
{
    std::set<Point> sites(walk.positions.begin(), walk.positions.end());
    std::set<Edge> edges;
    for (std::size_t k = 1; k < walk.positions.size(); ++k) edges.insert(make_edge(walk.positions[k - 1], walk.positions[k]));
    Box box;
    for (Point p : sites) box.expand(p);
    box = box.padded(1);

    NaiveHoles out;
    std::int64_t unused = 0;
    flood(box, [&](Point p) { return !sites.count(p); }, [](Point, Point) { return true; }, out.lattice, unused);

    // Face (x, y) is the square with lower-left corner (x, y); the face box
    // drops the last column and row of sites.
    const Box faces{box.x_min, box.y_min, box.x_max - 1, box.y_max - 1};
    const auto shared_edge = [](Point a, Point b) {
        if (a.y == b.y) {
            const std::int32_t x = std::max(a.x, b.x);
            return make_edge({x, a.y}, {x, a.y + 1});
        }
        const std::int32_t y = std::max(a.y, b.y);
        return make_edge({a.x, y}, {a.x + 1, y});
    };
    flood(faces, [](Point) { return true; }, [&](Point a, Point b) { return !edges.count(shared_edge(a, b)); },
          out.planar, out.exterior_faces);
    out.total_faces = faces.width() * faces.height();
    return out;
}

CheckReport check_against_oracle(std::int64_t max_steps, std::int64_t seeds)
{
    CheckReport report;
    const auto check = [&](std::uint64_t seed, std::uint64_t steps) {
        const WalkPath walk = generate_walk(seed, steps);
        const OccupancyGrid grid = build_grid(walk);
        const NaiveHoles ref = naive_holes(walk);
        const ComponentMap faces = label_planar(grid);
        std::vector<std::int64_t> lat;
        std::vector<std::int64_t> pla;
        for (const auto& h : lattice_holes(grid)) lat.push_back(h.area);
        for (const auto& h : faces.holes()) pla.push_back(h.area);
        std::sort(lat.begin(), lat.end());
        std::sort(pla.begin(), pla.end());
        ++report.walks;
        if (lat != ref.lattice || pla != ref.planar || faces.exterior_size() != ref.exterior_faces ||
            grid.face_count() != ref.total_faces) {
            ++report.mismatches;
            if (report.failures.size() < 10) {
                std::ostringstream os;
                os << "seed " << seed << " steps " << steps << ": " << lat.size() << "/" << ref.lattice.size()
                   << " lattice holes, " << pla.size() << "/" << ref.planar.size() << " planar holes";
                report.failures.push_back(os.str());
            }
        }
    };
    const auto top = static_cast<std::uint64_t>(max_steps);
    for (std::int64_t s = 0; s < seeds; ++s) {
        const auto seed = static_cast<std::uint64_t>(s);
        check(seed, top);
        check(seed, splitmix64_mix(seed) % (top + 1));
    }
    return report;
}

}  // namespace walkholes::oracle
