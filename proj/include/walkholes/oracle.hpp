#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "walkholes/walk.hpp"

namespace walkholes::oracle {

/// Hole areas found by plain breadth-first search over std::set-based
/// site and edge sets, sorted ascending.
struct NaiveHoles {
    std::vector<std::int64_t> lattice;
    std::vector<std::int64_t> planar;
    std::int64_t exterior_faces = 0;  ///< faces of the padded box reached from its border
    std::int64_t total_faces = 0;
};

NaiveHoles naive_holes(const WalkPath& walk);

struct CheckReport {
    std::int64_t walks = 0;
    std::int64_t mismatches = 0;
    std::vector<std::string> failures;  ///< first few mismatch descriptions
};

/// Compares lattice_holes/planar_holes with naive_holes on seeds 0 .. seeds-1;
/// each seed is checked at max_steps steps and at a seed-derived length in [0, max_steps].
CheckReport check_against_oracle(std::int64_t max_steps, std::int64_t seeds);

}  // namespace walkholes::oracle
