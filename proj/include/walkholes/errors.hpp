#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace walkholes {

/// Invalid parameter value. The message names the offending field.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A configured memory or step budget would be exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Records that cannot be merged (overlapping replicas, differing configs).
class ConflictError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad command line or unknown experiment.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Limits applied by the walk and grid builders.
struct ResourceBudget {
    std::uint64_t max_steps = 400'000'000;
    std::uint64_t max_grid_cells = 1'000'000'000;
};

}  // namespace walkholes
