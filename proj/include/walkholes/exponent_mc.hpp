#pragma once

#include <cstdint>
#include <span>

#include "walkholes/errors.hpp"
#include "walkholes/stats.hpp"
#include "walkholes/walk.hpp"

namespace walkholes {

enum class DisconnectVariant : std::uint8_t { one_sided_radius, two_sided_time, two_sided_radius, beurling };

const char* to_string(DisconnectVariant v) noexcept;

/// Trials of one estimator at one parameter value. A success is "not
/// disconnected" (the start touches the unbounded component) for the
/// disconnect variants, and "exit before hitting the obstacle" for beurling.
struct DisconnectSample {
    DisconnectVariant variant = DisconnectVariant::one_sided_radius;
    std::int64_t param = 1;  ///< radius or step count; |x| for beurling
    std::int64_t trials = 0;
    std::int64_t successes = 0;

    double p_hat() const noexcept { return trials > 0 ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0; }
    Interval wilson() const { return wilson_interval(successes, trials); }
};

/// Sum of trials and successes. Throws ConflictError when variant or param differ.
DisconnectSample merge_samples(const DisconnectSample& a, const DisconnectSample& b);

/// Trial t (t = first_trial, first_trial + 1, ...) uses sub-seed derive_seed(seed, t),
/// so splitting a trial range and merging the pieces reproduces the whole.
struct TrialRange {
    std::int64_t trials = 0;
    std::int64_t first_trial = 0;
    unsigned jobs = 1;  ///< threads; the result does not depend on it
};

/// One walk from the origin until it first reaches |S| >= radius; success when
/// the origin lies in the closure of the unbounded component of its complement.
DisconnectSample one_sided_disconnect_prob(std::int64_t radius, const TrialRange& range, std::uint64_t seed,
                                           const ResourceBudget& budget = {});

enum class TwoSidedMode : std::uint8_t { fixed_time, fixed_radius };

/// Two independent walks from the origin, each run for `param` steps
/// (fixed_time) or until |S| >= param (fixed_radius); success when the origin
/// lies in the closure of the unbounded component of the union's complement.
DisconnectSample two_sided_disconnect_prob(std::int64_t param, TwoSidedMode mode, const TrialRange& range,
                                           std::uint64_t seed, const ResourceBudget& budget = {});

enum class Obstacle : std::uint8_t { half_line };

/// Walk from x until |S| >= n (success) or S hits A = {(k, 0) : 0 <= k <= n}.
/// Throws ArgumentError when x lies on A or |x| > n.
DisconnectSample beurling_prob(Point x, std::int64_t n, Obstacle obstacle, const TrialRange& range,
                               std::uint64_t seed, const ResourceBudget& budget = {});

/// Log-log fit of p_hat against param. Throws ArgumentError if a sample has no successes.
ExponentEstimate fit_samples(std::span<const DisconnectSample> samples);

}  // namespace walkholes
