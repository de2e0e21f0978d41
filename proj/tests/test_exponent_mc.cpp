#include <doctest.h>

#include "walkholes/exponent_mc.hpp"

using namespace walkholes;

TEST_CASE("radius one never disconnects")
{
    const DisconnectSample one = one_sided_disconnect_prob(1, {500, 0, 1}, 3);
    CHECK(one.successes == 500);
    CHECK(one.p_hat() == 1.0);
    const DisconnectSample two = two_sided_disconnect_prob(1, TwoSidedMode::fixed_radius, {500, 0, 1}, 3);
    CHECK(two.successes == 500);
    CHECK(two.variant == DisconnectVariant::two_sided_radius);
    CHECK(two_sided_disconnect_prob(1, TwoSidedMode::fixed_time, {500, 0, 1}, 3).p_hat() == 1.0);
}

TEST_CASE("estimators are deterministic and independent of threads and trial splitting")
{
    const DisconnectSample whole = one_sided_disconnect_prob(16, {4000, 0, 1}, 9);
    CHECK(whole.trials == 4000);
    CHECK(one_sided_disconnect_prob(16, {4000, 0, 3}, 9).successes == whole.successes);
    const DisconnectSample a = one_sided_disconnect_prob(16, {1500, 0, 1}, 9);
    const DisconnectSample b = one_sided_disconnect_prob(16, {2500, 1500, 2}, 9);
    const DisconnectSample merged = merge_samples(a, b);
    CHECK(merged.trials == whole.trials);
    CHECK(merged.successes == whole.successes);
    CHECK(one_sided_disconnect_prob(16, {4000, 0, 1}, 10).successes != whole.successes);

    const DisconnectSample t1 = two_sided_disconnect_prob(64, TwoSidedMode::fixed_time, {2000, 0, 1}, 4);
    const DisconnectSample t2 = two_sided_disconnect_prob(64, TwoSidedMode::fixed_time, {2000, 0, 2}, 4);
    CHECK(t1.successes == t2.successes);
    const DisconnectSample b1 = beurling_prob({0, 4}, 64, Obstacle::half_line, {2000, 0, 1}, 4);
    const DisconnectSample b2 = beurling_prob({0, 4}, 64, Obstacle::half_line, {2000, 0, 2}, 4);
    CHECK(b1.successes == b2.successes);
    CHECK(b1.param == 4);
}

TEST_CASE("merging samples")
{
    DisconnectSample a{DisconnectVariant::one_sided_radius, 8, 10, 3};
    DisconnectSample b{DisconnectVariant::one_sided_radius, 8, 5, 5};
    const DisconnectSample m = merge_samples(a, b);
    CHECK(m.trials == 15);
    CHECK(m.successes == 8);
    CHECK_THROWS_AS(merge_samples(a, DisconnectSample{DisconnectVariant::one_sided_radius, 16, 1, 1}), ConflictError);
    CHECK_THROWS_AS(merge_samples(a, DisconnectSample{DisconnectVariant::beurling, 8, 1, 1}), ConflictError);
}

TEST_CASE("Beurling arguments")
{
    CHECK_THROWS_AS(beurling_prob({3, 0}, 64, Obstacle::half_line, {10, 0, 1}, 1), ArgumentError);
    CHECK_THROWS_AS(beurling_prob({0, 0}, 64, Obstacle::half_line, {10, 0, 1}, 1), ArgumentError);
    CHECK_THROWS_AS(beurling_prob({0, 65}, 64, Obstacle::half_line, {10, 0, 1}, 1), ArgumentError);
    CHECK_NOTHROW(beurling_prob({-1, 0}, 64, Obstacle::half_line, {10, 0, 1}, 1));
    CHECK_NOTHROW(beurling_prob({65, 1}, 100, Obstacle::half_line, {10, 0, 1}, 1));
}

TEST_CASE("disconnect probabilities do not increase with radius or time")
{
    const auto nonincreasing = [](const DisconnectSample& small, const DisconnectSample& large) {
        // Allow the intervals to overlap.
        return large.wilson().lo <= small.wilson().hi;
    };
    DisconnectSample prev = one_sided_disconnect_prob(4, {5000, 0, 1}, 2);
    for (std::int64_t r : {8, 16, 32}) {
        const DisconnectSample s = one_sided_disconnect_prob(r, {5000, 0, 1}, 2);
        CHECK(nonincreasing(prev, s));
        prev = s;
    }
    prev = two_sided_disconnect_prob(16, TwoSidedMode::fixed_time, {5000, 0, 1}, 2);
    for (std::int64_t t : {64, 256, 1024}) {
        const DisconnectSample s = two_sided_disconnect_prob(t, TwoSidedMode::fixed_time, {5000, 0, 1}, 2);
        CHECK(nonincreasing(prev, s));
        prev = s;
    }
    prev = two_sided_disconnect_prob(4, TwoSidedMode::fixed_radius, {5000, 0, 1}, 2);
    for (std::int64_t r : {8, 16, 32}) {
        const DisconnectSample s = two_sided_disconnect_prob(r, TwoSidedMode::fixed_radius, {5000, 0, 1}, 2);
        CHECK(nonincreasing(prev, s));
        prev = s;
    }
}

TEST_CASE("Wilson intervals contain the ten-fold re-estimate on most grid points")
{
    struct Point4 {
        DisconnectSample small;
        DisconnectSample large;
    };
    std::vector<Point4> grid;
    for (std::int64_t r : {4, 8, 16, 32}) {
        grid.push_back({one_sided_disconnect_prob(r, {1000, 0, 1}, 101), one_sided_disconnect_prob(r, {10000, 0, 1}, 202)});
        grid.push_back({two_sided_disconnect_prob(r, TwoSidedMode::fixed_radius, {1000, 0, 1}, 101),
                        two_sided_disconnect_prob(r, TwoSidedMode::fixed_radius, {10000, 0, 1}, 202)});
        grid.push_back({two_sided_disconnect_prob(r * 8, TwoSidedMode::fixed_time, {1000, 0, 1}, 101),
                        two_sided_disconnect_prob(r * 8, TwoSidedMode::fixed_time, {10000, 0, 1}, 202)});
        grid.push_back({beurling_prob({0, static_cast<std::int32_t>(r / 4)}, 64, Obstacle::half_line, {1000, 0, 1}, 101),
                        beurling_prob({0, static_cast<std::int32_t>(r / 4)}, 64, Obstacle::half_line, {10000, 0, 1}, 202)});
    }
    int covered = 0;
    for (const auto& g : grid) {
        const Interval ci = g.small.wilson();
        covered += ci.lo <= g.large.p_hat() && g.large.p_hat() <= ci.hi ? 1 : 0;
    }
    CHECK(covered * 10 >= static_cast<int>(grid.size()) * 9);
}

TEST_CASE("fit of disconnect samples")
{
    std::vector<DisconnectSample> s{{DisconnectVariant::one_sided_radius, 16, 1000, 500},
                                    {DisconnectVariant::one_sided_radius, 256, 1000, 250}};
    CHECK(fit_samples(s).slope == doctest::Approx(-0.25));
    s.push_back({DisconnectVariant::one_sided_radius, 512, 1000, 0});
    CHECK_THROWS_AS(fit_samples(s), ArgumentError);
}

TEST_CASE("one-sided estimate at radius 64, 10^6 trials, seed 1: frozen")
{
    const DisconnectSample d = one_sided_disconnect_prob(64, {1'000'000, 0, 1}, 1);
    CHECK(d.successes == 655352);
    const Interval ci = d.wilson();
    CHECK(ci.lo == doctest::Approx(0.654420).epsilon(1e-5));
    CHECK(ci.hi == doctest::Approx(0.656283).epsilon(1e-5));
}

TEST_CASE("Beurling estimate at (0, 8), n = 512, 10^5 trials, seed 1: frozen")
{
    const DisconnectSample d = beurling_prob({0, 8}, 512, Obstacle::half_line, {100'000, 0, 1}, 1);
    CHECK(d.successes == 11182);
    const Interval ci = d.wilson();
    CHECK(ci.lo == doctest::Approx(0.109882).epsilon(1e-5));
    CHECK(ci.hi == doctest::Approx(0.113788).epsilon(1e-5));
}
