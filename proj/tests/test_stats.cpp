#include <doctest.h>

#include <cmath>
#include <cstring>

#include "walkholes/errors.hpp"
#include "walkholes/rng.hpp"
#include "walkholes/stats.hpp"

using namespace walkholes;

TEST_CASE("exact power law")
{
    const std::vector<double> x{1, 2, 4, 8};
    std::vector<double> y;
    for (double v : x) y.push_back(std::pow(v, -5.0 / 6.0));
    const ExponentEstimate f = fit_exponent(x, y);
    CHECK(f.slope == doctest::Approx(-5.0 / 6.0).epsilon(1e-12));
    CHECK(f.slope_stderr < 1e-12);
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.exponent() == doctest::Approx(5.0 / 3.0));
    CHECK(f.points_used == 4);
    CHECK(f.x_range == std::pair<double, double>{1.0, 8.0});
}

TEST_CASE("constant data has zero slope")
{
    const std::vector<double> x{1, 3, 9};
    const std::vector<double> y{5, 5, 5};
    CHECK(fit_exponent(x, y).slope == doctest::Approx(0.0));
}

TEST_CASE("noisy inverse law matches the closed-form least-squares line")
{
    Xoshiro256 rng(77);
    std::vector<double> x;
    std::vector<double> y;
    for (int i = 0; i < 12; ++i) {
        x.push_back(std::pow(2.0, i));
        y.push_back(3.5 / x.back() * (1.0 + 0.02 * (rng.uniform() - 0.5)));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(x.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const ExponentEstimate f = fit_exponent(x, y);
    CHECK(f.slope == doctest::Approx(slope).epsilon(1e-10));
    CHECK(f.intercept == doctest::Approx((sy - slope * sx) / m).epsilon(1e-10));
    CHECK(f.slope >= -1.02);
    CHECK(f.slope <= -0.98);
    CHECK(f.slope_stderr > 0.0);
}

TEST_CASE("slope is invariant under rescaling x or y")
{
    const std::vector<double> x{2, 3, 7, 20, 41};
    const std::vector<double> y{9, 4, 3.3, 1.2, 0.7};
    const double base = fit_exponent(x, y).slope;
    std::vector<double> xs, ys;
    for (double v : x) xs.push_back(v * 13.0);
    for (double v : y) ys.push_back(v * 0.01);
    CHECK(fit_exponent(xs, y).slope == doctest::Approx(base).epsilon(1e-12));
    CHECK(fit_exponent(x, ys).slope == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("weighted fit")
{
    const std::vector<double> x{1, 2, 4, 8};
    const std::vector<double> y{1, 0.5, 0.25, 1.0};
    const std::vector<double> w{1, 1, 1, 1e-9};
    CHECK(fit_exponent(x, y, w).slope == doctest::Approx(-1.0).epsilon(1e-6));
    const std::vector<double> ones(4, 1.0);
    const std::vector<double> fives(4, 5.0);
    CHECK(fit_exponent(x, y, ones).slope_stderr == doctest::Approx(fit_exponent(x, y, fives).slope_stderr));
    CHECK(fit_exponent(x, y, ones).slope == doctest::Approx(fit_exponent(x, y).slope));
}

TEST_CASE("fit argument errors")
{
    const std::vector<double> one{1};
    const std::vector<double> same{2, 2};
    const std::vector<double> y2{1, 2};
    const std::vector<double> neg{1, -2};
    const std::vector<double> x2{1, 2};
    CHECK_THROWS_AS(fit_exponent(one, one), ArgumentError);
    CHECK_THROWS_AS(fit_exponent(same, y2), ArgumentError);
    CHECK_THROWS_AS(fit_exponent(x2, neg), ArgumentError);
    CHECK_THROWS_AS(fit_exponent(neg, x2), ArgumentError);
    CHECK_THROWS_AS(fit_exponent(x2, y2, one), ArgumentError);
}

TEST_CASE("mean and median")
{
    const std::vector<double> v{3, 1, 2, 10};
    CHECK(mean(v) == doctest::Approx(4.0));
    CHECK(median(v) == doctest::Approx(2.5));
    CHECK(median({5, 1, 3}) == 3.0);
    CHECK(mean(std::vector<double>{}) == 0.0);
}

TEST_CASE("bootstrap interval brackets the mean and is deterministic")
{
    Xoshiro256 rng(5);
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) v.push_back(rng.uniform());
    const Interval a = bootstrap_mean_ci(v, 1);
    const Interval b = bootstrap_mean_ci(v, 1);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.lo < mean(v));
    CHECK(a.hi > mean(v));
    CHECK(a.hi - a.lo < 0.2);
    const Interval c = bootstrap_mean_ci(std::vector<double>(10, 2.0), 3);
    CHECK(c.lo == 2.0);
    CHECK(c.hi == 2.0);
}

TEST_CASE("Wilson interval")
{
    const Interval i = wilson_interval(50, 100);
    CHECK(i.lo == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(i.hi == doctest::Approx(0.5962).epsilon(1e-3));
    const Interval zero = wilson_interval(0, 10);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);
    const Interval empty = wilson_interval(0, 0);
    CHECK(empty.lo == 0.0);
    CHECK(empty.hi == 1.0);
}

TEST_CASE("Wilson intervals cover the true proportion about 95% of the time")
{
    Xoshiro256 rng(11);
    int covered = 0;
    const double p = 0.3;
    for (int rep = 0; rep < 2000; ++rep) {
        std::int64_t s = 0;
        for (int t = 0; t < 200; ++t) s += rng.uniform() < p ? 1 : 0;
        const Interval ci = wilson_interval(s, 200);
        covered += ci.lo <= p && p <= ci.hi ? 1 : 0;
    }
    CHECK(covered >= 1840);
    CHECK(covered <= 1960);
}

TEST_CASE("FNV-1a reference values")
{
    CHECK(fnv1a64({}) == 0xcbf29ce484222325ULL);
    const char* a = "a";
    CHECK(fnv1a64({a, 1}) == 0xaf63dc4c8601ec8cULL);
    const char* foobar = "foobar";
    CHECK(fnv1a64({foobar, std::strlen(foobar)}) == 0x85944171f73967e8ULL);
}
