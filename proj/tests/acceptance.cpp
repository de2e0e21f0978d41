// Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fails. Arguments select criteria by number (default: all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "walkholes/coupling.hpp"
#include "walkholes/grid.hpp"
#include "walkholes/oracle.hpp"
#include "walkholes/runner.hpp"

using namespace walkholes;
using Config = std::map<std::string, ConfigValue>;
using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

RunOptions options()
{
    RunOptions o;
    o.jobs = std::max(1u, std::thread::hardware_concurrency());
    return o;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

WalkPath from_string(const std::string& s)
{
    std::vector<Direction> steps;
    for (char c : s) {
        switch (c) {
        case 'E': steps.push_back(Direction::east); break;
        case 'N': steps.push_back(Direction::north); break;
        case 'W': steps.push_back(Direction::west); break;
        case 'S': steps.push_back(Direction::south); break;
        }
    }
    return walk_from_steps(steps);
}

Verdict oracle_equivalence()
{
    const auto r = oracle::check_against_oracle(500, 1000);
    std::string d = fmt("%lld walks, %lld mismatches", static_cast<long long>(r.walks),
                        static_cast<long long>(r.mismatches));
    if (!r.failures.empty()) d += "; first: " + r.failures.front();
    return {r.mismatches == 0 && r.walks >= 1000, d};
}

Verdict fourteen_step_loop()
{
    const WalkPath w = from_string("EEEEENWWNWWWSS");
    const OccupancyGrid g = build_grid(w);
    const auto lat = lattice_holes(g);
    const auto pla = planar_holes(g);
    bool ok = lat.size() == 1 && pla.size() == 1 && lat[0].area == 2 && pla[0].area == 8;
    ok = ok && lat[0].area <= pla[0].area;
    std::int64_t ordered = 0;
    std::int64_t sites = 0;
    for (const auto& cells : label_lattice(g).hole_cells()) {
        for (Point z : cells) {
            ++sites;
            const auto tl = first_enclosure_time(w, z, HoleKind::lattice);
            const auto tp = first_enclosure_time(w, z, HoleKind::planar);
            if (tl && tp && *tl <= *tp) ++ordered;
        }
    }
    ok = ok && sites == 2 && ordered == sites;
    return {ok, fmt("lattice areas %s, planar areas %s, enclosure order holds at %lld/%lld sites",
                    lat.size() == 1 ? std::to_string(lat[0].area).c_str() : "?",
                    pla.size() == 1 ? std::to_string(pla[0].area).c_str() : "?", static_cast<long long>(ordered),
                    static_cast<long long>(sites))};
}

Verdict large_hole_trend()
{
    const RunRecord r = run_experiment("theorem11", {{"replicas", std::int64_t{200}}, {"delta", 0.4}}, options());
    bool ok = true;
    std::string d;
    for (const char* kind : {"lattice", "planar"}) {
        json first;
        json last;
        for (const auto& row : r.aggregate.at("rows")) {
            if (row.at("kind") != kind) continue;
            if (row.at("n") == 10000) first = row;
            if (row.at("n") == 1000000) last = row;
        }
        const double m = last.at("mean").get<double>();
        const bool in_band = m >= kTwoPi / 3.0 && m <= 3.0 * kTwoPi;
        const bool closer = last.at("abs_deviation").get<double>() < first.at("abs_deviation").get<double>();
        ok = ok && in_band && closer;
        d += fmt("%s%s: mean %.3f at 1e4, %.3f [%.3f, %.3f] at 1e6 (band [%.3f, %.3f] %s, closer to 2pi %s)",
                 d.empty() ? "" : "; ", kind, first.at("mean").get<double>(), m, last.at("ci_lo").get<double>(),
                 last.at("ci_hi").get<double>(), kTwoPi / 3.0, 3.0 * kTwoPi, in_band ? "yes" : "no",
                 closer ? "yes" : "no");
    }
    return {ok, "200 replicas, delta 0.4; " + d};
}

Verdict count_slopes()
{
    const RunRecord r = run_experiment("fig7_slopes", {{"replicas", std::int64_t{100}}}, options());
    const json& lat = r.aggregate.at("lattice");
    const json& large = lat.at("large").at("fit");
    const json& small = lat.at("small").at("fit");
    if (large.contains("error") || small.contains("error")) return {false, "fit failed: " + lat.dump()};
    const double sl = large.at("slope").get<double>();
    const double ss = small.at("slope").get<double>();
    const bool ok_large = within(sl, -1.0, 0.08);
    const bool ok_small = within(ss, -5.0 / 6.0, 0.08);
    return {ok_large && ok_small,
            fmt("n 1e6, 100 replicas; large-hole slope %.3f +- %.3f over [%.0f, %.0f] (target -1 +- 0.08 %s), "
                "small-hole slope %.3f +- %.3f over [1, 20] (target -0.833 +- 0.08 %s)",
                sl, large.at("stderr").get<double>(), large.at("x_range")[0].get<double>(),
                large.at("x_range")[1].get<double>(), ok_large ? "met" : "missed", ss,
                small.at("stderr").get<double>(), ok_small ? "met" : "missed")};
}

Verdict disconnection()
{
    struct Case {
        const char* variant;
        std::vector<std::int64_t> params;
        double target;
        double tol;
    };
    const std::vector<Case> cases{
        {"one_sided_radius", {16, 32, 64, 128, 256, 512}, -0.25, 0.05},
        {"two_sided_time", {256, 512, 1024, 2048, 4096, 8192, 16384, 32768, 65536}, -1.0 / 3.0, 0.05},
        {"two_sided_radius", {16, 32, 64, 128, 256, 512}, -2.0 / 3.0, 0.08},
    };
    bool ok = true;
    std::string d = "1e5 trials per point";
    for (const auto& c : cases) {
        const RunRecord r = run_experiment("disconnect",
                                           {{"variant", std::string(c.variant)},
                                            {"params", c.params},
                                            {"trials", std::int64_t{100000}},
                                            {"replicas", std::int64_t{1}}},
                                           options());
        const json& fit = r.aggregate.at("fit");
        if (fit.contains("error")) {
            ok = false;
            d += fmt("; %s: fit failed", c.variant);
            continue;
        }
        const double s = fit.at("slope").get<double>();
        const bool hit = within(s, c.target, c.tol);
        ok = ok && hit;
        d += fmt("; %s over [%lld, %lld]: slope %.3f +- %.3f (target %.3f +- %.2f %s)", c.variant,
                 static_cast<long long>(c.params.front()), static_cast<long long>(c.params.back()), s,
                 fit.at("stderr").get<double>(), c.target, c.tol, hit ? "met" : "missed");
    }
    return {ok, d};
}

Verdict frontier_scaling()
{
    const RunRecord r = run_experiment("frontier_scaling", {{"replicas", std::int64_t{100}}, {"scope", std::string("outer")}},
                                       options());
    const json& fit = r.aggregate.at("count").at("fit");
    const double s = fit.at("slope").get<double>();
    return {within(s, 2.0 / 3.0, 0.08), fmt("100 replicas, n in {1e4, 1e5, 1e6}: outer-frontier slope %.3f +- %.3f "
                                            "(target 0.667 +- 0.08)",
                                            s, fit.at("stderr").get<double>())};
}

Verdict coupling_bound()
{
    const RunRecord r = run_experiment("coupling", {{"replicas", std::int64_t{100}}, {"n", std::int64_t{10000}}}, options());
    const auto within_bound = r.aggregate.at("within_bound").get<std::int64_t>();
    return {within_bound >= 99, fmt("n 1e4: sup distance <= n^(1/4) log^2 n = %.1f in %lld/100 seeds (median %.2f)",
                                    coupling_scale(10000), static_cast<long long>(within_bound),
                                    r.aggregate.at("median_sup_distance").get<double>())};
}

Verdict total_counts()
{
    const RunRecord r = run_experiment("census", {{"replicas", std::int64_t{200}}}, options());
    const double sl = r.aggregate.at("lattice_holes").at("fit").at("slope").get<double>();
    const double sp = r.aggregate.at("planar_holes").at("fit").at("slope").get<double>();
    return {within(sl, 1.0, 0.1) && within(sp, 1.0, 0.1),
            fmt("200 replicas, n in {1e3, ..., 1e6}: lattice-hole count slope %.3f, planar-hole count slope %.3f "
                "(target 1 +- 0.1)",
                sl, sp)};
}

Verdict beurling_slope()
{
    const RunRecord r = run_experiment("beurling", {{"replicas", std::int64_t{1}}, {"trials", std::int64_t{100000}}}, options());
    const json& fit = r.aggregate.at("fit");
    const double s = fit.at("slope").get<double>();
    return {within(s, 0.5, 0.08), fmt("n 512, |x| in {1, ..., 64}, 1e5 trials per point: slope %.3f +- %.3f "
                                      "(target 0.5 +- 0.08)",
                                      s, fit.at("stderr").get<double>())};
}

Verdict legall_trend()
{
    const RunRecord r = run_experiment("legall", {{"replicas", std::int64_t{20}}}, options());
    const auto monotone = r.aggregate.at("monotone").get<std::int64_t>();
    std::string means;
    for (const auto& p : r.aggregate.at("points")) {
        means += fmt("%su %g: %.3f", means.empty() ? "" : ", ", p.at("u").get<double>(), p.at("mean").get<double>());
    }
    return {monotone * 10 >= 20 * 7,
            fmt("%lld/20 seeds move monotonically toward 2pi (need 14); mean u log^2 u N(u): ",
                static_cast<long long>(monotone)) +
                means};
}

Verdict determinism()
{
    const Config base{{"n", std::int64_t{20000}}, {"seed", std::int64_t{11}}};
    Config whole = base;
    whole["replicas"] = std::int64_t{8};
    Config lo = whole;
    lo["replicas"] = std::int64_t{5};
    Config hi = whole;
    hi["replicas"] = std::int64_t{3};
    hi["replica_start"] = std::int64_t{5};
    RunOptions one;
    const RunRecord a = run_experiment("spectrum", whole, one);
    const RunRecord b = run_experiment("spectrum", whole, options());
    const RunRecord l = run_experiment("spectrum", lo, one);
    const RunRecord h = run_experiment("spectrum", hi, one);
    const RunRecord lh = merge_records(std::vector{l, h});
    const RunRecord hl = merge_records(std::vector{h, l});
    const bool same = a.determinism_hash() == b.determinism_hash();
    const bool commute = lh == hl;
    const bool split = lh.determinism_hash() == a.determinism_hash();
    const bool identity = merge_records(std::vector{a}) == a;
    return {same && commute && split && identity,
            fmt("repeat run hash %s, merge commutes %s, halves reproduce whole %s, single-record merge identity %s",
                same ? "equal" : "differs", commute ? "yes" : "no", split ? "yes" : "no", identity ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"oracle equivalence", oracle_equivalence},
        {"fourteen-step loop fixture", fourteen_step_loop},
        {"normalized large-hole count trend", large_hole_trend},
        {"hole-count slopes at n = 1e6", count_slopes},
        {"disconnection exponents", disconnection},
        {"outer frontier scaling", frontier_scaling},
        {"coupling bound", coupling_bound},
        {"total hole count growth", total_counts},
        {"Beurling exponent", beurling_slope},
        {"Brownian hole count trend", legall_trend},
        {"determinism and merging", determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", number, criteria[i].first, v.detail.c_str(),
                    secs);
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
