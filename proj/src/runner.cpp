#include "walkholes/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "walkholes/coupling.hpp"
#include "walkholes/errors.hpp"
#include "walkholes/exponent_mc.hpp"
#include "walkholes/grid.hpp"
#include "walkholes/rng.hpp"
#include "walkholes/spectrum.hpp"
#include "walkholes/stats.hpp"
#include "walkholes/walk.hpp"

namespace walkholes {

namespace {

using json = nlohmann::json;
using Replicas = std::vector<ReplicaResult>;
using Tables = std::vector<std::pair<std::string, std::string>>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kBootstrapStream = 0xb0075;
constexpr std::uint64_t kPointStream = 0x7a;

struct Experiment {
    std::string name;
    std::vector<KeySpec> keys;
    void (*validate)(const Params&);
    json (*replica)(const Params&, std::uint64_t seed, const ResourceBudget&);
    json (*aggregate)(const Params&, const Replicas&);
    Tables (*csv)(const Params&, const json& aggregate, const Replicas&);
};

// --- small helpers -----------------------------------------------------------

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok) throw ArgumentError(field + ": " + what);
}

void require_positive_list(const Params& p, const std::string& key)
{
    const auto& v = p.int_list(key);
    require(!v.empty(), key, "must not be empty");
    for (auto x : v) require(x >= 1, key, "entries must be at least 1");
}

ResourceBudget budget_of(const Params& p)
{
    return {static_cast<std::uint64_t>(p.integer("max_steps")), static_cast<std::uint64_t>(p.integer("max_grid_cells"))};
}

std::uint64_t master_seed(const Params& p) { return static_cast<std::uint64_t>(p.integer("seed")); }

std::vector<HoleKind> kinds_of(const Params& p)
{
    const std::string& k = p.string("kind");
    if (k == "lattice") return {HoleKind::lattice};
    if (k == "planar") return {HoleKind::planar};
    return {HoleKind::lattice, HoleKind::planar};
}

void validate_kind(const Params& p)
{
    const std::string& k = p.string("kind");
    require(k == "lattice" || k == "planar" || k == "both", "kind", "must be lattice, planar or both");
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

json mean_ci(const std::vector<double>& values, const Params& p)
{
    const Interval ci = bootstrap_mean_ci(values, derive_seed(master_seed(p), kBootstrapStream));
    return {{"mean", mean(values)}, {"ci_lo", ci.lo}, {"ci_hi", ci.hi}};
}

json fit_json(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) {
            xs.push_back(x[i]);
            ys.push_back(y[i]);
        }
    }
    try {
        const ExponentEstimate f = fit_exponent(xs, ys);
        return {{"slope", f.slope},
                {"intercept", f.intercept},
                {"stderr", f.slope_stderr},
                {"r_squared", f.r_squared},
                {"x_range", {f.x_range.first, f.x_range.second}},
                {"points_used", f.points_used}};
    } catch (const ArgumentError& e) {
        return {{"error", e.what()}};
    }
}

std::string fit_csv(const std::vector<double>& x, const std::vector<double>& y, const json& fit)
{
    std::ostringstream os;
    os << "x,y,slope,stderr\n";
    const std::string slope = fit.contains("slope") ? fmt(fit["slope"].get<double>()) : "";
    const std::string err = fit.contains("stderr") ? fmt(fit["stderr"].get<double>()) : "";
    for (std::size_t i = 0; i < x.size(); ++i) os << fmt(x[i]) << ',' << fmt(y[i]) << ',' << slope << ',' << err << '\n';
    return os.str();
}

std::vector<double> to_doubles(const json& a)
{
    std::vector<double> out;
    for (const auto& v : a) out.push_back(v.get<double>());
    return out;
}

struct Analysis {
    OccupancyGrid grid;
    ComponentMap lattice;
    ComponentMap planar;
};

Analysis analyze(std::uint64_t seed, std::int64_t n, const ResourceBudget& budget, bool lattice, bool planar)
{
    Analysis a;
    const WalkPath walk = generate_walk(seed, static_cast<std::uint64_t>(2 * n), budget);
    a.grid = build_grid(walk, budget);
    if (lattice) a.lattice = label_lattice(a.grid);
    if (planar) a.planar = label_planar(a.grid);
    return a;
}

const ComponentMap& component_map(const Analysis& a, HoleKind k) { return k == HoleKind::lattice ? a.lattice : a.planar; }

// Walk seed for size n within a replica; keyed by n so that editing the list
// of sizes leaves the other sizes' walks unchanged.
std::uint64_t walk_seed(std::uint64_t replica_seed, std::int64_t n)
{
    return derive_seed(replica_seed, static_cast<std::uint64_t>(n));
}

NormalizedCount normalized(const HoleSpectrum& s, double delta, bool count_unbounded)
{
    NormalizedCount c = normalized_count(s, delta);
    if (count_unbounded) {
        ++c.raw;
        c.ratio = static_cast<double>(c.raw) * kTwoPi / c.gamma;
    }
    return c;
}

void validate_common(const Params& p)
{
    require(p.integer("replicas") >= 0, "replicas", "must be nonnegative");
    require(p.integer("replica_start") >= 0, "replica_start", "must be nonnegative");
    require(p.integer("max_steps") >= 1, "max_steps", "must be positive");
    require(p.integer("max_grid_cells") >= 1, "max_grid_cells", "must be positive");
}

void validate_delta(const Params& p)
{
    const double d = p.real("delta");
    require(d > 0.0 && d < 1.0, "delta", "must lie in (0, 1)");
}

void validate_trace(const Params& p)
{
    require(p.integer("n") >= 1, "n", "must be at least 1");
    const double dt = p.real("dt");
    require(dt > 0.0 && dt <= 0.25, "dt", "must lie in (0, 1/4]");
    const double h = p.real("h");
    require(h > 0.0 && h <= 1.0, "h", "must lie in (0, 1]");
}

// --- spectrum ----------------------------------------------------------------

void spectrum_validate(const Params& p)
{
    require(p.integer("n") >= 1, "n", "must be at least 1");
    validate_delta(p);
    require(p.real("eps") > 0.0, "eps", "must be positive");
    validate_kind(p);
    require(std::log(static_cast<double>(p.integer("n"))) > 0.0, "n", "must exceed 1");
}

json spectrum_replica(const Params& p, std::uint64_t seed, const ResourceBudget& budget)
{
    const std::int64_t n = p.integer("n");
    const auto kinds = kinds_of(p);
    const bool lat = std::find(kinds.begin(), kinds.end(), HoleKind::lattice) != kinds.end();
    const bool pla = std::find(kinds.begin(), kinds.end(), HoleKind::planar) != kinds.end();
    const Analysis a = analyze(walk_seed(seed, n), n, budget, lat, pla);
    json out = json::object();
    for (HoleKind k : kinds) {
        const HoleSpectrum s = HoleSpectrum::from_holes(n, k, component_map(a, k).holes());
        const NormalizedCount c = normalized(s, p.real("delta"), p.boolean("count_unbounded"));
        json bins = json::array();
        for (const auto& b : bin_counts(s, p.real("delta"), p.real("eps"))) bins.push_back(b.count);
        out[to_string(k)] = {{"holes", s.areas.size()}, {"raw", c.raw}, {"ratio", c.ratio}, {"bins", bins}};
    }
    return out;
}

json spectrum_aggregate(const Params& p, const Replicas& reps)
{
    const double n = static_cast<double>(p.integer("n"));
    const double delta = p.real("delta");
    const double lo = std::pow(n, 1.0 - delta);
    const double c = 1.0 + p.real("eps");
    json out = json::object();
    for (HoleKind k : kinds_of(p)) {
        const std::string key = to_string(k);
        std::vector<double> ratios;
        std::vector<double> holes;
        std::vector<std::int64_t> pooled;
        for (const auto& r : reps) {
            const json& s = r.summary.at(key);
            ratios.push_back(s.at("ratio").get<double>());
            holes.push_back(s.at("holes").get<double>());
            const json& bins = s.at("bins");
            if (pooled.size() < bins.size()) pooled.resize(bins.size(), 0);
            for (std::size_t j = 0; j < bins.size(); ++j) pooled[j] += bins[j].get<std::int64_t>();
        }
        json bins = json::array();
        for (std::size_t j = 0; j < pooled.size(); ++j) {
            const double b = static_cast<double>(j);
            bins.push_back({{"lo", lo * std::pow(c, b)}, {"hi", lo * std::pow(c, b + 1.0)}, {"count", pooled[j]}});
        }
        const double log_nd = delta * std::log(n);
        out[key] = {{"gamma", kTwoPi * std::exp(log_nd) / (log_nd * log_nd)},
                    {"ratio", mean_ci(ratios, p)},
                    {"mean_holes", mean(holes)},
                    {"bins", bins}};
    }
    return out;
}

Tables spectrum_csv(const Params& p, const json& agg, const Replicas&)
{
    std::ostringstream os;
    os << "n,kind,bin_lo,bin_hi,count\n";
    for (HoleKind k : kinds_of(p)) {
        if (!agg.contains(to_string(k))) continue;
        for (const auto& b : agg[to_string(k)]["bins"]) {
            os << p.integer("n") << ',' << to_string(k) << ',' << fmt(b["lo"].get<double>()) << ','
               << fmt(b["hi"].get<double>()) << ',' << b["count"].get<std::int64_t>() << '\n';
        }
    }
    return {{"spectrum.csv", os.str()}};
}

// --- theorem11 ---------------------------------------------------------------

void theorem11_validate(const Params& p)
{
    require_positive_list(p, "n_values");
    for (auto n : p.int_list("n_values")) require(n >= 2, "n_values", "entries must be at least 2");
    validate_delta(p);
    validate_kind(p);
}

json theorem11_replica(const Params& p, std::uint64_t seed, const ResourceBudget& budget)
{
    const auto kinds = kinds_of(p);
    json points = json::array();
    for (std::int64_t n : p.int_list("n_values")) {
        const Analysis a = analyze(walk_seed(seed, n), n, budget, true, true);
        json pt = {{"n", n}};
        for (HoleKind k : kinds) {
            const HoleSpectrum s = HoleSpectrum::from_holes(n, k, component_map(a, k).holes());
            const NormalizedCount c = normalized(s, p.real("delta"), p.boolean("count_unbounded"));
            pt[to_string(k)] = {{"raw", c.raw}, {"ratio", c.ratio}};
        }
        points.push_back(pt);
    }
    return {{"points", points}};
}

json theorem11_aggregate(const Params& p, const Replicas& reps)
{
    json rows = json::array();
    const auto& ns = p.int_list("n_values");
    const double delta = p.real("delta");
    for (std::size_t i = 0; i < ns.size(); ++i) {
        for (HoleKind k : kinds_of(p)) {
            std::vector<double> ratios;
            for (const auto& r : reps) ratios.push_back(r.summary["points"][i][to_string(k)]["ratio"].get<double>());
            const double log_nd = delta * std::log(static_cast<double>(ns[i]));
            json row = mean_ci(ratios, p);
            row["n"] = ns[i];
            row["kind"] = to_string(k);
            row["gamma"] = kTwoPi * std::exp(log_nd) / (log_nd * log_nd);
            row["abs_deviation"] = std::abs(row["mean"].get<double>() - kTwoPi);
            rows.push_back(row);
        }
    }
    return {{"target", kTwoPi}, {"rows", rows}};
}

Tables theorem11_csv(const Params&, const json& agg, const Replicas&)
{
    std::ostringstream os;
    os << "n,kind,gamma,mean_ratio,ci_lo,ci_hi\n";
    for (const auto& r : agg.value("rows", json::array())) {
        os << r["n"].get<std::int64_t>() << ',' << r["kind"].get<std::string>() << ',' << fmt(r["gamma"].get<double>())
           << ',' << fmt(r["mean"].get<double>()) << ',' << fmt(r["ci_lo"].get<double>()) << ','
           << fmt(r["ci_hi"].get<double>()) << '\n';
    }
    return {{"theorem11.csv", os.str()}};
}

// --- fig7_slopes -------------------------------------------------------------

std::vector<double> small_grid(const Params& p)
{
    std::vector<double> out;
    for (std::int64_t a = p.integer("small_lo"); a <= p.integer("small_hi"); ++a) out.push_back(static_cast<double>(a));
    return out;
}

std::vector<double> large_grid(const Params& p)
{
    const double n = static_cast<double>(p.integer("n"));
    const double lo = p.real("large_lo_exp");
    const double hi = p.real("large_hi_exp");
    const std::int64_t m = p.integer("large_points");
    std::vector<double> out;
    for (std::int64_t i = 0; i < m; ++i) out.push_back(std::pow(n, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1)));
    return out;
}

void fig7_validate(const Params& p)
{
    require(p.integer("n") >= 1, "n", "must be at least 1");
    validate_kind(p);
    require(p.integer("small_lo") >= 1, "small_lo", "must be at least 1");
    require(p.integer("small_hi") > p.integer("small_lo"), "small_hi", "must exceed small_lo");
    require(p.real("large_lo_exp") > 0.0 && p.real("large_lo_exp") < p.real("large_hi_exp"), "large_lo_exp",
            "must lie in (0, large_hi_exp)");
    require(p.real("large_hi_exp") <= 1.0, "large_hi_exp", "must be at most 1");
    require(p.integer("large_points") >= 2, "large_points", "must be at least 2");
}

json fig7_replica(const Params& p, std::uint64_t seed, const ResourceBudget& budget)
{
    const std::int64_t n = p.integer("n");
    const Analysis a = analyze(walk_seed(seed, n), n, budget, true, true);
    json out = json::object();
    for (HoleKind k : kinds_of(p)) {
        const HoleSpectrum s = HoleSpectrum::from_holes(n, k, component_map(a, k).holes());
        json small = json::array();
        json large = json::array();
        for (double x : small_grid(p)) small.push_back(count_at_least(s, x));
        for (double x : large_grid(p)) large.push_back(count_at_least(s, x));
        out[to_string(k)] = {{"small", small}, {"large", large}};
    }
    return out;
}

json fig7_aggregate(const Params& p, const Replicas& reps)
{
    json out = json::object();
    for (HoleKind k : kinds_of(p)) {
        json entry = json::object();
        for (const char* window : {"small", "large"}) {
            const std::vector<double> x = std::string(window) == "small" ? small_grid(p) : large_grid(p);
            std::vector<double> y(x.size(), 0.0);
            for (const auto& r : reps) {
                const json& c = r.summary[to_string(k)][window];
                for (std::size_t i = 0; i < x.size(); ++i) y[i] += c[i].get<double>();
            }
            for (auto& v : y) v /= static_cast<double>(reps.size());
            entry[window] = {{"x", x}, {"mean_count", y}, {"fit", fit_json(x, y)}};
        }
        out[to_string(k)] = entry;
    }
    return out;
}

Tables fig7_csv(const Params& p, const json& agg, const Replicas&)
{
    Tables out;
    for (HoleKind k : kinds_of(p)) {
        if (!agg.contains(to_string(k))) continue;
        for (const char* window : {"small", "large"}) {
            const json& w = agg[to_string(k)][window];
            out.push_back({std::string("fit_") + to_string(k) + "_" + window + ".csv",
                           fit_csv(to_doubles(w["x"]), to_doubles(w["mean_count"]), w["fit"])});
        }
    }
    return out;
}

// --- census ------------------------------------------------------------------

void census_validate(const Params& p)
{
    require_positive_list(p, "n_values");
    require(p.integer("top") >= 0, "top", "must be nonnegative");
}

json top_shapes(const ShapeCensus& census, std::int64_t top)
{
    std::vector<std::pair<std::int64_t, const ShapeKey*>> order;
    for (const auto& [key, count] : census) order.push_back({count, &key});
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    json out = json::array();
    for (std::size_t i = 0; i < order.size() && static_cast<std::int64_t>(i) < top; ++i) {
        std::ostringstream os;
        os << *order[i].second;
        out.push_back({os.str(), order[i].first});
    }
    return out;
}

json census_replica(const Params& p, std::uint64_t seed, const ResourceBudget& budget)
{
    json points = json::array();
    for (std::int64_t n : p.int_list("n_values")) {
        const Analysis a = analyze(walk_seed(seed, n), n, budget, true, true);
        const ShapeCensus lat = shape_census(a.lattice);
        const ShapeCensus pla = shape_census(a.planar);
        const auto find = [](const ShapeCensus& c, const ShapeKey& k) {
            const auto it = c.find(k);
            return it == c.end() ? std::int64_t{0} : it->second;
        };
        points.push_back({{"n", n},
                          {"lattice_holes", a.lattice.holes().size()},
                          {"planar_holes", a.planar.holes().size()},
                          {"single_site", find(lat, single_cell_shape(HoleKind::lattice))},
                          {"single_face", find(pla, single_cell_shape(HoleKind::planar))},
                          {"lattice_shapes", lat.size()},
                          {"top_lattice", top_shapes(lat, p.integer("top"))},
                          {"top_planar", top_shapes(pla, p.integer("top"))}});
    }
    return {{"points", points}};
}

json size_series_aggregate(const Params& p, const Replicas& reps, const std::vector<std::string>& fields)
{
    const auto& ns = p.int_list("n_values");
    std::vector<double> x(ns.begin(), ns.end());
    json out = {{"n", ns}};
    for (const auto& f : fields) {
        std::vector<double> y;
        json cis = json::array();
        for (std::size_t i = 0; i < ns.size(); ++i) {
            std::vector<double> v;
            for (const auto& r : reps) v.push_back(r.summary["points"][i][f].get<double>());
            const json m = mean_ci(v, p);
            y.push_back(m["mean"].get<double>());
            cis.push_back({m["ci_lo"], m["ci_hi"]});
        }
        out[f] = {{"mean", y}, {"ci", cis}, {"fit", fit_json(x, y)}};
    }
    return out;
}

json census_aggregate(const Params& p, const Replicas& reps)
{
    return size_series_aggregate(p, reps, {"single_site", "single_face", "lattice_holes", "planar_holes"});
}

Tables series_csv(const json& agg, const std::string& field, const std::string& name)
{
    if (!agg.contains(field)) return {};
    return {{name, fit_csv(to_doubles(agg["n"]), to_doubles(agg[field]["mean"]), agg[field]["fit"])}};
}

Tables census_csv(const Params&, const json& agg, const Replicas&)
{
    Tables out;
    for (const char* f : {"single_site", "single_face", "lattice_holes", "planar_holes"}) {
        for (auto& t : series_csv(agg, f, std::string("fit_") + f + ".csv")) out.push_back(t);
    }
    return out;
}

// --- frontier_scaling --------------------------------------------------------

FrontierScope scope_of(const Params& p)
{
    const std::string& s = p.string("scope");
    if (s == "holes") return FrontierScope::holes;
    if (s == "holes_and_outer") return FrontierScope::holes_and_outer;
    return FrontierScope::outer;
}

void frontier_validate(const Params& p)
{
    require_positive_list(p, "n_values");
    const std::string& s = p.string("scope");
    require(s == "holes" || s == "holes_and_outer" || s == "outer", "scope", "must be holes, holes_and_outer or outer");
    require(p.integer("min_area") >= 0, "min_area", "must be nonnegative");
}

json frontier_replica(const Params& p, std::uint64_t seed, const ResourceBudget& budget)
{
    json points = json::array();
    for (std::int64_t n : p.int_list("n_values")) {
        const Analysis a = analyze(walk_seed(seed, n), n, budget, false, true);
        const BoundaryCount c = boundary_squares(a.grid, a.planar.holes(), p.integer("min_area"), scope_of(p));
        points.push_back({{"n", n}, {"count", c.count}, {"no_qualifying_hole", c.no_qualifying_hole}});
    }
    return {{"points", points}};
}

json frontier_aggregate(const Params& p, const Replicas& reps) { return size_series_aggregate(p, reps, {"count"}); }

Tables frontier_csv(const Params&, const json& agg, const Replicas&) { return series_csv(agg, "count", "fit.csv"); }

// --- coupling ----------------------------------------------------------------

void coupling_validate(const Params& p)
{
    validate_trace(p);
    require(p.integer("z_samples") >= 0, "z_samples", "must be nonnegative");
    require(p.real("threshold_scale") > 0.0, "threshold_scale", "must be positive");
}

json coupling_replica(const Params& p, std::uint64_t seed, const ResourceBudget& budget)
{
    const std::int64_t n = p.integer("n");
    const CouplingTrace trace = embed_walk(seed, n, p.real("dt"), budget);
    const AreaComparison cmp(trace, p.real("h"), budget);
    const Box box = range_stats(trace.walk).bbox;
    Xoshiro256 rng(derive_seed(seed, kPointStream));
    json samples = json::array();
    for (std::int64_t i = 0; i < p.integer("z_samples"); ++i) {
        const Point z{static_cast<std::int32_t>(box.x_min + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(box.width())))),
                      static_cast<std::int32_t>(box.y_min + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(box.height()))))};
        const DeltaArea d = cmp.at(z, p.real("threshold_scale"));
        samples.push_back({{"z", {z.x, z.y}},
                           {"bm_area", d.bm_area ? json(*d.bm_area) : json(nullptr)},
                           {"walk_area", d.walk_area ? json(*d.walk_area) : json(nullptr)},
                           {"delta", d.delta ? json(*d.delta) : json(nullptr)},
                           {"bm_boundary_distance", d.bm_boundary_distance},
                           {"walk_boundary_distance", d.walk_boundary_distance},
                           {"flags",
                            {{"B", d.flags.boundary_far_bm},
                             {"B_walk", d.flags.boundary_far_walk},
                             {"P", d.flags.coupled},
                             {"E", d.flags.both_finite},
                             {"N", d.flags.confined}}}});
    }
    const double scale = coupling_scale(n);
    return {{"sup_distance", cmp.sup_distance()},
            {"sup_norm", cmp.sup_norm()},
            {"scale", scale},
            {"within_bound", cmp.sup_distance() <= scale},
            {"samples", samples}};
}

json coupling_aggregate(const Params& p, const Replicas& reps)
{
    std::vector<double> sups;
    std::int64_t within = 0;
    std::int64_t qualifying = 0;
    std::int64_t large = 0;
    const double min_area = std::pow(static_cast<double>(p.integer("n")), p.real("min_area_exp"));
    for (const auto& r : reps) {
        sups.push_back(r.summary["sup_distance"].get<double>());
        within += r.summary["within_bound"].get<bool>() ? 1 : 0;
        for (const auto& s : r.summary["samples"]) {
            const json& f = s["flags"];
            if (!(f["B"].get<bool>() && f["B_walk"].get<bool>() && f["P"].get<bool>() && f["E"].get<bool>() &&
                  f["N"].get<bool>())) {
                continue;
            }
            const double wa = s["walk_area"].get<double>();
            if (wa < min_area) continue;
            ++qualifying;
            if (s["delta"].get<double>() >= p.real("relative_delta") * wa) ++large;
        }
    }
    const auto nrep = static_cast<double>(reps.size());
    return {{"within_bound", within},
            {"within_bound_fraction", static_cast<double>(within) / nrep},
            {"sup_distance", mean_ci(sups, p)},
            {"median_sup_distance", median(sups)},
            {"qualifying_points", qualifying},
            {"large_delta_points", large},
            {"large_delta_frequency", qualifying > 0 ? json(static_cast<double>(large) / static_cast<double>(qualifying)) : json(nullptr)}};
}

Tables coupling_csv(const Params&, const json&, const Replicas& reps)
{
    std::ostringstream os;
    os << "replica,sup_distance,z_x,z_y,bm_area,walk_area,delta,B,B_walk,P,E,N\n";
    const auto opt = [](const json& v) { return v.is_null() ? std::string() : fmt(v.get<double>()); };
    for (const auto& r : reps) {
        for (const auto& s : r.summary["samples"]) {
            const json& f = s["flags"];
            os << r.replica << ',' << fmt(r.summary["sup_distance"].get<double>()) << ',' << s["z"][0].get<int>() << ','
               << s["z"][1].get<int>() << ',' << opt(s["bm_area"]) << ',' << opt(s["walk_area"]) << ','
               << opt(s["delta"]) << ',' << f["B"].get<bool>() << ',' << f["B_walk"].get<bool>() << ','
               << f["P"].get<bool>() << ',' << f["E"].get<bool>() << ',' << f["N"].get<bool>() << '\n';
        }
    }
    return {{"samples.csv", os.str()}};
}

// --- disconnect and beurling -------------------------------------------------

DisconnectVariant variant_of(const Params& p)
{
    const std::string& v = p.string("variant");
    if (v == "two_sided_time") return DisconnectVariant::two_sided_time;
    if (v == "two_sided_radius") return DisconnectVariant::two_sided_radius;
    return DisconnectVariant::one_sided_radius;
}

void disconnect_validate(const Params& p)
{
    const std::string& v = p.string("variant");
    require(v == "one_sided_radius" || v == "two_sided_time" || v == "two_sided_radius", "variant",
            "must be one_sided_radius, two_sided_time or two_sided_radius");
    require_positive_list(p, "params");
    require(p.integer("trials") >= 0, "trials", "must be nonnegative");
}

json disconnect_replica(const Params& p, std::uint64_t seed, const ResourceBudget& budget)
{
    json points = json::array();
    const TrialRange range{p.integer("trials"), 0, 1};
    for (std::int64_t param : p.int_list("params")) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(param));
        DisconnectSample d;
        switch (variant_of(p)) {
        case DisconnectVariant::two_sided_time: d = two_sided_disconnect_prob(param, TwoSidedMode::fixed_time, range, s, budget); break;
        case DisconnectVariant::two_sided_radius: d = two_sided_disconnect_prob(param, TwoSidedMode::fixed_radius, range, s, budget); break;
        default: d = one_sided_disconnect_prob(param, range, s, budget); break;
        }
        points.push_back({{"param", param}, {"trials", d.trials}, {"successes", d.successes}});
    }
    return {{"points", points}};
}

json sample_aggregate(const std::string& key, DisconnectVariant variant, const Params& p, const Replicas& reps)
{
    const auto& params = p.int_list(key);
    json points = json::array();
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < params.size(); ++i) {
        DisconnectSample total{variant, params[i], 0, 0};
        for (const auto& r : reps) {
            const json& pt = r.summary["points"][i];
            total = merge_samples(total, {variant, params[i], pt["trials"].get<std::int64_t>(), pt["successes"].get<std::int64_t>()});
        }
        const Interval ci = total.wilson();
        points.push_back({{"param", params[i]},
                          {"trials", total.trials},
                          {"successes", total.successes},
                          {"p_hat", total.p_hat()},
                          {"ci_lo", ci.lo},
                          {"ci_hi", ci.hi}});
        x.push_back(static_cast<double>(params[i]));
        y.push_back(total.p_hat());
    }
    return {{"variant", to_string(variant)}, {"points", points}, {"fit", fit_json(x, y)}};
}

json disconnect_aggregate(const Params& p, const Replicas& reps) { return sample_aggregate("params", variant_of(p), p, reps); }

Tables sample_csv(const json& agg, const std::string& name)
{
    std::ostringstream os;
    os << "variant,param,trials,successes,p_hat,ci_lo,ci_hi\n";
    for (const auto& pt : agg.value("points", json::array())) {
        os << agg["variant"].get<std::string>() << ',' << pt["param"].get<std::int64_t>() << ','
           << pt["trials"].get<std::int64_t>() << ',' << pt["successes"].get<std::int64_t>() << ','
           << fmt(pt["p_hat"].get<double>()) << ',' << fmt(pt["ci_lo"].get<double>()) << ','
           << fmt(pt["ci_hi"].get<double>()) << '\n';
    }
    return {{name, os.str()}};
}

Tables disconnect_csv(const Params&, const json& agg, const Replicas&) { return sample_csv(agg, "disconnect.csv"); }

void beurling_validate(const Params& p)
{
    require(p.integer("n") >= 1, "n", "must be at least 1");
    require_positive_list(p, "x_values");
    for (auto v : p.int_list("x_values")) require(v <= p.integer("n"), "x_values", "entries must not exceed n");
    require(p.integer("trials") >= 0, "trials", "must be nonnegative");
}

json beurling_replica(const Params& p, std::uint64_t seed, const ResourceBudget& budget)
{
    json points = json::array();
    const TrialRange range{p.integer("trials"), 0, 1};
    for (std::int64_t v : p.int_list("x_values")) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(v));
        const DisconnectSample d =
            beurling_prob({0, static_cast<std::int32_t>(v)}, p.integer("n"), Obstacle::half_line, range, s, budget);
        points.push_back({{"param", v}, {"trials", d.trials}, {"successes", d.successes}});
    }
    return {{"points", points}};
}

json beurling_aggregate(const Params& p, const Replicas& reps)
{
    return sample_aggregate("x_values", DisconnectVariant::beurling, p, reps);
}

Tables beurling_csv(const Params&, const json& agg, const Replicas&) { return sample_csv(agg, "beurling.csv"); }

// --- legall ------------------------------------------------------------------

void legall_validate(const Params& p)
{
    validate_trace(p);
    const auto& u = p.real_list("u_values");
    require(u.size() >= 2, "u_values", "needs at least two values");
    for (double v : u) require(v > 0.0 && v < 1.0, "u_values", "entries must lie in (0, 1)");
}

json legall_replica(const Params& p, std::uint64_t seed, const ResourceBudget& budget)
{
    const std::int64_t n = p.integer("n");
    const CouplingTrace trace = embed_walk(seed, n, p.real("dt"), budget);
    std::vector<double> areas;
    for (const auto& h : bm_holes(trace, p.real("h"), budget)) areas.push_back(h.area);
    std::sort(areas.begin(), areas.end());
    json points = json::array();
    bool monotone = true;
    double last_gap = std::numeric_limits<double>::infinity();
    for (double u : p.real_list("u_values")) {
        const double threshold = u * static_cast<double>(n);
        const auto count = static_cast<std::int64_t>(areas.end() - std::lower_bound(areas.begin(), areas.end(), threshold));
        const double lu = std::log(u);
        const double q = u * lu * lu * static_cast<double>(count);
        const double gap = std::abs(q - kTwoPi);
        monotone = monotone && gap < last_gap;
        last_gap = gap;
        points.push_back({{"u", u}, {"count", count}, {"q", q}});
    }
    return {{"points", points}, {"monotone", monotone}, {"holes", areas.size()}};
}

json legall_aggregate(const Params& p, const Replicas& reps)
{
    const auto& us = p.real_list("u_values");
    json points = json::array();
    for (std::size_t i = 0; i < us.size(); ++i) {
        std::vector<double> q;
        for (const auto& r : reps) q.push_back(r.summary["points"][i]["q"].get<double>());
        json m = mean_ci(q, p);
        m["u"] = us[i];
        points.push_back(m);
    }
    std::int64_t monotone = 0;
    for (const auto& r : reps) monotone += r.summary["monotone"].get<bool>() ? 1 : 0;
    return {{"target", kTwoPi},
            {"points", points},
            {"monotone", monotone},
            {"monotone_fraction", static_cast<double>(monotone) / static_cast<double>(reps.size())}};
}

Tables legall_csv(const Params&, const json& agg, const Replicas&)
{
    std::ostringstream os;
    os << "u,mean_q,ci_lo,ci_hi\n";
    for (const auto& pt : agg.value("points", json::array())) {
        os << fmt(pt["u"].get<double>()) << ',' << fmt(pt["mean"].get<double>()) << ','
           << fmt(pt["ci_lo"].get<double>()) << ',' << fmt(pt["ci_hi"].get<double>()) << '\n';
    }
    return {{"legall.csv", os.str()}};
}

// --- registry ----------------------------------------------------------------

using IntList = std::vector<std::int64_t>;
using RealList = std::vector<double>;

const std::vector<Experiment>& registry()
{
    static const std::vector<Experiment> all = {
        {"spectrum",
         {{"n", ValueType::integer, std::int64_t{10000}},
          {"delta", ValueType::real, 0.4},
          {"eps", ValueType::real, 0.5},
          {"kind", ValueType::string, std::string("both")},
          {"count_unbounded", ValueType::boolean, false}},
         spectrum_validate, spectrum_replica, spectrum_aggregate, spectrum_csv},
        {"theorem11",
         {{"n_values", ValueType::int_list, IntList{10000, 100000, 1000000}},
          {"delta", ValueType::real, 0.4},
          {"kind", ValueType::string, std::string("both")},
          {"count_unbounded", ValueType::boolean, false}},
         theorem11_validate, theorem11_replica, theorem11_aggregate, theorem11_csv},
        {"fig7_slopes",
         {{"n", ValueType::integer, std::int64_t{1000000}},
          {"kind", ValueType::string, std::string("lattice")},
          {"small_lo", ValueType::integer, std::int64_t{1}},
          {"small_hi", ValueType::integer, std::int64_t{20}},
          {"large_lo_exp", ValueType::real, 0.5},
          {"large_hi_exp", ValueType::real, 0.9},
          {"large_points", ValueType::integer, std::int64_t{12}}},
         fig7_validate, fig7_replica, fig7_aggregate, fig7_csv},
        {"census",
         {{"n_values", ValueType::int_list, IntList{1000, 10000, 100000, 1000000}},
          {"top", ValueType::integer, std::int64_t{5}}},
         census_validate, census_replica, census_aggregate, census_csv},
        {"coupling",
         {{"n", ValueType::integer, std::int64_t{10000}},
          {"dt", ValueType::real, 1.0 / 64.0},
          {"h", ValueType::real, 0.5},
          {"z_samples", ValueType::integer, std::int64_t{16}},
          {"threshold_scale", ValueType::real, 1.0},
          {"min_area_exp", ValueType::real, 0.97},
          {"relative_delta", ValueType::real, 0.1}},
         coupling_validate, coupling_replica, coupling_aggregate, coupling_csv},
        {"disconnect",
         {{"variant", ValueType::string, std::string("one_sided_radius")},
          {"params", ValueType::int_list, IntList{16, 32, 64, 128, 256, 512}},
          {"trials", ValueType::integer, std::int64_t{1000}}},
         disconnect_validate, disconnect_replica, disconnect_aggregate, disconnect_csv},
        {"beurling",
         {{"n", ValueType::integer, std::int64_t{512}},
          {"x_values", ValueType::int_list, IntList{1, 2, 4, 8, 16, 32, 64}},
          {"trials", ValueType::integer, std::int64_t{1000}}},
         beurling_validate, beurling_replica, beurling_aggregate, beurling_csv},
        {"frontier_scaling",
         {{"n_values", ValueType::int_list, IntList{10000, 100000, 1000000}},
          {"scope", ValueType::string, std::string("outer")},
          {"min_area", ValueType::integer, std::int64_t{0}}},
         frontier_validate, frontier_replica, frontier_aggregate, frontier_csv},
        {"legall",
         {{"n", ValueType::integer, std::int64_t{10000}},
          {"dt", ValueType::real, 1.0 / 64.0},
          {"h", ValueType::real, 0.5},
          {"u_values", ValueType::real_list, RealList{0.1, 0.01, 0.001}}},
         legall_validate, legall_replica, legall_aggregate, legall_csv},
    };
    return all;
}

const Experiment& find_experiment(const std::string& name)
{
    for (const auto& e : registry()) {
        if (e.name == name) return e;
    }
    throw UsageError("unknown experiment '" + name + "'");
}

std::vector<KeySpec> common_keys()
{
    const ResourceBudget defaults;
    return {{"seed", ValueType::integer, std::int64_t{1}},
            {"replicas", ValueType::integer, std::int64_t{10}},
            {"replica_start", ValueType::integer, std::int64_t{0}},
            {"max_steps", ValueType::integer, static_cast<std::int64_t>(defaults.max_steps)},
            {"max_grid_cells", ValueType::integer, static_cast<std::int64_t>(defaults.max_grid_cells)}};
}

json to_json(const ConfigValue& v)
{
    return std::visit([](const auto& x) { return json(x); }, v);
}

ConfigValue from_json(const json& j, ValueType t)
{
    switch (t) {
    case ValueType::integer: return j.get<std::int64_t>();
    case ValueType::real: return j.get<double>();
    case ValueType::string: return j.get<std::string>();
    case ValueType::boolean: return j.get<bool>();
    case ValueType::int_list: return j.get<std::vector<std::int64_t>>();
    case ValueType::real_list: return j.get<std::vector<double>>();
    }
    return {};
}

json echo(const Params& p)
{
    json out = json::object();
    for (const auto& [k, v] : p.values()) out[k] = to_json(v);
    return out;
}

Params params_from_echo(const std::string& experiment, const json& config)
{
    std::map<std::string, ConfigValue> given;
    for (const auto& spec : experiment_schema(experiment)) {
        if (config.contains(spec.name)) given[spec.name] = from_json(config[spec.name], spec.type);
    }
    return Params(given, experiment_schema(experiment));
}

json replica_line(const std::string& experiment, const ReplicaResult& r)
{
    return {{"type", "replica"},
            {"schema_version", kSchemaVersion},
            {"experiment", experiment},
            {"replica", r.replica},
            {"seed", r.seed},
            {"summary", r.summary}};
}

json aggregate_line(const RunRecord& rec)
{
    json out = {{"type", "aggregate"},
                {"schema_version", kSchemaVersion},
                {"artifact_version", kArtifactVersion},
                {"experiment", rec.experiment},
                {"config", rec.config},
                {"replica_count", rec.replicas.size()},
                {"aggregate", rec.aggregate},
                {"partial", rec.partial}};
    if (rec.partial) out["error"] = rec.error;
    return out;
}

std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

json finish_aggregate(const Experiment& ex, const Params& p, const Replicas& reps)
{
    if (reps.empty()) return json::object();
    return ex.aggregate(p, reps);
}

void write_csvs(const RunRecord& rec, const std::filesystem::path& dir, const std::string& stem)
{
    for (const auto& [suffix, text] : csv_tables(rec)) {
        std::ofstream out(dir / (stem + "_" + suffix));
        if (!out) throw ArgumentError("out: cannot write " + (dir / (stem + "_" + suffix)).string());
        out << text;
    }
}

}  // namespace

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& e : registry()) out.push_back(e.name);
        return out;
    }();
    return names;
}

const std::vector<KeySpec>& experiment_schema(const std::string& experiment)
{
    static const std::map<std::string, std::vector<KeySpec>> schemas = [] {
        std::map<std::string, std::vector<KeySpec>> out;
        for (const auto& e : registry()) {
            auto keys = common_keys();
            keys.insert(keys.end(), e.keys.begin(), e.keys.end());
            out[e.name] = keys;
        }
        return out;
    }();
    const auto it = schemas.find(experiment);
    if (it == schemas.end()) throw UsageError("unknown experiment '" + experiment + "'");
    return it->second;
}

std::uint64_t RunRecord::determinism_hash() const
{
    std::string text;
    for (const auto& r : replicas) text += replica_line(experiment, r).dump() + "\n";
    text += aggregate_line(*this).dump() + "\n";
    return fnv1a64(text);
}

std::string RunRecord::to_ndjson() const
{
    std::string text;
    for (const auto& r : replicas) text += replica_line(experiment, r).dump() + "\n";
    json agg = aggregate_line(*this);
    agg["determinism_hash"] = hex64(determinism_hash());
    agg["timings"] = timings;
    return text + agg.dump() + "\n";
}

RunRecord RunRecord::from_ndjson(const std::string& text)
{
    RunRecord rec;
    bool seen_aggregate = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        if (j.value("schema_version", 0) != kSchemaVersion) throw ArgumentError("record: unsupported schema_version");
        const std::string type = j.at("type").get<std::string>();
        if (type == "replica") {
            rec.replicas.push_back({j.at("replica").get<std::int64_t>(), j.at("seed").get<std::uint64_t>(), j.at("summary")});
        } else if (type == "aggregate") {
            seen_aggregate = true;
            rec.experiment = j.at("experiment").get<std::string>();
            rec.config = j.at("config");
            rec.aggregate = j.at("aggregate");
            rec.partial = j.at("partial").get<bool>();
            rec.error = j.value("error", std::string());
            rec.timings = j.value("timings", json::object());
        } else {
            throw ArgumentError("record: unknown line type '" + type + "'");
        }
    }
    if (!seen_aggregate) throw ArgumentError("record: no aggregate line");
    std::sort(rec.replicas.begin(), rec.replicas.end(), [](const auto& a, const auto& b) { return a.replica < b.replica; });
    return rec;
}

bool operator==(const RunRecord& a, const RunRecord& b)
{
    if (a.replicas.size() != b.replicas.size()) return false;
    for (std::size_t i = 0; i < a.replicas.size(); ++i) {
        const auto& x = a.replicas[i];
        const auto& y = b.replicas[i];
        if (x.replica != y.replica || x.seed != y.seed || x.summary != y.summary) return false;
    }
    return a.experiment == b.experiment && a.config == b.config && a.aggregate == b.aggregate &&
           a.partial == b.partial && a.error == b.error && a.timings == b.timings;
}

RunRecord run_experiment(const std::string& experiment, const std::map<std::string, ConfigValue>& config,
                         const RunOptions& options)
{
    const Experiment& ex = find_experiment(experiment);
    const Params p(config, experiment_schema(experiment));
    validate_common(p);
    ex.validate(p);

    RunRecord rec;
    rec.experiment = experiment;
    rec.config = echo(p);
    const ResourceBudget budget = budget_of(p);
    const std::uint64_t master = master_seed(p);
    const std::int64_t start = p.integer("replica_start");
    const std::int64_t count = p.integer("replicas");

    std::ofstream out;
    if (!options.out_dir.empty()) {
        std::filesystem::create_directories(options.out_dir);
        const auto path = options.out_dir / (experiment + ".ndjson");
        out.open(path);
        if (!out) throw ArgumentError("out: cannot write " + path.string());
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::optional<json>> slots(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::vector<double> seconds(static_cast<std::size_t>(count), 0.0);
    std::vector<char> done(static_cast<std::size_t>(count), 0);
    std::mutex mutex;
    std::condition_variable cv;
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> stop{false};

    const auto worker = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= count || stop.load()) return;
            const auto s0 = std::chrono::steady_clock::now();
            std::optional<json> result;
            std::exception_ptr error;
            try {
                result = ex.replica(p, derive_seed(master, static_cast<std::uint64_t>(start + i)), budget);
            } catch (...) {
                error = std::current_exception();
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();
            {
                const std::lock_guard lock(mutex);
                slots[i] = std::move(result);
                errors[i] = error;
                seconds[i] = secs;
                done[i] = 1;
            }
            cv.notify_all();
        }
    };

    const unsigned jobs = static_cast<unsigned>(std::clamp<std::int64_t>(options.jobs, 1, std::max<std::int64_t>(count, 1)));
    std::vector<std::thread> threads;
    for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(worker);

    std::exception_ptr fatal;
    std::vector<double> kept_seconds;
    for (std::int64_t i = 0; i < count; ++i) {
        {
            std::unique_lock lock(mutex);
            cv.wait(lock, [&] { return done[i] != 0; });
        }
        if (errors[i]) {
            stop = true;
            try {
                std::rethrow_exception(errors[i]);
            } catch (const ResourceError& e) {
                rec.partial = true;
                rec.error = "replica " + std::to_string(start + i) + ": " + e.what();
            } catch (...) {
                fatal = std::current_exception();
            }
            break;
        }
        ReplicaResult r{start + i, derive_seed(master, static_cast<std::uint64_t>(start + i)), std::move(*slots[i])};
        if (out) out << replica_line(experiment, r).dump() << '\n' << std::flush;
        rec.replicas.push_back(std::move(r));
        kept_seconds.push_back(seconds[i]);
    }
    for (auto& t : threads) t.join();
    if (fatal) std::rethrow_exception(fatal);

    rec.aggregate = finish_aggregate(ex, p, rec.replicas);
    rec.timings = {{"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
                   {"replica_seconds", kept_seconds}};
    if (out) {
        json agg = aggregate_line(rec);
        agg["determinism_hash"] = hex64(rec.determinism_hash());
        agg["timings"] = rec.timings;
        out << agg.dump() << '\n' << std::flush;
        write_csvs(rec, options.out_dir, experiment);
    }
    return rec;
}

RunRecord merge_records(std::span<const RunRecord> records)
{
    if (records.empty()) throw ArgumentError("records: nothing to merge");
    if (records.size() == 1) return records.front();
    const auto strip = [](json c) {
        c.erase("replicas");
        c.erase("replica_start");
        return c;
    };
    const RunRecord& base = records.front();
    const json base_config = strip(base.config);
    const Experiment& ex = find_experiment(base.experiment);

    RunRecord merged;
    merged.experiment = base.experiment;
    std::vector<std::pair<std::int64_t, double>> secs;
    double total = 0.0;
    std::vector<std::string> errors;
    for (const auto& rec : records) {
        if (rec.experiment != base.experiment) throw ConflictError("records are from different experiments");
        if (strip(rec.config) != base_config) throw ConflictError("records have different configs");
        const json rs = rec.timings.value("replica_seconds", json::array());
        for (std::size_t i = 0; i < rec.replicas.size(); ++i) {
            merged.replicas.push_back(rec.replicas[i]);
            secs.push_back({rec.replicas[i].replica, i < rs.size() ? rs[i].get<double>() : 0.0});
        }
        total += rec.timings.value("total_seconds", 0.0);
        if (rec.partial) {
            merged.partial = true;
            errors.push_back(rec.error);
        }
    }
    std::sort(merged.replicas.begin(), merged.replicas.end(), [](const auto& a, const auto& b) { return a.replica < b.replica; });
    for (std::size_t i = 1; i < merged.replicas.size(); ++i) {
        if (merged.replicas[i].replica == merged.replicas[i - 1].replica) {
            throw ConflictError("replica " + std::to_string(merged.replicas[i].replica) + " appears in more than one record");
        }
    }
    std::sort(secs.begin(), secs.end());
    std::sort(errors.begin(), errors.end());
    if (!errors.empty()) merged.error = errors.front();

    merged.config = base.config;
    merged.config["replicas"] = merged.replicas.size();
    merged.config["replica_start"] = merged.replicas.empty() ? base.config.value("replica_start", 0) : merged.replicas.front().replica;
    const Params p = params_from_echo(merged.experiment, merged.config);
    merged.aggregate = finish_aggregate(ex, p, merged.replicas);
    json per = json::array();
    for (const auto& s : secs) per.push_back(s.second);
    merged.timings = {{"total_seconds", total}, {"replica_seconds", per}};
    return merged;
}

std::vector<std::pair<std::string, std::string>> csv_tables(const RunRecord& record)
{
    if (record.replicas.empty()) return {};
    const Experiment& ex = find_experiment(record.experiment);
    const Params p = params_from_echo(record.experiment, record.config);
    return ex.csv(p, record.aggregate, record.replicas);
}

void write_outputs(const RunRecord& record, const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ArgumentError("out: cannot write " + path.string());
    out << record.to_ndjson();
    out.close();
    write_csvs(record, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."), path.stem().string());
}

}  // namespace walkholes
