#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "walkholes/errors.hpp"
#include "walkholes/grid.hpp"
#include "walkholes/runner.hpp"

using namespace walkholes;
using Config = std::map<std::string, ConfigValue>;

namespace {

std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("walkholes_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Config small_spectrum(std::int64_t replicas, std::int64_t start = 0)
{
    return {{"n", std::int64_t{2000}}, {"replicas", replicas}, {"replica_start", start}, {"seed", std::int64_t{5}}};
}

}  // namespace

TEST_CASE("config text parsing")
{
    const Config c = parse_config(
        "# comment line\n"
        "n: int = 10000\n"
        "delta: real = 0.4   # trailing comment\n"
        "kind: string = planar\n"
        "count_unbounded: bool = true\n"
        "n_values: int_list = 1000, 10000\n"
        "u_values: real_list = 0.1,0.01\n"
        "\n");
    CHECK(std::get<std::int64_t>(c.at("n")) == 10000);
    CHECK(std::get<double>(c.at("delta")) == 0.4);
    CHECK(std::get<std::string>(c.at("kind")) == "planar");
    CHECK(std::get<bool>(c.at("count_unbounded")));
    CHECK(std::get<std::vector<std::int64_t>>(c.at("n_values")) == std::vector<std::int64_t>{1000, 10000});
    CHECK(std::get<std::vector<double>>(c.at("u_values")) == std::vector<double>{0.1, 0.01});
    CHECK(type_of(c.at("u_values")) == ValueType::real_list);
}

TEST_CASE("config errors name the key or line")
{
    const auto message = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ArgumentError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("n = 5\n").find("line 1") != std::string::npos);
    CHECK(message("n: integer = 5\n").find("n") != std::string::npos);
    CHECK(message("n: int = five\n").find("n") != std::string::npos);
    CHECK(message("flag: bool = maybe\n").find("flag") != std::string::npos);
    CHECK(message("n: int = 1\nn: int = 2\n").find("n") != std::string::npos);
    CHECK_FALSE(message("n: int = 1\nn: int = 2\n").empty());
    CHECK_THROWS_AS(load_config("/nonexistent/walkholes.cfg"), ArgumentError);
}

TEST_CASE("params check keys and types against the schema")
{
    const auto& schema = experiment_schema("spectrum");
    const Params defaults(Config{}, schema);
    CHECK(defaults.integer("n") == 10000);
    CHECK(defaults.integer("seed") == 1);
    CHECK(defaults.string("kind") == "both");

    const Params widened(Config{{"delta", std::int64_t{0}}}, schema);
    CHECK(widened.real("delta") == 0.0);

    try {
        Params(Config{{"bogus", std::int64_t{1}}}, schema);
        FAIL("unknown key accepted");
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
    CHECK_THROWS_AS(Params(Config{{"n", 2.5}}, schema), ArgumentError);
    CHECK_THROWS_AS(experiment_schema("nope"), UsageError);
    CHECK(experiment_names().size() == 9);
}

TEST_CASE("run_experiment validates")
{
    CHECK_THROWS_AS(run_experiment("nope", {}), UsageError);
    try {
        run_experiment("spectrum", {{"delta", 1.5}, {"replicas", std::int64_t{1}}});
        FAIL("bad delta accepted");
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("delta") != std::string::npos);
    }
    CHECK_THROWS_AS(run_experiment("coupling", {{"dt", 0.5}}), ArgumentError);
    CHECK_THROWS_AS(run_experiment("beurling", {{"x_values", std::vector<std::int64_t>{600}}}), ArgumentError);
}

TEST_CASE("zero replicas give an empty aggregate")
{
    for (const auto& name : experiment_names()) {
        const RunRecord r = run_experiment(name, {{"replicas", std::int64_t{0}}});
        CHECK(r.replicas.empty());
        CHECK(r.aggregate == nlohmann::json::object());
        CHECK_FALSE(r.partial);
        const RunRecord back = RunRecord::from_ndjson(r.to_ndjson());
        CHECK(back == r);
    }
}

TEST_CASE("same config, same bytes; job count does not matter")
{
    const auto d1 = scratch_dir("det1");
    const auto d2 = scratch_dir("det2");
    RunOptions o1;
    o1.out_dir = d1;
    RunOptions o2;
    o2.out_dir = d2;
    o2.jobs = 3;
    const RunRecord a = run_experiment("spectrum", small_spectrum(6), o1);
    const RunRecord b = run_experiment("spectrum", small_spectrum(6), o2);
    CHECK(a.determinism_hash() == b.determinism_hash());
    CHECK(a.replicas.size() == 6);

    // Every line but the timings field of the aggregate is identical.
    const auto strip_timings = [](const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::string out;
        while (std::getline(in, line)) {
            auto j = nlohmann::json::parse(line);
            j.erase("timings");
            out += j.dump() + "\n";
        }
        return out;
    };
    CHECK(strip_timings(slurp(d1 / "spectrum.ndjson")) == strip_timings(slurp(d2 / "spectrum.ndjson")));
    CHECK(slurp(d1 / "spectrum_spectrum.csv") == slurp(d2 / "spectrum_spectrum.csv"));
    CHECK_FALSE(slurp(d1 / "spectrum_spectrum.csv").empty());

    const RunRecord back = RunRecord::from_ndjson(slurp(d1 / "spectrum.ndjson"));
    CHECK(back == a);
    CHECK(back.determinism_hash() == a.determinism_hash());

    Config other = small_spectrum(6);
    other["seed"] = std::int64_t{6};
    CHECK(run_experiment("spectrum", other).determinism_hash() != a.determinism_hash());
}

TEST_CASE("merging records")
{
    const RunRecord whole = run_experiment("spectrum", small_spectrum(10));
    const RunRecord lo = run_experiment("spectrum", small_spectrum(5, 0));
    const RunRecord hi = run_experiment("spectrum", small_spectrum(5, 5));

    const RunRecord ab = merge_records(std::vector{lo, hi});
    const RunRecord ba = merge_records(std::vector{hi, lo});
    CHECK(ab == ba);
    CHECK(ab.determinism_hash() == whole.determinism_hash());
    CHECK(ab.aggregate == whole.aggregate);
    CHECK(ab.config == whole.config);

    CHECK(merge_records(std::vector{lo}) == lo);

    CHECK_THROWS_AS(merge_records(std::vector{lo, lo}), ConflictError);
    const RunRecord overlap = run_experiment("spectrum", small_spectrum(3, 4));
    CHECK_THROWS_AS(merge_records(std::vector{lo, overlap}), ConflictError);
    Config other = small_spectrum(5, 5);
    other["delta"] = 0.3;
    CHECK_THROWS_AS(merge_records(std::vector{lo, run_experiment("spectrum", other)}), ConflictError);
    CHECK_THROWS_AS(merge_records(std::vector{lo, run_experiment("theorem11", {{"replicas", std::int64_t{1}},
                                                                                {"n_values", std::vector<std::int64_t>{100}}})}),
                    ConflictError);
    CHECK_THROWS_AS(merge_records(std::vector<RunRecord>{}), ArgumentError);
}

TEST_CASE("merged halves of a disconnect run equal the whole run")
{
    const Config base{{"params", std::vector<std::int64_t>{4, 8}}, {"trials", std::int64_t{200}}, {"seed", std::int64_t{3}}};
    Config whole = base;
    whole["replicas"] = std::int64_t{4};
    Config lo = base;
    lo["replicas"] = std::int64_t{2};
    Config hi = lo;
    hi["replica_start"] = std::int64_t{2};
    const RunRecord w = run_experiment("disconnect", whole);
    const RunRecord m = merge_records(std::vector{run_experiment("disconnect", hi), run_experiment("disconnect", lo)});
    CHECK(m.determinism_hash() == w.determinism_hash());
}

TEST_CASE("a resource error keeps the replicas before it")
{
    const std::int64_t n = 1000;
    const std::uint64_t master = 5;
    std::vector<std::int64_t> cells;
    for (std::uint64_t r = 0; r < 60; ++r) {
        const Box b = build_grid(generate_walk(derive_seed(derive_seed(master, r), n), 2 * n)).bbox();
        cells.push_back(b.width() * b.height());
    }
    std::size_t k = 2;
    while (k < cells.size() && cells[k] <= *std::max_element(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(k))) ++k;
    REQUIRE(k < cells.size());
    const std::int64_t budget = *std::max_element(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(k));

    const auto dir = scratch_dir("partial");
    RunOptions options;
    options.out_dir = dir;
    options.jobs = 2;
    const RunRecord r = run_experiment(
        "spectrum", {{"n", n}, {"replicas", static_cast<std::int64_t>(k + 3)}, {"seed", std::int64_t{5}}, {"max_grid_cells", budget}}, options);
    CHECK(r.partial);
    CHECK(r.replicas.size() == k);
    CHECK(r.error.find("replica " + std::to_string(k)) == 0);

    const RunRecord back = RunRecord::from_ndjson(slurp(dir / "spectrum.ndjson"));
    CHECK(back.partial);
    CHECK(back.replicas.size() == k);
    for (std::size_t i = 0; i < k; ++i) CHECK(back.replicas[i].replica == static_cast<std::int64_t>(i));
}

TEST_CASE("every experiment runs at small sizes and writes its tables")
{
    const std::map<std::string, Config> configs{
        {"spectrum", {{"n", std::int64_t{500}}}},
        {"theorem11", {{"n_values", std::vector<std::int64_t>{100, 1000}}}},
        {"fig7_slopes", {{"n", std::int64_t{2000}}, {"small_hi", std::int64_t{5}}}},
        {"census", {{"n_values", std::vector<std::int64_t>{100, 1000}}}},
        {"coupling", {{"n", std::int64_t{200}}, {"z_samples", std::int64_t{4}}}},
        {"disconnect", {{"params", std::vector<std::int64_t>{4, 8}}, {"trials", std::int64_t{50}}}},
        {"beurling", {{"n", std::int64_t{32}}, {"x_values", std::vector<std::int64_t>{1, 2, 4}}, {"trials", std::int64_t{50}}}},
        {"frontier_scaling", {{"n_values", std::vector<std::int64_t>{100, 1000}}}},
        {"legall", {{"n", std::int64_t{200}}, {"u_values", std::vector<double>{0.1, 0.05, 0.02}}}},
    };
    for (const auto& [name, cfg] : configs) {
        CAPTURE(name);
        Config c = cfg;
        c["replicas"] = std::int64_t{3};
        const auto dir = scratch_dir("all_" + name);
        RunOptions options;
        options.out_dir = dir;
        const RunRecord r = run_experiment(name, c, options);
        CHECK(r.replicas.size() == 3);
        CHECK_FALSE(r.aggregate.empty());
        CHECK(std::filesystem::exists(dir / (name + ".ndjson")));
        const auto tables = csv_tables(r);
        CHECK_FALSE(tables.empty());
        for (const auto& [suffix, text] : tables) CHECK(slurp(dir / (name + "_" + suffix)) == text);
        CHECK(r.config.at("replicas") == 3);

        const auto out = dir / "copy" / (name + ".ndjson");
        write_outputs(r, out);
        CHECK(RunRecord::from_ndjson(slurp(out)) == r);
    }
}

TEST_CASE("normalized counts at n = 10^4, delta = 0.4, 10 replicas, seed 7: frozen")
{
    const RunRecord r = run_experiment(
        "theorem11",
        {{"n_values", std::vector<std::int64_t>{10000}}, {"delta", 0.4}, {"replicas", std::int64_t{10}}, {"seed", std::int64_t{7}}});
    const auto& rows = r.aggregate.at("rows");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].at("kind") == "lattice");
    CHECK(rows[0].at("mean").get<double>() == doctest::Approx(0.30684132691100846).epsilon(1e-12));
    CHECK(rows[1].at("kind") == "planar");
    CHECK(rows[1].at("mean").get<double>() == doctest::Approx(0.3409348076788983).epsilon(1e-12));
    CHECK(rows[0].at("gamma").get<double>() == doctest::Approx(18.429286672005816));
}
