#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "walkholes/errors.hpp"
#include "walkholes/oracle.hpp"
#include "walkholes/runner.hpp"

namespace {

constexpr int kExitArgument = 2;
constexpr int kExitResource = 3;
constexpr int kExitConflict = 4;
constexpr int kExitMismatch = 5;

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw walkholes::ArgumentError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string default_out_dir()
{
    const char* env = std::getenv("WALKHOLES_OUT");
    return env && *env ? env : "walkholes_out";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Random walk hole statistics"};
    app.require_subcommand(1);

    std::string experiment;
    std::string config_path;
    unsigned jobs = 1;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    run->add_option("experiment", experiment, "spectrum | theorem11 | fig7_slopes | census | coupling | disconnect | "
                                              "beurling | frontier_scaling | legall")
        ->required();
    run->add_option("--config", config_path, "Config file of 'key: type = value' lines")->required();
    run->add_option("--jobs", jobs, "Replicas run concurrently")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory (default: $WALKHOLES_OUT or ./walkholes_out)");

    std::vector<std::string> inputs;
    std::string merge_out;
    auto* merge = app.add_subcommand("merge", "Merge NDJSON records with disjoint replicas");
    merge->add_option("files", inputs, "Records to merge")->required();
    merge->add_option("--out", merge_out, "Merged NDJSON file")->required();

    std::int64_t max_steps = 500;
    std::int64_t seeds = 1000;
    auto* oracle = app.add_subcommand("oracle-check", "Compare hole extraction with a breadth-first reference");
    oracle->add_option("--max-steps", max_steps, "Longest walk checked")->check(CLI::NonNegativeNumber);
    oracle->add_option("--seeds", seeds, "Number of seeds")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitArgument;
    }

    try {
        if (*run) {
            walkholes::RunOptions options;
            options.jobs = jobs;
            options.out_dir = out_dir.empty() ? default_out_dir() : out_dir;
            const auto record = walkholes::run_experiment(experiment, walkholes::load_config(config_path), options);
            const auto path = options.out_dir / (experiment + ".ndjson");
            std::cout << "wrote " << record.replicas.size() << " replicas to " << path.string() << "\n";
            if (record.partial) {
                std::cerr << "partial run: " << record.error << "\n";
                return kExitResource;
            }
            return 0;
        }
        if (*merge) {
            std::vector<walkholes::RunRecord> records;
            for (const auto& f : inputs) records.push_back(walkholes::RunRecord::from_ndjson(read_file(f)));
            const auto merged = walkholes::merge_records(records);
            walkholes::write_outputs(merged, merge_out);
            std::cout << "merged " << merged.replicas.size() << " replicas into " << merge_out << "\n";
            return 0;
        }
        if (*oracle) {
            const auto report = walkholes::oracle::check_against_oracle(max_steps, seeds);
            for (const auto& f : report.failures) std::cerr << "mismatch: " << f << "\n";
            std::cout << report.walks << " walks checked, " << report.mismatches << " mismatches\n";
            return report.mismatches == 0 ? 0 : kExitMismatch;
        }
    } catch (const walkholes::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitArgument;
    } catch (const walkholes::ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return kExitArgument;
    } catch (const walkholes::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kExitResource;
    } catch (const walkholes::ConflictError& e) {
        std::cerr << "conflict: " << e.what() << "\n";
        return kExitConflict;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
