#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "walkholes/config.hpp"

namespace walkholes {

inline constexpr const char* kArtifactVersion = "walkholes-1.0.0";
inline constexpr int kSchemaVersion = 1;

/// spectrum, theorem11, fig7_slopes, census, coupling, disconnect, beurling,
/// frontier_scaling, legall
const std::vector<std::string>& experiment_names();

/// Keys accepted by an experiment, including the common ones (seed, replicas,
/// replica_start, max_steps, max_grid_cells). Throws UsageError for an unknown name.
const std::vector<KeySpec>& experiment_schema(const std::string& experiment);

struct ReplicaResult {
    std::int64_t replica = 0;
    std::uint64_t seed = 0;
    nlohmann::json summary;
};

struct RunRecord {
    std::string experiment;
    nlohmann::json config;  ///< echo of every key, defaults included
    std::vector<ReplicaResult> replicas;  ///< sorted by replica index
    nlohmann::json aggregate;
    bool partial = false;
    std::string error;       ///< set when partial
    nlohmann::json timings;  ///< wall-clock; not part of the determinism hash

    /// FNV-1a over the serialized record without timings.
    std::uint64_t determinism_hash() const;
    /// One line per replica and a final aggregate line.
    std::string to_ndjson() const;
    static RunRecord from_ndjson(const std::string& text);

    friend bool operator==(const RunRecord&, const RunRecord&);
};

struct RunOptions {
    unsigned jobs = 1;
    /// When nonempty, <out_dir>/<experiment>.ndjson is written replica by
    /// replica as results arrive, followed by the CSV tables.
    std::filesystem::path out_dir;
};

/// Runs the replicas replica_start .. replica_start + replicas - 1 of an
/// experiment. Replica r uses the sub-seed derive_seed(seed, r) whatever the
/// job count. A ResourceError in replica k stops the run: replicas before k
/// are kept, and the record is marked partial.
/// Throws UsageError for an unknown experiment, ArgumentError for a bad parameter.
RunRecord run_experiment(const std::string& experiment, const std::map<std::string, ConfigValue>& config,
                         const RunOptions& options = {});

/// Union of records with equal configs (apart from the replica range) and
/// disjoint replica indices; the aggregate is recomputed over the union.
/// Throws ConflictError otherwise.
RunRecord merge_records(std::span<const RunRecord> records);

/// CSV tables of a record as (file suffix, contents), e.g. ("spectrum.csv", ...).
std::vector<std::pair<std::string, std::string>> csv_tables(const RunRecord& record);

/// Writes the NDJSON to `path` and each CSV table next to it as <stem>_<suffix>.
void write_outputs(const RunRecord& record, const std::filesystem::path& path);

}  // namespace walkholes
