#pragma once
// Survey ingestion and file formats.
//
// Network formats:
//   json     {"nodes": [{"id", "type", "strategy": ["Hm", "Lc"]}], "edges": [[u, v]]}
//   csv      edge list `u,v` plus a sibling attribute table `id,type`
//            (<stem>.types.csv next to <stem>.csv)
//   graphml  node data keys `type`, `strat_attr`, `strat_struct`

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "commform/attributed.hpp"
#include "commform/engine.hpp"
#include "commform/evaluation.hpp"
#include "commform/fitting.hpp"
#include "commform/metrics.hpp"

namespace commform {

inline constexpr std::string_view kToolVersion = "commform 0.1.0";

/// Type 0 when rooms / sqrt(beds + 1) <= 2. Throws DataError on negatives.
AttributeType derive_wealth_attribute(long long rooms, long long beds);

enum class AttributeRule : std::uint8_t { RoomsOverSqrtBeds, ExplicitColumn };

struct RelationFile {
    std::string name;
    std::filesystem::path path;
    /// "edges" (header u,v) or "matrix" (square 0/1 adjacency, node key = row index).
    std::string format = "edges";
};

struct IngestConfig {
    std::string label;
    std::vector<RelationFile> relations;
    std::vector<std::string> excluded;
    std::filesystem::path attributes;
    AttributeRule rule = AttributeRule::RoomsOverSqrtBeds;
    std::string type_column = "type";
    /// CSV `member,household`; relation ids are members when present.
    std::optional<std::filesystem::path> household_map;
    /// Drop edges touching households absent from the attribute table
    /// instead of failing.
    bool drop_unattributed = false;

    /// Throws ConfigError (e.g. an excluded name that is not a relation).
    void validate() const;
};

/// Relative paths are resolved against the config file's directory.
IngestConfig read_ingest_config(const std::filesystem::path& path);
IngestConfig ingest_config_from_json(const nlohmann::json& j, const std::filesystem::path& base);

/// Union of the included relations at household level. Node i is the i-th
/// smallest household key in the attribute table.
ObservedNetwork load_observed(const IngestConfig& config);

enum class NetworkFormat : std::uint8_t { Json, Csv, GraphML };

/// "json", "csv", "graphml". Throws ConfigError.
NetworkFormat parse_format(std::string_view s);
/// From the file extension. Throws ConfigError.
NetworkFormat format_from_path(const std::filesystem::path& path);
std::filesystem::path csv_types_path(const std::filesystem::path& edges_path);

void save_network(const AttributedNetwork& net, const std::filesystem::path& path,
                  NetworkFormat format);
AttributedNetwork load_network(const std::filesystem::path& path, NetworkFormat format);
inline AttributedNetwork load_network(const std::filesystem::path& path) {
    return load_network(path, format_from_path(path));
}

void write_network_json(const AttributedNetwork& net, std::ostream& out);
AttributedNetwork read_network_json(std::istream& in);
void write_graphml(const AttributedNetwork& net, std::ostream& out);
AttributedNetwork read_graphml(std::istream& in);
void write_edges_csv(const NetworkState& g, std::ostream& out);
void write_types_csv(std::span<const AttributeType> types, std::ostream& out);
AttributedNetwork read_network_csv(std::istream& edges, std::istream& types);

/// `# key: value` metadata lines followed by the trace table.
using Metadata = std::vector<std::pair<std::string, std::string>>;
inline constexpr std::string_view kTraceHeader =
    "iter,edges,triangles,assortativity,stable_triads,avg_utility,communities";
void write_trace_csv(std::span<const MetricsRecord> trace, const Metadata& meta, std::ostream& out);
std::vector<MetricsRecord> read_trace_csv(std::istream& in);

/// Shortest round-tripping decimal form.
std::string format_double(double x);

nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const MetricsRecord& r);
nlohmann::json to_json(const LossReport& r);
nlohmann::json to_json(const GridSpec& g);
nlohmann::json to_json(const FitResult& r);
nlohmann::json summary_json(const SimulationResult& result, const ModelParams& params);

/// CSV columns kappa,alpha,beta,run,loss,mean_loss; one row per run.
void write_grid_csv(const FitResult& r, const Metadata& meta, std::ostream& out);

/// Throw IoError naming the path on failure.
void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

} // namespace commform
