#pragma once

// Run artifacts: config loading with schema validation, run manifests, CSV
// tables, and the deterministic SVG plots. Wall-clock timestamps appear only
// in manifests, so every data output is byte-stable across reruns.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "emlab/dynsys.hpp"
#include "emlab/emergence.hpp"

namespace emlab {

inline constexpr const char* kToolVersion = "0.1.0";

nlohmann::json parse_json_text(const std::string& text, const std::string& what);
nlohmann::json load_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Subset JSON-Schema checker covering exactly the keywords the shipped schema
// uses: type, properties, required, additionalProperties, items, enum,
// minimum, maximum, exclusiveMinimum, exclusiveMaximum, minItems, maxItems.
void validate_against_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                             const std::string& where);

const nlohmann::json& config_schema();

// schema conformance plus the per-kind field requirements the schema cannot
// express (rotation needs alpha, the parablenders need d and k, ...)
void validate_config(const nlohmann::json& cfg);

SystemSpec system_from_config(const nlohmann::json& cfg);
ParamPoint param_from_config(const nlohmann::json& cfg);
EmergenceQuery emergence_query_from_config(const nlohmann::json& cfg, std::uint64_t seed,
                                           int threads);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells);  // throws on width mismatch
    std::string to_string() const;                 // header + rows, LF endings
};

std::string csv_cell(double v);
std::string csv_cell(long long v);

struct RunManifest {
    std::string command;
    nlohmann::json config;  // full snapshot of the effective configuration
    std::uint64_t seed = 0;
    int threads = 1;
    std::string started, finished;   // ISO-8601 UTC
    std::string status = "pending";  // pending | complete | failed
    nlohmann::json inputs = nlohmann::json::object();   // name -> content hash
    nlohmann::json outputs = nlohmann::json::array();   // {file, hash}
    std::vector<std::string> notes;
    nlohmann::json result = nlohmann::json::object();   // per-command summary

    nlohmann::json to_json() const;
};

std::string iso_utc_now();
std::string fnv1a_tag(const std::string& bytes);

// manifest.json inside dir; creates the directory if needed
void write_manifest(const RunManifest& m, const std::string& dir);

// appends the output's name and content hash to the manifest and writes the
// file itself
void emit_output(RunManifest& m, const std::string& dir, const std::string& file,
                 const std::string& content);

std::string svg_loglog_curve(const EmergenceCurve& curve, const std::string& title);
std::string svg_orbit_scatter(const Trajectory& traj, const Box& box, const std::string& title);

}  // namespace emlab
