#include "emlab/artifacts.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config_schema.hpp"

namespace emlab {

using nlohmann::json;

nlohmann::json parse_json_text(const std::string& text, const std::string& what) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw UsageError(what + ": not valid JSON");
    return doc;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json load_json_file(const std::string& path) {
    return parse_json_text(read_text_file(path), path);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write " + path);
    out << content;
    if (!out) throw UsageError("write failed for " + path);
}

// ---------------------------------------------------------------------------
// schema checking

namespace {

std::string json_type_name(const json& v) {
    if (v.is_object()) return "object";
    if (v.is_array()) return "array";
    if (v.is_string()) return "string";
    if (v.is_boolean()) return "boolean";
    if (v.is_number_integer() || v.is_number_unsigned()) return "integer";
    if (v.is_number()) return "number";
    return "null";
}

[[noreturn]] void schema_fail(const std::string& where, const std::string& msg) {
    throw UsageError("config" + where + ": " + msg);
}

}  // namespace

void validate_against_schema(const json& doc, const json& schema, const std::string& where) {
    if (schema.contains("type")) {
        std::string want = schema["type"].get<std::string>();
        std::string have = json_type_name(doc);
        bool ok = want == have || (want == "number" && have == "integer");
        if (!ok) schema_fail(where, "expected " + want + ", got " + have);
    }
    if (schema.contains("enum")) {
        bool hit = false;
        for (const auto& v : schema["enum"])
            if (v == doc) hit = true;
        if (!hit) schema_fail(where, "value " + doc.dump() + " not in the allowed set");
    }
    if (doc.is_number()) {
        double v = doc.get<double>();
        if (schema.contains("minimum") && v < schema["minimum"].get<double>())
            schema_fail(where, "value below minimum " + schema["minimum"].dump());
        if (schema.contains("maximum") && v > schema["maximum"].get<double>())
            schema_fail(where, "value above maximum " + schema["maximum"].dump());
        if (schema.contains("exclusiveMinimum") && v <= schema["exclusiveMinimum"].get<double>())
            schema_fail(where, "value must exceed " + schema["exclusiveMinimum"].dump());
        if (schema.contains("exclusiveMaximum") && v >= schema["exclusiveMaximum"].get<double>())
            schema_fail(where, "value must be below " + schema["exclusiveMaximum"].dump());
    }
    if (doc.is_object()) {
        const json props = schema.value("properties", json::object());
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!doc.contains(key.get<std::string>()))
                    schema_fail(where, "missing required key \"" + key.get<std::string>() + "\"");
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            if (props.contains(it.key())) {
                validate_against_schema(it.value(), props[it.key()], where + "." + it.key());
            } else if (!schema.value("additionalProperties", true)) {
                schema_fail(where, "unknown key \"" + it.key() + "\"");
            }
        }
    }
    if (doc.is_array()) {
        if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>())
            schema_fail(where, "needs at least " + schema["minItems"].dump() + " items");
        if (schema.contains("maxItems") && doc.size() > schema["maxItems"].get<std::size_t>())
            schema_fail(where, "allows at most " + schema["maxItems"].dump() + " items");
        if (schema.contains("items"))
            for (std::size_t i = 0; i < doc.size(); ++i)
                validate_against_schema(doc[i], schema["items"],
                                        where + "[" + std::to_string(i) + "]");
    }
}

const nlohmann::json& config_schema() {
    static const json schema = json::parse(detail::kConfigSchema);
    return schema;
}

void validate_config(const json& cfg) {
    validate_against_schema(cfg, config_schema(), "");
    if (!cfg.contains("system")) return;
    const json& sys = cfg["system"];
    std::string kind = sys["kind"].get<std::string>();
    auto need = [&](const char* key) {
        if (!sys.contains(key))
            throw UsageError("config.system: kind \"" + kind + "\" needs \"" + key + "\"");
    };
    if (kind == "rotation") need("alpha");
    if (kind == "planted-sinks") need("n");
    if (kind == "parablender-core" || kind == "parablender-full") {
        need("d");
        need("k");
    }
    if (cfg.contains("emergence") && cfg["emergence"].contains("sample_box")) {
        const json& box = cfg["emergence"]["sample_box"];
        if (box["lo"].size() != box["hi"].size())
            throw UsageError("config.emergence.sample_box: lo and hi differ in length");
    }
}

SystemSpec system_from_config(const json& cfg) {
    validate_config(cfg);
    if (!cfg.contains("system"))
        throw UsageError("config: a \"system\" section is required for this command");
    const json& sys = cfg["system"];
    std::string kind = sys["kind"].get<std::string>();
    if (kind == "henon") return SystemSpec::henon(sys.value("a", 1.4), sys.value("b", 0.3));
    if (kind == "identity") return SystemSpec::identity(sys.value("dim", 1));
    if (kind == "rotation")
        return SystemSpec::rotation(sys["alpha"].get<double>(), sys.value("dim", 1));
    if (kind == "doubling") return SystemSpec::doubling();
    if (kind == "parablender-core")
        return SystemSpec::parablender_core(sys["d"].get<int>(), sys["k"].get<int>());
    if (kind == "parablender-full")
        return SystemSpec::parablender_full(sys["d"].get<int>(), sys["k"].get<int>());
    return SystemSpec::planted_sinks(sys["n"].get<int>());
}

ParamPoint param_from_config(const json& cfg) {
    ParamPoint a;
    if (cfg.contains("param"))
        for (const auto& v : cfg["param"]) a.push_back(v.get<double>());
    return a;
}

EmergenceQuery emergence_query_from_config(const json& cfg, std::uint64_t seed, int threads) {
    if (!cfg.contains("emergence"))
        throw UsageError("config: an \"emergence\" section is required for this command");
    const json& em = cfg["emergence"];
    EmergenceQuery q;
    if (em.contains("n_ladder")) {
        q.n_ladder.clear();
        for (const auto& v : em["n_ladder"]) q.n_ladder.push_back(v.get<int>());
    }
    q.sample_count = em.value("sample_count", q.sample_count);
    for (const auto& v : em["epsilons"]) q.epsilons.push_back(v.get<double>());
    q.quantize_cell = em.value("quantize_cell", 0.0);
    q.seed = seed;
    q.threads = threads;
    if (em.contains("sample_box")) {
        const json& box = em["sample_box"];
        q.has_sample_box = true;
        q.sample_box.dim = int(box["lo"].size());
        for (std::size_t i = 0; i < box["lo"].size(); ++i) {
            q.sample_box.lo[i] = box["lo"][i].get<double>();
            q.sample_box.hi[i] = box["hi"][i].get<double>();
        }
    }
    return q;
}

// ---------------------------------------------------------------------------
// CSV

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns.size()) throw UsageError("csv row width mismatch");
    rows.push_back(std::move(cells));
}

std::string CsvTable::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

std::string csv_cell(double v) { return format_double(v); }
std::string csv_cell(long long v) { return std::to_string(v); }

// ---------------------------------------------------------------------------
// manifests

std::string iso_utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::string fnv1a_tag(const std::string& bytes) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

nlohmann::json RunManifest::to_json() const {
    json m;
    m["tool"] = "emlab";
    m["version"] = kToolVersion;
    m["command"] = command;
    m["config"] = config;
    m["seed"] = seed;
    m["threads"] = threads;
    m["started"] = started;
    m["finished"] = finished;
    m["status"] = status;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["notes"] = notes;
    m["result"] = result;
    return m;
}

void write_manifest(const RunManifest& m, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_text_file((std::filesystem::path(dir) / "manifest.json").string(),
                    m.to_json().dump(2) + "\n");
}

void emit_output(RunManifest& m, const std::string& dir, const std::string& file,
                 const std::string& content) {
    write_text_file((std::filesystem::path(dir) / file).string(), content);
    m.outputs.push_back({{"file", file}, {"hash", fnv1a_tag(content)}});
}

}  // namespace emlab
