#include "emlab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "emlab/artifacts.hpp"
#include "emlab/jets.hpp"
#include "emlab/sinks.hpp"

namespace emlab {

using nlohmann::json;

namespace {

constexpr const char* kCenterNote =
    "covering numbers restrict centers to the sampled cloud; they over-estimate "
    "the unrestricted optimum by at most a factor of two";

int default_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n ? int(n) : 1;
}

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = default_threads();
};

std::uint64_t effective_seed(const Common& c, const json& cfg) {
    if (c.seed_set) return c.seed;
    if (cfg.contains("seed")) return cfg["seed"].get<std::uint64_t>();
    return 0;
}

RunManifest start_manifest(const char* command, const Common& c, const json& cfg,
                           std::uint64_t seed, const std::string& config_text) {
    RunManifest m;
    m.command = command;
    m.config = cfg;
    m.seed = seed;
    m.threads = c.threads;
    m.started = iso_utc_now();
    if (!config_text.empty()) m.inputs["config"] = fnv1a_tag(config_text);
    write_manifest(m, c.out_dir);  // pending marker before any output lands
    return m;
}

void finish_manifest(RunManifest& m, const std::string& dir) {
    m.finished = iso_utc_now();
    m.status = "complete";
    write_manifest(m, dir);
}

void fail_manifest(RunManifest& m, const std::string& dir, const char* what) {
    m.finished = iso_utc_now();
    m.status = "failed";
    m.notes.push_back(std::string("error: ") + what);
    write_manifest(m, dir);
}

std::string box_text(const Box& box) {
    std::string s = "[" + format_double(box.lo[0]) + "," + format_double(box.hi[0]) + "]";
    if (box.dim > 1)
        s += "x[" + format_double(box.lo[1]) + "," + format_double(box.hi[1]) + "]";
    return s;
}

// ---------------------------------------------------------------------------
// systems

int cmd_systems(bool json_mode, std::ostream& out) {
    struct Entry {
        const char* kind;
        SystemSpec sys;
    };
    const std::vector<Entry> catalogue = {
        {"henon", SystemSpec::henon(1.4, 0.3)},
        {"identity", SystemSpec::identity(1)},
        {"rotation", SystemSpec::rotation(std::sqrt(2.0) - 1.0, 1)},
        {"doubling", SystemSpec::doubling()},
        {"parablender-core", SystemSpec::parablender_core(1, 1)},
        {"parablender-full", SystemSpec::parablender_full(1, 1)},
        {"planted-sinks", SystemSpec::planted_sinks(4)},
    };
    if (json_mode) {
        json arr = json::array();
        for (const auto& e : catalogue) {
            Box box = e.sys.phase_box();
            json row;
            row["kind"] = e.kind;
            row["example"] = e.sys.name();
            row["dim"] = e.sys.phase_dim();
            row["param_arity"] = e.sys.param_arity();
            row["branches"] = branch_count(e.sys);
            row["box"]["lo"] = std::vector<double>(box.lo.begin(), box.lo.begin() + box.dim);
            row["box"]["hi"] = std::vector<double>(box.hi.begin(), box.hi.begin() + box.dim);
            arr.push_back(row);
        }
        out << arr.dump(2) << "\n";
        return 0;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-18s %-34s %3s %5s %8s  %s", "kind", "example", "dim",
                  "arity", "branches", "phase box");
    out << buf << "\n";
    for (const auto& e : catalogue) {
        std::snprintf(buf, sizeof buf, "%-18s %-34s %3d %5d %8d  %s", e.kind,
                      e.sys.name().c_str(), e.sys.phase_dim(), e.sys.param_arity(),
                      branch_count(e.sys), box_text(e.sys.phase_box()).c_str());
        out << buf << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// emergence

int cmd_emergence(const Common& c, std::ostream& out) {
    std::string config_text = read_text_file(c.config_path);
    json cfg = parse_json_text(config_text, c.config_path);
    validate_config(cfg);
    SystemSpec sys = system_from_config(cfg);
    ParamPoint a = param_from_config(cfg);
    validate_param(sys, a);
    std::uint64_t seed = effective_seed(c, cfg);
    EmergenceQuery q = emergence_query_from_config(cfg, seed, c.threads);
    q.validate();

    RunManifest m = start_manifest("emergence", c, cfg, seed, config_text);
    m.notes.push_back(kCenterNote);

    EmergenceCurve curve;
    try {
        curve = emergence_curve(sys, a, q);
    } catch (const std::exception& e) {
        fail_manifest(m, c.out_dir, e.what());
        throw;
    }

    CsvTable t;
    t.columns = {"epsilon", "N", "residual", "bootstrap_se"};
    for (const auto& pt : curve.points)
        t.add_row({csv_cell(pt.epsilon), csv_cell((long long)pt.N), csv_cell(pt.residual),
                   csv_cell(pt.bootstrap_se)});
    emit_output(m, c.out_dir, "curve.csv", t.to_string());
    emit_output(m, c.out_dir, "curve.svg", svg_loglog_curve(curve, sys.name()));

    m.result["system"] = sys.name();
    m.result["scaling"] = scaling_name(curve.scaling);
    m.result["slope"] = curve.fit.slope;
    m.result["intercept"] = curve.fit.intercept;
    m.result["r2"] = curve.fit.r2;
    m.result["last_half_slope"] = curve.fit.last_half_slope;
    m.result["n_used"] = curve.n_used;
    m.result["survivor_fraction"] = curve.survivor_fraction;
    m.result["stabilization"] = curve.stabilization;
    m.result["reliable"] = curve.reliable;
    m.result["epsilon_max"] = curve.points.front().epsilon;
    m.result["epsilon_min"] = curve.points.back().epsilon;
    m.result["n_first"] = curve.points.front().N;
    m.result["n_final"] = curve.points.back().N;
    finish_manifest(m, c.out_dir);

    out << "emergence: " << sys.name() << " scaling " << scaling_name(curve.scaling)
        << " slope " << format_double(curve.fit.slope) << " r2 " << format_double(curve.fit.r2)
        << " N " << curve.points.front().N << ".." << curve.points.back().N << "\n";
    out << "note: " << kCenterNote << "\n";
    out << "wrote curve.csv curve.svg manifest.json in " << c.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sinks

int cmd_sinks(const Common& c, std::ostream& out) {
    std::string config_text = read_text_file(c.config_path);
    json cfg = parse_json_text(config_text, c.config_path);
    validate_config(cfg);
    SystemSpec sys = system_from_config(cfg);
    ParamPoint a = param_from_config(cfg);
    validate_param(sys, a);
    std::uint64_t seed = effective_seed(c, cfg);
    json census_cfg = cfg.value("census", json::object());
    int max_period = census_cfg.value("max_period", 2);
    int grid = census_cfg.value("grid", 50);

    RunManifest m = start_manifest("sinks", c, cfg, seed, config_text);

    CensusResult census;
    try {
        census = sink_census(sys, a, max_period, grid, c.threads);
    } catch (const std::exception& e) {
        fail_manifest(m, c.out_dir, e.what());
        throw;
    }

    CsvTable t;
    t.columns = {"period", "x", "y", "class", "m1_re", "m1_im", "m2_re", "m2_im", "det",
                 "area_contracting"};
    for (const auto& orb : census.orbits)
        t.add_row({csv_cell((long long)orb.period), csv_cell(orb.rep().x()),
                   csv_cell(orb.rep().y()), orbit_class_name(orb.cls), csv_cell(orb.m1.real()),
                   csv_cell(orb.m1.imag()), csv_cell(orb.m2.real()), csv_cell(orb.m2.imag()),
                   csv_cell(orb.det), csv_cell((long long)(orb.area_contracting ? 1 : 0))});
    emit_output(m, c.out_dir, "census.csv", t.to_string());

    int basin_samples = census_cfg.value("basin_samples", 0);
    int basin_steps = census_cfg.value("basin_steps", 64);
    if (basin_samples > 0) {
        CsvTable b;
        b.columns = {"x", "y", "period", "fraction"};
        std::uint64_t i = 0;
        for (const auto& s : census.sinks) {
            auto est = basin_measure_estimate(sys, a, s, basin_steps, basin_samples, seed + i++);
            b.add_row({csv_cell(s.rep().x()), csv_cell(s.rep().y()),
                       csv_cell((long long)s.period), csv_cell(est.fraction)});
        }
        emit_output(m, c.out_dir, "basins.csv", b.to_string());
    }

    m.result["system"] = sys.name();
    m.result["orbits"] = census.orbits.size();
    m.result["sinks"] = census.sinks.size();
    m.result["max_period"] = max_period;
    m.result["grid"] = grid;
    m.result["attempts"] = census.diag.attempts;
    m.result["converged"] = census.diag.converged;
    m.result["singular_skips"] = census.diag.singular_skips;
    m.result["escaped"] = census.diag.escaped;
    m.result["divisor_rejects"] = census.diag.divisor_rejects;
    m.result["duplicates"] = census.diag.duplicates;
    finish_manifest(m, c.out_dir);

    out << "sinks: " << sys.name() << " found " << census.sinks.size() << " sink(s) among "
        << census.orbits.size() << " periodic orbit(s) up to period " << max_period << "\n";
    out << "wrote census.csv manifest.json in " << c.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify-parablender

json interval_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

int cmd_verify(const Common& c, int d, int k, double ratio, bool have_d, bool have_k,
               bool have_ratio, std::ostream& out) {
    json cfg;
    std::string config_text;
    if (!c.config_path.empty()) {
        config_text = read_text_file(c.config_path);
        cfg = parse_json_text(config_text, c.config_path);
        if (!cfg.contains("verify"))
            throw UsageError("config: a \"verify\" section is required for this command");
        validate_against_schema(cfg["verify"], config_schema()["properties"]["verify"],
                                ".verify");
        if (!have_d) d = cfg["verify"]["d"].get<int>();
        if (!have_k) k = cfg["verify"]["k"].get<int>();
        if (!have_ratio && cfg["verify"].contains("ratio"))
            ratio = cfg["verify"]["ratio"].get<double>();
        have_ratio = have_ratio || cfg["verify"].contains("ratio");
    } else if (!have_d || !have_k) {
        throw UsageError("verify-parablender needs --d and --k (or a config file)");
    }
    if (!have_ratio) ratio = 2.0 / 3.0;
    if (cfg.is_null())
        cfg = json{{"verify", {{"d", d}, {"k", k}, {"ratio", ratio}}}};

    RunManifest m = start_manifest("verify-parablender", c, cfg, 0, config_text);

    CoverCertificate cert;
    try {
        cert = verify_covered_domain(d, k, ratio);
    } catch (const std::exception& e) {
        fail_manifest(m, c.out_dir, e.what());
        throw;
    }

    json j;
    j["verdict"] = verdict_name(cert.verdict);
    j["d"] = cert.d;
    j["k"] = cert.k;
    j["y_ratio"] = cert.y_ratio;
    j["paper_box_closes"] = cert.paper_box_closes;
    j["x_bound"] = cert.x_bound;
    j["y_bound"] = cert.y_bound;
    j["tried_y_bounds"] = cert.tried_y_bounds;
    j["plus_image"] = interval_json(cert.plus_image);
    j["minus_image"] = interval_json(cert.minus_image);
    j["subdivision_cells"] = cert.subdivision_cells;
    j["certified"]["x"] = json::array();
    j["certified"]["y"] = json::array();
    for (const auto& iv : cert.certified.x) j["certified"]["x"].push_back(interval_json(iv));
    for (const auto& iv : cert.certified.y) j["certified"]["y"].push_back(interval_json(iv));
    j["gap"] = interval_json(cert.gap);
    j["gap_iteration"] = cert.gap_iteration;
    j["fiber_trace"] = json::array();
    for (const auto& fibers : cert.fiber_trace) {
        json row = json::array();
        for (const auto& iv : fibers) row.push_back(interval_json(iv));
        j["fiber_trace"].push_back(row);
    }
    j["detail"] = cert.detail;
    emit_output(m, c.out_dir, "certificate.json", j.dump(2) + "\n");

    std::string txt;
    txt += "parablender covered-domain certificate\n";
    txt += "d=" + std::to_string(cert.d) + " k=" + std::to_string(cert.k) +
           " ratio=" + format_double(cert.y_ratio) + "\n";
    txt += std::string("verdict: ") + verdict_name(cert.verdict) + "\n";
    txt += "detail: " + cert.detail + "\n";
    txt += std::string("unit jet box closes: ") + (cert.paper_box_closes ? "yes" : "no") + "\n";
    if (cert.verdict == CoverVerdict::Covered) {
        txt += "certified box: |x_i| <= " + format_double(cert.x_bound) +
               ", |y_i| <= " + format_double(cert.y_bound) + "\n";
        txt += "interval cells checked: " + std::to_string(cert.subdivision_cells) + "\n";
    }
    if (cert.verdict == CoverVerdict::NotCovered) {
        txt += "fiber gap (" + format_double(cert.gap.lo) + "," + format_double(cert.gap.hi) +
               ") after " + std::to_string(cert.gap_iteration) + " image iterations\n";
    }
    emit_output(m, c.out_dir, "certificate.txt", txt);

    m.result["system"] = "parablender(d=" + std::to_string(d) + ",k=" + std::to_string(k) + ")";
    m.result["verdict"] = verdict_name(cert.verdict);
    m.result["paper_box_closes"] = cert.paper_box_closes;
    m.result["y_bound"] = cert.y_bound;
    finish_manifest(m, c.out_dir);

    out << "verify-parablender: d=" << d << " k=" << k << " ratio=" << format_double(ratio)
        << " verdict " << verdict_name(cert.verdict) << "\n";
    out << "wrote certificate.json certificate.txt manifest.json in " << c.out_dir << "\n";
    switch (cert.verdict) {
        case CoverVerdict::Covered: return 0;
        case CoverVerdict::Inconclusive: return 4;
        case CoverVerdict::NotCovered: return 5;
    }
    return 4;
}

// ---------------------------------------------------------------------------
// orbit

int cmd_orbit(const Common& c, std::ostream& out) {
    std::string config_text = read_text_file(c.config_path);
    json cfg = parse_json_text(config_text, c.config_path);
    validate_config(cfg);
    if (!cfg.contains("orbit"))
        throw UsageError("config: an \"orbit\" section is required for this command");
    SystemSpec sys = system_from_config(cfg);
    ParamPoint a = param_from_config(cfg);
    validate_param(sys, a);
    const json& oc = cfg["orbit"];
    if (int(oc["start"].size()) != sys.phase_dim())
        throw UsageError("config.orbit.start: length must match the phase dimension");
    PhasePoint z0;
    for (std::size_t i = 0; i < oc["start"].size(); ++i) z0.c[i] = oc["start"][i].get<double>();
    int n = oc["n"].get<int>();

    RunManifest m = start_manifest("orbit", c, cfg, effective_seed(c, cfg), config_text);

    Trajectory traj;
    try {
        traj = orbit(sys, a, z0, n);
    } catch (const std::exception& e) {
        fail_manifest(m, c.out_dir, e.what());
        throw;
    }

    CsvTable t;
    t.columns = {"t", "x", "y", "escaped"};
    for (int i = 0; i < traj.n(); ++i) {
        const auto& z = traj.points[i];
        t.add_row({csv_cell((long long)i), csv_cell(z.x()),
                   csv_cell(sys.phase_dim() > 1 ? z.y() : 0.0),
                   csv_cell((long long)(z.escaped ? 1 : 0))});
    }
    emit_output(m, c.out_dir, "orbit.csv", t.to_string());
    emit_output(m, c.out_dir, "orbit.svg",
                svg_orbit_scatter(traj, sys.phase_box(), sys.name()));

    m.result["system"] = sys.name();
    m.result["n"] = traj.n();
    m.result["escaped"] = traj.escaped();
    m.result["escape_time"] = traj.escape_time;
    finish_manifest(m, c.out_dir);

    out << "orbit: " << sys.name() << " n=" << traj.n()
        << (traj.escaped() ? " escaped at t=" + std::to_string(traj.escape_time) : "") << "\n";
    out << "wrote orbit.csv orbit.svg manifest.json in " << c.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report

std::string result_cell(const json& result, const char* key) {
    if (!result.contains(key)) return "";
    const json& v = result[key];
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_number_integer() || v.is_number_unsigned())
        return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    return v.dump();
}

int cmd_report(const std::vector<std::string>& dirs, const Common& c, std::ostream& out,
               std::ostream& err) {
    if (dirs.empty()) throw UsageError("report needs at least one run directory");

    CsvTable t;
    t.columns = {"run", "command", "system", "epsilon_min", "epsilon_max",
                 "n_first", "n_final", "scaling", "sinks", "verdict"};
    for (const auto& dir : dirs) {
        auto path = std::filesystem::path(dir) / "manifest.json";
        json manifest;
        try {
            manifest = load_json_file(path.string());
        } catch (const UsageError& e) {
            err << "report: skipping " << dir << ": " << e.what() << "\n";
            continue;
        }
        if (!manifest.contains("command") || !manifest.contains("result")) {
            err << "report: skipping " << dir << ": manifest lacks command/result\n";
            continue;
        }
        const json& r = manifest["result"];
        t.add_row({dir, manifest["command"].get<std::string>(), result_cell(r, "system"),
                   result_cell(r, "epsilon_min"), result_cell(r, "epsilon_max"),
                   result_cell(r, "n_first"), result_cell(r, "n_final"),
                   result_cell(r, "scaling"), result_cell(r, "sinks"),
                   result_cell(r, "verdict")});
    }
    if (t.rows.empty()) throw DegenerateDataError("report: no readable manifests");

    std::string md = "# emlab combined report\n\n";
    md += "| " ;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        md += t.columns[i] + " |" + (i + 1 < t.columns.size() ? " " : "\n");
    md += "|";
    for (std::size_t i = 0; i < t.columns.size(); ++i) md += " --- |";
    md += "\n";
    for (const auto& row : t.rows) {
        md += "| ";
        for (std::size_t i = 0; i < row.size(); ++i)
            md += (row[i].empty() ? "-" : row[i]) + std::string(" |") +
                  (i + 1 < row.size() ? " " : "\n");
    }

    std::filesystem::create_directories(c.out_dir);
    write_text_file((std::filesystem::path(c.out_dir) / "report.md").string(), md);
    write_text_file((std::filesystem::path(c.out_dir) / "report.csv").string(), t.to_string());
    out << md;
    out << "wrote report.md report.csv in " << c.out_dir << "\n";
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"emergence laboratory: covering numbers, sink censuses, and "
                 "parablender certificates for the built-in systems"};
    app.name("emlab");
    app.require_subcommand(1);

    Common c;
    bool json_mode = false;
    int verify_d = 0, verify_k = 0;
    double verify_ratio = 0.0;
    std::vector<std::string> report_dirs;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", c.config_path, "JSON run configuration");
        if (needs_config) opt->required();
        cmd->add_option("--out", c.out_dir, "output directory (default: current)");
        cmd->add_option("--seed", c.seed, "RNG seed override")
            ->check(CLI::NonNegativeNumber)
            ->each([&](const std::string&) { c.seed_set = true; });
        cmd->add_option("--threads", c.threads, "worker threads")
            ->check(CLI::PositiveNumber);
    };

    auto* systems = app.add_subcommand("systems", "list the built-in system catalogue");
    systems->add_flag("--json", json_mode, "emit the catalogue as JSON");

    auto* emergence = app.add_subcommand("emergence", "estimate an emergence curve");
    add_common(emergence, true);
    auto* sinks = app.add_subcommand("sinks", "run a periodic-orbit census");
    add_common(sinks, true);
    auto* verify = app.add_subcommand("verify-parablender",
                                      "interval-verify the covered-domain property");
    add_common(verify, false);
    auto* optd = verify->add_option("--d", verify_d, "jet order d");
    auto* optk = verify->add_option("--k", verify_k, "parameter count k");
    auto* optr =
        verify->add_option("--ratio", verify_ratio, "vertical contraction ratio (default 2/3)");
    auto* orbit_cmd = app.add_subcommand("orbit", "dump a trajectory as CSV");
    add_common(orbit_cmd, true);
    auto* report = app.add_subcommand("report", "combine run manifests into a summary table");
    report->add_option("dirs", report_dirs, "run directories with manifest.json");
    report->add_option("--out", c.out_dir, "output directory (default: current)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        if (systems->parsed()) return cmd_systems(json_mode, out);
        if (emergence->parsed()) return cmd_emergence(c, out);
        if (sinks->parsed()) return cmd_sinks(c, out);
        if (verify->parsed())
            return cmd_verify(c, verify_d, verify_k, verify_ratio, optd->count() > 0,
                              optk->count() > 0, optr->count() > 0, out);
        if (orbit_cmd->parsed()) return cmd_orbit(c, out);
        if (report->parsed()) return cmd_report(report_dirs, c, out, err);
        err << app.help();
        return 2;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const SaturationError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const DegenerateDataError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const EscapeError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const NoPreimageError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const SingularLocusError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const OutOfDomainError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

int run_cli(const std::vector<std::string>& args) {
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace emlab
