#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "emlab/artifacts.hpp"
#include "emlab/cli.hpp"

using namespace emlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = 0;
    std::string out, err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    RunResult r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "emlab_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

void put(const fs::path& p, const std::string& text) { write_text_file(p.string(), text); }

const char* kRotationConfig = R"({
  "system": {"kind": "rotation", "alpha": 0.41421356237309515, "dim": 1},
  "seed": 1,
  "emergence": {
    "n_ladder": [200, 1000],
    "sample_count": 30,
    "epsilons": [0.2, 0.1, 0.05],
    "quantize_cell": 0.01
  },
  "census": {"max_period": 1, "grid": 12}
})";

const char* kPlantedConfig = R"({
  "system": {"kind": "planted-sinks", "n": 3},
  "census": {"max_period": 1, "grid": 30, "basin_steps": 48, "basin_samples": 400}
})";

}  // namespace

TEST_CASE("systems catalogue lists every built-in kind") {
    auto r = run({"systems"});
    CHECK(r.code == 0);
    for (const char* kind : {"henon", "identity", "rotation", "doubling", "parablender-core",
                             "parablender-full", "planted-sinks"})
        CHECK(r.out.find(kind) != std::string::npos);

    auto rj = run({"systems", "--json"});
    CHECK(rj.code == 0);
    json arr = json::parse(rj.out);
    REQUIRE(arr.is_array());
    CHECK(arr.size() == 7);
    CHECK(arr[0]["kind"] == "henon");
    CHECK(arr[0]["dim"] == 2);
    CHECK(arr[4]["param_arity"] == 1);
}

TEST_CASE("unknown or missing subcommands exit with the usage code") {
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"emergence"}).code == 2);  // --config is required
    CHECK(run({"emergence", "--config", "/no/such/file.json"}).code == 2);
}

TEST_CASE("emergence run writes curve, svg, and a complete manifest") {
    auto dir = scratch("emergence_rot");
    auto cfgp = dir / "cfg.json";
    put(cfgp, kRotationConfig);
    auto outdir = dir / "runA";

    auto r = run({"emergence", "--config", cfgp.string(), "--out", outdir.string(), "--threads",
                  "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("factor of two") != std::string::npos);

    std::string csv = slurp(outdir / "curve.csv");
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.back() == '\n');
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "epsilon,N,residual,bootstrap_se");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        auto c1 = line.find(',');
        auto c2 = line.find(',', c1 + 1);
        CHECK(line.substr(c1 + 1, c2 - c1 - 1) == "1");  // unique ergodicity: N = 1
    }
    CHECK(rows == 3);

    json manifest = json::parse(slurp(outdir / "manifest.json"));
    CHECK(manifest["status"] == "complete");
    CHECK(manifest["command"] == "emergence");
    CHECK(manifest["seed"] == 1);
    CHECK(manifest["result"]["n_final"] == 1);
    CHECK(manifest["config"]["system"]["kind"] == "rotation");
    REQUIRE(manifest["outputs"].size() == 2);
    for (const auto& entry : manifest["outputs"]) {
        std::string content = slurp(outdir / entry["file"].get<std::string>());
        CHECK(entry["hash"].get<std::string>() == fnv1a_tag(content));
    }

    SUBCASE("rerun reproduces every data output byte for byte") {
        auto outdir2 = dir / "runB";
        auto r2 = run({"emergence", "--config", cfgp.string(), "--out", outdir2.string(),
                       "--threads", "1"});
        CHECK(r2.code == 0);
        CHECK(slurp(outdir2 / "curve.csv") == csv);
        CHECK(slurp(outdir2 / "curve.svg") == slurp(outdir / "curve.svg"));
    }

    SUBCASE("the seed flag overrides the config seed") {
        auto outdir2 = dir / "runC";
        auto r2 = run({"emergence", "--config", cfgp.string(), "--out", outdir2.string(),
                       "--threads", "1", "--seed", "1"});
        CHECK(r2.code == 0);
        CHECK(slurp(outdir2 / "curve.csv") == csv);

        auto outdir3 = dir / "runD";
        auto r3 = run({"emergence", "--config", cfgp.string(), "--out", outdir3.string(),
                       "--threads", "1", "--seed", "99"});
        CHECK(r3.code == 0);
        CHECK(slurp(outdir3 / "curve.csv") != csv);
        json m3 = json::parse(slurp(outdir3 / "manifest.json"));
        CHECK(m3["seed"] == 99);
    }
}

TEST_CASE("degenerate clouds exit 3 and leave a failed manifest with no data files") {
    auto dir = scratch("emergence_degenerate");
    auto cfgp = dir / "cfg.json";
    put(cfgp, R"({
      "system": {"kind": "henon", "a": 10.0, "b": 0.3},
      "emergence": {"n_ladder": [50], "sample_count": 20, "epsilons": [0.2, 0.1]}
    })");
    auto outdir = dir / "run";
    auto r = run({"emergence", "--config", cfgp.string(), "--out", outdir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("escaped") != std::string::npos);
    json manifest = json::parse(slurp(outdir / "manifest.json"));
    CHECK(manifest["status"] == "failed");
    CHECK_FALSE(fs::exists(outdir / "curve.csv"));
}

TEST_CASE("config schema violations are rejected with exit 2") {
    auto dir = scratch("schema");
    auto bad = [&](const std::string& name, const std::string& text) {
        auto p = dir / name;
        put(p, text);
        auto r = run({"emergence", "--config", p.string(), "--out", (dir / "out").string()});
        CHECK(r.code == 2);
        return r.err;
    };
    CHECK(bad("unknown_key.json",
              R"({"system": {"kind": "doubling"}, "wat": 1,
                  "emergence": {"epsilons": [0.1]}})")
              .find("unknown key") != std::string::npos);
    CHECK(bad("bad_kind.json",
              R"({"system": {"kind": "lorenz"}, "emergence": {"epsilons": [0.1]}})")
              .find("allowed set") != std::string::npos);
    bad("neg_eps.json",
        R"({"system": {"kind": "doubling"}, "emergence": {"epsilons": [-0.1]}})");
    bad("no_alpha.json",
        R"({"system": {"kind": "rotation"}, "emergence": {"epsilons": [0.1]}})");
    bad("no_emergence.json", R"({"system": {"kind": "doubling"}})");
    bad("not_json.json", "{nope");
}

TEST_CASE("sinks run writes the census and basin tables") {
    auto dir = scratch("sinks_planted");
    auto cfgp = dir / "cfg.json";
    put(cfgp, kPlantedConfig);
    auto outdir = dir / "run";
    auto r = run({"sinks", "--config", cfgp.string(), "--out", outdir.string(), "--threads",
                  "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("3 sink(s)") != std::string::npos);

    std::string csv = slurp(outdir / "census.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line ==
          "period,x,y,class,m1_re,m1_im,m2_re,m2_im,det,area_contracting");
    int rows = 0, sink_rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        if (line.find(",sink,") != std::string::npos) ++sink_rows;
    }
    CHECK(rows == 3);
    CHECK(sink_rows == 3);

    std::string basins = slurp(outdir / "basins.csv");
    std::istringstream blines(basins);
    std::getline(blines, line);
    CHECK(line == "x,y,period,fraction");
    int brows = 0;
    while (std::getline(blines, line)) ++brows;
    CHECK(brows == 3);

    json manifest = json::parse(slurp(outdir / "manifest.json"));
    CHECK(manifest["result"]["sinks"] == 3);
    CHECK(manifest["status"] == "complete");
    REQUIRE(manifest["outputs"].size() == 2);

    SUBCASE("rerun is byte-identical") {
        auto outdir2 = dir / "run2";
        auto r2 = run({"sinks", "--config", cfgp.string(), "--out", outdir2.string(),
                       "--threads", "1"});
        CHECK(r2.code == 0);
        CHECK(slurp(outdir2 / "census.csv") == csv);
        CHECK(slurp(outdir2 / "basins.csv") == basins);
    }
}

TEST_CASE("an empty census is a successful finding") {
    auto dir = scratch("sinks_empty");
    auto cfgp = dir / "cfg.json";
    put(cfgp, kRotationConfig);
    auto outdir = dir / "run";
    auto r = run({"sinks", "--config", cfgp.string(), "--out", outdir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("0 sink(s)") != std::string::npos);
    std::string csv = slurp(outdir / "census.csv");
    CHECK(csv == "period,x,y,class,m1_re,m1_im,m2_re,m2_im,det,area_contracting\n");
    CHECK_FALSE(fs::exists(outdir / "basins.csv"));
}

TEST_CASE("verify-parablender maps verdicts onto exit codes") {
    auto dir = scratch("verify");

    auto ok = run({"verify-parablender", "--d", "1", "--k", "1", "--out",
                   (dir / "v11").string()});
    CHECK(ok.code == 0);
    json cert = json::parse(slurp(dir / "v11" / "certificate.json"));
    CHECK(cert["verdict"] == "Covered");
    CHECK(cert["paper_box_closes"] == false);
    CHECK(cert["y_bound"].get<double>() > 1.5);
    CHECK(fs::exists(dir / "v11" / "certificate.txt"));
    json manifest = json::parse(slurp(dir / "v11" / "manifest.json"));
    CHECK(manifest["result"]["verdict"] == "Covered");

    auto gap = run({"verify-parablender", "--d", "1", "--k", "1", "--ratio",
                    "0.3333333333333333", "--out", (dir / "vgap").string()});
    CHECK(gap.code == 5);
    json gcert = json::parse(slurp(dir / "vgap" / "certificate.json"));
    CHECK(gcert["verdict"] == "NotCovered");
    CHECK(gcert["gap_iteration"] == 2);
    CHECK(gcert["gap"][0].get<double>() < 0.0);
    CHECK(gcert["gap"][1].get<double>() > 0.0);

    auto border = run({"verify-parablender", "--d", "1", "--k", "1", "--ratio", "0.5", "--out",
                       (dir / "vb").string()});
    CHECK(border.code == 4);

    auto refuse = run({"verify-parablender", "--d", "3", "--k", "3", "--out",
                       (dir / "v33").string()});
    CHECK(refuse.code == 2);

    SUBCASE("config-file form matches the flag form") {
        auto cfgp = dir / "verify.json";
        put(cfgp, R"({"verify": {"d": 1, "k": 1}})");
        auto rc = run({"verify-parablender", "--config", cfgp.string(), "--out",
                       (dir / "vcfg").string()});
        CHECK(rc.code == 0);
        json c2 = json::parse(slurp(dir / "vcfg" / "certificate.json"));
        CHECK(c2 == cert);
    }

    SUBCASE("flags without d or k are a usage error") {
        CHECK(run({"verify-parablender", "--d", "1"}).code == 2);
    }
}

TEST_CASE("orbit run dumps the trajectory") {
    auto dir = scratch("orbit");
    auto cfgp = dir / "cfg.json";
    put(cfgp, R"({
      "system": {"kind": "doubling"},
      "orbit": {"start": [0.3], "n": 16}
    })");
    auto outdir = dir / "run";
    auto r = run({"orbit", "--config", cfgp.string(), "--out", outdir.string()});
    CHECK(r.code == 0);

    std::string csv = slurp(outdir / "orbit.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "t,x,y,escaped");
    int rows = 0;
    while (std::getline(lines, line)) {
        CHECK(line.substr(0, line.find(',')) == std::to_string(rows));
        CHECK(line.substr(line.rfind(',') + 1) == "0");
        ++rows;
    }
    CHECK(rows == 16);
    CHECK(fs::exists(outdir / "orbit.svg"));

    SUBCASE("start length must match the phase dimension") {
        put(cfgp, R"({
          "system": {"kind": "doubling"},
          "orbit": {"start": [0.3, 0.1], "n": 16}
        })");
        CHECK(run({"orbit", "--config", cfgp.string(), "--out", outdir.string()}).code == 2);
    }
}

TEST_CASE("report combines manifests and skips unreadable directories") {
    auto dir = scratch("report");
    auto cfgp = dir / "rot.json";
    put(cfgp, kRotationConfig);
    auto emdir = dir / "em";
    REQUIRE(run({"emergence", "--config", cfgp.string(), "--out", emdir.string()}).code == 0);
    auto plantedp = dir / "planted.json";
    put(plantedp, kPlantedConfig);
    auto skdir = dir / "sk";
    REQUIRE(run({"sinks", "--config", plantedp.string(), "--out", skdir.string()}).code == 0);

    auto repdir = dir / "rep";
    auto r = run({"report", emdir.string(), skdir.string(), (dir / "missing").string(),
                  "--out", repdir.string()});
    CHECK(r.code == 0);
    CHECK(r.err.find("skipping") != std::string::npos);

    std::string csv = slurp(repdir / "report.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line ==
          "run,command,system,epsilon_min,epsilon_max,n_first,n_final,scaling,sinks,verdict");
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].find("emergence") != std::string::npos);
    CHECK(rows[0].find(",1,1,") != std::string::npos);  // N stays 1 on both ends
    CHECK(rows[1].find("sinks") != std::string::npos);
    CHECK(rows[1].find(",3,") != std::string::npos);
    CHECK(slurp(repdir / "report.md").find("| emergence |") != std::string::npos);

    CHECK(run({"report"}).code == 2);
    CHECK(run({"report", (dir / "void").string(), "--out", repdir.string()}).code == 3);
}
