#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kgmv/cli.hpp"

using namespace kgmv;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("kgmv_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// fast desk-scale configuration for CLI round trips
std::string small_config(double omega, int k, const std::string& out) {
    std::ostringstream cfg;
    cfg << "params.omega = " << omega << "\n";
    cfg << "params.k = " << k << "\n";
    cfg << "params.p = 4\n";
    cfg << "grid.r_max = 12\ngrid.z_half = 12\ngrid.nr = 24\ngrid.nz = 24\n";
    cfg << "solver.mode = mountain_pass\n";
    cfg << "solver.max_iters = 3600\n";
    cfg << "output_dir = " << out << "\n";
    cfg << "seed = 7\n";
    return cfg.str();
}

}  // namespace

TEST_CASE("config parsing and round trips") {
    const std::string text =
        "# comment\nparams.omega = 0.25\nparams.k = 2\n\ngrid.nr = 32 # inline\n";
    FlatConfig c = parse_config(text);
    CHECK(c.at("params.omega") == "0.25");
    CHECK(c.at("params.k") == "2");
    CHECK(c.at("grid.nr") == "32");

    // parse -> serialize -> parse is idempotent
    const std::string canon = serialize_config(c);
    CHECK(serialize_config(parse_config(canon)) == canon);

    CHECK_THROWS_AS(parse_config("no equals sign here"), ConfigError);

    RunConfig rc;
    rc.params.omega = 0.3;
    rc.params.k = 1;
    rc.solver.grad_tol = 2.5e-7;
    RunConfig back = RunConfig::from_flat(rc.to_flat());
    CHECK(back.params.omega == rc.params.omega);
    CHECK(back.solver.grad_tol == rc.solver.grad_tol);
    CHECK(serialize_config(back.to_flat()) == serialize_config(rc.to_flat()));

    FlatConfig bad;
    bad["params.omgea"] = "0.1";  // typo
    CHECK_THROWS_AS(RunConfig::from_flat(bad), ConfigError);
    FlatConfig badnum;
    badnum["params.omega"] = "zero";
    CHECK_THROWS_AS(RunConfig::from_flat(badnum), ConfigError);
}

TEST_CASE("format_double round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, 62.567407523282839, -1e-300, 0.0, 12.0})
        CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("solve subcommand writes its five outputs and is deterministic") {
    const fs::path dir = fresh_dir("solve");
    const fs::path cfg = dir / "run.cfg";
    write_file(cfg, small_config(0.0, 1, (dir / "out").string()));

    const int code = run_cli({"solve", "--config", cfg.string()});
    CHECK(code == 0);
    for (const char* f : {"report.json", "u.csv", "b.csv", "phi.csv", "energy.csv"})
        CHECK(fs::exists(dir / "out" / f));

    // omega = 0 run: φ = ωΦ vanishes identically
    std::ifstream phis(dir / "out" / "phi.csv");
    std::string line;
    std::getline(phis, line);  // header
    while (std::getline(phis, line)) {
        const auto c2 = line.rfind(',');
        CHECK(std::stod(line.substr(c2 + 1)) == 0.0);
    }

    // determinism: identical config in a second directory, byte-identical
    // outputs modulo the timestamp line
    const int code2 = run_cli({"solve", "--config", cfg.string(), "--out",
                               (dir / "out2").string()});
    CHECK(code2 == 0);
    auto strip_ts = [](std::string text) {
        auto j = json::parse(text);
        j.erase("timestamp");
        // the config echo carries output_dir, which differs by design here
        j["config"].erase("output_dir");
        return j.dump(2);
    };
    CHECK(strip_ts(slurp(dir / "out" / "report.json")) ==
          strip_ts(slurp(dir / "out2" / "report.json")));
    CHECK(slurp(dir / "out" / "u.csv") == slurp(dir / "out2" / "u.csv"));
    CHECK(slurp(dir / "out" / "b.csv") == slurp(dir / "out2" / "b.csv"));
}

TEST_CASE("solve subcommand rejects inadmissible parameters and bad paths") {
    const fs::path dir = fresh_dir("badsolve");
    const fs::path cfg = dir / "bad.cfg";
    std::ostringstream text;
    text << "params.omega = 0.9\nparams.k = 1\nparams.p = 3\n";
    text << "grid.nr = 16\ngrid.nz = 16\noutput_dir = " << (dir / "o").string() << "\n";
    write_file(cfg, text.str());
    CHECK(run_cli({"solve", "--config", cfg.string()}) == 1);
    CHECK(run_cli({"solve", "--config", (dir / "missing.cfg").string()}) == 1);
}

TEST_CASE("export derives H and E fields; omega = 0 gives E = 0") {
    const fs::path dir = fresh_dir("export");
    const fs::path cfg = dir / "run.cfg";
    write_file(cfg, small_config(0.0, 1, (dir / "out").string()));
    REQUIRE(run_cli({"solve", "--config", cfg.string()}) == 0);

    CHECK(run_cli({"export", (dir / "out").string(), "fields"}) == 0);
    CHECK(run_cli({"export", (dir / "out").string(), "hfield"}) == 0);
    CHECK(run_cli({"export", (dir / "out").string(), "efield"}) == 0);
    CHECK(fs::exists(dir / "out" / "fields.csv"));
    CHECK(fs::exists(dir / "out" / "hfield.csv"));
    CHECK(fs::exists(dir / "out" / "efield.csv"));

    std::ifstream ef(dir / "out" / "efield.csv");
    std::string line;
    std::getline(ef, line);
    while (std::getline(ef, line)) {
        std::istringstream row(line);
        std::string tok;
        std::getline(row, tok, ',');  // r
        std::getline(row, tok, ',');  // z
        std::getline(row, tok, ',');
        CHECK(std::stod(tok) == 0.0);  // E_r
        std::getline(row, tok, ',');
        CHECK(std::stod(tok) == 0.0);  // E_z
    }
    // hfield magnitudes stay finite
    std::ifstream hf(dir / "out" / "hfield.csv");
    std::getline(hf, line);
    while (std::getline(hf, line)) {
        const auto c = line.rfind(',');
        CHECK(std::isfinite(std::stod(line.substr(c + 1))));
    }

    CHECK(run_cli({"export", (dir / "nowhere").string(), "fields"}) == 1);
    CHECK(run_cli({"export", (dir / "out").string(), "nonsense"}) == 1);
}

TEST_CASE("sweep enumerates the lattice, resumes, and summarizes") {
    const fs::path dir = fresh_dir("sweep");
    const fs::path cfg = dir / "sweep.cfg";
    std::ostringstream text;
    text << "sweep.omega_values = 0\n";
    text << "sweep.k_values = 0,1\n";
    text << "sweep.p = 4\n";
    text << "params.p = 4\n";
    text << "grid.r_max = 12\ngrid.z_half = 12\ngrid.nr = 24\ngrid.nz = 24\n";
    text << "solver.mode = mountain_pass\nsolver.max_iters = 3600\n";
    text << "sweep.resume = true\n";
    text << "output_dir = " << (dir / "grid").string() << "\n";
    write_file(cfg, text.str());

    const int code = run_cli({"sweep", "--config", cfg.string()});
    CHECK(code == 0);
    CHECK(fs::exists(dir / "grid" / "w0_k0" / "report.json"));
    CHECK(fs::exists(dir / "grid" / "w0_k1" / "report.json"));
    CHECK(fs::exists(dir / "grid" / "summary.csv"));
    const std::string summary = slurp(dir / "grid" / "summary.csv");
    CHECK(summary.find("omega,k,converged,I,total_energy") == 0);

    // resume leaves completed points byte-identical
    const std::string before = slurp(dir / "grid" / "w0_k1" / "report.json");
    CHECK(run_cli({"sweep", "--config", cfg.string()}) == 0);
    CHECK(slurp(dir / "grid" / "w0_k1" / "report.json") == before);

    // a concurrent run writes byte-identical reports modulo timestamps
    const int code_w2 = run_cli({"sweep", "--config", cfg.string(), "--out",
                                 (dir / "grid2").string(), "--workers", "2"});
    CHECK(code_w2 == 0);
    auto result_part = [](const fs::path& p) {
        auto j = json::parse(slurp(p));
        return j.at("result").dump();
    };
    CHECK(result_part(dir / "grid" / "w0_k1" / "report.json") ==
          result_part(dir / "grid2" / "w0_k1" / "report.json"));

    // invalid lattice point fails upfront
    std::ostringstream bad;
    bad << "sweep.omega_values = 0,0.9\nsweep.k_values = 1\nsweep.p = 3\nparams.p = 3\n";
    bad << "grid.nr = 16\ngrid.nz = 16\noutput_dir = " << (dir / "bad").string() << "\n";
    write_file(dir / "bad.cfg", bad.str());
    CHECK(run_cli({"sweep", "--config", (dir / "bad.cfg").string()}) == 1);
}

TEST_CASE("verify subcommand writes reports and knows its suites") {
    const fs::path dir = fresh_dir("verify");
    CHECK(run_cli({"verify", "--suite", "gauge", "--out", dir.string()}) == 0);
    CHECK(fs::exists(dir / "check_gauge_inequivalence.json"));
    const json j = json::parse(slurp(dir / "check_gauge_inequivalence.json"));
    CHECK(j.at("pass").get<bool>());

    CHECK(run_cli({"verify", "--suite", "bogus", "--out", dir.string()}) == 1);
}
