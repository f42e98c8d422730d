#include "kgmv/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;

namespace kgmv {

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json energy_json(const EnergyBreakdown& e) {
    return {{"dirichlet_u", e.dirichlet_u}, {"gauge_field", e.gauge_field},
            {"coupling", e.coupling},       {"phi_field", e.phi_field},
            {"potential", e.potential},     {"total", e.total}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ConfigError("short write to '" + path + "'");
}

}  // namespace

json report_to_json(const SolveReport& rep, const RunConfig& cfg, const std::string& timestamp) {
    json j;
    j["timestamp"] = timestamp;  // isolated: everything else is deterministic
    j["config"] = json::object();
    for (const auto& [k, v] : cfg.to_flat()) j["config"][k] = v;
    const CylGrid g = cfg.grid();
    j["grid"] = {{"r_max", g.r_max}, {"z_half", g.z_half}, {"nr", g.nr},
                 {"nz", g.nz},       {"hr", g.hr},         {"hz", g.hz}};
    json r;
    r["converged"] = rep.converged;
    r["nontrivial"] = rep.nontrivial;
    r["mode_used"] = rep.mode_used == SolveMode::gradient_flow ? "gradient_flow" : "mountain_pass";
    r["mode_fallback"] = rep.mode_fallback;
    r["iterations"] = rep.iterations;
    r["polish_iterations"] = rep.polish_iterations;
    r["I_value"] = rep.I_value;
    r["grad_norm"] = rep.grad_norm;
    r["residual_z1"] = rep.residual_z1;
    r["residual_z3"] = rep.residual_z3;
    r["residual_z4"] = rep.residual_z4;
    r["u_lp_p"] = rep.u_lp_p;
    r["u_min"] = rep.u_min;
    r["z_asymmetry"] = rep.z_asymmetry;
    r["ps_margin_min"] = rep.ps_margin_min;
    r["t_star"] = rep.t_star;
    r["t_neg"] = rep.t_neg;
    r["energy"] = energy_json(rep.energy);
    r["gauss"] = {{"iterations", rep.gauss_iterations}, {"residual", rep.gauss_residual}};
    json hist = json::array();
    const size_t n = rep.history.size();
    const size_t stride = n > 512 ? (n + 511) / 512 : 1;
    for (size_t m = 0; m < n; m += stride) {
        const auto& h = rep.history[m];
        hist.push_back({h.iteration, h.I, h.grad_norm});
    }
    if (n > 0 && (n - 1) % stride != 0) {
        const auto& h = rep.history.back();
        hist.push_back({h.iteration, h.I, h.grad_norm});
    }
    r["history"] = hist;
    j["result"] = r;
    return j;
}

void write_field_csv(const std::string& path, const ScalarField& f, const CylGrid& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << "r,z,value\n";
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j)
            out << format_double(g.r(i)) << ',' << format_double(g.z(j)) << ','
                << format_double(f(i, j)) << '\n';
    if (!out) throw ConfigError("short write to '" + path + "'");
}

ScalarField read_field_csv(const std::string& path, const CylGrid& g) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing field file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty field file '" + path + "'");
    ScalarField f(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) {
            if (!std::getline(in, line))
                throw ConfigError("field file '" + path + "' truncated");
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos)
                throw ConfigError("field file '" + path + "' malformed");
            f(i, j) = std::stod(line.substr(c2 + 1));
        }
    return f;
}

int cmd_solve_run(const RunConfig& cfg, const std::string& out_dir) {
    const auto bad = validate(cfg.params);
    if (!bad.empty()) {
        for (const auto& m : bad) std::cerr << "invalid parameters: " << m << "\n";
        return 1;
    }
    const CylGrid g = cfg.grid();
    SolveReport rep = solve_vortex(cfg.params, g, cfg.solver, cfg.guess);

    fs::create_directories(out_dir);
    const json j = report_to_json(rep, cfg, utc_timestamp());
    write_text((fs::path(out_dir) / "report.json").string(), j.dump(2) + "\n");
    write_field_csv((fs::path(out_dir) / "u.csv").string(), rep.state.u, g);
    write_field_csv((fs::path(out_dir) / "b.csv").string(), rep.state.b, g);
    ScalarField phi = phi_from_Phi(rep.Phi, cfg.params);
    write_field_csv((fs::path(out_dir) / "phi.csv").string(), phi, g);
    std::ostringstream en;
    en << "part,value\n";
    en << "dirichlet_u," << format_double(rep.energy.dirichlet_u) << "\n";
    en << "gauge_field," << format_double(rep.energy.gauge_field) << "\n";
    en << "coupling," << format_double(rep.energy.coupling) << "\n";
    en << "phi_field," << format_double(rep.energy.phi_field) << "\n";
    en << "potential," << format_double(rep.energy.potential) << "\n";
    en << "total," << format_double(rep.energy.total) << "\n";
    write_text((fs::path(out_dir) / "energy.csv").string(), en.str());
    return rep.converged ? 0 : 2;
}

namespace {

int cmd_solve(const std::string& config_path, const std::string& out_override) {
    RunConfig cfg = RunConfig::from_flat(load_config(config_path));
    const std::string out = out_override.empty() ? cfg.output_dir : out_override;
    return cmd_solve_run(cfg, out);
}

std::string point_dir_name(double omega, int k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "w%g_k%d", omega, k);
    return buf;
}

struct SweepRow {
    double omega = 0.0;
    int k = 0;
    bool converged = false;
    bool failed = false;
    std::string error;
    double I = 0.0, total = 0.0, z1 = 0.0, z3 = 0.0, z4 = 0.0, ulp = 0.0;
};

SweepRow row_from_report(const json& j, double omega, int k) {
    SweepRow row;
    row.omega = omega;
    row.k = k;
    const auto& r = j.at("result");
    row.converged = r.at("converged").get<bool>();
    row.I = r.at("I_value").get<double>();
    row.total = r.at("energy").at("total").get<double>();
    row.z1 = r.at("residual_z1").get<double>();
    row.z3 = r.at("residual_z3").get<double>();
    row.z4 = r.at("residual_z4").get<double>();
    row.ulp = r.at("u_lp_p").get<double>();
    return row;
}

int cmd_sweep(const std::string& sweep_path, const std::string& out_override, int workers) {
    SweepSpec sw = SweepSpec::from_flat(load_config(sweep_path));
    const std::string root = out_override.empty() ? sw.base.output_dir : out_override;

    struct Point {
        double omega;
        int k;
    };
    std::vector<Point> points;
    for (double om : sw.omega_values)
        for (int k : sw.k_values) points.push_back({om, k});

    for (const auto& pt : points) {
        ModelParams P = sw.base.params;
        P.omega = pt.omega;
        P.k = pt.k;
        const auto bad = validate(P);
        if (!bad.empty()) {
            std::cerr << "sweep point (" << pt.omega << ", " << pt.k
                      << ") invalid: " << bad.front() << "\n";
            return 1;
        }
    }
    fs::create_directories(root);

    std::vector<SweepRow> rows(points.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t m = next.fetch_add(1);
            if (m >= points.size()) return;
            const auto& pt = points[m];
            RunConfig cfg = sw.base;
            cfg.params.omega = pt.omega;
            cfg.params.k = pt.k;
            const fs::path dir = fs::path(root) / point_dir_name(pt.omega, pt.k);
            const fs::path report = dir / "report.json";
            try {
                if (sw.resume && fs::exists(report)) {
                    std::ifstream in(report);
                    json j = json::parse(in);
                    rows[m] = row_from_report(j, pt.omega, pt.k);
                    continue;  // resume: leave completed points untouched
                }
                cfg.output_dir = dir.string();
                cmd_solve_run(cfg, dir.string());
                std::ifstream in(report);
                json j = json::parse(in);
                rows[m] = row_from_report(j, pt.omega, pt.k);
            } catch (const std::exception& ex) {
                rows[m].omega = pt.omega;
                rows[m].k = pt.k;
                rows[m].failed = true;
                rows[m].error = ex.what();
            }
        }
    };
    const int nw = std::max(1, workers);
    std::vector<std::thread> pool;
    for (int t = 1; t < nw; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::ostringstream out;
    out << "omega,k,converged,I,total_energy,residual_z1,residual_z3,residual_z4,u_lp_p\n";
    bool all_ok = true;
    for (const auto& row : rows) {
        if (row.failed) {
            all_ok = false;
            out << format_double(row.omega) << ',' << row.k << ",error,,,,,,\n";
            std::cerr << "sweep point (" << row.omega << ", " << row.k
                      << ") failed: " << row.error << "\n";
            continue;
        }
        all_ok = all_ok && row.converged;
        out << format_double(row.omega) << ',' << row.k << ','
            << (row.converged ? "true" : "false") << ',' << format_double(row.I) << ','
            << format_double(row.total) << ',' << format_double(row.z1) << ','
            << format_double(row.z3) << ',' << format_double(row.z4) << ','
            << format_double(row.ulp) << '\n';
    }
    write_text((fs::path(root) / "summary.csv").string(), out.str());
    return all_ok ? 0 : 2;
}

ScalarField analytic_field(const CylGrid& g, double (*f)(double, double)) {
    ScalarField out(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) out(i, j) = f(g.r(i), g.z(j));
    return out;
}

int cmd_verify(const std::string& suite, unsigned long seed, const std::string& out_dir) {
    std::vector<CheckReport> reports;
    const bool all = suite == "all";
    if (!all && suite != "gauss" && suite != "palla" && suite != "gauge" && suite != "forms") {
        std::cerr << "unknown suite '" << suite
                  << "'; expected one of: all, gauss, palla, gauge, forms\n";
        return 1;
    }
    if (all || suite == "gauss") {
        reports.push_back(check_max_principle(50, make_grid(12, 12, 64, 64), seed));
        reports.push_back(check_gauss_oracle(make_grid(10, 10, 48, 48), seed + 1));
    }
    if (all || suite == "palla") {
        const CylGrid g = make_grid(8, 8, 256, 256);
        ScalarField b = analytic_field(
            g, [](double r, double z) { return r * r * std::exp(-r * r - z * z); });
        reports.push_back(check_palla_refinement(b, g, {32, 64, 128}, 6.0));
        ScalarField a =
            analytic_field(g, [](double r, double z) { return r * r * std::exp(-z * z); });
        reports.push_back(check_curlcurl_profile(a, g));
    }
    if (all || suite == "gauge") {
        reports.push_back(check_gauge_inequivalence(0, 1, {0.1, 0.05, 0.025, 0.0125}));
        CheckReport control = check_gauge_inequivalence(1, 1, {0.1, 0.05});
        control.name += "_equal_k";
        reports.push_back(std::move(control));
    }
    if (all || suite == "forms") {
        ModelParams P;
        P.omega = 0.5;
        P.k = 1;
        P.p = 4.0;
        reports.push_back(check_forms_random(10, P, make_grid(12, 12, 64, 64), seed + 2));
    }

    fs::create_directories(out_dir);
    bool ok = true;
    for (const auto& rep : reports) {
        const fs::path path = fs::path(out_dir) / ("check_" + rep.name + ".json");
        write_text(path.string(), rep.to_json().dump(2) + "\n");
        std::cout << (rep.pass ? "PASS " : "FAIL ") << rep.name << "\n";
        ok = ok && rep.pass;
    }
    return ok ? 0 : 2;
}

int cmd_export(const std::string& report_dir, const std::string& what,
               const std::string& out_override) {
    const fs::path dir(report_dir);
    const fs::path report = dir / "report.json";
    if (!fs::exists(report)) {
        std::cerr << "missing report: " << report << "\n";
        return 1;
    }
    std::ifstream in(report);
    json j = json::parse(in);
    const auto& gj = j.at("grid");
    const CylGrid g = make_grid(gj.at("r_max").get<double>(), gj.at("z_half").get<double>(),
                                gj.at("nr").get<int>(), gj.at("nz").get<int>());
    const fs::path out_dir = out_override.empty() ? dir : fs::path(out_override);
    fs::create_directories(out_dir);

    auto write_vec_csv = [&](const std::string& path, const char* h1, const char* h2,
                             const ScalarField& fr, const ScalarField& fz) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + path + "'");
        out << "r,z," << h1 << ',' << h2 << ",magnitude\n";
        for (int i = 0; i < g.nr; ++i)
            for (int jz = 0; jz < g.nz; ++jz)
                out << format_double(g.r(i)) << ',' << format_double(g.z(jz)) << ','
                    << format_double(fr(i, jz)) << ',' << format_double(fz(i, jz)) << ','
                    << format_double(std::hypot(fr(i, jz), fz(i, jz))) << '\n';
    };

    if (what == "fields") {
        ScalarField u = read_field_csv((dir / "u.csv").string(), g);
        ScalarField b = read_field_csv((dir / "b.csv").string(), g);
        ScalarField phi = read_field_csv((dir / "phi.csv").string(), g);
        std::ofstream out((out_dir / "fields.csv").string(), std::ios::binary);
        out << "r,z,u,b,phi\n";
        for (int i = 0; i < g.nr; ++i)
            for (int jz = 0; jz < g.nz; ++jz)
                out << format_double(g.r(i)) << ',' << format_double(g.z(jz)) << ','
                    << format_double(u(i, jz)) << ',' << format_double(b(i, jz)) << ','
                    << format_double(phi(i, jz)) << '\n';
        return 0;
    }
    if (what == "hfield") {
        // H = ∇×(b∇θ): H_r = b_z/r, H_z = -b_r/r under the ∇θ orientation
        ScalarField b = read_field_csv((dir / "b.csv").string(), g);
        auto [br, bz] = grad2d(ghost_extend(b, g, AxisParity::odd), g);
        ScalarField Hr(g), Hz(g);
        for (int i = 0; i < g.nr; ++i)
            for (int jz = 0; jz < g.nz; ++jz) {
                Hr(i, jz) = bz(i, jz) / g.r(i);
                Hz(i, jz) = -br(i, jz) / g.r(i);
            }
        write_vec_csv((out_dir / "hfield.csv").string(), "H_r", "H_z", Hr, Hz);
        return 0;
    }
    if (what == "efield") {
        ScalarField phi = read_field_csv((dir / "phi.csv").string(), g);
        auto [pr, pz] = grad2d(ghost_extend(phi, g, AxisParity::even), g);
        ScalarField Er(g), Ez(g);
        for (int i = 0; i < g.nr; ++i)
            for (int jz = 0; jz < g.nz; ++jz) {
                Er(i, jz) = -pr(i, jz);
                Ez(i, jz) = -pz(i, jz);
            }
        write_vec_csv((out_dir / "efield.csv").string(), "E_r", "E_z", Er, Ez);
        return 0;
    }
    std::cerr << "unknown export kind '" << what << "'; expected fields, hfield or efield\n";
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"kgmv: axisymmetric Klein-Gordon-Maxwell vortex solver"};
    app.require_subcommand(1);

    std::string config_path, out_dir, suite = "all", export_dir, export_what;
    unsigned long seed = 20240901;
    int workers = 1;

    auto* solve = app.add_subcommand("solve", "solve one configuration");
    solve->add_option("--config", config_path, "flat key=value config file")->required();
    solve->add_option("--out", out_dir, "output directory (overrides output_dir)");

    auto* sweep = app.add_subcommand("sweep", "run an (omega, k) parameter sweep");
    sweep->add_option("--config", config_path, "sweep spec file")->required();
    sweep->add_option("--out", out_dir, "output root (overrides output_dir)");
    sweep->add_option("--workers", workers, "concurrent solve workers");

    auto* verify = app.add_subcommand("verify", "run the verification checks");
    verify->add_option("--suite", suite, "all | gauss | palla | gauge | forms");
    verify->add_option("--seed", seed, "seed for randomized checks");
    verify->add_option("--out", out_dir, "directory for per-check JSON reports");

    auto* exp = app.add_subcommand("export", "derive plot-ready fields from a solve");
    exp->add_option("dir", export_dir, "report directory from a solve")->required();
    exp->add_option("what", export_what, "fields | hfield | efield")->required();
    exp->add_option("--out", out_dir, "output directory (default: report dir)");

    std::vector<std::string> argv_s;
    argv_s.push_back("kgmv");
    argv_s.insert(argv_s.end(), args.begin(), args.end());
    std::vector<char*> argv;
    argv.reserve(argv_s.size());
    for (auto& s : argv_s) argv.push_back(s.data());

    try {
        app.parse((int)argv.size(), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (solve->parsed()) return cmd_solve(config_path, out_dir);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir, workers);
        if (verify->parsed())
            return cmd_verify(suite, seed, out_dir.empty() ? "verify_out" : out_dir);
        if (exp->parsed()) return cmd_export(export_dir, export_what, out_dir);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace kgmv
