#include "kgmv/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace kgmv {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const FlatConfig& c, const std::string& key, double dflt) {
    auto it = c.find(key);
    if (it == c.end()) return dflt;
    try {
        size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ConfigError("config: bad number for " + key + ": '" + it->second + "'");
    }
}

long to_long(const FlatConfig& c, const std::string& key, long dflt) {
    auto it = c.find(key);
    if (it == c.end()) return dflt;
    try {
        size_t pos = 0;
        long v = std::stol(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ConfigError("config: bad integer for " + key + ": '" + it->second + "'");
    }
}

bool to_bool(const FlatConfig& c, const std::string& key, bool dflt) {
    auto it = c.find(key);
    if (it == c.end()) return dflt;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config: bad boolean for " + key + ": '" + it->second + "'");
}

std::string get_str(const FlatConfig& c, const std::string& key, const std::string& dflt) {
    auto it = c.find(key);
    return it == c.end() ? dflt : it->second;
}

const std::set<std::string> run_keys = {
    "params.omega",
    "params.k",
    "params.p",
    "grid.r_max",
    "grid.z_half",
    "grid.nr",
    "grid.nz",
    "solver.max_iters",
    "solver.grad_tol",
    "solver.step0",
    "solver.armijo_c",
    "solver.path_points",
    "solver.t_max",
    "solver.mode",
    "solver.lin_tol",
    "solver.trivial_tol",
    "solver.axis_relaxed",
    "solver.ray_samples",
    "solver.polish",
    "guess.amplitude",
    "guess.width",
    "guess.center_r",
    "output_dir",
    "seed",
};

const std::set<std::string> sweep_keys = {
    "sweep.omega_values", "sweep.k_values", "sweep.p", "sweep.resume", "sweep.workers",
};

}  // namespace

FlatConfig parse_config(const std::string& text) {
    FlatConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " has no '='");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + " has empty key");
        c[key] = val;
    }
    return c;
}

FlatConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const FlatConfig& c) {
    std::ostringstream out;
    for (const auto& [k, v] : c) out << k << " = " << v << "\n";
    return out.str();
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::stod(buf) == v) return buf;
    }
    return buf;
}

RunConfig RunConfig::from_flat(const FlatConfig& c, bool allow_sweep_keys) {
    for (const auto& [k, v] : c) {
        (void)v;
        if (run_keys.count(k)) continue;
        if (allow_sweep_keys && sweep_keys.count(k)) continue;
        throw ConfigError("config: unknown key '" + k + "'");
    }
    RunConfig rc;
    rc.params.omega = to_double(c, "params.omega", rc.params.omega);
    rc.params.k = (int)to_long(c, "params.k", rc.params.k);
    rc.params.p = to_double(c, "params.p", rc.params.p);
    rc.r_max = to_double(c, "grid.r_max", rc.r_max);
    rc.z_half = to_double(c, "grid.z_half", rc.z_half);
    rc.nr = (int)to_long(c, "grid.nr", rc.nr);
    rc.nz = (int)to_long(c, "grid.nz", rc.nz);
    rc.solver.max_iters = (int)to_long(c, "solver.max_iters", rc.solver.max_iters);
    rc.solver.grad_tol = to_double(c, "solver.grad_tol", rc.solver.grad_tol);
    rc.solver.step0 = to_double(c, "solver.step0", rc.solver.step0);
    rc.solver.armijo_c = to_double(c, "solver.armijo_c", rc.solver.armijo_c);
    rc.solver.path_points = (int)to_long(c, "solver.path_points", rc.solver.path_points);
    rc.solver.t_max = to_double(c, "solver.t_max", rc.solver.t_max);
    rc.solver.lin_tol = to_double(c, "solver.lin_tol", rc.solver.lin_tol);
    rc.solver.trivial_tol = to_double(c, "solver.trivial_tol", rc.solver.trivial_tol);
    rc.solver.axis_parity_relaxed = to_bool(c, "solver.axis_relaxed", false);
    rc.solver.ray_samples = (int)to_long(c, "solver.ray_samples", rc.solver.ray_samples);
    rc.solver.polish = to_bool(c, "solver.polish", rc.solver.polish);
    const std::string mode = get_str(c, "solver.mode", "gradient_flow");
    if (mode == "gradient_flow")
        rc.solver.mode = SolveMode::gradient_flow;
    else if (mode == "mountain_pass")
        rc.solver.mode = SolveMode::mountain_pass;
    else
        throw ConfigError("config: solver.mode must be gradient_flow or mountain_pass");
    rc.guess.amplitude = to_double(c, "guess.amplitude", rc.guess.amplitude);
    rc.guess.width = to_double(c, "guess.width", rc.guess.width);
    rc.guess.center_r = to_double(c, "guess.center_r", rc.guess.center_r);
    rc.output_dir = get_str(c, "output_dir", rc.output_dir);
    rc.seed = (unsigned long)to_long(c, "seed", (long)rc.seed);
    return rc;
}

FlatConfig RunConfig::to_flat() const {
    FlatConfig c;
    c["params.omega"] = format_double(params.omega);
    c["params.k"] = std::to_string(params.k);
    c["params.p"] = format_double(params.p);
    c["grid.r_max"] = format_double(r_max);
    c["grid.z_half"] = format_double(z_half);
    c["grid.nr"] = std::to_string(nr);
    c["grid.nz"] = std::to_string(nz);
    c["solver.max_iters"] = std::to_string(solver.max_iters);
    c["solver.grad_tol"] = format_double(solver.grad_tol);
    c["solver.step0"] = format_double(solver.step0);
    c["solver.armijo_c"] = format_double(solver.armijo_c);
    c["solver.path_points"] = std::to_string(solver.path_points);
    c["solver.t_max"] = format_double(solver.t_max);
    c["solver.mode"] =
        solver.mode == SolveMode::gradient_flow ? "gradient_flow" : "mountain_pass";
    c["solver.lin_tol"] = format_double(solver.lin_tol);
    c["solver.trivial_tol"] = format_double(solver.trivial_tol);
    c["solver.axis_relaxed"] = solver.axis_parity_relaxed ? "true" : "false";
    c["solver.ray_samples"] = std::to_string(solver.ray_samples);
    c["solver.polish"] = solver.polish ? "true" : "false";
    c["guess.amplitude"] = format_double(guess.amplitude);
    c["guess.width"] = format_double(guess.width);
    c["guess.center_r"] = format_double(guess.center_r);
    c["output_dir"] = output_dir;
    c["seed"] = std::to_string(seed);
    return c;
}

SweepSpec SweepSpec::from_flat(const FlatConfig& c) {
    SweepSpec sw;
    sw.base = RunConfig::from_flat(c, /*allow_sweep_keys=*/true);
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream in(s);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            tok = trim(tok);
            if (!tok.empty()) out.push_back(tok);
        }
        return out;
    };
    auto it = c.find("sweep.omega_values");
    if (it == c.end()) throw ConfigError("sweep: missing sweep.omega_values");
    for (const auto& t : split(it->second)) sw.omega_values.push_back(std::stod(t));
    it = c.find("sweep.k_values");
    if (it == c.end()) throw ConfigError("sweep: missing sweep.k_values");
    for (const auto& t : split(it->second)) sw.k_values.push_back((int)std::stol(t));
    if (sw.omega_values.empty() || sw.k_values.empty())
        throw ConfigError("sweep: omega_values and k_values must be non-empty");
    sw.p = to_double(c, "sweep.p", sw.base.params.p);
    sw.resume = to_bool(c, "sweep.resume", false);
    sw.base.params.p = sw.p;
    return sw;
}

}  // namespace kgmv
