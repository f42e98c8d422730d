#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgmv/solver.hpp"

namespace kgmv {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat "section.key = value" text. '#' starts a comment; blank lines are
// ignored. Keys are unique; parsing then re-serializing is idempotent.
using FlatConfig = std::map<std::string, std::string>;

FlatConfig parse_config(const std::string& text);
FlatConfig load_config(const std::string& path);
std::string serialize_config(const FlatConfig& c);

std::string format_double(double v);  // shortest text that round-trips

struct RunConfig {
    ModelParams params;
    double r_max = 12.0, z_half = 12.0;
    int nr = 64, nz = 64;
    SolverOptions solver;
    GuessParams guess;
    std::string output_dir = "out";
    unsigned long seed = 12345;

    CylGrid grid() const { return make_grid(r_max, z_half, nr, nz); }

    static RunConfig from_flat(const FlatConfig& c, bool allow_sweep_keys = false);
    FlatConfig to_flat() const;
};

struct SweepSpec {
    std::vector<double> omega_values;
    std::vector<int> k_values;
    double p = 4.0;
    RunConfig base;
    bool resume = false;

    static SweepSpec from_flat(const FlatConfig& c);
};

}  // namespace kgmv
