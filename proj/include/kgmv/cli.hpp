#pragma once

#include <string>
#include <vector>

#include "kgmv/config.hpp"
#include "kgmv/verify.hpp"

namespace kgmv {

// Subcommands: solve, sweep, verify, export. Returns the process exit code:
// 0 success (solve: converged; verify: all checks pass), 2 solver
// non-convergence or failed checks, 1 usage/config/IO errors.
int run_cli(const std::vector<std::string>& args);

// Building blocks shared by the subcommands and exercised directly in tests.
json report_to_json(const SolveReport& rep, const RunConfig& cfg, const std::string& timestamp);
void write_field_csv(const std::string& path, const ScalarField& f, const CylGrid& g);
ScalarField read_field_csv(const std::string& path, const CylGrid& g);
int cmd_solve_run(const RunConfig& cfg, const std::string& out_dir);

}  // namespace kgmv
