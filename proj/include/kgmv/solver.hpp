#pragma once

#include <stdexcept>
#include <vector>

#include "kgmv/functional.hpp"

namespace kgmv {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SolveMode { gradient_flow, mountain_pass };

struct SolverOptions {
    int max_iters = 20000;
    double grad_tol = 1e-6;   // weighted gradient norm threshold
    double step0 = 1.0;
    double armijo_c = 0.5;
    int path_points = 24;
    double t_max = 100.0;
    SolveMode mode = SolveMode::gradient_flow;

    double lin_tol = 1e-10;        // Gauss solve tolerance
    double trivial_tol = 1e-4;     // on ||u||_p^p
    bool axis_parity_relaxed = false;
    int ray_samples = 48;
    bool polish = true;            // Newton refinement inside solve_vortex
    int polish_max_iters = 50;
    double polish_tol = 1e-11;
    int descend_budget = 800;         // per-stage descend iterations in solve_vortex
    bool allow_mode_fallback = true;  // retry with mountain_pass if gradient_flow lands trivial
};

struct HistoryEntry {
    int iteration;
    double I;
    double grad_norm;
};

struct SolveReport {
    VortexState state;
    ScalarField Phi;
    double I_value = 0.0;
    EnergyBreakdown energy;
    double residual_z1 = 0.0, residual_z3 = 0.0, residual_z4 = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<HistoryEntry> history;

    bool nontrivial = false;
    double u_lp_p = 0.0;  // ||u||_p^p
    double u_min = 0.0;
    double z_asymmetry = 0.0;
    double ps_margin_min = 0.0;
    double t_star = 0.0, t_neg = 0.0;
    int polish_iterations = 0;
    int gauss_iterations = 0;
    double gauss_residual = 0.0;
    SolveMode mode_used = SolveMode::gradient_flow;
    bool mode_fallback = false;
};

struct GuessParams {
    double amplitude = 1.0;
    double width = 2.0;
    double center_r = 1.5;
};

// u = amplitude (r/width)^max(1,|k|) exp(-((r-center_r)² + z²)/width²),
// smoothly clipped at the domain boundary; b = 0.
VortexState initial_guess(const CylGrid& g, const ModelParams& P, double amplitude, double width,
                          double center_r);

struct RayScan {
    double t_star = 0.0;  // smallest maximizer of the sampled I(t u0, 0)
    double t_neg = 0.0;   // smallest sampled t with I < 0
    std::vector<std::pair<double, double>> samples;  // (t, I)
};

// Samples I(t u0, 0) on a log-spaced grid t in (0, t_max]; throws
// SolverError when no sampled value is negative.
RayScan ray_scan(const ScalarField& u0, const ModelParams& P, const CylGrid& g, double t_max,
                 int n_samples, double lin_tol = 1e-10);

// gradient_flow: Armijo-backtracking steepest descent on I from S0.
// mountain_pass: path deformation from (0,0) to S0 (requires I(S0) <= 0);
// the path maximum is repeatedly relocated downhill.
SolveReport descend(const VortexState& S0, const ModelParams& P, const CylGrid& g,
                    const SolverOptions& opts);

// Full pipeline: initial_guess -> ray_scan -> descend -> refinement
// (exact b-solve given u, then Newton/MINRES on the gradient) -> post-checks.
SolveReport solve_vortex(const ModelParams& P, const CylGrid& g, const SolverOptions& opts,
                         const GuessParams& guess = {});

// Conditional gauge minimizer: solves (L_b + diag(w u²/r²)) b = k w u²/r².
ScalarField relax_gauge(const ScalarField& u, const ModelParams& P, const CylGrid& g,
                        bool axis_parity_relaxed = false);

}  // namespace kgmv
