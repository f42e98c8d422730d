#pragma once

#include <array>
#include <utility>

#include "kgmv/gauss.hpp"
#include "kgmv/grid.hpp"
#include "kgmv/model.hpp"
#include "kgmv/operators.hpp"

namespace kgmv {

// The unknown of the reduced problem: matter amplitude u and gauge profile
// b, with A = b ∇θ. Both live on one grid.
struct VortexState {
    ScalarField u, b;

    VortexState() = default;
    VortexState(ScalarField u_, ScalarField b_) : u(std::move(u_)), b(std::move(b_)) {}
    explicit VortexState(const CylGrid& g) : u(g), b(g) {}
};

struct EnergyBreakdown {
    double dirichlet_u = 0.0;  // ½∫|∇u|²
    double gauge_field = 0.0;  // ½∫|∇A|²
    double coupling = 0.0;     // ½∫(|A-k∇θ|² + (φ-ω)²)u²
    double phi_field = 0.0;    // ½∫|∇φ|²
    double potential = 0.0;    // ∫W(u)
    double total = 0.0;
};

// Everything reduced_I/grad_I/total_energy need, assembled once per grid
// and parameter set. All evaluations are pure; the struct is safe to share
// read-only between threads.
struct Problem {
    CylGrid g;
    ModelParams P;
    double lin_tol = 1e-10;
    bool axis_pin_u = false;  // Dirichlet-flavored axis rule for u (k = 0 default)

    StencilOp Lu;    // r-weighted stiffness for u
    StencilOp Lphi;  // r-weighted stiffness for Φ and φ
    StencilOp Lb;    // 1/r-weighted stiffness for the gauge profile
    std::vector<double> w;       // volume quadrature weights
    std::vector<double> inv_r2;  // 1/r_i² per cell

    Problem(const CylGrid& g_, const ModelParams& P_, double lin_tol_ = 1e-10,
            bool axis_parity_relaxed = false);

    bool needs_gauss() const { return P.omega != 0.0; }
    GaussSolution gauss(const ScalarField& u, const ScalarField* warm_start = nullptr) const;

    // Reduced functional value; reuses a precomputed Φ when provided.
    double value(const VortexState& S, const GaussSolution* gs = nullptr) const;

    // Discrete gradient of the discrete functional under the quadrature
    // inner product; the Φ-dependence contributes no chain-rule term because
    // Φ solves the stationarity system of the same discrete functional.
    void gradient(const VortexState& S, ScalarField& gu, ScalarField& gb,
                  const GaussSolution* gs = nullptr) const;

    double inner(const ScalarField& a, const ScalarField& b) const;  // ⟨a,b⟩_w
    double norm(const ScalarField& a) const;
    double grad_norm(const ScalarField& gu, const ScalarField& gb) const;

    EnergyBreakdown energy(const VortexState& S, const GaussSolution* gs = nullptr) const;
    std::array<double, 3> strong_residuals(const ScalarField& u, const ScalarField& Phi,
                                           const ScalarField& b) const;

    // min over the grid of the Palais-Smale cell inequality margin
    //   W(u) - W'(u)u/p + (φ-ω)²u²/p - ω(ω-φ)u²/2 - C_* u²  with φ = ωΦ.
    double ps_margin_min(const ScalarField& u, const ScalarField& Phi) const;
};

// One-shot entry points; each constructs the Problem internally.
double reduced_I(const VortexState& S, const ModelParams& P, const CylGrid& g,
                 double lin_tol = 1e-10);
std::pair<ScalarField, ScalarField> grad_I(const VortexState& S, const ModelParams& P,
                                           const CylGrid& g, double lin_tol = 1e-10);
std::array<double, 3> residuals(const ScalarField& u, const ScalarField& Phi,
                                const ScalarField& b, const ModelParams& P, const CylGrid& g);
EnergyBreakdown total_energy(const VortexState& S, const ModelParams& P, const CylGrid& g,
                             double lin_tol = 1e-10);

}  // namespace kgmv
