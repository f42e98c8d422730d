#pragma once

#include <stdexcept>

#include "kgmv/grid.hpp"
#include "kgmv/model.hpp"
#include "kgmv/operators.hpp"

namespace kgmv {

struct GaussError : std::runtime_error {
    int iterations;
    double residual;
    GaussError(const std::string& msg, int it, double res)
        : std::runtime_error(msg), iterations(it), residual(res) {}
};

struct GaussSolution {
    ScalarField Phi;
    int iterations = 0;
    double residual = 0.0;  // relative linear-system residual
    double min_Phi = 0.0, max_Phi = 0.0;
};

// The normalized Gauss problem -ΔΦ + u²Φ = u² on the axisymmetric grid,
// assembled in weak form with weight r dr dz: (L_r + diag(w u²)) Φ = w u²,
// Dirichlet-0 outer boundary, no flux across the axis. The system is an
// SPD M-matrix with right-hand side D·1, so the exact discrete solution
// obeys 0 <= Φ <= 1.
struct GaussSystem {
    StencilOp A;
    std::vector<double> rhs;
    std::vector<double> w;
};

GaussSystem build_gauss_system(const ScalarField& u, const CylGrid& g);

// Jacobi-preconditioned CG; throws GaussError on non-convergence.
GaussSolution solve_gauss(const ScalarField& u, const CylGrid& g, double lin_tol = 1e-10);

// Same system through a dense Cholesky factorization; grids up to 64x64.
GaussSolution solve_gauss_direct(const ScalarField& u, const CylGrid& g);

// φ_u = ω Φ_u
ScalarField phi_from_Phi(const ScalarField& Phi, const ModelParams& P);

}  // namespace kgmv
