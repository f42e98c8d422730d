#pragma once

#include <vector>

#include "kgmv/grid.hpp"
#include "kgmv/kernels.hpp"

namespace kgmv {

// Face-based quadratic forms for the Dirichlet energies:
//   x^T L x ~ ∫ |∇x|² dV                      (stiffness_r, weight r)
//   x^T L x ~ 2π ∬ (x_r² + x_z²)/r dr dz      (stiffness_gauge, weight 1/r)
// Outer boundaries are homogeneous Dirichlet via half-cell fluxes. For the
// r-weighted form the axis face carries weight r -> 0, so no flux crosses
// r = 0; with axis_pin an extra half-cell Dirichlet term (weight r at the
// half-cell midpoint) biases the first column toward zero. The gauge form
// always pins b -> 0 at the axis, where the 1/r weight is taken at r = hr/4.
StencilOp stiffness_r(const CylGrid& g, bool axis_pin = false);
StencilOp stiffness_gauge(const CylGrid& g);

// w_ij = 2π r_i hr hz, the quadrature weight of ∫ . dV.
std::vector<double> volume_weights(const CylGrid& g);

struct CgResult {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

// Jacobi-preconditioned conjugate gradients on L x = rhs. Stops when
// ||rhs - L x||_2 <= tol ||rhs||_2. x is both the initial guess and the
// result. Fixed iteration order and deterministic reductions make repeated
// solves bitwise identical.
CgResult cg_solve(const StencilOp& L, const std::vector<double>& rhs, std::vector<double>& x,
                  double tol, int max_iters);

// Symmetric banded Cholesky factorization of a StencilOp (bandwidth nz).
// Used where a factor-once/solve-many direct solver pays off.
class BandCholesky {
  public:
    explicit BandCholesky(const StencilOp& L);
    void solve(std::vector<double>& b) const;  // in place
    int n() const { return n_; }

  private:
    int n_ = 0, bw_ = 0;
    std::vector<double> f_;  // row-major, f_(i, d) = factor entry (i, i-bw+d)
};

// Dense Cholesky solve of L x = rhs, building the full matrix. Oracle-grade
// direct solver for small grids; throws if L has more than 4096 cells.
std::vector<double> dense_cholesky_solve(const StencilOp& L, const std::vector<double>& rhs);

}  // namespace kgmv
