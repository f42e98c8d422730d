#pragma once

#include <vector>

// Data-parallel kernels on nr x nz structured grids (row-major, z fastest).
// Reductions accumulate one partial per radial row and add the partials in
// fixed serial order, so results are bitwise identical for any OpenMP
// thread count. Serial reference versions live in kgmv::serial; tests and
// tools/bench_kernels compare the two.

namespace kgmv {

// Symmetric 5-point operator:
//   (L x)_ij = diag_ij x_ij - cr_{i-1,j} x_{i-1,j} - cr_{i,j} x_{i+1,j}
//                           - cz_{i,j-1} x_{i,j-1} - cz_{i,j} x_{i,j+1}
// diag = bnd + sum of adjacent couplings. All couplings and bnd are
// required nonnegative, so L is an M-matrix with x^T L x >= 0.
struct StencilOp {
    int nr = 0, nz = 0;
    std::vector<double> cr;    // (nr-1)*nz, face (i,j)-(i+1,j)
    std::vector<double> cz;    // nr*(nz-1), face (i,j)-(i,j+1)
    std::vector<double> bnd;   // nr*nz, boundary-face diagonal extras
    std::vector<double> diag;  // nr*nz, cached in finalize()

    void init(int nr_, int nz_);
    void finalize();  // builds diag; throws if any coefficient is negative

    int cells() const { return nr * nz; }
    int idx(int i, int j) const { return i * nz + j; }
};

void apply_stencil(const StencilOp& L, const double* x, double* y);

// x^T L x accumulated face by face; every addend is a square, so the
// result cannot go negative through cancellation.
double quadform(const StencilOp& L, const double* x);

double dot(const double* a, const double* b, int nr, int nz);
double dot3(const double* a, const double* b, const double* c, int nr, int nz);
double sum(const double* a, int nr, int nz);

namespace serial {
void apply_stencil(const StencilOp& L, const double* x, double* y);
double quadform(const StencilOp& L, const double* x);
double dot(const double* a, const double* b, int nr, int nz);
double dot3(const double* a, const double* b, const double* c, int nr, int nz);
double sum(const double* a, int nr, int nz);
}  // namespace serial

}  // namespace kgmv
