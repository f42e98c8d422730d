#include "kgmv/gauss.hpp"

#include <algorithm>
#include <cmath>

namespace kgmv {

GaussSystem build_gauss_system(const ScalarField& u, const CylGrid& g) {
    require_on_grid(u, g, "solve_gauss");
    if (!all_finite(u)) throw GaussError("solve_gauss: u has non-finite entries", 0, 0.0);
    GaussSystem sys;
    sys.A = stiffness_r(g, /*axis_pin=*/false);
    sys.w = volume_weights(g);
    sys.rhs.resize(sys.w.size());
    for (size_t s = 0; s < sys.w.size(); ++s) {
        const double m = sys.w[s] * u.v[s] * u.v[s];
        sys.A.bnd[s] += m;
        sys.rhs[s] = m;
    }
    sys.A.finalize();
    return sys;
}

namespace {

// The assembled system is an M-matrix with right-hand side D·1, so the
// exact solution lies in [0, 1]; excursions can only come from the linear
// solver, bounded here by the requested tolerance.
GaussSolution finish(const CylGrid& g, std::vector<double>&& phi, int iters, double res,
                     double lin_tol) {
    GaussSolution out;
    out.Phi = ScalarField(g);
    out.Phi.v = std::move(phi);
    out.iterations = iters;
    out.residual = res;
    auto [mn, mx] = std::minmax_element(out.Phi.v.begin(), out.Phi.v.end());
    out.min_Phi = *mn;
    out.max_Phi = *mx;
    const double bound = std::max(1e-10, 1e3 * lin_tol);
    if (out.min_Phi < -bound || out.max_Phi > 1.0 + bound)
        throw GaussError("solve_gauss: discrete maximum principle violated", iters, res);
    return out;
}

}  // namespace

GaussSolution solve_gauss(const ScalarField& u, const CylGrid& g, double lin_tol) {
    if (!(lin_tol > 0.0)) throw GaussError("solve_gauss: lin_tol must be positive", 0, 0.0);
    GaussSystem sys = build_gauss_system(u, g);
    std::vector<double> x(sys.rhs.size(), 0.0);
    const int max_iters = 20 * g.cells() + 200;
    CgResult cg = cg_solve(sys.A, sys.rhs, x, lin_tol, max_iters);
    if (!cg.converged)
        throw GaussError("solve_gauss: CG failed to reach tolerance", cg.iterations,
                         cg.rel_residual);
    return finish(g, std::move(x), cg.iterations, cg.rel_residual, lin_tol);
}

GaussSolution solve_gauss_direct(const ScalarField& u, const CylGrid& g) {
    GaussSystem sys = build_gauss_system(u, g);
    std::vector<double> x = dense_cholesky_solve(sys.A, sys.rhs);
    // report the true relative residual of the factored solve
    std::vector<double> ax(x.size());
    apply_stencil(sys.A, x.data(), ax.data());
    double rn = 0.0, bn = 0.0;
    for (size_t s = 0; s < x.size(); ++s) {
        const double d = sys.rhs[s] - ax[s];
        rn += d * d;
        bn += sys.rhs[s] * sys.rhs[s];
    }
    const double rel = bn > 0.0 ? std::sqrt(rn / bn) : 0.0;
    return finish(g, std::move(x), 0, rel, 1e-12);
}

ScalarField phi_from_Phi(const ScalarField& Phi, const ModelParams& P) {
    ScalarField phi = Phi;
    for (double& v : phi.v) v *= P.omega;
    return phi;
}

}  // namespace kgmv
