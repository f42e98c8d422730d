#include <doctest.h>

#include <cmath>
#include <random>

#include "kgmv/gauss.hpp"
#include "kgmv/verify.hpp"

using namespace kgmv;

TEST_CASE("zero source gives zero potential") {
    const CylGrid g = make_grid(6.0, 6.0, 24, 24);
    ScalarField u(g);
    GaussSolution gs = solve_gauss(u, g);
    for (double v : gs.Phi.v) CHECK(v == 0.0);
    CHECK(gs.residual == 0.0);
}

TEST_CASE("iterative solve matches the dense direct oracle on a bump") {
    const CylGrid g = make_grid(10.0, 10.0, 32, 32);
    ScalarField u(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) {
            const double r = g.r(i), z = g.z(j);
            u(i, j) = 1.5 * std::exp(-((r - 1.0) * (r - 1.0) + z * z));
        }
    GaussSolution cg = solve_gauss(u, g, 1e-12);
    GaussSolution dir = solve_gauss_direct(u, g);
    double num = 0.0, den = 0.0;
    for (size_t s = 0; s < u.v.size(); ++s) {
        num += (cg.Phi.v[s] - dir.Phi.v[s]) * (cg.Phi.v[s] - dir.Phi.v[s]);
        den += dir.Phi.v[s] * dir.Phi.v[s];
    }
    CHECK(std::sqrt(num / den) < 1e-8);
    CHECK(dir.residual < 1e-12);
}

TEST_CASE("maximum principle bounds hold for nonnegative sources") {
    const CylGrid g = make_grid(8.0, 8.0, 40, 40);
    std::mt19937 rng(321);
    for (int trial = 0; trial < 5; ++trial) {
        ScalarField u = random_smooth_field(g, rng, 3, trial == 0 ? 100.0 : 1.0, true);
        GaussSolution gs = solve_gauss(u, g, 1e-12);
        double mn = 1e300, mx = -1e300;
        for (double v : gs.Phi.v) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        CHECK(mn >= -1e-10);
        CHECK(mx <= 1.0 + 1e-10);
        if (trial == 0) CHECK(mx > 0.9);  // large amplitude pushes Φ toward 1
    }
}

TEST_CASE("repeated solves are bitwise identical; Phi depends on u only through u^2") {
    const CylGrid g = make_grid(6.0, 6.0, 28, 28);
    std::mt19937 rng(7);
    ScalarField u = random_smooth_field(g, rng, 2, 2.0, true);
    GaussSolution a = solve_gauss(u, g);
    GaussSolution b = solve_gauss(u, g);
    ScalarField neg = u;
    for (auto& v : neg.v) v = -v;
    GaussSolution c = solve_gauss(neg, g);
    for (size_t s = 0; s < u.v.size(); ++s) {
        CHECK(a.Phi.v[s] == b.Phi.v[s]);
        CHECK(a.Phi.v[s] == c.Phi.v[s]);
    }
    CHECK(a.min_Phi >= -1e-10);
    CHECK(a.max_Phi <= 1.0 + 1e-10);
}

TEST_CASE("discrete energy identity from the weak form") {
    // ∫u²Φ = ∫|∇Φ|² + ∫u²Φ² up to the linear tolerance
    const CylGrid g = make_grid(8.0, 8.0, 48, 48);
    std::mt19937 rng(99);
    ScalarField u = random_smooth_field(g, rng, 3, 1.5, true);
    const double lin_tol = 1e-11;
    GaussSolution gs = solve_gauss(u, g, lin_tol);

    const StencilOp L = stiffness_r(g, false);
    const auto w = volume_weights(g);
    double lhs = 0.0, rhs = quadform(L, gs.Phi.data());
    for (size_t s = 0; s < w.size(); ++s) {
        const double u2 = u.v[s] * u.v[s];
        lhs += w[s] * u2 * gs.Phi.v[s];
        rhs += w[s] * u2 * gs.Phi.v[s] * gs.Phi.v[s];
    }
    CHECK(std::abs(lhs - rhs) / std::abs(lhs) <= std::max(10.0 * lin_tol, 1e-8));
}

TEST_CASE("phi_from_Phi scales by omega") {
    const CylGrid g = make_grid(4.0, 4.0, 8, 8);
    ScalarField Phi(g, 1.0);
    ModelParams P;
    P.omega = 0.0;
    for (double v : phi_from_Phi(Phi, P).v) CHECK(v == 0.0);
    P.omega = 0.5;
    for (double v : phi_from_Phi(Phi, P).v) CHECK(v == doctest::Approx(0.5));
    P.omega = -0.3;
    ScalarField Phi2(g, 2.0);
    for (double v : phi_from_Phi(Phi2, P).v) CHECK(v == doctest::Approx(-0.6));
}

TEST_CASE("direct solver refuses grids beyond the oracle range") {
    const CylGrid g = make_grid(8.0, 8.0, 80, 80);
    ScalarField u(g, 0.5);
    CHECK_THROWS_AS(solve_gauss_direct(u, g), std::invalid_argument);
}

TEST_CASE("non-finite input is rejected") {
    const CylGrid g = make_grid(4.0, 4.0, 8, 8);
    ScalarField u(g);
    u(2, 2) = std::nan("");
    CHECK_THROWS_AS(solve_gauss(u, g), GaussError);
}
