#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kgmv/grid.hpp"

using namespace kgmv;

namespace {

// adaptive Simpson in 1D, used as an independent quadrature oracle
double adaptive_simpson(double (*f)(double), double a, double b, double tol, int depth = 24) {
    const double m = 0.5 * (a + b);
    auto simpson = [&](double x0, double x1) {
        return (x1 - x0) / 6.0 * (f(x0) + 4.0 * f(0.5 * (x0 + x1)) + f(x1));
    };
    const double whole = simpson(a, b);
    const double left = simpson(a, m), right = simpson(m, b);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) return left + right;
    return adaptive_simpson(f, a, m, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, 0.5 * tol, depth - 1);
}

}  // namespace

TEST_CASE("make_grid spacing and node placement") {
    const CylGrid g = make_grid(12.0, 12.0, 64, 64);
    CHECK(g.hr == doctest::Approx(0.1875));
    CHECK(g.hz == doctest::Approx(0.375));

    const CylGrid s = make_grid(1.0, 1.0, 4, 4);
    CHECK(s.r(0) == doctest::Approx(0.125));
    CHECK(s.r(1) == doctest::Approx(0.375));
    CHECK(s.r(2) == doctest::Approx(0.625));
    CHECK(s.r(3) == doctest::Approx(0.875));
    for (int i = 0; i < s.nr; ++i) CHECK(s.r(i) > 0.0);

    CHECK_THROWS_AS(make_grid(-1.0, 1.0, 4, 4), GridError);
    CHECK_THROWS_AS(make_grid(1.0, 1.0, 3, 4), GridError);
}

TEST_CASE("integrate_volume basics") {
    const CylGrid g = make_grid(1.0, 0.5, 32, 32);
    ScalarField one(g, 1.0);
    CHECK(integrate_volume(one, g) == doctest::Approx(std::numbers::pi).epsilon(1e-13));
    ScalarField zero(g);
    CHECK(integrate_volume(zero, g) == 0.0);
}

TEST_CASE("integrate_volume matches an adaptive quadrature oracle") {
    const CylGrid g = make_grid(8.0, 8.0, 256, 256);
    ScalarField f(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) {
            const double r = g.r(i), z = g.z(j);
            f(i, j) = r * r * std::exp(-r * r - z * z);
        }
    // separable integrand: 2π (∫ r³ e^{-r²} dr)(∫ e^{-z²} dz)
    const double Ir = adaptive_simpson([](double r) { return r * r * r * std::exp(-r * r); },
                                       0.0, 8.0, 1e-12);
    const double Iz =
        adaptive_simpson([](double z) { return std::exp(-z * z); }, -8.0, 8.0, 1e-12);
    const double oracle = 2.0 * std::numbers::pi * Ir * Iz;
    CHECK(integrate_volume(f, g) == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("quadrature is exact when the r-weighted integrand is bilinear") {
    // f such that f·r = (a + b r)(c + d z); midpoint sums are exact then
    const CylGrid g = make_grid(3.0, 2.0, 12, 8);
    const double a = 0.7, b = -0.3, c = 1.1, d = 0.4;
    ScalarField f(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j)
            f(i, j) = (a + b * g.r(i)) * (c + d * g.z(j)) / g.r(i);
    const double R = g.r_max, Z = g.z_half;
    const double exact = 2.0 * std::numbers::pi * (a * R + 0.5 * b * R * R) * (2.0 * c * Z);
    CHECK(integrate_volume(f, g) == doctest::Approx(exact).epsilon(1e-13));

    ScalarField mismatch(make_grid(3.0, 2.0, 12, 10));
    CHECK_THROWS_AS(integrate_volume(mismatch, g), GridError);
}

TEST_CASE("grad2d on constant and linear fields") {
    const CylGrid g = make_grid(2.0, 2.0, 16, 16);
    ScalarField c(g, 3.25);
    auto [cr, cz] = grad2d(c, g);
    for (double v : cr.v) CHECK(v == doctest::Approx(0.0));
    for (double v : cz.v) CHECK(v == doctest::Approx(0.0));

    ScalarField lin(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) lin(i, j) = g.z(j);
    auto [lr, lz] = grad2d(lin, g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) {
            CHECK(lr(i, j) == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(lz(i, j) == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("grad2d converges at second order on a smooth field") {
    auto interior_err = [](int n) {
        const CylGrid g = make_grid(2.0, 2.0, n, n);
        ScalarField f(g);
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.nz; ++j) f(i, j) = std::sin(g.r(i)) * std::cos(g.z(j));
        auto [fr, fz] = grad2d(f, g);
        double emax = 0.0;
        for (int i = 1; i < g.nr - 1; ++i)
            for (int j = 1; j < g.nz - 1; ++j) {
                emax = std::max(emax,
                                std::abs(fr(i, j) - std::cos(g.r(i)) * std::cos(g.z(j))));
                emax = std::max(emax,
                                std::abs(fz(i, j) + std::sin(g.r(i)) * std::sin(g.z(j))));
            }
        return emax;
    };
    const double e1 = interior_err(32), e2 = interior_err(64);
    CHECK(std::log2(e1 / e2) >= 1.9);

    // ∂_r r² = 2r at interior nodes, O(h²)
    const CylGrid g = make_grid(2.0, 2.0, 32, 32);
    ScalarField f(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) f(i, j) = g.r(i) * g.r(i);
    auto [fr, fz] = grad2d(f, g);
    for (int i = 1; i < g.nr - 1; ++i)
        CHECK(fr(i, 5) == doctest::Approx(2.0 * g.r(i)).epsilon(1e-10));
}

TEST_CASE("ghost_extend parity and outer rules") {
    const CylGrid g = make_grid(1.0, 1.0, 8, 8);
    ScalarField f(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) f(i, j) = g.r(i);

    const ExtendedField odd = ghost_extend(f, g, AxisParity::odd);
    for (int j = 0; j < g.nz; ++j) CHECK(odd.at(-1, j) == doctest::Approx(-g.r(0)));

    ScalarField ones(g, 1.0);
    const ExtendedField even = ghost_extend(ones, g, AxisParity::even);
    for (int j = 0; j < g.nz; ++j) CHECK(even.at(-1, j) == doctest::Approx(1.0));

    // outer ghost = -f(last) so the interpolated face value vanishes
    for (int j = 0; j < g.nz; ++j)
        CHECK(odd.at(g.nr, j) == doctest::Approx(-f(g.nr - 1, j)));
    for (int i = 0; i < g.nr; ++i) {
        CHECK(odd.at(i, -1) == doctest::Approx(-f(i, 0)));
        CHECK(odd.at(i, g.nz) == doctest::Approx(-f(i, g.nz - 1)));
    }
}

TEST_CASE("ghost-aware central gradient is exact for the parity-matched linears") {
    const CylGrid g = make_grid(2.0, 2.0, 16, 16);
    ScalarField f(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) f(i, j) = g.r(i);  // odd profile
    auto [fr, fz] = grad2d(ghost_extend(f, g, AxisParity::odd), g);
    // axis and interior cells see the exact slope; outer/z ghosts enforce a
    // zero face value instead, so stop short of those cells
    for (int i = 0; i < g.nr - 1; ++i)
        for (int j = 1; j < g.nz - 1; ++j) {
            CHECK(fr(i, j) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(fz(i, j) == doctest::Approx(0.0));
        }
}

TEST_CASE("discrete integration by parts for interior-supported fields") {
    const CylGrid g = make_grid(4.0, 4.0, 40, 40);
    ScalarField f(g), q(g);
    for (int i = 2; i < g.nr - 2; ++i)
        for (int j = 2; j < g.nz - 2; ++j) {
            const double r = g.r(i), z = g.z(j);
            const double bump = std::exp(-(r - 2.0) * (r - 2.0) - z * z);
            f(i, j) = bump * std::sin(r + z);
            q(i, j) = bump * std::cos(2.0 * r - z);
        }
    auto [fr, fz] = grad2d(f, g);
    ScalarField qr_field(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) qr_field(i, j) = q(i, j) * g.r(i);
    auto [dqr, dqz] = grad2d(qr_field, g);

    double lhs = 0.0, scale = 0.0;
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) {
            lhs += fr(i, j) * qr_field(i, j) + f(i, j) * dqr(i, j);
            scale += std::abs(fr(i, j) * qr_field(i, j));
        }
    lhs *= g.hr * g.hz;
    scale *= g.hr * g.hz;
    CHECK(std::abs(lhs) <= 1e-12 * std::max(scale, 1.0) + 1e-14);
}
