#include <doctest.h>

#include <cmath>
#include <random>

#include "kgmv/verify.hpp"

using namespace kgmv;

namespace {

ScalarField analytic(const CylGrid& g, double (*f)(double, double)) {
    ScalarField out(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) out(i, j) = f(g.r(i), g.z(j));
    return out;
}

}  // namespace

TEST_CASE("random_smooth_field is seed-reproducible") {
    const CylGrid g = make_grid(6.0, 6.0, 16, 16);
    std::mt19937 a(42), b(42), c(43);
    ScalarField fa = random_smooth_field(g, a, 3, 1.0, true);
    ScalarField fb = random_smooth_field(g, b, 3, 1.0, true);
    ScalarField fc = random_smooth_field(g, c, 3, 1.0, true);
    bool same = true, diff = false;
    for (int s = 0; s < g.cells(); ++s) {
        same = same && fa.v[s] == fb.v[s];
        diff = diff || fa.v[s] != fc.v[s];
        CHECK(fa.v[s] >= 0.0);
    }
    CHECK(same);
    CHECK(diff);
}

TEST_CASE("sample_bicubic reproduces cubics away from the boundary") {
    const CylGrid g = make_grid(4.0, 4.0, 32, 32);
    ScalarField f(g);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) {
            const double r = g.r(i), z = g.z(j);
            f(i, j) = 0.3 * r * r * r - r * z + 2.0 * z * z + 0.5;
        }
    for (double r : {0.91, 1.7, 2.43})
        for (double z : {-1.2, 0.37, 1.44}) {
            const double exact = 0.3 * r * r * r - r * z + 2.0 * z * z + 0.5;
            CHECK(sample_bicubic(f, g, r, z, AxisParity::even) ==
                  doctest::Approx(exact).epsilon(1e-12));
        }
}

TEST_CASE("max principle check on random sources") {
    CheckReport rep = check_max_principle(10, make_grid(12.0, 12.0, 48, 48), 2024);
    CHECK(rep.pass);
    CHECK(rep.measurements["violations"].get<int>() == 0);
    CHECK(rep.measurements["worst_min"].get<double>() >= -1e-10);
    CHECK(rep.measurements["worst_max"].get<double>() <= 1.0 + 1e-10);
}

TEST_CASE("iterative/direct Gauss oracle agreement") {
    CheckReport rep = check_gauss_oracle(make_grid(10.0, 10.0, 32, 32), 7);
    CHECK(rep.pass);
    CHECK(rep.measurements["rel_err"].get<double>() < 1e-8);
    CHECK(rep.measurements["repeat_bitwise_identical"].get<bool>());
}

TEST_CASE("palla identity: zero profile and the refinement study") {
    const CylGrid g = make_grid(8.0, 8.0, 256, 256);
    ScalarField zero(g);
    CheckReport z = check_palla_3d(zero, g, 32, 6.0);
    CHECK(z.measurements["div_energy"].get<double>() == 0.0);
    CHECK(z.measurements["curl_energy"].get<double>() == 0.0);
    CHECK(z.measurements["grad_energy"].get<double>() == 0.0);

    ScalarField b =
        analytic(g, [](double r, double z) { return r * r * std::exp(-r * r - z * z); });
    CheckReport rep = check_palla_refinement(b, g, {32, 64, 128}, 6.0);
    CHECK(rep.pass);
    CHECK(rep.measurements["worst_gap_order"].get<double>() >= 1.5);
    CHECK(rep.measurements["div_shrinks"].get<bool>());
    const auto& finest = rep.measurements["runs"].back().at("measurements");
    CHECK(finest.at("div_fraction").get<double>() <= 0.01);
    CHECK(finest.at("curl_vs_2d").get<double>() <= 0.02);
    CHECK(finest.at("grad_vs_2d").get<double>() <= 0.02);
}

TEST_CASE("curl-curl profile operator") {
    const CylGrid g = make_grid(8.0, 8.0, 256, 256);

    SUBCASE("a = r^2 is curl-curl free in the interior") {
        ScalarField a = analytic(g, [](double r, double) { return r * r; });
        StencilOp Lb = stiffness_gauge(g);
        auto w = volume_weights(g);
        ScalarField cc(g);
        apply_stencil(Lb, a.data(), cc.data());
        for (int i = 2; i < g.nr - 2; ++i)
            for (int j = 2; j < g.nz - 2; ++j) {
                const double val = cc(i, j) * g.r(i) * g.r(i) / w[g.idx(i, j)];
                CHECK(std::abs(val) < 1e-9);
            }
    }

    SUBCASE("a = r^2 exp(-z^2) matches the symbolic oracle") {
        // -a_rr + a_r/r - a_zz = (2 - 4z^2) r^2 exp(-z^2)
        ScalarField a =
            analytic(g, [](double r, double z) { return r * r * std::exp(-z * z); });
        StencilOp Lb = stiffness_gauge(g);
        auto w = volume_weights(g);
        ScalarField cc(g);
        apply_stencil(Lb, a.data(), cc.data());
        for (int i = 4; i < g.nr / 2; i += 7)
            for (int j = g.nz / 4; j < 3 * g.nz / 4; j += 7) {
                const double r = g.r(i), z = g.z(j);
                const double val = cc(i, j) * r * r / w[g.idx(i, j)];
                const double oracle = (2.0 - 4.0 * z * z) * r * r * std::exp(-z * z);
                CHECK(val == doctest::Approx(oracle).epsilon(5e-3));
            }
    }

    SUBCASE("zero profile gives a zero report") {
        ScalarField a(g);
        CheckReport rep = check_curlcurl_profile(a, g);
        CHECK(rep.pass);
        for (double d : rep.measurements["rel_diffs"].get<std::vector<double>>())
            CHECK(d == 0.0);
    }

    SUBCASE("3D sampling agrees with the 2D operator under FD refinement") {
        ScalarField a =
            analytic(g, [](double r, double z) { return r * r * std::exp(-z * z); });
        CheckReport rep = check_curlcurl_profile(a, g);
        CHECK(rep.pass);
        CHECK(rep.measurements["worst_order"].get<double>() >= 1.5);
        CHECK(rep.measurements["rel_diffs"].get<std::vector<double>>().back() < 1e-2);
    }
}

TEST_CASE("gauge inequivalence quadrature") {
    CheckReport eq = check_gauge_inequivalence(2, 2, {0.1, 0.05});
    CHECK(eq.pass);
    CHECK(eq.measurements.contains("note"));

    CheckReport rep = check_gauge_inequivalence(0, 1, {0.1, 0.05, 0.025, 0.0125});
    CHECK(rep.pass);
    CHECK(rep.measurements["divergence_flag"].get<bool>());
    for (double ratio : rep.measurements["ratios"].get<std::vector<double>>()) {
        CHECK(ratio >= 2.0);
        CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));  // |∇∇θ|² ~ r⁻⁴ against r dr
    }

    CheckReport k3 = check_gauge_inequivalence(-1, 2, {0.2, 0.1});
    CHECK(k3.measurements["divergence_flag"].get<bool>());
}

TEST_CASE("the three forms of the reduced functional agree") {
    const CylGrid g = make_grid(10.0, 10.0, 48, 48);
    ModelParams P;
    P.omega = 0.5;
    P.k = 1;
    P.p = 4.0;

    VortexState zero(g);
    CheckReport z = check_reduced_forms_agree(zero, P, g);
    CHECK(z.pass);
    CHECK(z.measurements["I_working"].get<double>() == 0.0);

    // omega = 0: the forms coincide term by term
    ModelParams P0 = P;
    P0.omega = 0.0;
    std::mt19937 rng(5);
    VortexState S(g);
    S.u = random_smooth_field(g, rng, 3, 1.0, false);
    S.b = random_smooth_field(g, rng, 3, 1.0, false);
    CheckReport m = check_reduced_forms_agree(S, P0, g);
    CHECK(m.pass);
    CHECK(m.measurements["rel_diff_J"].get<double>() < 1e-14);
    CHECK(m.measurements["rel_diff_re"].get<double>() < 1e-14);

    CheckReport rep = check_forms_random(10, P, g, 99);
    CHECK(rep.pass);
    CHECK(rep.measurements["worst_rel_diff"].get<double>() <= 1e-8);
}
