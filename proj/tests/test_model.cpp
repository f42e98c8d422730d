#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kgmv/model.hpp"

using namespace kgmv;

TEST_CASE("W and its pieces at pinned values") {
    ModelParams p4;
    p4.p = 4.0;
    CHECK(W(1.0, p4) == doctest::Approx(0.25));
    CHECK(W(0.0, p4) == 0.0);
    CHECK(W(-2.0, p4) == doctest::Approx(2.0));

    CHECK(Wprime(1.0, p4) == doctest::Approx(0.0));
    ModelParams p3;
    p3.p = 3.0;
    CHECK(Wprime(2.0, p3) == doctest::Approx(-2.0));
    CHECK(Wprime(-1.0, p3) == doctest::Approx(-1.0));

    CHECK(F(1.0, p4) == doctest::Approx(0.25));
    CHECK(Fprime(1.0, p4) == doctest::Approx(1.0));
    CHECK(F(0.0, p4) == 0.0);
    CHECK(Fprime(0.0, p4) == 0.0);
    // Ambrosetti-Rabinowitz with equality for the canonical family
    CHECK(2.0 * Fprime(2.0, p3) == doctest::Approx(3.0 * F(2.0, p3)));
    CHECK(2.0 * Fprime(2.0, p3) == doctest::Approx(8.0));
}

TEST_CASE("omega_p") {
    CHECK(omega_p(4.0) == doctest::Approx(1.0));
    CHECK(omega_p(3.0) == doctest::Approx(std::sqrt(0.5)));
    CHECK(omega_p(5.9) == doctest::Approx(1.0));
    CHECK_THROWS_AS(omega_p(2.0), std::domain_error);
    CHECK_THROWS_AS(omega_p(6.5), std::domain_error);
}

TEST_CASE("validate lists violations") {
    ModelParams good{0.5, 1, 4.0, 1.0};
    CHECK(validate(good).empty());

    ModelParams tight{0.9, 1, 3.0, 1.0};
    const auto bad = validate(tight);
    REQUIRE(!bad.empty());
    bool mentions = false;
    for (const auto& m : bad) mentions = mentions || m.find("(p-2)/2") != std::string::npos;
    CHECK(mentions);

    ModelParams p2{0.0, 0, 2.0, 1.0};
    const auto bad2 = validate(p2);
    REQUIRE(!bad2.empty());
    CHECK(bad2.front().find("p out of (2,6)") != std::string::npos);
}

TEST_CASE("W = s^2/2 - F identically") {
    ModelParams P;
    P.p = 3.5;
    for (double s : {-3.0, -0.5, 0.0, 1e-6, 0.3, 1.0, 2.5, 10.0})
        CHECK(W(s, P) == doctest::Approx(0.5 * s * s - F(s, P)).epsilon(1e-14));
}

TEST_CASE("growth and superquadraticity hold on a log-spaced sample") {
    for (double p : {2.5, 3.0, 4.0, 5.5}) {
        ModelParams P;
        P.p = p;
        for (int m = 0; m <= 60; ++m) {
            const double s = std::pow(10.0, -6.0 + 9.0 * m / 60.0);  // [1e-6, 1e3]
            CHECK(std::abs(Fprime(s, P)) <= P.c_growth * std::pow(s, p - 1.0) * (1.0 + 1e-12));
            const double lhs = s * Fprime(s, P), rhs = p * F(s, P);
            CHECK(rhs > 0.0);
            CHECK(lhs >= rhs * (1.0 - 1e-12));
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));  // equality for canonical W
        }
    }
}

TEST_CASE("Wprime is the derivative of W") {
    ModelParams P;
    P.p = 4.0;
    for (double s : {-2.0, -0.7, 0.4, 1.0, 1.9, 3.0}) {
        const double h = 1e-6 * std::max(1.0, std::abs(s));
        const double fd = (W(s + h, P) - W(s - h, P)) / (2.0 * h);
        CHECK(Wprime(s, P) == doctest::Approx(fd).epsilon(1e-6));
    }
    // one-sided at 0
    const double h = 1e-7;
    CHECK((W(h, P) - W(0.0, P)) / h == doctest::Approx(Wprime(0.0, P)).epsilon(1e-5));
    CHECK((W(0.0, P) - W(-h, P)) / h == doctest::Approx(Wprime(0.0, P)).epsilon(1e-5));
}
