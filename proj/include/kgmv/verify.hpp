#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgmv/functional.hpp"

namespace kgmv {

using json = nlohmann::ordered_json;

// One machine-readable report per check: name, parameters, measured
// quantities, pass flag, seed.
struct CheckReport {
    std::string name;
    json params = json::object();
    json measurements = json::object();
    bool pass = false;
    unsigned long seed = 0;

    json to_json() const;
};

// Smoothed noise field, reproducible from the seed. Uniform draws come
// straight from mt19937 words so results do not depend on the standard
// library's distribution implementations.
ScalarField random_smooth_field(const CylGrid& g, std::mt19937& rng, int smooth_passes,
                                double amplitude, bool nonnegative);

// Bicubic (Catmull-Rom) sampling of a grid field at arbitrary (r, z);
// even or odd reflection across the axis, zero outside the domain.
double sample_bicubic(const ScalarField& f, const CylGrid& g, double r, double z,
                      AxisParity parity);

// 0 <= Φ_u <= 1 for random nonnegative u (discrete maximum principle).
CheckReport check_max_principle(int trials, const CylGrid& g, unsigned long seed,
                                double lin_tol = 1e-12);

// Iterative Gauss solve against the dense direct factorization.
CheckReport check_gauss_oracle(const CylGrid& g, unsigned long seed, double tol = 1e-8);

// 3D finite-difference energies of A = b ∇θ on an n3d³ Cartesian grid:
// div-energy, curl-energy, grad-energy, against the 2D reduction formula.
CheckReport check_palla_3d(const ScalarField& b, const CylGrid& g, int n3d, double half_width);

// Runs check_palla_3d on each level and measures the convergence order of
// the |curl - grad| energy gap.
CheckReport check_palla_refinement(const ScalarField& b, const CylGrid& g,
                                   const std::vector<int>& levels, double half_width);

// ∇×∇×(a∇θ) by 3D sampling versus the 2D profile operator
// -a_rr + a_r/r - a_zz applied on the grid.
CheckReport check_curlcurl_profile(const ScalarField& a, const CylGrid& g);

// ∫_{r>ε} |∇((k2-k1)∇θ)|² over a unit z-slab diverges as ε -> 0.
CheckReport check_gauge_inequivalence(int k1, int k2, const std::vector<double>& eps_list);

// Reduced functional evaluated three ways: the working form, the full
// J-form through φ_u = ωΦ_u, and the rearranged form whose tail is
// ½∫(1-ω²[1-Φ])u² - ∫F(u).
CheckReport check_reduced_forms_agree(const VortexState& S, const ModelParams& P,
                                      const CylGrid& g, double lin_tol = 1e-10);

// Random-state driver for check_reduced_forms_agree.
CheckReport check_forms_random(int trials, const ModelParams& P, const CylGrid& g,
                               unsigned long seed, double lin_tol = 1e-10);

}  // namespace kgmv
