#include "kgmv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kgmv/solver.hpp"

namespace kgmv {

json CheckReport::to_json() const {
    json j;
    j["name"] = name;
    j["params"] = params;
    j["measurements"] = measurements;
    j["pass"] = pass;
    j["seed"] = seed;
    return j;
}

namespace {

double uniform01(std::mt19937& rng) { return std::ldexp((double)rng(), -32); }

constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace

ScalarField random_smooth_field(const CylGrid& g, std::mt19937& rng, int smooth_passes,
                                double amplitude, bool nonnegative) {
    ScalarField f(g);
    for (double& v : f.v) v = nonnegative ? uniform01(rng) : uniform01(rng) - 0.5;
    ScalarField tmp(g);
    for (int pass = 0; pass < smooth_passes; ++pass) {
        for (int i = 0; i < g.nr; ++i)
            for (int j = 0; j < g.nz; ++j) {
                const int im = std::max(i - 1, 0), ip = std::min(i + 1, g.nr - 1);
                const int jm = std::max(j - 1, 0), jp = std::min(j + 1, g.nz - 1);
                tmp(i, j) =
                    0.5 * f(i, j) + 0.125 * (f(im, j) + f(ip, j) + f(i, jm) + f(i, jp));
            }
        std::swap(f.v, tmp.v);
    }
    double mx = 0.0;
    for (double v : f.v) mx = std::max(mx, std::abs(v));
    if (mx > 0.0)
        for (double& v : f.v) v *= amplitude / mx;
    return f;
}

namespace {

// 4-point Lagrange cubic on nodes (-1, 0, 1, 2); exact on cubics, so the
// interpolation error is O(h^4)
double cubic4(double p0, double p1, double p2, double p3, double t) {
    const double w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return w0 * p0 + w1 * p1 + w2 * p2 + w3 * p3;
}

// cell value with axis reflection (cell -1-m mirrors cell m) and zero
// outside the outer boundaries
double cell_value(const ScalarField& f, int i, int j, AxisParity parity) {
    const int nr = f.grid.nr, nz = f.grid.nz;
    double sign = 1.0;
    if (i < 0) {
        i = -1 - i;
        if (parity == AxisParity::odd) sign = -1.0;
    }
    if (i >= nr || j < 0 || j >= nz) return 0.0;
    return sign * f(i, j);
}

}  // namespace

double sample_bicubic(const ScalarField& f, const CylGrid& g, double r, double z,
                      AxisParity parity) {
    const double x = r / g.hr - 0.5;
    const double y = (z + g.z_half) / g.hz - 0.5;
    const int i0 = (int)std::floor(x);
    const int j0 = (int)std::floor(y);
    const double tx = x - i0, ty = y - j0;
    double col[4];
    for (int m = 0; m < 4; ++m) {
        const int j = j0 - 1 + m;
        col[m] = cubic4(cell_value(f, i0 - 1, j, parity), cell_value(f, i0, j, parity),
                        cell_value(f, i0 + 1, j, parity), cell_value(f, i0 + 2, j, parity), tx);
    }
    return cubic4(col[0], col[1], col[2], col[3], ty);
}

CheckReport check_max_principle(int trials, const CylGrid& g, unsigned long seed,
                                double lin_tol) {
    CheckReport rep;
    rep.name = "max_principle";
    rep.seed = seed;
    rep.params = {{"trials", trials},
                  {"grid", {g.r_max, g.z_half, g.nr, g.nz}},
                  {"lin_tol", lin_tol}};
    std::mt19937 rng((unsigned)seed);
    double worst_min = 0.0, worst_max = 1.0;
    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        const double amp = std::pow(10.0, -1.0 + 3.0 * uniform01(rng));  // in [0.1, 100]
        ScalarField u = random_smooth_field(g, rng, 3, amp, /*nonnegative=*/true);
        GaussSolution gs = solve_gauss(u, g, lin_tol);
        const auto [mn, mx] = std::minmax_element(gs.Phi.v.begin(), gs.Phi.v.end());
        worst_min = std::min(worst_min, *mn);
        worst_max = std::max(worst_max, *mx);
        if (*mn < -1e-10 || *mx > 1.0 + 1e-10) ++violations;
    }
    rep.measurements = {{"worst_min", worst_min},
                        {"worst_max", worst_max},
                        {"violations", violations},
                        {"excursion", std::max(-worst_min, worst_max - 1.0)}};
    rep.pass = violations == 0;
    return rep;
}

CheckReport check_gauss_oracle(const CylGrid& g, unsigned long seed, double tol) {
    CheckReport rep;
    rep.name = "gauss_oracle";
    rep.seed = seed;
    rep.params = {{"grid", {g.r_max, g.z_half, g.nr, g.nz}}, {"tol", tol}};
    std::mt19937 rng((unsigned)seed);
    ScalarField u = random_smooth_field(g, rng, 3, 0.6, true);
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) {
            const double r = g.r(i), z = g.z(j);
            u(i, j) += 2.0 * std::exp(-((r - 1.5) * (r - 1.5) + z * z) / 2.25);
        }
    GaussSolution it1 = solve_gauss(u, g, 1e-12);
    GaussSolution it2 = solve_gauss(u, g, 1e-12);
    GaussSolution dir = solve_gauss_direct(u, g);
    double num = 0.0, den = 0.0;
    bool bitwise = true;
    for (size_t s = 0; s < u.v.size(); ++s) {
        const double d = it1.Phi.v[s] - dir.Phi.v[s];
        num += d * d;
        den += dir.Phi.v[s] * dir.Phi.v[s];
        if (it1.Phi.v[s] != it2.Phi.v[s]) bitwise = false;
    }
    const double rel = den > 0.0 ? std::sqrt(num / den) : 0.0;
    rep.measurements = {{"rel_err", rel},
                        {"cg_iterations", it1.iterations},
                        {"cg_residual", it1.residual},
                        {"direct_residual", dir.residual},
                        {"repeat_bitwise_identical", bitwise}};
    rep.pass = rel < tol && bitwise;
    return rep;
}

namespace {

struct Palla3dEnergies {
    double div_e = 0.0, curl_e = 0.0, grad_e = 0.0;
};

Palla3dEnergies palla_sample(const ScalarField& b, const CylGrid& g, int n3d, double L) {
    const int np = n3d + 2;  // one ghost layer per side
    const double h = 2.0 * L / n3d;
    std::vector<double> Ax((size_t)np * np * np), Ay((size_t)np * np * np);
    auto id3 = [np](int i, int j, int k) { return ((size_t)i * np + j) * np + k; };

    // A = b ∇θ with ∇θ = (y/ρ², -x/ρ², 0); Az = 0. For each (x, y) the
    // radial interpolation weights are fixed, so collapse the r-stencil
    // into one z-column first.
    const int nz2 = g.nz;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < np; ++i) {
        std::vector<double> col(nz2);
        const double x = -L + (i - 0.5) * h;
        for (int j = 0; j < np; ++j) {
            const double y = -L + (j - 0.5) * h;
            const double rho2 = x * x + y * y;
            const double rho = std::sqrt(rho2);
            const double xx = rho / g.hr - 0.5;
            const int i0 = (int)std::floor(xx);
            const double tx = xx - i0;
            const double c0 = -tx * (tx - 1.0) * (tx - 2.0) / 6.0;
            const double c1 = (tx + 1.0) * (tx - 1.0) * (tx - 2.0) / 2.0;
            const double c2 = -(tx + 1.0) * tx * (tx - 2.0) / 2.0;
            const double c3 = (tx + 1.0) * tx * (tx - 1.0) / 6.0;
            for (int jz = 0; jz < nz2; ++jz) {
                col[jz] = c0 * cell_value(b, i0 - 1, jz, AxisParity::even) +
                          c1 * cell_value(b, i0, jz, AxisParity::even) +
                          c2 * cell_value(b, i0 + 1, jz, AxisParity::even) +
                          c3 * cell_value(b, i0 + 2, jz, AxisParity::even);
            }
            for (int k = 0; k < np; ++k) {
                const double z = -L + (k - 0.5) * h;
                const double yy = (z + g.z_half) / g.hz - 0.5;
                const int j0 = (int)std::floor(yy);
                const double ty = yy - j0;
                auto colv = [&](int jz) { return (jz < 0 || jz >= nz2) ? 0.0 : col[jz]; };
                const double bv =
                    cubic4(colv(j0 - 1), colv(j0), colv(j0 + 1), colv(j0 + 2), ty);
                Ax[id3(i, j, k)] = bv * y / rho2;
                Ay[id3(i, j, k)] = -bv * x / rho2;
            }
        }
    }

    std::vector<double> part_div(n3d, 0.0), part_curl(n3d, 0.0), part_grad(n3d, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n3d; ++i) {
        double sd = 0.0, sc = 0.0, sg = 0.0;
        for (int j = 0; j < n3d; ++j)
            for (int k = 0; k < n3d; ++k) {
                const int I = i + 1, J = j + 1, K = k + 1;
                const double inv2h = 1.0 / (2.0 * h);
                const double dAx_dx = (Ax[id3(I + 1, J, K)] - Ax[id3(I - 1, J, K)]) * inv2h;
                const double dAx_dy = (Ax[id3(I, J + 1, K)] - Ax[id3(I, J - 1, K)]) * inv2h;
                const double dAx_dz = (Ax[id3(I, J, K + 1)] - Ax[id3(I, J, K - 1)]) * inv2h;
                const double dAy_dx = (Ay[id3(I + 1, J, K)] - Ay[id3(I - 1, J, K)]) * inv2h;
                const double dAy_dy = (Ay[id3(I, J + 1, K)] - Ay[id3(I, J - 1, K)]) * inv2h;
                const double dAy_dz = (Ay[id3(I, J, K + 1)] - Ay[id3(I, J, K - 1)]) * inv2h;
                const double div = dAx_dx + dAy_dy;
                const double cx = -dAy_dz, cy = dAx_dz, cz = dAy_dx - dAx_dy;
                sd += div * div;
                sc += cx * cx + cy * cy + cz * cz;
                sg += dAx_dx * dAx_dx + dAx_dy * dAx_dy + dAx_dz * dAx_dz + dAy_dx * dAy_dx +
                      dAy_dy * dAy_dy + dAy_dz * dAy_dz;
            }
        part_div[i] = sd;
        part_curl[i] = sc;
        part_grad[i] = sg;
    }
    Palla3dEnergies e;
    const double vol = h * h * h;
    for (int i = 0; i < n3d; ++i) {
        e.div_e += part_div[i] * vol;
        e.curl_e += part_curl[i] * vol;
        e.grad_e += part_grad[i] * vol;
    }
    return e;
}

}  // namespace

CheckReport check_palla_3d(const ScalarField& b, const CylGrid& g, int n3d, double half_width) {
    if (n3d % 2 != 0) throw std::invalid_argument("check_palla_3d: n3d must be even");
    CheckReport rep;
    rep.name = "palla_3d";
    rep.params = {{"n3d", n3d},
                  {"half_width", half_width},
                  {"grid", {g.r_max, g.z_half, g.nr, g.nz}}};
    Palla3dEnergies e = palla_sample(b, g, n3d, half_width);
    const double e2d = quadform(stiffness_gauge(g), b.data());
    const double div_frac = e.grad_e > 0 ? e.div_e / e.grad_e : 0.0;
    const double gap = std::abs(e.curl_e - e.grad_e);
    rep.measurements = {{"div_energy", e.div_e},
                        {"curl_energy", e.curl_e},
                        {"grad_energy", e.grad_e},
                        {"formula_2d", e2d},
                        {"div_fraction", div_frac},
                        {"curl_grad_gap", gap},
                        {"curl_vs_2d", std::abs(e.curl_e - e2d) / e2d},
                        {"grad_vs_2d", std::abs(e.grad_e - e2d) / e2d}};
    rep.pass = div_frac <= 0.01 && std::abs(e.curl_e - e2d) / e2d <= 0.02 &&
               std::abs(e.grad_e - e2d) / e2d <= 0.02;
    return rep;
}

CheckReport check_palla_refinement(const ScalarField& b, const CylGrid& g,
                                   const std::vector<int>& levels, double half_width) {
    CheckReport rep;
    rep.name = "palla_refinement";
    rep.params = {{"levels", levels}, {"half_width", half_width}};
    json runs = json::array();
    std::vector<double> gaps, divs;
    CheckReport finest;
    for (int n3d : levels) {
        finest = check_palla_3d(b, g, n3d, half_width);
        runs.push_back(finest.to_json());
        gaps.push_back(finest.measurements["curl_grad_gap"].get<double>());
        divs.push_back(finest.measurements["div_energy"].get<double>());
    }
    double worst_order = std::numeric_limits<double>::infinity();
    json orders = json::array();
    for (size_t l = 1; l < gaps.size(); ++l) {
        const double ratio = std::log2(double(levels[l]) / levels[l - 1]);
        const double order = std::log2(gaps[l - 1] / gaps[l]) / ratio;
        orders.push_back(order);
        worst_order = std::min(worst_order, order);
    }
    const bool div_shrinks = divs.size() < 2 || divs.back() < divs.front();
    rep.measurements = {{"runs", runs},
                        {"gap_orders", orders},
                        {"worst_gap_order", worst_order},
                        {"div_energies", divs},
                        {"div_shrinks", div_shrinks}};
    rep.pass = finest.pass && worst_order >= 1.5 && div_shrinks;
    return rep;
}

CheckReport check_curlcurl_profile(const ScalarField& a, const CylGrid& g) {
    CheckReport rep;
    rep.name = "curlcurl_profile";
    rep.params = {{"grid", {g.r_max, g.z_half, g.nr, g.nz}}};

    // 2D profile operator in conservative form: r² (L_b a) / w
    StencilOp Lb = stiffness_gauge(g);
    auto w = volume_weights(g);
    ScalarField cc(g);
    apply_stencil(Lb, a.data(), cc.data());
    for (int i = 0; i < g.nr; ++i) {
        const double r2 = g.r(i) * g.r(i);
        for (int j = 0; j < g.nz; ++j) cc(i, j) *= r2 / w[g.idx(i, j)];
    }

    // probe lattice away from the axis and the outer boundary
    std::vector<std::pair<double, double>> probes;
    for (int qi = 0; qi < 10; ++qi)
        for (int qj = 0; qj < 10; ++qj) {
            const double r = 0.8 + (0.45 * g.r_max - 0.8) * qi / 9.0;
            const double z = -0.4 * g.z_half + 0.8 * g.z_half * qj / 9.0;
            probes.emplace_back(r, z);
        }

    auto eval_a = [&](double rr, double zz) {
        return sample_bicubic(a, g, rr, zz, AxisParity::even);
    };
    // A components at a Cartesian point
    auto eval_Ay = [&](double x, double y, double z) {
        const double rho2 = x * x + y * y;
        return -eval_a(std::sqrt(rho2), z) * x / rho2;
    };
    auto eval_Ax = [&](double x, double y, double z) {
        const double rho2 = x * x + y * y;
        return eval_a(std::sqrt(rho2), z) * y / rho2;
    };

    const std::vector<double> steps = {0.32, 0.16, 0.08};
    std::vector<double> rel_diffs;
    for (double h : steps) {
        double num = 0.0, den = 0.0;
        for (auto [r, z] : probes) {
            // (∇×∇×A)_y at (r, 0, z): ∂x∂y Ax - ∂²x Ay - ∂²z Ay
            const double x = r, y = 0.0;
            const double dxy_Ax = (eval_Ax(x + h, y + h, z) - eval_Ax(x + h, y - h, z) -
                                   eval_Ax(x - h, y + h, z) + eval_Ax(x - h, y - h, z)) /
                                  (4.0 * h * h);
            const double dxx_Ay =
                (eval_Ay(x + h, y, z) - 2.0 * eval_Ay(x, y, z) + eval_Ay(x - h, y, z)) / (h * h);
            const double dzz_Ay =
                (eval_Ay(x, y, z + h) - 2.0 * eval_Ay(x, y, z) + eval_Ay(x, y, z - h)) / (h * h);
            const double ccy3d = dxy_Ax - dxx_Ay - dzz_Ay;
            const double prof3d = -r * ccy3d;  // ∇×∇×A = cc ∇θ, ∇θ|_(r,0,z) = (0,-1/r,0)
            const double prof2d = sample_bicubic(cc, g, r, z, AxisParity::even);
            num += (prof3d - prof2d) * (prof3d - prof2d);
            den += prof2d * prof2d;
        }
        rel_diffs.push_back(den > 0.0 ? std::sqrt(num / den) : std::sqrt(num));
    }
    const bool all_zero =
        std::all_of(rel_diffs.begin(), rel_diffs.end(), [](double d) { return d == 0.0; });
    double worst_order = std::numeric_limits<double>::infinity();
    json orders = json::array();
    for (size_t l = 1; l < rel_diffs.size() && !all_zero; ++l) {
        const double order = std::log2(rel_diffs[l - 1] / rel_diffs[l]);
        orders.push_back(order);
        worst_order = std::min(worst_order, order);
    }
    rep.measurements = {{"fd_steps", steps},
                        {"rel_diffs", rel_diffs},
                        {"orders", orders},
                        {"worst_order", worst_order}};
    rep.pass = all_zero || (worst_order >= 1.5 && rel_diffs.back() < 1e-2);
    return rep;
}

CheckReport check_gauge_inequivalence(int k1, int k2, const std::vector<double>& eps_list) {
    CheckReport rep;
    rep.name = "gauge_inequivalence";
    rep.params = {{"k1", k1}, {"k2", k2}, {"eps_list", eps_list}};
    const double dk = double(k2 - k1);
    if (dk == 0.0) {
        rep.measurements = {{"note", "gauge-equivalent difference"}, {"integrals", json::array()}};
        rep.pass = true;
        return rep;
    }
    // ∫_{ε<r<R, |z|<1/2} |∇∇θ|² dk² dx with |∇∇θ|² = 2/r⁴; composite
    // Simpson in s = ln r.
    const double R = 1.0;
    auto slab_integral = [&](double eps) {
        const int n = 200;  // panels (even)
        const double s0 = std::log(eps), s1 = std::log(R);
        const double hs = (s1 - s0) / n;
        auto f = [](double s) { return 2.0 * std::exp(-2.0 * s); };  // (2/r⁴)·r·(dr/ds)
        double acc = f(s0) + f(s1);
        for (int m = 1; m < n; ++m) acc += f(s0 + m * hs) * ((m % 2) ? 4.0 : 2.0);
        return dk * dk * two_pi * (hs / 3.0) * acc;
    };
    json integrals = json::array(), ratios = json::array();
    std::vector<double> vals;
    for (double e : eps_list) {
        vals.push_back(slab_integral(e));
        integrals.push_back(vals.back());
    }
    bool ok = vals.size() >= 2;
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (size_t l = 1; l < vals.size(); ++l) {
        const double ratio = vals[l] / vals[l - 1];
        ratios.push_back(ratio);
        worst_ratio = std::min(worst_ratio, ratio);
        if (ratio < 2.0) ok = false;
    }
    rep.measurements = {{"integrals", integrals},
                        {"ratios", ratios},
                        {"worst_ratio", worst_ratio},
                        {"divergence_flag", ok}};
    rep.pass = ok;
    return rep;
}

CheckReport check_reduced_forms_agree(const VortexState& S, const ModelParams& P,
                                      const CylGrid& g, double lin_tol) {
    CheckReport rep;
    rep.name = "reduced_forms_agree";
    rep.params = {{"omega", P.omega}, {"k", P.k}, {"p", P.p}, {"lin_tol", lin_tol}};

    Problem pb(g, P, lin_tol);
    GaussSolution gs;
    const GaussSolution* gsp = nullptr;
    if (pb.needs_gauss()) {
        gs = pb.gauss(S.u);
        gsp = &gs;
    }
    const double I_work = pb.value(S, gsp);

    const size_t n = pb.w.size();
    const double kk = double(P.k), w2 = P.omega * P.omega;
    const double du = 0.5 * quadform(pb.Lu, S.u.data());
    const double ga = 0.5 * quadform(pb.Lb, S.b.data());
    std::vector<double> c1(n), c2(n), pot(n), fpot(n);
    for (size_t s = 0; s < n; ++s) {
        const double u2 = S.u.v[s] * S.u.v[s];
        const double db = S.b.v[s] - kk;
        const double Phi = gsp ? gs.Phi.v[s] : 0.0;
        c1[s] = 0.5 * pb.w[s] * db * db * u2 * pb.inv_r2[s];
        c2[s] = pb.w[s] * u2 * (gsp ? (Phi - 1.0) * (Phi - 1.0) : 1.0);
        pot[s] = pb.w[s] * W(S.u.v[s], P);
        fpot[s] = pb.w[s] * (0.5 * (1.0 - w2 * (1.0 - Phi)) * u2 - F(S.u.v[s], P));
    }
    const double coup = sum(c1.data(), g.nr, g.nz);
    const double wsum = sum(pot.data(), g.nr, g.nz);

    // original J-form through φ_u = ω Φ_u
    double I_J = du + ga + coup + wsum;
    if (gsp) {
        const double phi_dir = 0.5 * w2 * quadform(pb.Lphi, gs.Phi.data());
        const double phi_coup = 0.5 * w2 * sum(c2.data(), g.nr, g.nz);
        I_J -= phi_dir + phi_coup;
    } else {
        I_J -= 0.0;
    }

    // rearranged form with the ½∫(1-ω²[1-Φ])u² - ∫F(u) tail
    const double I_re = du + ga + coup + sum(fpot.data(), g.nr, g.nz);

    const double scale = std::abs(du) + std::abs(ga) + std::abs(coup) + std::abs(wsum) + 1e-300;
    const double d_J = std::abs(I_J - I_work) / scale;
    const double d_re = std::abs(I_re - I_work) / scale;
    const double tol = std::max(10.0 * lin_tol, 1e-8);
    rep.measurements = {{"I_working", I_work}, {"I_J_form", I_J},   {"I_rearranged", I_re},
                        {"rel_diff_J", d_J},   {"rel_diff_re", d_re}, {"tolerance", tol}};
    rep.pass = d_J <= tol && d_re <= tol;
    return rep;
}

CheckReport check_forms_random(int trials, const ModelParams& P, const CylGrid& g,
                               unsigned long seed, double lin_tol) {
    CheckReport rep;
    rep.name = "forms_random";
    rep.seed = seed;
    rep.params = {{"trials", trials}, {"omega", P.omega}, {"k", P.k}, {"p", P.p}};
    std::mt19937 rng((unsigned)seed);
    json runs = json::array();
    bool all = true;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        VortexState S(g);
        S.u = random_smooth_field(g, rng, 3, 0.5 + uniform01(rng), false);
        S.b = random_smooth_field(g, rng, 3, 0.5 + uniform01(rng), false);
        CheckReport r = check_reduced_forms_agree(S, P, g, lin_tol);
        worst = std::max({worst, r.measurements["rel_diff_J"].get<double>(),
                          r.measurements["rel_diff_re"].get<double>()});
        all = all && r.pass;
        runs.push_back(r.measurements);
    }
    rep.measurements = {{"worst_rel_diff", worst}, {"runs", runs}};
    rep.pass = all;
    return rep;
}

}  // namespace kgmv
