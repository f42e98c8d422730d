#include "kgmv/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kgmv {

namespace {

void check_valid(const ModelParams& P, const char* who) {
    auto bad = validate(P);
    if (!bad.empty()) {
        std::ostringstream os;
        os << who << ": invalid parameters";
        for (const auto& m : bad) os << "; " << m;
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

Problem::Problem(const CylGrid& g_, const ModelParams& P_, double lin_tol_,
                 bool axis_parity_relaxed)
    : g(g_), P(P_), lin_tol(lin_tol_) {
    axis_pin_u = (P.k == 0) && !axis_parity_relaxed;
    Lu = stiffness_r(g, axis_pin_u);
    Lphi = stiffness_r(g, false);
    Lb = stiffness_gauge(g);
    w = volume_weights(g);
    inv_r2.resize(w.size());
    for (int i = 0; i < g.nr; ++i) {
        const double ir2 = 1.0 / (g.r(i) * g.r(i));
        for (int j = 0; j < g.nz; ++j) inv_r2[g.idx(i, j)] = ir2;
    }
}

GaussSolution Problem::gauss(const ScalarField& u, const ScalarField* warm_start) const {
    GaussSystem sys;
    sys.A = Lphi;
    sys.rhs.resize(w.size());
    for (size_t s = 0; s < w.size(); ++s) {
        const double m = w[s] * u.v[s] * u.v[s];
        sys.A.bnd[s] += m;
        sys.rhs[s] = m;
    }
    sys.A.finalize();
    std::vector<double> x(w.size(), 0.0);
    if (warm_start) x = warm_start->v;
    CgResult cg = cg_solve(sys.A, sys.rhs, x, lin_tol, 20 * g.cells() + 200);
    if (!cg.converged)
        throw GaussError("gauss: CG failed to reach tolerance", cg.iterations, cg.rel_residual);
    GaussSolution out;
    out.Phi = ScalarField(g);
    out.Phi.v = std::move(x);
    out.iterations = cg.iterations;
    out.residual = cg.rel_residual;
    auto [mn, mx] = std::minmax_element(out.Phi.v.begin(), out.Phi.v.end());
    out.min_Phi = *mn;
    out.max_Phi = *mx;
    const double bound = std::max(1e-10, 1e3 * lin_tol);
    if (out.min_Phi < -bound || out.max_Phi > 1.0 + bound)
        throw GaussError("gauss: discrete maximum principle violated", cg.iterations,
                         cg.rel_residual);
    return out;
}

double Problem::value(const VortexState& S, const GaussSolution* gs) const {
    const size_t n = w.size();
    const double kk = (double)P.k;
    double I = 0.5 * quadform(Lu, S.u.data()) + 0.5 * quadform(Lb, S.b.data());

    std::vector<double> tmp(n);
    for (size_t s = 0; s < n; ++s) {
        const double db = S.b.v[s] - kk;
        const double uu = S.u.v[s] * S.u.v[s];
        tmp[s] = w[s] * (0.5 * db * db * uu * inv_r2[s] + W(S.u.v[s], P));
    }
    I += sum(tmp.data(), g.nr, g.nz);

    if (needs_gauss()) {
        GaussSolution local;
        if (!gs) {
            local = gauss(S.u);
            gs = &local;
        }
        for (size_t s = 0; s < n; ++s)
            tmp[s] = w[s] * (1.0 - gs->Phi.v[s]) * S.u.v[s] * S.u.v[s];
        I -= 0.5 * P.omega * P.omega * sum(tmp.data(), g.nr, g.nz);
    }
    return I;
}

void Problem::gradient(const VortexState& S, ScalarField& gu, ScalarField& gb,
                       const GaussSolution* gs) const {
    const size_t n = w.size();
    const double kk = (double)P.k;
    gu = ScalarField(g);
    gb = ScalarField(g);
    apply_stencil(Lu, S.u.data(), gu.data());
    apply_stencil(Lb, S.b.data(), gb.data());

    GaussSolution local;
    if (needs_gauss() && !gs) {
        local = gauss(S.u);
        gs = &local;
    }
    const double w2 = P.omega * P.omega;
    for (size_t s = 0; s < n; ++s) {
        const double u = S.u.v[s];
        const double db = S.b.v[s] - kk;
        double gus = gu.v[s] / w[s] + db * db * inv_r2[s] * u + Wprime(u, P);
        if (needs_gauss()) {
            const double om = 1.0 - gs->Phi.v[s];
            gus -= w2 * om * om * u;
        }
        gu.v[s] = gus;
        gb.v[s] = gb.v[s] / w[s] + db * u * u * inv_r2[s];
    }
}

double Problem::inner(const ScalarField& a, const ScalarField& b) const {
    return dot3(w.data(), a.data(), b.data(), g.nr, g.nz);
}

double Problem::norm(const ScalarField& a) const { return std::sqrt(inner(a, a)); }

double Problem::grad_norm(const ScalarField& gu, const ScalarField& gb) const {
    return std::sqrt(inner(gu, gu) + inner(gb, gb));
}

EnergyBreakdown Problem::energy(const VortexState& S, const GaussSolution* gs) const {
    const size_t n = w.size();
    const double kk = (double)P.k;
    EnergyBreakdown e;
    e.dirichlet_u = 0.5 * quadform(Lu, S.u.data());
    e.gauge_field = 0.5 * quadform(Lb, S.b.data());

    GaussSolution local;
    if (needs_gauss() && !gs) {
        local = gauss(S.u);
        gs = &local;
    }
    const double w2 = P.omega * P.omega;
    std::vector<double> tmp(n), pot(n);
    for (size_t s = 0; s < n; ++s) {
        const double u2 = S.u.v[s] * S.u.v[s];
        const double db = S.b.v[s] - kk;
        double c = db * db * inv_r2[s] * u2;
        if (needs_gauss()) {
            const double pm = gs->Phi.v[s] - 1.0;
            c += w2 * pm * pm * u2;
        }
        tmp[s] = 0.5 * w[s] * c;
        pot[s] = w[s] * W(S.u.v[s], P);
    }
    e.coupling = sum(tmp.data(), g.nr, g.nz);
    e.potential = sum(pot.data(), g.nr, g.nz);
    e.phi_field = needs_gauss() ? 0.5 * w2 * quadform(Lphi, gs->Phi.data()) : 0.0;
    e.total = e.dirichlet_u + e.gauge_field + e.coupling + e.phi_field + e.potential;
    return e;
}

std::array<double, 3> Problem::strong_residuals(const ScalarField& u, const ScalarField& Phi,
                                                const ScalarField& b) const {
    const size_t n = w.size();
    const double kk = (double)P.k;
    const double om = P.omega;
    ScalarField lu(g), lphi(g), lb(g);
    apply_stencil(Lu, u.data(), lu.data());
    apply_stencil(Lphi, Phi.data(), lphi.data());
    apply_stencil(Lb, b.data(), lb.data());

    std::vector<double> r1(n), r3(n), r4(n);
    for (size_t s = 0; s < n; ++s) {
        const double uu = u.v[s];
        const double u2 = uu * uu;
        const double db = b.v[s] - kk;
        const double pm = Phi.v[s] - 1.0;
        r1[s] = lu.v[s] / w[s] + (db * db * inv_r2[s] - om * om * pm * pm) * uu + Wprime(uu, P);
        r3[s] = om * (lphi.v[s] / w[s] + u2 * Phi.v[s] - u2);
        r4[s] = (lb.v[s] / w[s]) / inv_r2[s] - (kk - b.v[s]) * u2;
    }
    auto wnorm = [&](const std::vector<double>& f) {
        return std::sqrt(dot3(w.data(), f.data(), f.data(), g.nr, g.nz));
    };
    return {wnorm(r1), wnorm(r3), wnorm(r4)};
}

double Problem::ps_margin_min(const ScalarField& u, const ScalarField& Phi) const {
    const double om = P.omega, p = P.p;
    double cstar = (0.5 - 1.0 / p) * (1.0 - om * om);
    if (p < 4.0) cstar += (0.5 - 2.0 / p) * om * om;
    double mn = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < w.size(); ++s) {
        const double uu = u.v[s];
        const double u2 = uu * uu;
        const double phi = om * Phi.v[s];
        const double m = W(uu, P) - Wprime(uu, P) * uu / p + (phi - om) * (phi - om) * u2 / p -
                         0.5 * om * (om - phi) * u2 - cstar * u2;
        if (m < mn) mn = m;
    }
    return mn;
}

void check_state(const VortexState& S, const CylGrid& g, const char* who) {
    require_on_grid(S.u, g, who);
    require_on_grid(S.b, g, who);
    if (!all_finite(S.u) || !all_finite(S.b))
        throw std::invalid_argument(std::string(who) + ": state has non-finite entries");
}

double reduced_I(const VortexState& S, const ModelParams& P, const CylGrid& g, double lin_tol) {
    check_valid(P, "reduced_I");
    check_state(S, g, "reduced_I");
    Problem pb(g, P, lin_tol);
    return pb.value(S);
}

std::pair<ScalarField, ScalarField> grad_I(const VortexState& S, const ModelParams& P,
                                           const CylGrid& g, double lin_tol) {
    check_valid(P, "grad_I");
    check_state(S, g, "grad_I");
    Problem pb(g, P, lin_tol);
    ScalarField gu, gb;
    pb.gradient(S, gu, gb);
    return {std::move(gu), std::move(gb)};
}

std::array<double, 3> residuals(const ScalarField& u, const ScalarField& Phi,
                                const ScalarField& b, const ModelParams& P, const CylGrid& g) {
    require_on_grid(u, g, "residuals");
    require_on_grid(Phi, g, "residuals");
    require_on_grid(b, g, "residuals");
    Problem pb(g, P);
    return pb.strong_residuals(u, Phi, b);
}

EnergyBreakdown total_energy(const VortexState& S, const ModelParams& P, const CylGrid& g,
                             double lin_tol) {
    check_valid(P, "total_energy");
    check_state(S, g, "total_energy");
    Problem pb(g, P, lin_tol);
    return pb.energy(S);
}

}  // namespace kgmv
