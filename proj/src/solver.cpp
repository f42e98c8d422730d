#include "kgmv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <limits>

#include "kgmv/minres.hpp"

namespace kgmv {

namespace {

double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * (3.0 - 2.0 * t);
}

struct Eval {
    double I = 0.0;
    ScalarField gu, gb;
    double gn = 0.0;
    GaussSolution gs;
    bool has_gs = false;
};

// Value + gradient sharing one Gauss solve; b-gradient masked when the
// winding number is zero (electrostatic branch holds b fixed).
Eval evaluate(const Problem& pb, const VortexState& S, const ScalarField* warm) {
    Eval e;
    const GaussSolution* gsp = nullptr;
    if (pb.needs_gauss()) {
        e.gs = pb.gauss(S.u, warm);
        e.has_gs = true;
        gsp = &e.gs;
    }
    e.I = pb.value(S, gsp);
    pb.gradient(S, e.gu, e.gb, gsp);
    if (pb.P.k == 0) e.gb.v.assign(e.gb.v.size(), 0.0);
    e.gn = pb.grad_norm(e.gu, e.gb);
    return e;
}

double value_only(const Problem& pb, const VortexState& S, const ScalarField* warm) {
    if (!pb.needs_gauss()) return pb.value(S, nullptr);
    GaussSolution gs = pb.gauss(S.u, warm);
    return pb.value(S, &gs);
}

// Palais-Smale cell inequality on an iterate; a real violation means the
// discretization is broken, so treat it as fatal.
double checked_ps_margin(const Problem& pb, const ScalarField& u, const GaussSolution* gs) {
    ScalarField zero;
    const ScalarField* Phi;
    if (gs) {
        Phi = &gs->Phi;
    } else {
        zero = ScalarField(pb.g);
        Phi = &zero;
    }
    const double m = pb.ps_margin_min(u, *Phi);
    double umax = 0.0;
    for (double v : u.v) umax = std::max(umax, std::abs(v));
    if (m < -1e-9 * std::max(1.0, umax * umax))
        throw SolverError("descend: Palais-Smale cell inequality violated on an iterate");
    return m;
}

VortexState step_state(const VortexState& S, double alpha, const ScalarField& du,
                       const ScalarField& db) {
    VortexState T = S;
    for (size_t s = 0; s < T.u.v.size(); ++s) {
        T.u.v[s] += alpha * du.v[s];
        T.b.v[s] += alpha * db.v[s];
    }
    return T;
}

void record(std::vector<HistoryEntry>& h, int it, double I, double gn) {
    h.push_back({it, I, gn});
}

SolveReport finalize_report(const Problem& pb, const SolverOptions& opts, VortexState S,
                            double gn, int iters, bool grad_ok,
                            std::vector<HistoryEntry> history) {
    SolveReport rep;
    rep.state = std::move(S);
    rep.iterations = iters;
    rep.history = std::move(history);
    rep.grad_norm = gn;

    GaussSolution gs = pb.gauss(rep.state.u);
    rep.Phi = gs.Phi;
    rep.gauss_iterations = gs.iterations;
    rep.gauss_residual = gs.residual;

    const GaussSolution* gsp = pb.needs_gauss() ? &gs : nullptr;
    rep.I_value = pb.value(rep.state, gsp);
    rep.energy = pb.energy(rep.state, gsp);
    auto res = pb.strong_residuals(rep.state.u, rep.Phi, rep.state.b);
    rep.residual_z1 = res[0];
    rep.residual_z3 = res[1];
    rep.residual_z4 = res[2];

    rep.u_lp_p = lp_norm_p(rep.state.u, pb.g, pb.P.p);
    rep.nontrivial = rep.u_lp_p >= opts.trivial_tol;
    rep.u_min = *std::min_element(rep.state.u.v.begin(), rep.state.u.v.end());
    rep.ps_margin_min = pb.ps_margin_min(rep.state.u, rep.Phi);

    double un = pb.norm(rep.state.u);
    if (un > 0.0) {
        ScalarField d(pb.g);
        for (int i = 0; i < pb.g.nr; ++i)
            for (int j = 0; j < pb.g.nz; ++j)
                d(i, j) = rep.state.u(i, j) - rep.state.u(i, pb.g.nz - 1 - j);
        rep.z_asymmetry = pb.norm(d) / un;
    }
    rep.converged = grad_ok && std::isfinite(rep.I_value) && rep.u_min >= -1e-10;
    rep.mode_used = opts.mode;
    return rep;
}

SolveReport descend_gradient_flow(const VortexState& S0, const Problem& pb,
                                  const SolverOptions& opts) {
    VortexState S = S0;
    Eval e = evaluate(pb, S, nullptr);
    if (!std::isfinite(e.I))
        throw SolverError("descend: functional non-finite at the initial state (NaN abort)");

    std::vector<HistoryEntry> history;
    record(history, 0, e.I, e.gn);

    // I is unbounded below along u-rays; once the flow has ridden past this
    // floor it cannot reach a critical point any more, so stop and keep the
    // lowest-gradient nontrivial iterate for diagnostics and refinement.
    const double floor_I = -10.0 * (std::abs(e.I) + 1.0);
    double ps_min = checked_ps_margin(pb, S.u, e.has_gs ? &e.gs : nullptr);
    VortexState best = S;
    double best_gn = lp_norm_p(S.u, pb.g, pb.P.p) >= opts.trivial_tol
                         ? e.gn
                         : std::numeric_limits<double>::infinity();

    double alpha = opts.step0;
    int it = 0;
    bool grad_ok = e.gn <= opts.grad_tol;
    while (it < opts.max_iters && !grad_ok) {
        ++it;
        const double gg = e.gn * e.gn;
        alpha = std::min(2.0 * alpha, 1e3 * opts.step0);
        bool accepted = false;
        VortexState T;
        double It = 0.0;
        while (alpha > 1e-18 * opts.step0) {
            T = step_state(S, -alpha, e.gu, e.gb);
            It = value_only(pb, T, e.has_gs ? &e.gs.Phi : nullptr);
            if (std::isfinite(It) && It <= e.I - opts.armijo_c * alpha * gg) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;  // step collapsed: no further descent possible
        S = std::move(T);
        e = evaluate(pb, S, e.has_gs ? &e.gs.Phi : nullptr);
        if (!std::isfinite(e.I))
            throw SolverError("descend: functional became non-finite (NaN abort)");
        record(history, it, e.I, e.gn);
        ps_min = std::min(ps_min, checked_ps_margin(pb, S.u, e.has_gs ? &e.gs : nullptr));
        if (e.gn < best_gn && lp_norm_p(S.u, pb.g, pb.P.p) >= opts.trivial_tol) {
            best_gn = e.gn;
            best = S;
        }
        grad_ok = e.gn <= opts.grad_tol;
        if (e.I < floor_I) break;  // slid off the pass into the unbounded branch
    }
    if (!grad_ok && std::isfinite(best_gn)) {
        S = std::move(best);
        e = evaluate(pb, S, nullptr);
    }
    SolveReport rep =
        finalize_report(pb, opts, std::move(S), e.gn, it, grad_ok, std::move(history));
    rep.ps_margin_min = std::min(rep.ps_margin_min, ps_min);
    return rep;
}

// Conditional gauge minimizer along the path. For fixed u the functional is
// a strictly convex quadratic in b, so taking b = b*(u) is an exact descent
// move and turns the path search into a problem in u alone (the same
// natural-constraint reduction used for φ). Warm-started CG keeps it cheap.
class GaugeRelaxer {
  public:
    explicit GaugeRelaxer(const Problem& pb) : pb_(pb) {}

    ScalarField solve(const ScalarField& u) {
        ScalarField b(pb_.g);
        if (pb_.P.k == 0) return b;
        StencilOp A = pb_.Lb;
        std::vector<double> rhs(pb_.w.size());
        for (size_t s = 0; s < pb_.w.size(); ++s) {
            const double m = pb_.w[s] * u.v[s] * u.v[s] * pb_.inv_r2[s];
            A.bnd[s] += m;
            rhs[s] = (double)pb_.P.k * m;
        }
        A.finalize();
        std::vector<double> x = have_warm_ ? warm_ : std::vector<double>(rhs.size(), 0.0);
        CgResult cg = cg_solve(A, rhs, x, 1e-11, 20 * pb_.g.cells() + 200);
        if (!cg.converged)
            throw SolverError("descend(mountain_pass): gauge relaxation CG failed");
        warm_ = x;
        have_warm_ = true;
        b.v = std::move(x);
        return b;
    }

  private:
    const Problem& pb_;
    std::vector<double> warm_;
    bool have_warm_ = false;
};

double udist_w(const Problem& pb, const ScalarField& a, const ScalarField& b) {
    double acc = 0.0;
    for (size_t s = 0; s < a.v.size(); ++s) {
        const double d = a.v[s] - b.v[s];
        acc += pb.w[s] * d * d;
    }
    return std::sqrt(acc);
}

// Equal-arclength resampling of a node range [lo, hi] of the polyline,
// keeping both ends fixed. Anchoring the current maximum node and
// resampling each side separately keeps node density uniform without
// perturbing the converging node.
void resample_segment(const Problem& pb, std::vector<ScalarField>& upath, int lo, int hi) {
    const int M = hi - lo;
    if (M < 2) return;
    std::vector<double> cum(M + 1, 0.0);
    for (int m = 1; m <= M; ++m)
        cum[m] = cum[m - 1] + udist_w(pb, upath[lo + m], upath[lo + m - 1]);
    if (cum[M] <= 0.0) return;
    std::vector<ScalarField> fresh(M - 1);
    for (int m = 1; m < M; ++m) {
        const double target = cum[M] * m / M;
        int seg = 1;
        while (seg < M && cum[seg] < target) ++seg;
        const double len = cum[seg] - cum[seg - 1];
        const double t = len > 0.0 ? (target - cum[seg - 1]) / len : 0.0;
        fresh[m - 1] = ScalarField(pb.g);
        for (size_t s = 0; s < fresh[m - 1].v.size(); ++s)
            fresh[m - 1].v[s] =
                (1.0 - t) * upath[lo + seg - 1].v[s] + t * upath[lo + seg].v[s];
    }
    for (int m = 1; m < M; ++m) upath[lo + m] = std::move(fresh[m - 1]);
}

void redistribute_upath(const Problem& pb, std::vector<ScalarField>& upath, int anchor) {
    const int N = (int)upath.size();
    if (anchor <= 0 || anchor >= N - 1) {
        resample_segment(pb, upath, 0, N - 1);
        return;
    }
    resample_segment(pb, upath, 0, anchor);
    resample_segment(pb, upath, anchor, N - 1);
}

SolveReport descend_mountain_pass(const VortexState& S0, const Problem& pb,
                                  const SolverOptions& opts) {
    const int N = std::max(8, opts.path_points);
    const double I_end = value_only(pb, S0, nullptr);
    if (!(I_end <= 0.0))
        throw std::invalid_argument("descend(mountain_pass): endpoint must have I <= 0");

    GaugeRelaxer relaxer(pb);
    ScalarField warm_phi;
    bool have_phi = false;

    // value and u-gradient of I(u, b*(u)); the b-gradient vanishes at the
    // conditional minimizer, so the u-part is the full gradient there.
    // Gradient evaluations double as the iterate hook for the
    // Palais-Smale inequality check.
    double ps_min = std::numeric_limits<double>::infinity();
    auto eval_node = [&](const ScalarField& u, ScalarField* gu_out,
                         double* gn_out) -> double {
        VortexState S(pb.g);
        S.u = u;
        S.b = relaxer.solve(u);
        GaussSolution gs;
        const GaussSolution* gsp = nullptr;
        if (pb.needs_gauss()) {
            gs = pb.gauss(S.u, have_phi ? &warm_phi : nullptr);
            warm_phi = gs.Phi;
            have_phi = true;
            gsp = &gs;
        }
        const double I = pb.value(S, gsp);
        if (gu_out) {
            ScalarField gb;
            pb.gradient(S, *gu_out, gb, gsp);
            *gn_out = std::sqrt(pb.inner(*gu_out, *gu_out) + pb.inner(gb, gb));
            ps_min = std::min(ps_min, checked_ps_margin(pb, u, gsp));
        }
        return I;
    };

    std::vector<ScalarField> upath(N);
    std::vector<double> Ivals(N);
    for (int m = 0; m < N; ++m) {
        const double t = (double)m / (N - 1);
        upath[m] = ScalarField(pb.g);
        for (size_t s = 0; s < S0.u.v.size(); ++s) upath[m].v[s] = t * S0.u.v[s];
        Ivals[m] = (m == 0) ? 0.0
                            : (m == N - 1 ? I_end : eval_node(upath[m], nullptr, nullptr));
    }

    std::vector<HistoryEntry> history;
    ScalarField best_u;
    double best_gn = std::numeric_limits<double>::infinity();
    double alpha = opts.step0;
    int it = 0;
    bool grad_ok = false;
    int since_redistribute = 0;

    ScalarField gu(pb.g), d(pb.g), tau(pb.g);
    while (it < opts.max_iters) {
        ++it;
        int mstar = 1;
        for (int m = 1; m < N - 1; ++m)
            if (Ivals[m] > Ivals[mstar]) mstar = m;
        if (Ivals[0] >= Ivals[mstar] || Ivals[N - 1] >= Ivals[mstar])
            throw SolverError("descend(mountain_pass): path maximum at an endpoint");

        double gn = 0.0;
        const double Im = eval_node(upath[mstar], &gu, &gn);
        Ivals[mstar] = Im;
        if (!std::isfinite(Im))
            throw SolverError("descend: functional became non-finite (NaN abort)");
        record(history, it, Im, gn);
        if (gn < best_gn && lp_norm_p(upath[mstar], pb.g, pb.P.p) >= opts.trivial_tol) {
            best_gn = gn;
            best_u = upath[mstar];
        }
        if (gn <= opts.grad_tol) {
            grad_ok = true;
            best_u = upath[mstar];
            best_gn = gn;
            break;
        }

        // tangent through the neighbors; the relocation climbs along the
        // path (reversed tangential gradient) while descending
        // transversally, so its fixed point is the pass itself
        for (size_t s = 0; s < tau.v.size(); ++s)
            tau.v[s] = upath[mstar + 1].v[s] - upath[mstar - 1].v[s];
        const double tn = pb.norm(tau);
        if (tn > 0.0)
            for (size_t s = 0; s < tau.v.size(); ++s) tau.v[s] /= tn;
        const double gt = tn > 0.0 ? pb.inner(gu, tau) : 0.0;

        const double spacing = std::min(udist_w(pb, upath[mstar], upath[mstar - 1]),
                                        udist_w(pb, upath[mstar], upath[mstar + 1]));
        bool accepted = false;
        ScalarField trial(pb.g);

        // climbing step, accepted on gradient-norm decrease
        {
            for (size_t s = 0; s < d.v.size(); ++s)
                d.v[s] = -gu.v[s] + 2.0 * gt * tau.v[s];
            const double dn = pb.norm(d);
            if (dn > 0.0) {
                const double alpha_cap = spacing / dn + 1e-300;
                double ac = std::min(2.0 * alpha, alpha_cap);
                for (int bt = 0; bt < 10 && !accepted; ++bt) {
                    for (size_t s = 0; s < trial.v.size(); ++s)
                        trial.v[s] = upath[mstar].v[s] + ac * d.v[s];
                    ScalarField gu_t(pb.g);
                    double gn_t = 0.0;
                    const double It = eval_node(trial, &gu_t, &gn_t);
                    if (std::isfinite(It) && gn_t <= (1.0 - 1e-3 * ac / alpha_cap) * gn) {
                        upath[mstar] = trial;
                        Ivals[mstar] = It;
                        accepted = true;
                        alpha = ac;
                        break;
                    }
                    ac *= 0.5;
                }
            }
        }

        // fall back to a transversal Armijo descent step
        if (!accepted) {
            double dd;
            if (tn > 0.0) {
                for (size_t s = 0; s < d.v.size(); ++s) d.v[s] = -(gu.v[s] - gt * tau.v[s]);
                dd = std::max(0.0, gn * gn - gt * gt);
            } else {
                for (size_t s = 0; s < d.v.size(); ++s) d.v[s] = -gu.v[s];
                dd = gn * gn;
            }
            if (dd > 0.0) {
                const double alpha_cap = 1.5 * spacing / std::sqrt(dd) + 1e-300;
                double ac = std::min(2.0 * alpha, alpha_cap);
                while (ac > 1e-16 * alpha_cap) {
                    for (size_t s = 0; s < trial.v.size(); ++s)
                        trial.v[s] = upath[mstar].v[s] + ac * d.v[s];
                    const double It = eval_node(trial, nullptr, nullptr);
                    if (std::isfinite(It) && It <= Im - opts.armijo_c * ac * dd) {
                        upath[mstar] = trial;
                        Ivals[mstar] = It;
                        accepted = true;
                        alpha = ac;
                        break;
                    }
                    ac *= 0.5;
                }
            }
        }
        ++since_redistribute;
        if (!accepted || since_redistribute >= 8) {
            redistribute_upath(pb, upath, mstar);
            for (int m = 1; m < N - 1; ++m)
                if (m != mstar) Ivals[m] = eval_node(upath[m], nullptr, nullptr);
            since_redistribute = 0;
            if (!accepted) alpha = opts.step0;
        }
    }

    VortexState best(pb.g);
    if (best_gn == std::numeric_limits<double>::infinity()) {
        int mstar = 1;
        for (int m = 1; m < N - 1; ++m)
            if (Ivals[m] > Ivals[mstar]) mstar = m;
        best_u = upath[mstar];
        eval_node(best_u, &gu, &best_gn);
    }
    best.u = best_u;
    best.b = relaxer.solve(best_u);
    SolveReport rep =
        finalize_report(pb, opts, std::move(best), best_gn, it, grad_ok, std::move(history));
    if (std::isfinite(ps_min)) rep.ps_margin_min = std::min(rep.ps_margin_min, ps_min);
    return rep;
}

// One exact-Hessian Newton/MINRES refinement pass on grad I = 0.
// Returns iterations used; state and eval are updated in place.
int newton_refine(const Problem& pb, VortexState& S, Eval& e, const SolverOptions& opts,
                  std::vector<HistoryEntry>& history, int it_offset) {
    const size_t n = pb.w.size();
    const bool fix_b = pb.P.k == 0;
    const double w2 = pb.P.omega * pb.P.omega;

    std::vector<double> sqw(n);
    for (size_t s = 0; s < n; ++s) sqw[s] = std::sqrt(pb.w[s]);

    int used = 0;
    double gn_window = e.gn;
    for (int nit = 1; nit <= opts.polish_max_iters; ++nit) {
        if (e.gn <= opts.polish_tol) break;
        ++used;

        // Gauss operator factored once per outer iterate for the Φ chain term
        std::unique_ptr<BandCholesky> chol;
        std::vector<double> one_minus_phi(n, 1.0);
        if (pb.needs_gauss()) {
            StencilOp A = pb.Lphi;
            for (size_t s = 0; s < n; ++s) A.bnd[s] += pb.w[s] * S.u.v[s] * S.u.v[s];
            A.finalize();
            chol = std::make_unique<BandCholesky>(A);
            for (size_t s = 0; s < n; ++s) one_minus_phi[s] = 1.0 - e.gs.Phi.v[s];
        }

        std::vector<double> wsec(n), coupb(n), diagu(n);
        const double kk = (double)pb.P.k;
        for (size_t s = 0; s < n; ++s) {
            const double u = S.u.v[s];
            const double db = S.b.v[s] - kk;
            wsec[s] = Wsecond(u, pb.P);
            coupb[s] = 2.0 * db * u * pb.inv_r2[s];
            diagu[s] = db * db * pb.inv_r2[s] + wsec[s] -
                       (pb.needs_gauss() ? w2 * one_minus_phi[s] * one_minus_phi[s] : 0.0);
        }

        std::vector<double> vu(n), vb(n), hu(n), hb(n), dphi(n);
        auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
            for (size_t s = 0; s < n; ++s) {
                vu[s] = x[s] / sqw[s];
                vb[s] = fix_b ? 0.0 : x[n + s] / sqw[s];
            }
            apply_stencil(pb.Lu, vu.data(), hu.data());
            if (!fix_b) apply_stencil(pb.Lb, vb.data(), hb.data());
            if (pb.needs_gauss()) {
                for (size_t s = 0; s < n; ++s)
                    dphi[s] = 2.0 * pb.w[s] * S.u.v[s] * one_minus_phi[s] * vu[s];
                chol->solve(dphi);
            }
            for (size_t s = 0; s < n; ++s) {
                double r = hu[s] / pb.w[s] + diagu[s] * vu[s] + (fix_b ? 0.0 : coupb[s] * vb[s]);
                if (pb.needs_gauss()) r += 2.0 * w2 * one_minus_phi[s] * S.u.v[s] * dphi[s];
                y[s] = sqw[s] * r;
                double rb = 0.0;
                if (!fix_b)
                    rb = hb[s] / pb.w[s] + S.u.v[s] * S.u.v[s] * pb.inv_r2[s] * vb[s] +
                         coupb[s] * vu[s];
                y[n + s] = fix_b ? 0.0 : sqw[s] * rb;
            }
        };

        std::vector<double> rhs(2 * n), d(2 * n);
        for (size_t s = 0; s < n; ++s) {
            rhs[s] = -sqw[s] * e.gu.v[s];
            rhs[n + s] = fix_b ? 0.0 : -sqw[s] * e.gb.v[s];
        }
        // inexact Newton forcing: loose directions far out, tight near the end
        const double mtol = std::clamp(0.03 * std::sqrt(e.gn), 1e-6, 0.05);
        minres_solve(apply, rhs, d, mtol, 1000, 2 * pb.g.nr, pb.g.nz);

        ScalarField du(pb.g), db(pb.g);
        for (size_t s = 0; s < n; ++s) {
            du.v[s] = d[s] / sqw[s];
            db.v[s] = fix_b ? 0.0 : d[n + s] / sqw[s];
        }

        // damped acceptance on the gradient norm; demand real progress
        double alpha = 1.0;
        bool ok = false;
        while (alpha > 1.0 / 4096.0) {
            VortexState T = step_state(S, alpha, du, db);
            Eval et = evaluate(pb, T, e.has_gs ? &e.gs.Phi : nullptr);
            if (std::isfinite(et.I) &&
                (et.gn <= (1.0 - 0.01 * alpha) * e.gn || et.gn <= opts.polish_tol)) {
                S = std::move(T);
                e = std::move(et);
                ok = true;
                break;
            }
            alpha *= 0.5;
        }
        record(history, it_offset + nit, e.I, e.gn);
        if (!ok) break;
        if (nit % 8 == 0) {
            if (e.gn > 0.5 * gn_window) break;  // stagnating
            gn_window = e.gn;
        }
    }
    return used;
}

}  // namespace

VortexState initial_guess(const CylGrid& g, const ModelParams& P, double amplitude, double width,
                          double center_r) {
    if (!(amplitude > 0.0) || !(width > 0.0))
        throw std::invalid_argument("initial_guess: amplitude and width must be positive");
    const int m = std::max(1, std::abs(P.k));
    const double margin = std::min(g.r_max, g.z_half) / 6.0;
    VortexState S(g);
    for (int i = 0; i < g.nr; ++i) {
        const double r = g.r(i);
        const double cut_r = smoothstep((g.r_max - r) / margin);
        for (int j = 0; j < g.nz; ++j) {
            const double z = g.z(j);
            const double cut = cut_r * smoothstep((g.z_half - std::abs(z)) / margin);
            const double arg = ((r - center_r) * (r - center_r) + z * z) / (width * width);
            S.u(i, j) = amplitude * std::pow(r / width, m) * std::exp(-arg) * cut;
        }
    }
    return S;
}

RayScan ray_scan(const ScalarField& u0, const ModelParams& P, const CylGrid& g, double t_max,
                 int n_samples, double lin_tol) {
    require_on_grid(u0, g, "ray_scan");
    if (n_samples < 4) throw std::invalid_argument("ray_scan: need at least 4 samples");
    if (!(t_max > 0.0)) throw std::invalid_argument("ray_scan: t_max must be positive");
    double u0max = 0.0, u0min = 0.0;
    for (double v : u0.v) {
        u0max = std::max(u0max, v);
        u0min = std::min(u0min, v);
    }
    if (u0max == 0.0 && u0min == 0.0)
        throw std::invalid_argument("ray_scan: u0 must be nonzero");
    if (u0min < 0.0) throw std::invalid_argument("ray_scan: u0 must be nonnegative");

    Problem pb(g, P, lin_tol);
    RayScan out;
    const double t_lo = t_max * 1e-3;
    ScalarField warm;
    bool have_warm = false;
    double best_I = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_samples; ++j) {
        const double t = t_lo * std::pow(t_max / t_lo, (double)j / (n_samples - 1));
        VortexState S(g);
        for (size_t s = 0; s < u0.v.size(); ++s) S.u.v[s] = t * u0.v[s];
        double I;
        if (pb.needs_gauss()) {
            GaussSolution gs = pb.gauss(S.u, have_warm ? &warm : nullptr);
            I = pb.value(S, &gs);
            warm = gs.Phi;
            have_warm = true;
        } else {
            I = pb.value(S, nullptr);
        }
        out.samples.emplace_back(t, I);
        if (I > best_I) {
            best_I = I;
            out.t_star = t;
        }
        if (I < 0.0 && out.t_neg == 0.0) out.t_neg = t;
    }
    if (out.t_neg == 0.0)
        throw SolverError(
            "ray_scan: I(t u0, 0) stayed positive on all samples; increase t_max or the guess "
            "amplitude");
    return out;
}

ScalarField relax_gauge(const ScalarField& u, const ModelParams& P, const CylGrid& g,
                        bool axis_parity_relaxed) {
    (void)axis_parity_relaxed;
    ScalarField b(g);
    if (P.k == 0) return b;
    StencilOp A = stiffness_gauge(g);
    auto w = volume_weights(g);
    std::vector<double> rhs(w.size());
    for (int i = 0; i < g.nr; ++i) {
        const double ir2 = 1.0 / (g.r(i) * g.r(i));
        for (int j = 0; j < g.nz; ++j) {
            const size_t s = g.idx(i, j);
            const double m = w[s] * u.v[s] * u.v[s] * ir2;
            A.bnd[s] += m;
            rhs[s] = (double)P.k * m;
        }
    }
    A.finalize();
    BandCholesky chol(A);
    chol.solve(rhs);
    b.v = std::move(rhs);
    return b;
}

SolveReport descend(const VortexState& S0, const ModelParams& P, const CylGrid& g,
                    const SolverOptions& opts) {
    auto bad = validate(P);
    if (!bad.empty()) throw std::invalid_argument("descend: invalid parameters: " + bad.front());
    if (opts.max_iters < 0 || !(opts.grad_tol > 0.0) || !(opts.step0 > 0.0) ||
        !(opts.armijo_c > 0.0 && opts.armijo_c < 1.0) || !(opts.t_max > 0.0) ||
        !(opts.lin_tol > 0.0))
        throw std::invalid_argument("descend: invalid solver options");
    require_on_grid(S0.u, g, "descend");
    require_on_grid(S0.b, g, "descend");
    Problem pb(g, P, opts.lin_tol, opts.axis_parity_relaxed);
    if (opts.mode == SolveMode::gradient_flow) return descend_gradient_flow(S0, pb, opts);
    return descend_mountain_pass(S0, pb, opts);
}

SolveReport solve_vortex(const ModelParams& P, const CylGrid& g, const SolverOptions& opts,
                         const GuessParams& guess) {
    auto bad = validate(P);
    if (!bad.empty()) {
        std::string msg = "solve_vortex: invalid parameters";
        for (const auto& m : bad) msg += "; " + m;
        throw std::invalid_argument(msg);
    }

    Problem pb(g, P, opts.lin_tol, opts.axis_parity_relaxed);
    VortexState S0 = initial_guess(g, P, guess.amplitude, guess.width, guess.center_r);
    RayScan ray = ray_scan(S0.u, P, g, opts.t_max, opts.ray_samples, opts.lin_tol);

    auto attempt = [&](SolveMode mode) {
        // Descend in stages: a bounded path-deformation (or flow) stage
        // followed by Newton refinement; enlarge the stage budget only if
        // the refinement cannot capture a critical point yet.
        SolveReport rep;
        int budget = std::min(opts.max_iters, opts.descend_budget);
        int spent = 0;
        for (int stage = 0; stage < 3; ++stage) {
            SolverOptions o = opts;
            o.mode = mode;
            o.max_iters = budget;
            const double t0 = (mode == SolveMode::gradient_flow) ? ray.t_star : ray.t_neg;
            VortexState start(g);
            for (size_t s = 0; s < S0.u.v.size(); ++s) start.u.v[s] = t0 * S0.u.v[s];
            rep = descend(start, P, g, o);
            spent += rep.iterations;

            if (opts.polish) {
                VortexState S = rep.state;
                if (P.k != 0) S.b = relax_gauge(S.u, P, g);
                Eval e = evaluate(pb, S, nullptr);
                int used = newton_refine(pb, S, e, o, rep.history, rep.iterations);
                rep.polish_iterations = used;
                if (e.gn < rep.grad_norm) {
                    SolveReport refined =
                        finalize_report(pb, o, std::move(S), e.gn, spent,
                                        e.gn <= opts.grad_tol, std::move(rep.history));
                    refined.polish_iterations = used;
                    rep = std::move(refined);
                }
            }
            rep.iterations = spent;
            if (rep.converged || spent >= opts.max_iters || mode == SolveMode::gradient_flow)
                break;
            budget = std::min(3 * budget, opts.max_iters - spent);
            if (budget <= 0) break;
        }
        rep.t_star = ray.t_star;
        rep.t_neg = ray.t_neg;
        rep.mode_used = mode;
        return rep;
    };

    SolveReport rep = attempt(opts.mode);
    if (opts.allow_mode_fallback && opts.mode == SolveMode::gradient_flow &&
        !(rep.converged && rep.nontrivial)) {
        SolveReport alt = attempt(SolveMode::mountain_pass);
        if ((alt.converged && alt.nontrivial) || (!rep.converged && alt.grad_norm < rep.grad_norm)) {
            alt.mode_fallback = true;
            rep = std::move(alt);
        }
    }
    return rep;
}

}  // namespace kgmv
