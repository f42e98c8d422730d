#include "kgmv/operators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kgmv {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

StencilOp stiffness_r(const CylGrid& g, bool axis_pin) {
    StencilOp L;
    L.init(g.nr, g.nz);
    const double hr = g.hr, hz = g.hz;
    for (int i = 0; i < g.nr - 1; ++i) {
        const double rf = (i + 1) * hr;  // face radius
        for (int j = 0; j < g.nz; ++j) L.cr[i * (size_t)g.nz + j] = two_pi * rf * hz / hr;
    }
    for (int i = 0; i < g.nr; ++i) {
        const double ri = g.r(i);
        for (int j = 0; j < g.nz - 1; ++j) L.cz[i * (size_t)(g.nz - 1) + j] = two_pi * ri * hr / hz;
    }
    for (int j = 0; j < g.nz; ++j) {
        L.bnd[L.idx(g.nr - 1, j)] += two_pi * g.r_max * 2.0 * hz / hr;
        if (axis_pin) L.bnd[L.idx(0, j)] += two_pi * (hr / 4.0) * 2.0 * hz / hr;
    }
    for (int i = 0; i < g.nr; ++i) {
        const double d = two_pi * g.r(i) * 2.0 * hr / hz;
        L.bnd[L.idx(i, 0)] += d;
        L.bnd[L.idx(i, g.nz - 1)] += d;
    }
    L.finalize();
    return L;
}

StencilOp stiffness_gauge(const CylGrid& g) {
    StencilOp L;
    L.init(g.nr, g.nz);
    const double hr = g.hr, hz = g.hz;
    for (int i = 0; i < g.nr - 1; ++i) {
        const double rf = (i + 1) * hr;
        for (int j = 0; j < g.nz; ++j) L.cr[i * (size_t)g.nz + j] = two_pi * (1.0 / rf) * hz / hr;
    }
    for (int i = 0; i < g.nr; ++i) {
        const double ri = g.r(i);
        for (int j = 0; j < g.nz - 1; ++j)
            L.cz[i * (size_t)(g.nz - 1) + j] = two_pi * (1.0 / ri) * hr / hz;
    }
    for (int j = 0; j < g.nz; ++j) {
        L.bnd[L.idx(g.nr - 1, j)] += two_pi * (1.0 / g.r_max) * 2.0 * hz / hr;
        L.bnd[L.idx(0, j)] += two_pi * (4.0 / hr) * 2.0 * hz / hr;  // axis pin at r = hr/4
    }
    for (int i = 0; i < g.nr; ++i) {
        const double d = two_pi * (1.0 / g.r(i)) * 2.0 * hr / hz;
        L.bnd[L.idx(i, 0)] += d;
        L.bnd[L.idx(i, g.nz - 1)] += d;
    }
    L.finalize();
    return L;
}

std::vector<double> volume_weights(const CylGrid& g) {
    std::vector<double> w((size_t)g.cells());
    for (int i = 0; i < g.nr; ++i) {
        const double wi = two_pi * g.r(i) * g.hr * g.hz;
        for (int j = 0; j < g.nz; ++j) w[g.idx(i, j)] = wi;
    }
    return w;
}

CgResult cg_solve(const StencilOp& L, const std::vector<double>& rhs, std::vector<double>& x,
                  double tol, int max_iters) {
    const int nr = L.nr, nz = L.nz;
    const size_t n = (size_t)nr * nz;
    if (rhs.size() != n || x.size() != n) throw std::invalid_argument("cg_solve: size mismatch");

    std::vector<double> r(n), z(n), p(n), q(n);
    const double rhs_norm = std::sqrt(dot(rhs.data(), rhs.data(), nr, nz));
    if (rhs_norm == 0.0) {
        x.assign(n, 0.0);
        return {0, 0.0, true};
    }

    apply_stencil(L, x.data(), q.data());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nz; ++j) {
            size_t s = (size_t)i * nz + j;
            r[s] = rhs[s] - q[s];
        }

    auto precond = [&](const std::vector<double>& in, std::vector<double>& out) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nz; ++j) {
                size_t s = (size_t)i * nz + j;
                out[s] = in[s] / L.diag[s];
            }
    };

    precond(r, z);
    p = z;
    double rz = dot(r.data(), z.data(), nr, nz);
    double rnorm = std::sqrt(dot(r.data(), r.data(), nr, nz));

    CgResult res;
    res.rel_residual = rnorm / rhs_norm;
    if (res.rel_residual <= tol) {
        res.converged = true;
        return res;
    }

    for (int it = 1; it <= max_iters; ++it) {
        apply_stencil(L, p.data(), q.data());
        const double pq = dot(p.data(), q.data(), nr, nz);
        if (!(pq > 0.0)) break;  // loss of positive definiteness; bail out honestly
        const double alpha = rz / pq;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nz; ++j) {
                size_t s = (size_t)i * nz + j;
                x[s] += alpha * p[s];
                r[s] -= alpha * q[s];
            }
        rnorm = std::sqrt(dot(r.data(), r.data(), nr, nz));
        res.iterations = it;
        res.rel_residual = rnorm / rhs_norm;
        if (res.rel_residual <= tol) {
            res.converged = true;
            return res;
        }
        precond(r, z);
        const double rz_new = dot(r.data(), z.data(), nr, nz);
        const double beta = rz_new / rz;
        rz = rz_new;
#pragma omp parallel for schedule(static)
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nz; ++j) {
                size_t s = (size_t)i * nz + j;
                p[s] = z[s] + beta * p[s];
            }
    }
    return res;
}

namespace {

// Matrix entry of a StencilOp in flattened indexing (q <= p assumed).
double stencil_entry(const StencilOp& L, int p, int q) {
    if (p == q) return L.diag[p];
    const int nz = L.nz;
    const int i = p / nz, j = p % nz;
    if (q == p - 1 && j > 0) return -L.cz[i * (size_t)(nz - 1) + (j - 1)];
    if (q == p - nz && i > 0) return -L.cr[(i - 1) * (size_t)nz + j];
    return 0.0;
}

}  // namespace

BandCholesky::BandCholesky(const StencilOp& L) {
    n_ = L.cells();
    bw_ = L.nz;
    f_.assign((size_t)n_ * (bw_ + 1), 0.0);
    auto fat = [&](int i, int jcol) -> double& { return f_[(size_t)i * (bw_ + 1) + (jcol - i + bw_)]; };
    for (int i = 0; i < n_; ++i) {
        const int j0 = std::max(0, i - bw_);
        for (int jcol = j0; jcol <= i; ++jcol) {
            double s = stencil_entry(L, i, jcol);
            const int k0 = std::max(j0, jcol - bw_);
            for (int k = k0; k < jcol; ++k) s -= fat(i, k) * fat(jcol, k);
            if (jcol < i) {
                fat(i, jcol) = s / fat(jcol, jcol);
            } else {
                if (!(s > 0.0)) throw std::runtime_error("BandCholesky: matrix not positive definite");
                fat(i, i) = std::sqrt(s);
            }
        }
    }
}

void BandCholesky::solve(std::vector<double>& b) const {
    if ((int)b.size() != n_) throw std::invalid_argument("BandCholesky::solve: size mismatch");
    auto fat = [&](int i, int jcol) { return f_[(size_t)i * (bw_ + 1) + (jcol - i + bw_)]; };
    for (int i = 0; i < n_; ++i) {
        double s = b[i];
        const int j0 = std::max(0, i - bw_);
        for (int j = j0; j < i; ++j) s -= fat(i, j) * b[j];
        b[i] = s / fat(i, i);
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double s = b[i];
        const int j1 = std::min(n_ - 1, i + bw_);
        for (int j = i + 1; j <= j1; ++j) s -= fat(j, i) * b[j];
        b[i] = s / fat(i, i);
    }
}

std::vector<double> dense_cholesky_solve(const StencilOp& L, const std::vector<double>& rhs) {
    const int n = L.cells();
    if (n > 64 * 64) throw std::invalid_argument("dense_cholesky_solve: grid larger than 64x64");
    if ((int)rhs.size() != n) throw std::invalid_argument("dense_cholesky_solve: size mismatch");

    // column-major lower triangle
    std::vector<double> a((size_t)n * n, 0.0);
    for (int p = 0; p < n; ++p) {
        a[(size_t)p * n + p] = L.diag[p];
        const int i = p / L.nz, j = p % L.nz;
        if (j > 0) a[(size_t)(p - 1) * n + p] = -L.cz[i * (size_t)(L.nz - 1) + (j - 1)];
        if (i > 0) a[(size_t)(p - L.nz) * n + p] = -L.cr[(i - 1) * (size_t)L.nz + j];
    }
    for (int j = 0; j < n; ++j) {
        double* colj = a.data() + (size_t)j * n;
        for (int k = 0; k < j; ++k) {
            const double ljk = a[(size_t)k * n + j];
            if (ljk == 0.0) continue;
            const double* colk = a.data() + (size_t)k * n;
            for (int i = j; i < n; ++i) colj[i] -= ljk * colk[i];
        }
        if (!(colj[j] > 0.0)) throw std::runtime_error("dense_cholesky_solve: not positive definite");
        const double d = std::sqrt(colj[j]);
        colj[j] = d;
        for (int i = j + 1; i < n; ++i) colj[i] /= d;
    }
    std::vector<double> x = rhs;
    for (int j = 0; j < n; ++j) {
        x[j] /= a[(size_t)j * n + j];
        const double xj = x[j];
        const double* colj = a.data() + (size_t)j * n;
        for (int i = j + 1; i < n; ++i) x[i] -= colj[i] * xj;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        const double* coli = a.data() + (size_t)i * n;
        for (int j = i + 1; j < n; ++j) s -= coli[j] * x[j];
        x[i] = s / coli[i];
    }
    return x;
}

}  // namespace kgmv
