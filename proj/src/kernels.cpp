#include "kgmv/kernels.hpp"

#include <stdexcept>

namespace kgmv {

void StencilOp::init(int nr_, int nz_) {
    nr = nr_;
    nz = nz_;
    cr.assign((nr - 1) * (size_t)nz, 0.0);
    cz.assign(nr * (size_t)(nz - 1), 0.0);
    bnd.assign(nr * (size_t)nz, 0.0);
    diag.clear();
}

void StencilOp::finalize() {
    for (double c : cr)
        if (c < 0.0) throw std::logic_error("StencilOp: negative radial coupling");
    for (double c : cz)
        if (c < 0.0) throw std::logic_error("StencilOp: negative axial coupling");
    for (double c : bnd)
        if (c < 0.0) throw std::logic_error("StencilOp: negative boundary term");
    diag = bnd;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nz; ++j) {
            double d = diag[idx(i, j)];
            if (i > 0) d += cr[(i - 1) * (size_t)nz + j];
            if (i < nr - 1) d += cr[i * (size_t)nz + j];
            if (j > 0) d += cz[i * (size_t)(nz - 1) + (j - 1)];
            if (j < nz - 1) d += cz[i * (size_t)(nz - 1) + j];
            diag[idx(i, j)] = d;
        }
}

void apply_stencil(const StencilOp& L, const double* x, double* y) {
    const int nr = L.nr, nz = L.nz;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nr; ++i) {
        const double* xi = x + i * (size_t)nz;
        double* yi = y + i * (size_t)nz;
        const double* d = L.diag.data() + i * (size_t)nz;
        for (int j = 0; j < nz; ++j) yi[j] = d[j] * xi[j];
        if (i > 0) {
            const double* c = L.cr.data() + (i - 1) * (size_t)nz;
            const double* xm = x + (i - 1) * (size_t)nz;
            for (int j = 0; j < nz; ++j) yi[j] -= c[j] * xm[j];
        }
        if (i < nr - 1) {
            const double* c = L.cr.data() + i * (size_t)nz;
            const double* xp = x + (i + 1) * (size_t)nz;
            for (int j = 0; j < nz; ++j) yi[j] -= c[j] * xp[j];
        }
        const double* czi = L.cz.data() + i * (size_t)(nz - 1);
        for (int j = 1; j < nz; ++j) yi[j] -= czi[j - 1] * xi[j - 1];
        for (int j = 0; j < nz - 1; ++j) yi[j] -= czi[j] * xi[j + 1];
    }
}

// Row partials: radial faces (i,i+1) are charged to row i.
double quadform(const StencilOp& L, const double* x) {
    const int nr = L.nr, nz = L.nz;
    std::vector<double> part(nr, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nr; ++i) {
        const double* xi = x + i * (size_t)nz;
        double s = 0.0;
        if (i < nr - 1) {
            const double* c = L.cr.data() + i * (size_t)nz;
            const double* xp = x + (i + 1) * (size_t)nz;
            for (int j = 0; j < nz; ++j) {
                double d = xp[j] - xi[j];
                s += c[j] * d * d;
            }
        }
        const double* czi = L.cz.data() + i * (size_t)(nz - 1);
        for (int j = 0; j < nz - 1; ++j) {
            double d = xi[j + 1] - xi[j];
            s += czi[j] * d * d;
        }
        const double* b = L.bnd.data() + i * (size_t)nz;
        for (int j = 0; j < nz; ++j) s += b[j] * xi[j] * xi[j];
        part[i] = s;
    }
    double total = 0.0;
    for (int i = 0; i < nr; ++i) total += part[i];
    return total;
}

double dot(const double* a, const double* b, int nr, int nz) {
    std::vector<double> part(nr, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nr; ++i) {
        const double* ai = a + i * (size_t)nz;
        const double* bi = b + i * (size_t)nz;
        double s = 0.0;
        for (int j = 0; j < nz; ++j) s += ai[j] * bi[j];
        part[i] = s;
    }
    double total = 0.0;
    for (int i = 0; i < nr; ++i) total += part[i];
    return total;
}

double dot3(const double* a, const double* b, const double* c, int nr, int nz) {
    std::vector<double> part(nr, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nr; ++i) {
        const double* ai = a + i * (size_t)nz;
        const double* bi = b + i * (size_t)nz;
        const double* ci = c + i * (size_t)nz;
        double s = 0.0;
        for (int j = 0; j < nz; ++j) s += ai[j] * bi[j] * ci[j];
        part[i] = s;
    }
    double total = 0.0;
    for (int i = 0; i < nr; ++i) total += part[i];
    return total;
}

double sum(const double* a, int nr, int nz) {
    std::vector<double> part(nr, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nr; ++i) {
        const double* ai = a + i * (size_t)nz;
        double s = 0.0;
        for (int j = 0; j < nz; ++j) s += ai[j];
        part[i] = s;
    }
    double total = 0.0;
    for (int i = 0; i < nr; ++i) total += part[i];
    return total;
}

namespace serial {

void apply_stencil(const StencilOp& L, const double* x, double* y) {
    const int nr = L.nr, nz = L.nz;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nz; ++j) {
            size_t p = i * (size_t)nz + j;
            double v = L.diag[p] * x[p];
            if (i > 0) v -= L.cr[(i - 1) * (size_t)nz + j] * x[p - nz];
            if (i < nr - 1) v -= L.cr[i * (size_t)nz + j] * x[p + nz];
            if (j > 0) v -= L.cz[i * (size_t)(nz - 1) + j - 1] * x[p - 1];
            if (j < nz - 1) v -= L.cz[i * (size_t)(nz - 1) + j] * x[p + 1];
            y[p] = v;
        }
}

double quadform(const StencilOp& L, const double* x) {
    const int nr = L.nr, nz = L.nz;
    double s = 0.0;
    for (int i = 0; i < nr - 1; ++i)
        for (int j = 0; j < nz; ++j) {
            double d = x[(i + 1) * (size_t)nz + j] - x[i * (size_t)nz + j];
            s += L.cr[i * (size_t)nz + j] * d * d;
        }
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nz - 1; ++j) {
            double d = x[i * (size_t)nz + j + 1] - x[i * (size_t)nz + j];
            s += L.cz[i * (size_t)(nz - 1) + j] * d * d;
        }
    for (size_t p = 0; p < L.bnd.size(); ++p) s += L.bnd[p] * x[p] * x[p];
    return s;
}

double dot(const double* a, const double* b, int nr, int nz) {
    double s = 0.0;
    for (size_t p = 0; p < (size_t)nr * nz; ++p) s += a[p] * b[p];
    return s;
}

double dot3(const double* a, const double* b, const double* c, int nr, int nz) {
    double s = 0.0;
    for (size_t p = 0; p < (size_t)nr * nz; ++p) s += a[p] * b[p] * c[p];
    return s;
}

double sum(const double* a, int nr, int nz) {
    double s = 0.0;
    for (size_t p = 0; p < (size_t)nr * nz; ++p) s += a[p];
    return s;
}

}  // namespace serial
}  // namespace kgmv
