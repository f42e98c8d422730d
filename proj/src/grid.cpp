#include "kgmv/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kgmv/kernels.hpp"

namespace kgmv {

CylGrid make_grid(double r_max, double z_half, int nr, int nz) {
    if (!(r_max > 0.0) || !(z_half > 0.0))
        throw GridError("make_grid: r_max and z_half must be positive");
    if (nr < 4 || nz < 4) throw GridError("make_grid: nr and nz must be at least 4");
    CylGrid g;
    g.r_max = r_max;
    g.z_half = z_half;
    g.nr = nr;
    g.nz = nz;
    g.hr = r_max / nr;
    g.hz = 2.0 * z_half / nz;
    return g;
}

void require_on_grid(const ScalarField& f, const CylGrid& g, const char* who) {
    if (!f.grid.same_shape(g) || (int)f.v.size() != g.cells())
        throw GridError(std::string(who) + ": field does not live on this grid");
}

bool all_finite(const ScalarField& f) {
    for (double x : f.v)
        if (!std::isfinite(x)) return false;
    return true;
}

double integrate_volume(const ScalarField& f, const CylGrid& g) {
    require_on_grid(f, g, "integrate_volume");
    const int nr = g.nr, nz = g.nz;
    std::vector<double> part(nr, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nr; ++i) {
        const double* fi = f.data() + i * (size_t)nz;
        double s = 0.0;
        for (int j = 0; j < nz; ++j) s += fi[j];
        part[i] = s * g.r(i);
    }
    double total = 0.0;
    for (int i = 0; i < nr; ++i) total += part[i];
    return 2.0 * std::numbers::pi * g.hr * g.hz * total;
}

double lp_norm_p(const ScalarField& f, const CylGrid& g, double p) {
    require_on_grid(f, g, "lp_norm_p");
    const int nr = g.nr, nz = g.nz;
    std::vector<double> part(nr, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nr; ++i) {
        const double* fi = f.data() + i * (size_t)nz;
        double s = 0.0;
        for (int j = 0; j < nz; ++j) s += std::pow(std::abs(fi[j]), p);
        part[i] = s * g.r(i);
    }
    double total = 0.0;
    for (int i = 0; i < nr; ++i) total += part[i];
    return 2.0 * std::numbers::pi * g.hr * g.hz * total;
}

ExtendedField ghost_extend(const ScalarField& f, const CylGrid& g, AxisParity parity, OuterRule) {
    require_on_grid(f, g, "ghost_extend");
    const int nr = g.nr, nz = g.nz;
    ExtendedField e;
    e.nr = nr;
    e.nz = nz;
    e.v.assign((size_t)(nr + 2) * (nz + 2), 0.0);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nz; ++j) e.at(i, j) = f(i, j);
    const double s = (parity == AxisParity::even) ? 1.0 : -1.0;
    for (int j = 0; j < nz; ++j) {
        e.at(-1, j) = s * f(0, j);          // mirror across r = 0
        e.at(nr, j) = -f(nr - 1, j);        // zero at the outer face
    }
    for (int i = 0; i < nr; ++i) {
        e.at(i, -1) = -f(i, 0);
        e.at(i, nz) = -f(i, nz - 1);
    }
    // corners: apply both rules in sequence (r first)
    e.at(-1, -1) = -e.at(-1, 0);
    e.at(-1, nz) = -e.at(-1, nz - 1);
    e.at(nr, -1) = -e.at(nr, 0);
    e.at(nr, nz) = -e.at(nr, nz - 1);
    return e;
}

std::pair<ScalarField, ScalarField> grad2d(const ScalarField& f, const CylGrid& g) {
    require_on_grid(f, g, "grad2d");
    const int nr = g.nr, nz = g.nz;
    ScalarField dr(g), dz(g);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nz; ++j) {
            double vr;
            if (i == 0)
                vr = (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) / (2.0 * g.hr);
            else if (i == nr - 1)
                vr = (3.0 * f(nr - 1, j) - 4.0 * f(nr - 2, j) + f(nr - 3, j)) / (2.0 * g.hr);
            else
                vr = (f(i + 1, j) - f(i - 1, j)) / (2.0 * g.hr);
            double vz;
            if (j == 0)
                vz = (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) / (2.0 * g.hz);
            else if (j == nz - 1)
                vz = (3.0 * f(i, nz - 1) - 4.0 * f(i, nz - 2) + f(i, nz - 3)) / (2.0 * g.hz);
            else
                vz = (f(i, j + 1) - f(i, j - 1)) / (2.0 * g.hz);
            dr(i, j) = vr;
            dz(i, j) = vz;
        }
    }
    return {std::move(dr), std::move(dz)};
}

std::pair<ScalarField, ScalarField> grad2d(const ExtendedField& e, const CylGrid& g) {
    if (e.nr != g.nr || e.nz != g.nz) throw GridError("grad2d: extended field shape mismatch");
    ScalarField dr(g), dz(g);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < g.nr; ++i)
        for (int j = 0; j < g.nz; ++j) {
            dr(i, j) = (e.at(i + 1, j) - e.at(i - 1, j)) / (2.0 * g.hr);
            dz(i, j) = (e.at(i, j + 1) - e.at(i, j - 1)) / (2.0 * g.hz);
        }
    return {std::move(dr), std::move(dz)};
}

}  // namespace kgmv
