#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

namespace kgmv {

struct GridError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Truncated axisymmetric domain 0 <= r <= r_max, |z| <= z_half.
// Nodes are cell-centered, r_i = (i+1/2) hr, so r = 0 is never a node and
// the 1/r, 1/r^2 weights are finite everywhere.
struct CylGrid {
    double r_max = 0.0, z_half = 0.0;
    int nr = 0, nz = 0;
    double hr = 0.0, hz = 0.0;

    double r(int i) const { return (i + 0.5) * hr; }
    double z(int j) const { return -z_half + (j + 0.5) * hz; }
    int cells() const { return nr * nz; }
    int idx(int i, int j) const { return i * nz + j; }  // row-major, z fastest
    bool same_shape(const CylGrid& o) const {
        return nr == o.nr && nz == o.nz && r_max == o.r_max && z_half == o.z_half;
    }
};

CylGrid make_grid(double r_max, double z_half, int nr, int nz);

struct ScalarField {
    CylGrid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const CylGrid& g, double fill = 0.0) : grid(g), v(g.cells(), fill) {}

    double& operator()(int i, int j) { return v[grid.idx(i, j)]; }
    double operator()(int i, int j) const { return v[grid.idx(i, j)]; }
    const double* data() const { return v.data(); }
    double* data() { return v.data(); }
    int size() const { return (int)v.size(); }
};

void require_on_grid(const ScalarField& f, const CylGrid& g, const char* who);
bool all_finite(const ScalarField& f);

// 2π ∬ f r dr dz by the midpoint rule; fixed summation order.
double integrate_volume(const ScalarField& f, const CylGrid& g);

// ∫ |f|^p dV on the same quadrature.
double lp_norm_p(const ScalarField& f, const CylGrid& g, double p);

enum class AxisParity { even, odd };
enum class OuterRule { dirichlet0 };

// One ghost layer per side: mirrored across r = 0 with the parity sign;
// outer ghosts are the negated last cell so the linearly interpolated
// value at the boundary face is zero.
struct ExtendedField {
    int nr = 0, nz = 0;
    std::vector<double> v;
    double at(int i, int j) const { return v[(i + 1) * (size_t)(nz + 2) + (j + 1)]; }
    double& at(int i, int j) { return v[(i + 1) * (size_t)(nz + 2) + (j + 1)]; }
};

ExtendedField ghost_extend(const ScalarField& f, const CylGrid& g, AxisParity parity,
                           OuterRule outer = OuterRule::dirichlet0);

// (∂f/∂r, ∂f/∂z): central differences in the interior, second-order
// one-sided at boundary cells.
std::pair<ScalarField, ScalarField> grad2d(const ScalarField& f, const CylGrid& g);

// Central differences everywhere using the ghost layer.
std::pair<ScalarField, ScalarField> grad2d(const ExtendedField& e, const CylGrid& g);

}  // namespace kgmv
