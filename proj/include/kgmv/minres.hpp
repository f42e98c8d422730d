#pragma once

#include <cmath>
#include <vector>

#include "kgmv/kernels.hpp"

namespace kgmv {

struct MinresResult {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

// MINRES for symmetric (possibly indefinite) operators given as a callable
// y = A(x). Deterministic: fixed iteration order, blocked reductions.
// block_rows/block_cols only set the reduction blocking, not the layout.
template <typename Apply>
MinresResult minres_solve(Apply&& A, const std::vector<double>& rhs, std::vector<double>& x,
                          double tol, int max_iters, int block_rows, int block_cols) {
    const size_t n = rhs.size();
    auto nrm = [&](const std::vector<double>& v) {
        return std::sqrt(dot(v.data(), v.data(), block_rows, block_cols));
    };
    x.assign(n, 0.0);
    std::vector<double> v(rhs), v_prev(n, 0.0), q(n), w0(n, 0.0), wm1(n, 0.0), wnew(n);

    const double beta1 = nrm(v);
    MinresResult res;
    if (beta1 == 0.0) {
        res.converged = true;
        return res;
    }
    for (size_t s = 0; s < n; ++s) v[s] /= beta1;

    double eta = beta1, beta_prev = 0.0;
    double gamma1 = 1.0, gamma0 = 1.0, sigma1 = 0.0, sigma0 = 0.0;

    for (int it = 1; it <= max_iters; ++it) {
        A(v, q);
        const double alpha = dot(v.data(), q.data(), block_rows, block_cols);
        for (size_t s = 0; s < n; ++s) q[s] -= alpha * v[s] + beta_prev * v_prev[s];
        const double beta = nrm(q);

        const double delta = gamma1 * alpha - gamma0 * sigma1 * beta_prev;
        const double rho1 = std::sqrt(delta * delta + beta * beta);
        const double rho2 = sigma1 * alpha + gamma0 * gamma1 * beta_prev;
        const double rho3 = sigma0 * beta_prev;
        if (rho1 == 0.0) break;  // breakdown: rhs in the span already handled via eta
        const double gamma = delta / rho1;
        const double sigma = beta / rho1;

        for (size_t s = 0; s < n; ++s)
            wnew[s] = (v[s] - rho3 * wm1[s] - rho2 * w0[s]) / rho1;
        const double step = gamma * eta;
        for (size_t s = 0; s < n; ++s) x[s] += step * wnew[s];
        eta = -sigma * eta;

        res.iterations = it;
        res.rel_residual = std::abs(eta) / beta1;
        if (res.rel_residual <= tol) {
            res.converged = true;
            return res;
        }
        if (beta == 0.0) break;  // invariant subspace reached
        std::swap(wm1, w0);
        std::swap(w0, wnew);
        std::swap(v_prev, v);
        for (size_t s = 0; s < n; ++s) v[s] = q[s] / beta;
        beta_prev = beta;
        gamma0 = gamma1;
        gamma1 = gamma;
        sigma0 = sigma1;
        sigma1 = sigma;
    }
    return res;
}

}  // namespace kgmv
