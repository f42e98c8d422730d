// Times the OpenMP kernels against their serial reference implementations
// and checks that both agree. Usage: bench_kernels [reps]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kgmv/grid.hpp"
#include "kgmv/kernels.hpp"
#include "kgmv/operators.hpp"

using namespace kgmv;
using clock_type = std::chrono::steady_clock;

namespace {

double time_ms(int reps, const std::function<void()>& fn) {
    fn();  // warm up
    const auto t0 = clock_type::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 50;
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP: not enabled\n");
#endif
    std::printf("%-22s %8s %12s %12s %9s\n", "kernel", "grid", "serial[ms]", "omp[ms]",
                "rel.diff");

    for (int n : {128, 256, 512}) {
        const CylGrid g = make_grid(12.0, 12.0, n, n);
        const StencilOp L = stiffness_r(g, false);
        std::vector<double> x((size_t)n * n), y((size_t)n * n), ys((size_t)n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                x[g.idx(i, j)] = std::sin(0.3 * g.r(i)) * std::cos(0.2 * g.z(j));

        const double ts = time_ms(reps, [&] { serial::apply_stencil(L, x.data(), ys.data()); });
        const double tp = time_ms(reps, [&] { apply_stencil(L, x.data(), y.data()); });
        double dmax = 0.0, scale = 0.0;
        for (size_t s = 0; s < y.size(); ++s) {
            dmax = std::max(dmax, std::abs(y[s] - ys[s]));
            scale = std::max(scale, std::abs(ys[s]));
        }
        std::printf("%-22s %4dx%-4d %12.4f %12.4f %9.1e\n", "apply_stencil", n, n, ts, tp,
                    dmax / scale);

        double qs = 0.0, qp = 0.0;
        const double tqs = time_ms(reps, [&] { qs = serial::quadform(L, x.data()); });
        const double tqp = time_ms(reps, [&] { qp = quadform(L, x.data()); });
        std::printf("%-22s %4dx%-4d %12.4f %12.4f %9.1e\n", "quadform", n, n, tqs, tqp,
                    std::abs(qp - qs) / std::abs(qs));

        double ds = 0.0, dp = 0.0;
        const double tds = time_ms(reps, [&] { ds = serial::dot(x.data(), x.data(), n, n); });
        const double tdp = time_ms(reps, [&] { dp = dot(x.data(), x.data(), n, n); });
        std::printf("%-22s %4dx%-4d %12.4f %12.4f %9.1e\n", "dot", n, n, tds, tdp,
                    std::abs(dp - ds) / std::abs(ds));
    }
    return 0;
}
