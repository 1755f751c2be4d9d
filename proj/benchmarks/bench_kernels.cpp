// Serial-vs-OpenMP comparison of the hot data-parallel kernels. Each kernel
// is timed with the serial reference and with the parallel version at the
// current thread count; results are printed as a table.

#include <chrono>
#include <cstdio>
#include <string>

#include "pttk/harness.hpp"
#include "pttk/par.hpp"
#include "pttk/rng.hpp"

using namespace pttk;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = Clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return best;
}

void report(const std::string& name, double serial_s, double parallel_s) {
    std::printf("%-28s %10.2f ms %10.2f ms %8.2fx\n", name.c_str(), serial_s * 1e3,
                parallel_s * 1e3, serial_s / parallel_s);
}

} // namespace

int main() {
    const Index n_points = 20000;
    const Index n = 27;

    ProblemGeometry g;
    g.d = 3;
    g.d_theta = 1;
    g.source_box = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    g.target_box = {{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}};
    g.theta_box = {{0.8, 1.6}};

    KernelSpec se;
    se.family = KernelFamily::squared_exponential;
    KernelOracle se_oracle(se, g);
    KernelSpec mat;
    mat.family = KernelFamily::matern;
    mat.fixed_nu = 1.5;
    ProblemGeometry gm = g;
    KernelOracle mat_oracle(mat, gm);

    ChebyshevGrid grid(n, g.ordered_intervals());
    Matrix xs = generate_points(g.source_box, n_points, 1001);
    Matrix ys = generate_points(g.target_box, 2000, 1002);
    const double theta[1] = {1.1};

    Rng rng(1003);
    Matrix left(n_points, 40), right(2000, 40);
    for (Index j = 0; j < 40; ++j) {
        for (Index i = 0; i < n_points; ++i) left(i, j) = rng.uniform(-1.0, 1.0);
        for (Index i = 0; i < 2000; ++i) right(i, j) = rng.uniform(-1.0, 1.0);
    }
    DenseTensor core({40, n, 40});
    for (Index i = 0; i < core.size(); ++i) core[i] = rng.uniform(-1.0, 1.0);
    Matrix u = par::factor_matrix(grid, 0, xs, 0);

    std::printf("threads: %d\n", par::max_threads());
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    report("factor_matrix",
           time_best_of(3, [&] { (void)ref::factor_matrix(grid, 0, xs, 0); }),
           time_best_of(3, [&] { (void)par::factor_matrix(grid, 0, xs, 0); }));

    report("kernel_matrix (SE)",
           time_best_of(3, [&] { (void)ref::kernel_matrix(se_oracle, ys, ys, theta); }),
           time_best_of(3, [&] { (void)par::kernel_matrix(se_oracle, ys, ys, theta); }));

    report("kernel_matrix (Matern)",
           time_best_of(3, [&] { (void)ref::kernel_matrix(mat_oracle, ys, ys, theta); }),
           time_best_of(3, [&] { (void)par::kernel_matrix(mat_oracle, ys, ys, theta); }));

    report("frobenius_vs_lowrank (SE)",
           time_best_of(3, [&] { (void)ref::frobenius_vs_lowrank(se_oracle, xs, ys, theta, left, right); }),
           time_best_of(3, [&] { (void)par::frobenius_vs_lowrank(se_oracle, xs, ys, theta, left, right); }));

    report("contraction_step",
           time_best_of(3, [&] { (void)ref::contraction_step(left, u, core); }),
           time_best_of(3, [&] { (void)par::contraction_step(left, u, core); }));

    return 0;
}
