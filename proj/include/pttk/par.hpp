#pragma once

#include <span>

#include "pttk/chebyshev.hpp"
#include "pttk/kernels.hpp"
#include "pttk/tensor.hpp"

// Hot data-parallel kernels. pttk::par holds the OpenMP versions used by the
// library; pttk::ref holds serial reference implementations kept for testing
// and for the serial-vs-parallel benchmark. Both sides produce bit-identical
// results for any thread count: work is split into fixed-size row blocks,
// each entry/row is computed independently, and reductions combine per-block
// partial sums in block order.

namespace pttk::par {

/// Fixed row-block size used by the blocked kernels (part of their numeric
/// definition; changing it may change reduction results in the last bit).
inline constexpr Index kRowBlock = 128;

int max_threads();
void set_threads(int n); // 0 restores the OpenMP default

/// N x n matrix whose row p is q_row of grid dimension dim_index at
/// points(p, coord).
Matrix factor_matrix(const ChebyshevGrid& grid, Index dim_index, const Matrix& points,
                     Index coord);

/// Dense kernel matrix K(i, j) = kappa(xs_i, ys_j; theta).
Matrix kernel_matrix(const KernelOracle& oracle, const Matrix& xs, const Matrix& ys,
                     std::span<const double> theta);

struct FrobAccum {
    double diff2 = 0.0; // |K - L R^T|_F^2
    double ref2 = 0.0;  // |K|_F^2
};

/// Frobenius comparison of the kernel matrix against a low-rank product
/// L R^T without materializing either full matrix.
FrobAccum frobenius_vs_lowrank(const KernelOracle& oracle, const Matrix& xs, const Matrix& ys,
                               std::span<const double> theta, const Matrix& left,
                               const Matrix& right);

/// One step of the source-side contraction: given s (N x r_in), factor u
/// (N x n) and core (r_in, n, r_out), returns
///   out(p, b) = sum_{l, a} u(p, l) s(p, a) core(a, l, b).
Matrix contraction_step(const Matrix& s, const Matrix& u, const DenseTensor& core);

} // namespace pttk::par

namespace pttk::ref {

Matrix factor_matrix(const ChebyshevGrid& grid, Index dim_index, const Matrix& points,
                     Index coord);
Matrix kernel_matrix(const KernelOracle& oracle, const Matrix& xs, const Matrix& ys,
                     std::span<const double> theta);
par::FrobAccum frobenius_vs_lowrank(const KernelOracle& oracle, const Matrix& xs,
                                    const Matrix& ys, std::span<const double> theta,
                                    const Matrix& left, const Matrix& right);
Matrix contraction_step(const Matrix& s, const Matrix& u, const DenseTensor& core);

} // namespace pttk::ref
