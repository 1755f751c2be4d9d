#include "pttk/par.hpp"

#include <omp.h>

namespace pttk {

namespace {

// Shared per-row kernels; the par/ref pairs differ only in how rows are
// scheduled across threads.

void factor_rows(const ChebyshevGrid& grid, Index dim_index, const Matrix& points, Index coord,
                 Matrix& out, Index row_begin, Index row_end) {
    for (Index p = row_begin; p < row_end; ++p)
        out.row(p) = grid.q_row(dim_index, points(p, coord));
}

void kernel_rows(const KernelOracle& oracle, const Matrix& xs, const Matrix& ys,
                 std::span<const double> theta, Matrix& out, Index row_begin, Index row_end) {
    const Index d = xs.cols();
    std::vector<double> x(static_cast<std::size_t>(d)), y(static_cast<std::size_t>(d));
    for (Index i = row_begin; i < row_end; ++i) {
        for (Index c = 0; c < d; ++c) x[static_cast<std::size_t>(c)] = xs(i, c);
        for (Index j = 0; j < ys.rows(); ++j) {
            for (Index c = 0; c < d; ++c) y[static_cast<std::size_t>(c)] = ys(j, c);
            out(i, j) = oracle.eval(x, y, theta);
        }
    }
}

par::FrobAccum frob_block(const KernelOracle& oracle, const Matrix& xs, const Matrix& ys,
                          std::span<const double> theta, const Matrix& left, const Matrix& right,
                          Index row_begin, Index row_end) {
    const Index d = xs.cols();
    std::vector<double> x(static_cast<std::size_t>(d)), y(static_cast<std::size_t>(d));
    par::FrobAccum acc;
    Matrix approx_rows = left.middleRows(row_begin, row_end - row_begin) * right.transpose();
    for (Index i = row_begin; i < row_end; ++i) {
        for (Index c = 0; c < d; ++c) x[static_cast<std::size_t>(c)] = xs(i, c);
        for (Index j = 0; j < ys.rows(); ++j) {
            for (Index c = 0; c < d; ++c) y[static_cast<std::size_t>(c)] = ys(j, c);
            const double kij = oracle.eval(x, y, theta);
            const double diff = kij - approx_rows(i - row_begin, j);
            acc.diff2 += diff * diff;
            acc.ref2 += kij * kij;
        }
    }
    return acc;
}

void contraction_rows(const Matrix& s, const Matrix& u, const DenseTensor& core, Matrix& out,
                      Index row_begin, Index row_end) {
    const Index n = core.dim(1), r_in = core.dim(0), r_out = core.dim(2);
    RowVector w(r_out);
    for (Index p = row_begin; p < row_end; ++p) {
        out.row(p).setZero();
        for (Index l = 0; l < n; ++l) {
            Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> slice(
                core.data() + l * r_in, r_in, r_out, Eigen::OuterStride<>(r_in * n));
            w.noalias() = s.row(p) * slice;
            out.row(p) += u(p, l) * w;
        }
    }
}

Index block_count(Index rows) { return (rows + par::kRowBlock - 1) / par::kRowBlock; }

} // namespace

namespace par {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
    static const int default_threads = omp_get_max_threads();
    omp_set_num_threads(n > 0 ? n : default_threads);
}

Matrix factor_matrix(const ChebyshevGrid& grid, Index dim_index, const Matrix& points,
                     Index coord) {
    Matrix out(points.rows(), grid.n());
    const Index nb = block_count(points.rows());
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < nb; ++b)
        factor_rows(grid, dim_index, points, coord, out, b * kRowBlock,
                    std::min(points.rows(), (b + 1) * kRowBlock));
    return out;
}

Matrix kernel_matrix(const KernelOracle& oracle, const Matrix& xs, const Matrix& ys,
                     std::span<const double> theta) {
    Matrix out(xs.rows(), ys.rows());
    const Index nb = block_count(xs.rows());
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < nb; ++b)
        kernel_rows(oracle, xs, ys, theta, out, b * kRowBlock,
                    std::min(xs.rows(), (b + 1) * kRowBlock));
    return out;
}

FrobAccum frobenius_vs_lowrank(const KernelOracle& oracle, const Matrix& xs, const Matrix& ys,
                               std::span<const double> theta, const Matrix& left,
                               const Matrix& right) {
    const Index nb = block_count(xs.rows());
    std::vector<FrobAccum> partial(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < nb; ++b)
        partial[static_cast<std::size_t>(b)] =
            frob_block(oracle, xs, ys, theta, left, right, b * kRowBlock,
                       std::min(xs.rows(), (b + 1) * kRowBlock));
    FrobAccum total;
    for (const auto& p : partial) { // block order, independent of threads
        total.diff2 += p.diff2;
        total.ref2 += p.ref2;
    }
    return total;
}

Matrix contraction_step(const Matrix& s, const Matrix& u, const DenseTensor& core) {
    if (core.order() != 3 || core.dim(0) != s.cols() || core.dim(1) != u.cols() ||
        s.rows() != u.rows())
        throw std::invalid_argument("contraction_step: shape mismatch");
    Matrix out(s.rows(), core.dim(2));
    const Index nb = block_count(s.rows());
#pragma omp parallel for schedule(static)
    for (Index b = 0; b < nb; ++b)
        contraction_rows(s, u, core, out, b * kRowBlock,
                         std::min(s.rows(), (b + 1) * kRowBlock));
    return out;
}

} // namespace par

namespace ref {

Matrix factor_matrix(const ChebyshevGrid& grid, Index dim_index, const Matrix& points,
                     Index coord) {
    Matrix out(points.rows(), grid.n());
    factor_rows(grid, dim_index, points, coord, out, 0, points.rows());
    return out;
}

Matrix kernel_matrix(const KernelOracle& oracle, const Matrix& xs, const Matrix& ys,
                     std::span<const double> theta) {
    Matrix out(xs.rows(), ys.rows());
    kernel_rows(oracle, xs, ys, theta, out, 0, xs.rows());
    return out;
}

par::FrobAccum frobenius_vs_lowrank(const KernelOracle& oracle, const Matrix& xs,
                                    const Matrix& ys, std::span<const double> theta,
                                    const Matrix& left, const Matrix& right) {
    par::FrobAccum total;
    const Index nb = block_count(xs.rows());
    for (Index b = 0; b < nb; ++b) {
        const auto p = frob_block(oracle, xs, ys, theta, left, right, b * par::kRowBlock,
                                  std::min(xs.rows(), (b + 1) * par::kRowBlock));
        total.diff2 += p.diff2;
        total.ref2 += p.ref2;
    }
    return total;
}

Matrix contraction_step(const Matrix& s, const Matrix& u, const DenseTensor& core) {
    Matrix out(s.rows(), core.dim(2));
    contraction_rows(s, u, core, out, 0, s.rows());
    return out;
}

} // namespace ref

} // namespace pttk
