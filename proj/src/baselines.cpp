#include "pttk/baselines.hpp"

#include <cmath>

#include "pttk/linalg.hpp"

namespace pttk {

AcaResult aca(const MatrixOracle& k, double eps_frobenius, Index max_rank) {
    if (eps_frobenius <= 0.0) throw std::invalid_argument("aca: eps must be positive");
    const Index rows = k.rows(), cols = k.cols();
    max_rank = std::min(max_rank, std::min(rows, cols));

    std::vector<Vector> us, vs;
    std::vector<char> row_used(static_cast<std::size_t>(rows), 0);
    std::vector<char> col_used(static_cast<std::size_t>(cols), 0);

    double norm_est2 = 0.0;
    AcaResult out;
    Index pivot_row = 0;

    while (static_cast<Index>(us.size()) < max_rank) {
        // Residual row at pivot_row; scan for a usable pivot, restarting on
        // the next unused row when the current row has vanished.
        Index j_pivot = -1;
        Vector res_row;
        while (true) {
            res_row.resize(cols);
            for (Index j = 0; j < cols; ++j) res_row[j] = k.at(pivot_row, j);
            for (std::size_t t = 0; t < us.size(); ++t)
                res_row -= us[t][pivot_row] * vs[t];
            double best = 0.0;
            j_pivot = -1;
            for (Index j = 0; j < cols; ++j)
                if (!col_used[static_cast<std::size_t>(j)] && std::abs(res_row[j]) > best) {
                    best = std::abs(res_row[j]);
                    j_pivot = j;
                }
            if (j_pivot >= 0 && best > 0.0) break;
            row_used[static_cast<std::size_t>(pivot_row)] = 1;
            Index next = -1;
            for (Index i = 0; i < rows; ++i)
                if (!row_used[static_cast<std::size_t>(i)]) {
                    next = i;
                    break;
                }
            if (next < 0) {
                // Every row's residual vanished: the approximation is exact
                // (or the matrix is zero).
                out.converged = true;
                out.rank = static_cast<Index>(us.size());
                out.lr.a.resize(rows, out.rank);
                out.lr.b.resize(cols, out.rank);
                for (Index t = 0; t < out.rank; ++t) {
                    out.lr.a.col(t) = us[static_cast<std::size_t>(t)];
                    out.lr.b.col(t) = vs[static_cast<std::size_t>(t)];
                }
                out.residual_estimate = 0.0;
                return out;
            }
            pivot_row = next;
        }

        const double pivot = res_row[j_pivot];
        Vector v = res_row / pivot;

        Vector u(rows);
        for (Index i = 0; i < rows; ++i) u[i] = k.at(i, j_pivot);
        for (std::size_t t = 0; t < us.size(); ++t) u -= vs[t][j_pivot] * us[t];

        // Incremental Frobenius estimate of the skeleton so far.
        const double uu = u.squaredNorm(), vv = v.squaredNorm();
        double crossterms = 0.0;
        for (std::size_t t = 0; t < us.size(); ++t)
            crossterms += us[t].dot(u) * vs[t].dot(v);
        norm_est2 += uu * vv + 2.0 * crossterms;

        row_used[static_cast<std::size_t>(pivot_row)] = 1;
        col_used[static_cast<std::size_t>(j_pivot)] = 1;
        us.push_back(std::move(u));
        vs.push_back(std::move(v));

        const double step = std::sqrt(uu * vv);
        out.residual_estimate = norm_est2 > 0.0 ? step / std::sqrt(norm_est2) : 0.0;
        if (step <= eps_frobenius * std::sqrt(std::max(norm_est2, 0.0))) {
            out.converged = true;
            break;
        }

        // Next row pivot: argmax of the latest residual column over unused rows.
        Index next_row = -1;
        double best = -1.0;
        const Vector& ulast = us.back();
        for (Index i = 0; i < rows; ++i)
            if (!row_used[static_cast<std::size_t>(i)] && std::abs(ulast[i]) > best) {
                best = std::abs(ulast[i]);
                next_row = i;
            }
        if (next_row < 0) {
            out.converged = true;
            break;
        }
        pivot_row = next_row;
    }

    out.rank = static_cast<Index>(us.size());
    out.lr.a.resize(rows, out.rank);
    out.lr.b.resize(cols, out.rank);
    for (Index t = 0; t < out.rank; ++t) {
        out.lr.a.col(t) = us[static_cast<std::size_t>(t)];
        out.lr.b.col(t) = vs[static_cast<std::size_t>(t)];
    }
    return out;
}

double KernelMatrixOracle::at(Index i, Index j) const {
    const Index d = xs_->cols();
    double x[8], y[8];
    if (d > 8) throw std::invalid_argument("KernelMatrixOracle: spatial dimension too large");
    for (Index c = 0; c < d; ++c) {
        x[c] = (*xs_)(i, c);
        y[c] = (*ys_)(j, c);
    }
    return oracle_->eval({x, static_cast<std::size_t>(d)}, {y, static_cast<std::size_t>(d)},
                         theta_);
}

TruncatedSvd truncated_svd(const Matrix& k, Index rank) {
    if (rank < 0 || rank > std::min(k.rows(), k.cols()))
        throw std::invalid_argument("truncated_svd: rank exceeds matrix dimensions");
    auto svd = linalg::thin_svd(k);
    TruncatedSvd out;
    out.singular_values = svd.s;
    out.lr.a = svd.u.leftCols(rank) * svd.s.head(rank).asDiagonal();
    out.lr.b = svd.v.leftCols(rank);
    return out;
}

} // namespace pttk
