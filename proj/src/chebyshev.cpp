#include "pttk/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pttk/par.hpp"

namespace pttk {

std::vector<double> cheb_nodes(Index n) {
    if (n < 1) throw std::invalid_argument("cheb_nodes: n must be >= 1");
    std::vector<double> z(static_cast<std::size_t>(n));
    for (Index k = 1; k <= n; ++k)
        z[static_cast<std::size_t>(k - 1)] =
            std::cos((2.0 * static_cast<double>(k) - 1.0) * std::numbers::pi / (2.0 * static_cast<double>(n)));
    return z;
}

double affine_to_interval(const Interval& iv, double x) {
    return 0.5 * (iv.lo - iv.hi) * x + 0.5 * (iv.lo + iv.hi);
}

double affine_from_interval(const Interval& iv, double y) {
    return (2.0 * y - (iv.lo + iv.hi)) / (iv.lo - iv.hi);
}

bool contains(const Interval& iv, double x) {
    const double tol = 1e-12 * (iv.hi - iv.lo);
    return x >= iv.lo - tol && x <= iv.hi + tol;
}

double basis_eval(const Interval& iv, Index n, Index i, double x) {
    if (i < 0 || i >= n) throw std::out_of_range("basis_eval: node index out of range");
    const double zi = std::cos((2.0 * static_cast<double>(i + 1) - 1.0) * std::numbers::pi /
                               (2.0 * static_cast<double>(n)));
    const double t = affine_from_interval(iv, x);
    double acc = 1.0 / static_cast<double>(n);
    // Three-term recurrences for T_k(zi) and T_k(t) advanced together.
    double a_prev = 1.0, a_cur = zi;
    double b_prev = 1.0, b_cur = t;
    const double two_over_n = 2.0 / static_cast<double>(n);
    for (Index k = 1; k <= n - 1; ++k) {
        acc += two_over_n * a_cur * b_cur;
        const double a_next = 2.0 * zi * a_cur - a_prev;
        const double b_next = 2.0 * t * b_cur - b_prev;
        a_prev = a_cur; a_cur = a_next;
        b_prev = b_cur; b_cur = b_next;
    }
    return acc;
}

RowVector q_row(const Interval& iv, Index n, double x) {
    RowVector out(n);
    for (Index i = 0; i < n; ++i) out[i] = basis_eval(iv, n, i, x);
    return out;
}

ChebyshevGrid::ChebyshevGrid(Index n, std::vector<Interval> intervals)
    : n_(n), intervals_(std::move(intervals)) {
    if (n_ < 1) throw std::invalid_argument("ChebyshevGrid: n must be >= 1");
    for (const auto& iv : intervals_)
        if (!(iv.lo < iv.hi)) throw std::invalid_argument("ChebyshevGrid: interval needs lo < hi");

    const std::vector<double> zeta = cheb_nodes(n_);
    nodes_.resize(intervals_.size());
    for (std::size_t j = 0; j < intervals_.size(); ++j) {
        nodes_[j].resize(static_cast<std::size_t>(n_));
        for (Index i = 0; i < n_; ++i)
            nodes_[j][static_cast<std::size_t>(i)] = affine_to_interval(intervals_[j], zeta[static_cast<std::size_t>(i)]);
    }

    table_.resize(n_, n_);
    for (Index i = 0; i < n_; ++i) {
        double prev = 1.0, cur = zeta[static_cast<std::size_t>(i)];
        table_(i, 0) = 1.0;
        for (Index k = 1; k < n_; ++k) {
            table_(i, k) = cur;
            const double next = 2.0 * zeta[static_cast<std::size_t>(i)] * cur - prev;
            prev = cur; cur = next;
        }
    }
}

RowVector ChebyshevGrid::q_row(Index j, double x) const {
    const Interval& iv = interval(j);
    const double t = affine_from_interval(iv, x);
    Vector tk(n_);
    double prev = 1.0, cur = t;
    tk[0] = 1.0;
    for (Index k = 1; k < n_; ++k) {
        tk[k] = cur;
        const double next = 2.0 * t * cur - prev;
        prev = cur; cur = next;
    }
    RowVector out = RowVector::Constant(n_, 1.0 / static_cast<double>(n_));
    if (n_ > 1)
        out.noalias() += (2.0 / static_cast<double>(n_)) *
                         (table_.rightCols(n_ - 1) * tk.tail(n_ - 1)).transpose();
    return out;
}

FactorMatrices factor_matrices(const ChebyshevGrid& grid, Index d, Index d_theta,
                               const Matrix& sources, const Matrix& targets) {
    if (grid.dims() != 2 * d + d_theta)
        throw std::invalid_argument("factor_matrices: grid dimension mismatch");
    if (sources.cols() != d || targets.cols() != d)
        throw std::invalid_argument("factor_matrices: points must have d columns");

    auto check_points = [&](const Matrix& pts, Index dim_offset, const char* which) {
        for (Index p = 0; p < pts.rows(); ++p)
            for (Index c = 0; c < d; ++c)
                if (!contains(grid.interval(dim_offset + c), pts(p, c)))
                    throw std::invalid_argument(std::string("factor_matrices: ") + which + " point " +
                                                std::to_string(p) + " lies outside its box in coordinate " +
                                                std::to_string(c));
    };
    check_points(sources, 0, "source");
    check_points(targets, d + d_theta, "target");

    FactorMatrices fm;
    fm.u.reserve(static_cast<std::size_t>(d));
    fm.v.reserve(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) {
        fm.u.push_back(par::factor_matrix(grid, i, sources, i));
        fm.v.push_back(par::factor_matrix(grid, d + d_theta + i, targets, i));
    }
    return fm;
}

} // namespace pttk
