#pragma once

#include <vector>

#include "pttk/tensor.hpp"

namespace pttk {

struct Interval {
    double lo;
    double hi;
};

/// Chebyshev nodes of the first kind on [-1, 1]: the n roots of T_n,
/// zeta_k = cos((2k-1)pi/(2n)) for k = 1..n, returned in that order
/// (decreasing in the interval). The ordering is fixed because downstream
/// index sets are defined against it.
std::vector<double> cheb_nodes(Index n);

/// Affine map [-1,1] -> [lo,hi] written exactly as
///     x |-> ((lo - hi)/2) x + (lo + hi)/2,
/// so +1 maps to lo and -1 maps to hi. The orientation is reversed relative
/// to the common convention; interpolation is order-invariant so we keep the
/// formula verbatim.
double affine_to_interval(const Interval& iv, double x);

/// Inverse of affine_to_interval.
double affine_from_interval(const Interval& iv, double y);

/// Basis polynomial phi^{[lo,hi]}(eta_i, x) with eta_i the i-th (0-based)
/// mapped node of an n-point rule:
///     1/n + (2/n) sum_{k=1}^{n-1} T_k(zeta_i) T_k(phi^{-1}(x)).
/// T_k is evaluated by the three-term recurrence (error growth is a couple of
/// ulps per step, which also keeps evaluation stable slightly outside the
/// interval); x outside [lo,hi] extrapolates.
double basis_eval(const Interval& iv, Index n, Index i, double x);

/// Row vector [phi(eta_0, x), ..., phi(eta_{n-1}, x)].
RowVector q_row(const Interval& iv, Index n, double x);

/// Tolerance used everywhere a point is checked against an interval: a point
/// may exceed the bounds by 1e-12 * (hi - lo).
bool contains(const Interval& iv, double x);

/// D-dimensional Chebyshev grid with a shared node count n per dimension and
/// per-dimension intervals ordered (source dims, parameter dims, target dims).
class ChebyshevGrid {
public:
    ChebyshevGrid() = default;
    ChebyshevGrid(Index n, std::vector<Interval> intervals);

    Index n() const { return n_; }
    Index dims() const { return static_cast<Index>(intervals_.size()); }
    const Interval& interval(Index j) const { return intervals_.at(static_cast<std::size_t>(j)); }
    const std::vector<Interval>& intervals() const { return intervals_; }

    /// Mapped node eta^{(j)}_i (0-based i).
    double node(Index j, Index i) const { return nodes_.at(static_cast<std::size_t>(j)).at(static_cast<std::size_t>(i)); }
    const std::vector<double>& nodes(Index j) const { return nodes_.at(static_cast<std::size_t>(j)); }

    /// q_row against dimension j, using the cached T_k(zeta_i) table
    /// (the reference nodes are shared by all dimensions).
    RowVector q_row(Index j, double x) const;

    /// Table P with P(i,k) = T_k(zeta_i), k = 0..n-1.
    const Matrix& cheb_table() const { return table_; }

private:
    Index n_ = 0;
    std::vector<Interval> intervals_;
    std::vector<std::vector<double>> nodes_;
    Matrix table_;
};

struct FactorMatrices {
    std::vector<Matrix> u; // d matrices, N_s x n
    std::vector<Matrix> v; // d matrices, N_t x n
};

/// Source/target factor matrices: row p of u[i] is q_row of the grid's i-th
/// source dimension at coordinate i of source point p (targets analogous,
/// against the grid's trailing d dimensions). Points are N x d, one row per
/// point. A point outside its box beyond the containment tolerance is
/// rejected; the exception message carries the offending point index.
FactorMatrices factor_matrices(const ChebyshevGrid& grid, Index d, Index d_theta,
                               const Matrix& sources, const Matrix& targets);

} // namespace pttk
