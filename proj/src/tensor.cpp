#include "pttk/tensor.hpp"

#include <cmath>

namespace pttk {

namespace {

std::pair<Index, Index> unfold_dims(const DenseTensor& t, Index split) {
    if (split < 1 || split > t.order())
        throw std::out_of_range("unfold: split must be in 1..order");
    Index rows = 1, cols = 1;
    for (Index k = 0; k < t.order(); ++k) (k < split ? rows : cols) *= t.dim(k);
    return {rows, cols};
}

} // namespace

Matrix unfold(const DenseTensor& t, Index split) { return unfold_view(t, split); }

Eigen::Map<const Matrix> unfold_view(const DenseTensor& t, Index split) {
    auto [rows, cols] = unfold_dims(t, split);
    return {t.data(), rows, cols};
}

Eigen::Map<Matrix> unfold_view(DenseTensor& t, Index split) {
    auto [rows, cols] = unfold_dims(t, split);
    return {t.data(), rows, cols};
}

DenseTensor fold(const Matrix& m, std::vector<Index> shape) {
    DenseTensor t(std::move(shape));
    if (t.size() != m.size()) throw std::invalid_argument("fold: element count mismatch");
    Eigen::Map<Matrix>(t.data(), m.rows(), m.cols()) = m;
    return t;
}

DenseTensor mode_k_product(const DenseTensor& t, const Matrix& a, Index k) {
    if (k < 0 || k >= t.order()) throw std::out_of_range("mode_k_product: bad mode");
    if (a.cols() != t.dim(k))
        throw std::invalid_argument("mode_k_product: a.cols() must equal t.dim(k)");

    std::vector<Index> out_shape = t.shape();
    out_shape[static_cast<std::size_t>(k)] = a.rows();
    DenseTensor out(out_shape);

    // View t as (left, n_k, right) and contract the middle mode slab by slab.
    Index left = 1, right = 1;
    for (Index i = 0; i < k; ++i) left *= t.dim(i);
    for (Index i = k + 1; i < t.order(); ++i) right *= t.dim(i);
    const Index nk = t.dim(k), m = a.rows();

    for (Index r = 0; r < right; ++r) {
        Eigen::Map<const Matrix> in(t.data() + r * left * nk, left, nk);
        Eigen::Map<Matrix> res(out.data() + r * left * m, left, m);
        res.noalias() = in * a.transpose();
    }
    return out;
}

Matrix kron(const Matrix& g, const Matrix& h) {
    Matrix out(g.rows() * h.rows(), g.cols() * h.cols());
    for (Index j = 0; j < g.cols(); ++j)
        for (Index i = 0; i < g.rows(); ++i)
            out.block(i * h.rows(), j * h.cols(), h.rows(), h.cols()) = g(i, j) * h;
    return out;
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("khatri_rao: column counts must match");
    Matrix out(a.rows() * b.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            out.col(j).segment(i * b.rows(), b.rows()) = a(i, j) * b.col(j);
    return out;
}

Matrix face_split(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw std::invalid_argument("face_split: row counts must match");
    Matrix out(a.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.row(i).segment(j * b.cols(), b.cols()) = a(i, j) * b.row(i);
    return out;
}

DenseTensor twist(const Matrix& a, int which) {
    const Index m = a.rows(), k = a.cols();
    std::vector<Index> shape;
    switch (which) {
        case 1: shape = {1, m, k}; break;
        case 2: shape = {m, 1, k}; break;
        case 3: shape = {m, k, 1}; break;
        default: throw std::invalid_argument("twist: which must be 1, 2 or 3");
    }
    // All three twists share the matrix's column-major flat layout.
    DenseTensor t(shape);
    Eigen::Map<Matrix>(t.data(), m, k) = a;
    return t;
}

double chebyshev_norm(const DenseTensor& t) {
    double m = 0.0;
    for (Index i = 0; i < t.size(); ++i) m = std::max(m, std::abs(t[i]));
    return m;
}

double frobenius_norm(const DenseTensor& t) {
    return Eigen::Map<const Vector>(t.data(), t.size()).norm();
}

} // namespace pttk
