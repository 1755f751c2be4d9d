#include "pttk/tt.hpp"

#include <cmath>
#include <stdexcept>

#include "pttk/linalg.hpp"
#include "pttk/par.hpp"

namespace pttk {

TtTensor::TtTensor(std::vector<DenseTensor> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) throw std::invalid_argument("TtTensor: needs at least one core");
    for (const auto& c : cores_)
        if (c.order() != 3) throw std::invalid_argument("TtTensor: cores must be order 3");
    if (cores_.front().dim(0) != 1 || cores_.back().dim(2) != 1)
        throw std::invalid_argument("TtTensor: boundary ranks must be 1");
    for (std::size_t k = 0; k + 1 < cores_.size(); ++k)
        if (cores_[k].dim(2) != cores_[k + 1].dim(0))
            throw std::invalid_argument("TtTensor: adjacent core ranks mismatch");
}

std::vector<Index> TtTensor::shape() const {
    std::vector<Index> s;
    s.reserve(cores_.size());
    for (const auto& c : cores_) s.push_back(c.dim(1));
    return s;
}

std::vector<Index> TtTensor::ranks() const {
    std::vector<Index> r;
    r.reserve(cores_.size() + 1);
    r.push_back(1);
    for (const auto& c : cores_) r.push_back(c.dim(2));
    return r;
}

Index TtTensor::max_rank() const {
    Index m = 1;
    for (const auto& c : cores_) m = std::max(m, c.dim(2));
    return m;
}

Index TtTensor::size_compressed() const {
    Index n = 0;
    for (const auto& c : cores_) n += c.size();
    return n;
}

namespace {

Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> core_slice(const DenseTensor& core, Index i) {
    const Index r0 = core.dim(0), n = core.dim(1), r1 = core.dim(2);
    return {core.data() + i * r0, r0, r1, Eigen::OuterStride<>(r0 * n)};
}

} // namespace

double tt_entry(const TtTensor& t, std::span<const Index> idx) {
    if (static_cast<Index>(idx.size()) != t.order())
        throw std::invalid_argument("tt_entry: index arity mismatch");
    const auto shape = t.shape();
    for (Index k = 0; k < t.order(); ++k)
        if (idx[static_cast<std::size_t>(k)] < 0 || idx[static_cast<std::size_t>(k)] >= shape[static_cast<std::size_t>(k)])
            throw std::out_of_range("tt_entry: index out of range");

    RowVector v = core_slice(t.core(0), idx[0]).row(0);
    for (Index k = 1; k < t.order(); ++k)
        v = v * core_slice(t.core(k), idx[static_cast<std::size_t>(k)]);
    return v(0);
}

DenseTensor tt_full(const TtTensor& t, Index cap) {
    const auto shape = t.shape();
    Index total = 1;
    for (Index n : shape) {
        total *= n;
        if (total > cap) throw std::length_error("tt_full: size cap exceeded");
    }

    // Fold in one core at a time: M (m x r_{k-1}) -> (m*n_k x r_k).
    Matrix m = unfold_view(t.core(0), 2); // n_1 x r_1 (leading rank is 1)
    for (Index k = 1; k < t.order(); ++k) {
        Matrix grown = m * unfold_view(t.core(k), 1); // m_rows x (n_k r_k)
        const Index nk = t.core(k).dim(1), rk = t.core(k).dim(2);
        Matrix next(m.rows() * nk, rk);
        for (Index b = 0; b < rk; ++b)
            Eigen::Map<Matrix>(next.col(b).data(), m.rows(), nk) = grown.middleCols(b * nk, nk);
        m = next;
    }
    return fold(m, shape);
}

TtTensor tt_round(const TtTensor& t, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("tt_round: eps must be positive");
    const Index n_cores = t.order();
    std::vector<DenseTensor> cores = t.cores();
    if (n_cores == 1) return TtTensor(cores);

    // Right-to-left orthogonalization.
    for (Index i = n_cores - 1; i >= 1; --i) {
        const Index n_i = cores[static_cast<std::size_t>(i)].dim(1);
        const Index r_i = cores[static_cast<std::size_t>(i)].dim(2);
        Matrix a = unfold_view(cores[static_cast<std::size_t>(i)], 1).transpose(); // (n_i r_i) x r_{i-1}
        auto qr = linalg::thin_qr(a);
        const Index k = qr.q.cols();
        cores[static_cast<std::size_t>(i)] = fold(qr.q.transpose(), {k, n_i, r_i});
        auto& prev = cores[static_cast<std::size_t>(i - 1)];
        Matrix updated = unfold_view(prev, 2) * qr.r.transpose();
        cores[static_cast<std::size_t>(i - 1)] = fold(updated, {prev.dim(0), prev.dim(1), k});
    }

    // With cores 2..N right-orthogonal, |X|_F equals |G_1|_F.
    const double norm = frobenius_norm(cores[0]);
    const double delta = eps * norm / std::sqrt(static_cast<double>(n_cores - 1));

    // SVD re-compression sweep.
    for (Index i = 0; i + 1 < n_cores; ++i) {
        auto& cur = cores[static_cast<std::size_t>(i)];
        Matrix b = unfold_view(cur, 2); // (r_{i-1} n_i) x r_i
        auto svd = linalg::thin_svd(b);
        const Index rank = std::min<Index>(linalg::truncation_rank(svd.s, delta), svd.s.size());
        Matrix u = svd.u.leftCols(rank);
        cores[static_cast<std::size_t>(i)] = fold(u, {cur.dim(0), cur.dim(1), rank});
        Matrix carry = svd.s.head(rank).asDiagonal() * svd.v.leftCols(rank).transpose();
        auto& nxt = cores[static_cast<std::size_t>(i + 1)];
        Matrix updated = carry * unfold_view(nxt, 1);
        cores[static_cast<std::size_t>(i + 1)] = fold(updated, {rank, nxt.dim(1), nxt.dim(2)});
    }
    return TtTensor(std::move(cores));
}

Matrix left_contraction(std::span<const DenseTensor> cores, std::span<const Matrix> factors) {
    if (cores.size() != factors.size() || cores.empty())
        throw std::invalid_argument("left_contraction: need matching non-empty core/factor lists");
    if (cores[0].dim(0) != 1)
        throw std::invalid_argument("left_contraction: first core must have leading rank 1");
    Matrix s = factors[0] * unfold_view(cores[0], 2);
    for (std::size_t i = 1; i < cores.size(); ++i)
        s = par::contraction_step(s, factors[i], cores[i]);
    return s;
}

namespace {

DenseTensor flip_core(const DenseTensor& core) {
    const Index r0 = core.dim(0), n = core.dim(1), r1 = core.dim(2);
    DenseTensor out({r1, n, r0});
    for (Index b = 0; b < r1; ++b)
        for (Index l = 0; l < n; ++l)
            for (Index a = 0; a < r0; ++a) out({b, l, a}) = core({a, l, b});
    return out;
}

} // namespace

Matrix right_contraction(std::span<const DenseTensor> cores, std::span<const Matrix> factors) {
    if (cores.size() != factors.size() || cores.empty())
        throw std::invalid_argument("right_contraction: need matching non-empty core/factor lists");
    const auto& last = cores[cores.size() - 1];
    if (last.dim(2) != 1)
        throw std::invalid_argument("right_contraction: last core must have trailing rank 1");
    // Work with W = T^T throughout; each step mirrors the source-side
    // contraction with the core ranks flipped.
    Matrix w = factors[factors.size() - 1] * unfold_view(last, 1).transpose();
    for (std::size_t i = 1; i < cores.size(); ++i) {
        const auto& core = cores[cores.size() - 1 - i];
        w = par::contraction_step(w, factors[factors.size() - 1 - i], flip_core(core));
    }
    return w;
}

} // namespace pttk
