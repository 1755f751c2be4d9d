#pragma once

#include <functional>
#include <vector>

#include "pttk/linalg.hpp"
#include "pttk/rng.hpp"
#include "pttk/tensor.hpp"
#include "pttk/tt.hpp"

namespace pttk::test {

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
    return m;
}

inline DenseTensor random_tensor(const std::vector<Index>& shape, Rng& rng) {
    DenseTensor t(shape);
    for (Index i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
    return t;
}

inline TtTensor random_tt(const std::vector<Index>& shape, const std::vector<Index>& bond_ranks,
                          Rng& rng) {
    std::vector<DenseTensor> cores;
    Index prev = 1;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        const Index next = k + 1 < shape.size() ? bond_ranks[k] : 1;
        cores.push_back(random_tensor({prev, shape[k], next}, rng));
        prev = next;
    }
    return TtTensor(std::move(cores));
}

/// Visits every multi-index of the shape in little-endian order.
inline void for_each_index(const std::vector<Index>& shape,
                           const std::function<void(const std::vector<Index>&)>& fn) {
    std::vector<Index> idx(shape.size(), 0);
    while (true) {
        fn(idx);
        std::size_t k = 0;
        while (k < shape.size()) {
            if (++idx[k] < shape[k]) break;
            idx[k] = 0;
            ++k;
        }
        if (k == shape.size()) break;
    }
}

/// Reference TT-SVD oracle: dense successive-SVD decomposition with the
/// delta = eps/sqrt(N-1)*|X|_F truncation rule. Independent of the library's
/// rounding/cross paths; used to cross-check them.
inline TtTensor tt_svd_oracle(const DenseTensor& x, double eps) {
    const auto& shape = x.shape();
    const Index n_dims = x.order();
    const double delta =
        n_dims > 1 ? eps * frobenius_norm(x) / std::sqrt(static_cast<double>(n_dims - 1)) : 0.0;

    std::vector<DenseTensor> cores;
    Matrix rest = unfold(x, 1); // n_1 x (rest)
    Index r_prev = 1;
    for (Index k = 0; k < n_dims - 1; ++k) {
        const Index nk = shape[static_cast<std::size_t>(k)];
        Matrix m = Eigen::Map<const Matrix>(rest.data(), r_prev * nk, rest.size() / (r_prev * nk));
        auto svd = linalg::thin_svd(m);
        const Index rank = linalg::truncation_rank(svd.s, delta);
        cores.push_back(fold(Matrix(svd.u.leftCols(rank)), {r_prev, nk, rank}));
        rest = svd.s.head(rank).asDiagonal() * svd.v.leftCols(rank).transpose();
        r_prev = rank;
    }
    cores.push_back(fold(rest, {r_prev, shape.back(), 1}));
    return TtTensor(std::move(cores));
}

} // namespace pttk::test
