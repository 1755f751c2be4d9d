#pragma once

#include <span>
#include <vector>

#include "pttk/tensor.hpp"

namespace pttk {

/// Tensor in the tensor-train format: a chain of order-3 cores, core k of
/// shape (r_{k-1}, n_k, r_k) with r_0 = r_N = 1.
class TtTensor {
public:
    TtTensor() = default;
    explicit TtTensor(std::vector<DenseTensor> cores);

    Index order() const { return static_cast<Index>(cores_.size()); }
    std::vector<Index> shape() const;
    /// Rank vector (r_0, ..., r_N).
    std::vector<Index> ranks() const;
    Index max_rank() const;
    Index size_compressed() const;

    const DenseTensor& core(Index k) const { return cores_.at(static_cast<std::size_t>(k)); }
    DenseTensor& core(Index k) { return cores_.at(static_cast<std::size_t>(k)); }
    const std::vector<DenseTensor>& cores() const { return cores_; }

private:
    std::vector<DenseTensor> cores_;
};

/// Entry at a 0-based multi-index, evaluated as a chain of vector-matrix
/// products (O(N r^2)).
double tt_entry(const TtTensor& t, std::span<const Index> idx);

/// Dense reconstruction, guarded by a size cap so misuse is loud rather than
/// slow. Test oracle; not for production paths.
DenseTensor tt_full(const TtTensor& t, Index cap = 10'000'000);

/// TT rounding: right-to-left orthogonalization followed by an SVD
/// re-compression sweep with per-step threshold delta = eps/sqrt(N-1)*|X|_F.
/// Ranks never increase and |X - Xhat|_F <= eps |X|_F.
TtTensor tt_round(const TtTensor& t, double eps);

/// Source-side contraction of Algorithm "offline" Phase 3: with cores G_1..G_d
/// and factors U_1..U_d, computes F_s * L = U_1 G_1^{2}, then repeatedly
/// (U_i |x| S) G_i^{2}, without materializing any n^d object.
/// Result is N_s x r_d.
Matrix left_contraction(std::span<const DenseTensor> cores, std::span<const Matrix> factors);

/// Target-side analogue: returns T = (F_t * R) of size N_t x r, built from the
/// trailing d cores (in order G_{D-d+1}..G_D) and target factors V_1..V_d.
Matrix right_contraction(std::span<const DenseTensor> cores, std::span<const Matrix> factors);

} // namespace pttk
