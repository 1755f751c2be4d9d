#pragma once

#include "pttk/tensor.hpp"
#include "pttk/tt_cross.hpp"

namespace pttk {

/// Low-rank pair: K ~= A B^T with matching column counts.
struct LowRankPair {
    Matrix a; // N_s x k
    Matrix b; // N_t x k
    Index rank() const { return a.cols(); }
};

struct AcaResult {
    LowRankPair lr;
    bool converged = false;
    Index rank = 0;
    double residual_estimate = 0.0; ///< last |u||v| / estimated |K|_F
};

/// Partially pivoted adaptive cross approximation. The first pivot row is row
/// 0; subsequent row pivots take the argmax of the latest residual column
/// magnitude over unused rows. Stops when the incremental Frobenius estimate
/// of the residual drops below eps times the estimated |K|_F, or at max_rank.
/// A zero pivot with a nonzero residual estimate triggers a scan over unused
/// rows; exhausting them returns with converged = false.
AcaResult aca(const MatrixOracle& k, double eps_frobenius, Index max_rank);

struct TruncatedSvd {
    LowRankPair lr;
    Vector singular_values; ///< all singular values of K, descending
};

/// Best rank-k approximation by the thin SVD; A = U_k Sigma_k, B = V_k.
TruncatedSvd truncated_svd(const Matrix& k, Index rank);

/// Matrix-entry view of a kernel matrix K(X, Y; theta); evaluations count
/// against the kernel oracle.
class KernelMatrixOracle final : public MatrixOracle {
public:
    KernelMatrixOracle(const KernelOracle& oracle, const Matrix& xs, const Matrix& ys,
                       std::vector<double> theta)
        : oracle_(&oracle), xs_(&xs), ys_(&ys), theta_(std::move(theta)) {}

    Index rows() const override { return xs_->rows(); }
    Index cols() const override { return ys_->rows(); }
    double at(Index i, Index j) const override;

private:
    const KernelOracle* oracle_;
    const Matrix* xs_;
    const Matrix* ys_;
    std::vector<double> theta_;
};

} // namespace pttk
