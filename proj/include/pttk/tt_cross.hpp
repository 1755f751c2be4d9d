#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pttk/chebyshev.hpp"
#include "pttk/kernels.hpp"
#include "pttk/rng.hpp"
#include "pttk/tensor.hpp"
#include "pttk/tt.hpp"

namespace pttk {

/// Black-box access to tensor entries with an atomic evaluation counter.
/// Entries must be deterministic: the same index always yields the same value.
class EntryOracle {
public:
    explicit EntryOracle(std::vector<Index> shape) : shape_(std::move(shape)) {}
    virtual ~EntryOracle() = default;

    const std::vector<Index>& shape() const { return shape_; }
    Index order() const { return static_cast<Index>(shape_.size()); }

    double operator()(std::span<const Index> idx) const {
        count_.fetch_add(1, std::memory_order_relaxed);
        return eval_impl(idx);
    }

    std::uint64_t evaluation_count() const { return count_.load(std::memory_order_relaxed); }

protected:
    virtual double eval_impl(std::span<const Index> idx) const = 0;

private:
    std::vector<Index> shape_;
    mutable std::atomic<std::uint64_t> count_{0};
};

/// Oracle wrapping an arbitrary function (tests, synthetic tensors).
class FunctionOracle final : public EntryOracle {
public:
    using Fn = std::function<double(std::span<const Index>)>;
    FunctionOracle(std::vector<Index> shape, Fn fn)
        : EntryOracle(std::move(shape)), fn_(std::move(fn)) {}

private:
    double eval_impl(std::span<const Index> idx) const override { return fn_(idx); }
    Fn fn_;
};

/// Oracle over the Chebyshev coefficient tensor of a kernel.
class CoefficientOracle final : public EntryOracle {
public:
    CoefficientOracle(const KernelOracle& oracle, const ChebyshevGrid& grid)
        : EntryOracle(std::vector<Index>(static_cast<std::size_t>(grid.dims()), grid.n())),
          oracle_(&oracle),
          grid_(&grid) {}

private:
    double eval_impl(std::span<const Index> idx) const override {
        return coefficient_entry(*oracle_, *grid_, idx);
    }
    const KernelOracle* oracle_;
    const ChebyshevGrid* grid_;
};

/// Nested left/right multi-index families. left[k] holds the members of
/// I^{<=k+1} as (k+1)-tuples for k = 0..N-2; right[k] holds the members of
/// I^{>k+1} as (N-1-k)-tuples. Dropping the last coordinate of a left member
/// must yield a member of the previous left set, and dropping the first
/// coordinate of a right member a member of the next right set.
struct NestedIndexSets {
    std::vector<std::vector<std::vector<Index>>> left;
    std::vector<std::vector<std::vector<Index>>> right;

    /// Verifies arity, cardinality matching, nestedness and absence of
    /// duplicates; throws std::invalid_argument with a description otherwise.
    void validate(std::span<const Index> shape) const;

    std::vector<Index> bond_ranks() const;
};

/// Matrix entry oracle for the two-dimensional cross update.
class MatrixOracle {
public:
    virtual ~MatrixOracle() = default;
    virtual Index rows() const = 0;
    virtual Index cols() const = 0;
    virtual double at(Index i, Index j) const = 0;
};

class FunctionMatrixOracle final : public MatrixOracle {
public:
    using Fn = std::function<double(Index, Index)>;
    FunctionMatrixOracle(Index rows, Index cols, Fn fn)
        : rows_(rows), cols_(cols), fn_(std::move(fn)) {}
    Index rows() const override { return rows_; }
    Index cols() const override { return cols_; }
    double at(Index i, Index j) const override { return fn_(i, j); }

private:
    Index rows_, cols_;
    Fn fn_;
};

enum class CrossUpdateStatus {
    updated,        ///< one row and one column index were appended
    converged_here, ///< sampled residual vanished; sets unchanged
    ill_conditioned ///< cross matrix condition exceeded 1e14; sets unchanged
};

struct CrossUpdateResult {
    CrossUpdateStatus status = CrossUpdateStatus::converged_here;
    Index row = -1;
    Index col = -1;
    double max_residual = 0.0;
};

/// One greedy enlargement step of a matrix cross approximation
/// (sample max(n,m) residual positions, expand the winner along its row or
/// column by a fair coin, append the new pivot pair). A proposed pivot that
/// would duplicate an existing row/column is rejected in favor of the next
/// largest sample. Residuals at or below round-off scale count as zero.
CrossUpdateResult update_cross(const MatrixOracle& a, std::vector<Index>& row_set,
                               std::vector<Index>& col_set, Rng& rng);

struct CrossOptions {
    double eps = 1e-8;
    Index max_sweeps = 64;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    Index pool_min = 1000; ///< stopping-rule pool size is max(pool_min, 10*N*n)
};

struct CrossResult {
    TtTensor tt;
    bool converged = false;
    double sampled_error = 0.0;
    Index sweeps = 0;
    std::vector<Index> ranks;  ///< bond ranks of the returned TT
    NestedIndexSets sets;      ///< final nested index families
};

/// Raised when every initialization cross matrix is singular and the sampled
/// error cannot improve; callers should re-run index initialization.
struct CrossInitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Condition-number-driven initialization of cardinality-2 nested index sets:
/// random right sets from two random index vectors, then alternating sweeps
/// choosing at each bond the pair of extensions minimizing the 2-norm
/// condition number of the resulting 2x2 cross matrix; returns the family
/// with the smallest maximum cross-matrix condition number over all sweeps.
/// For oracles of exact rank 1 every candidate is singular; the best-effort
/// family is still returned (the greedy sweep only needs the pivot), and an
/// exception is raised only if some slice is identically zero.
NestedIndexSets init_index_sets(const EntryOracle& oracle, Rng& rng, Index max_it = 10);
NestedIndexSets init_index_sets(const EntryOracle& oracle, std::uint64_t seed, Index max_it = 10);

/// TT greedy-cross: sweeps the bonds applying update_cross to the reshaped
/// DMRG supercore, keeps the index sets nested by construction, stops when
/// the sampled relative Chebyshev error over a fixed pool drops below eps,
/// and assembles the cores through the cross interpolation formula (cross
/// inverses applied by solving, with a pseudo-inverse fallback for singular
/// cross matrices so exactly low-rank inputs still assemble).
CrossResult greedy_cross(const EntryOracle& oracle, const CrossOptions& opts,
                         const NestedIndexSets& init, Rng& rng);
CrossResult greedy_cross(const EntryOracle& oracle, const CrossOptions& opts,
                         const NestedIndexSets& init);

/// max over samples of |x - xhat| divided by max over samples of |x|.
/// Throws std::domain_error when every sampled reference value is zero.
double sample_error(const EntryOracle& oracle, const TtTensor& t,
                    std::span<const std::vector<Index>> samples);

} // namespace pttk
