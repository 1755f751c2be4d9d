#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pttk/chebyshev.hpp"
#include "pttk/kernels.hpp"
#include "pttk/tensor.hpp"
#include "pttk/tt.hpp"

namespace pttk {

struct OfflineOptions {
    Index n = 27;                ///< Chebyshev nodes per dimension
    double eps = 1e-8;           ///< tolerance for greedy-cross and rounding
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    Index max_sweeps = 64;
    Index init_max_it = 10;
};

/// Offline product: K(X, Y; theta) ~= S H(theta) T^T. S and T are
/// parameter-independent; the parameter dependence enters only through the
/// cores between them. With d_theta = 0 the cores are absent and the
/// approximation is S T^T.
struct ParametricFactorization {
    Matrix s; // N_s x r_d
    Matrix t; // N_t x r_{d+d_theta}
    std::vector<DenseTensor> param_cores;
    ChebyshevGrid grid;
    KernelSpec spec;
    ProblemGeometry geom;
    Index n = 0;
    double eps = 0.0;
    std::uint64_t seed = 0;
    bool converged = true;
    double sampled_error = 0.0;
    Index ns = 0, nt = 0;               ///< point counts used offline
    std::uint64_t offline_kernel_evals = 0;
    std::vector<Index> cross_ranks;     ///< bond ranks of the TT before rounding

    Index rank_s() const { return s.cols(); }
    Index rank_t() const { return t.cols(); }
    /// Stored floating-point numbers: N_s r_d + N_t r_t + sum_j n r r.
    Index storage_doubles() const;
};

/// Offline stage: Chebyshev factor matrices, greedy-cross TT of the
/// coefficient tensor, factor contraction, and TT rounding of
/// [S-twist, parameter cores, T-twist].
ParametricFactorization offline(const KernelOracle& oracle, const Matrix& sources,
                                const Matrix& targets, const OfflineOptions& opts);

/// Online stage: H(theta) = prod_j (G_{d+j} x_2 q^p_j(theta_j)), of size
/// rank_s x rank_t; cost independent of the point counts. With d_theta = 0
/// returns the identity. theta must lie in the parameter box (tolerance rule
/// as for points).
Matrix online(const ParametricFactorization& f, std::span<const double> theta);

/// Materializes S(rows) H(theta) T(cols)^T for error measurement; empty index
/// lists select all rows/columns.
Matrix evaluate(const ParametricFactorization& f, std::span<const double> theta,
                std::span<const Index> rows, std::span<const Index> cols);

/// Non-parametric special case (d_theta = 0): K ~= S T^T.
ParametricFactorization ttk(const KernelOracle& oracle, const Matrix& sources,
                            const Matrix& targets, const OfflineOptions& opts);

/// Symmetric/PSD-oriented global form K(X, X; theta) ~= Q W Q^T.
struct GlobalFactorization {
    Matrix q;                         // N x k, orthonormal columns
    Matrix r;                         // k x (rank_s + rank_t), upper trapezoidal
    Index split = 0;                  // rank_s: columns of R belonging to S
    std::vector<DenseTensor> param_cores;
    ChebyshevGrid grid;
    KernelSpec spec;
    ProblemGeometry geom;
    Index n = 0;
    double eps = 0.0;
    std::uint64_t seed = 0;
    bool converged = true;
    double sampled_error = 0.0;
    Index ns = 0;
    std::uint64_t offline_kernel_evals = 0;
    bool clip_default = true;         ///< zero negative eigenvalues by default
    std::vector<Index> cross_ranks;

    Index uncompressed_rank() const { return q.cols(); }
};

/// Requires sources == targets and a symmetric kernel family; runs offline
/// with coinciding boxes/points and stores the thin QR of [S T].
GlobalFactorization global_offline(const KernelOracle& oracle, const Matrix& points,
                                   const OfflineOptions& opts);

struct GlobalOnlineResult {
    Matrix q;   ///< N x rank (variant-1: the stored Q; variant-2: Q * U_hat)
    Matrix w;   ///< rank x rank, exactly symmetric (diagonal for variant-2)
    Index rank = 0;
};

/// Online stage of the global method: eigendecomposition of R Hhat R^T with
/// eigenvalues sorted by magnitude (ties by original position), optional
/// clipping of negative eigenvalues, and, with compress = true (variant-2),
/// truncation of eigenpairs until the relative Frobenius target eps is met.
/// `clip` overrides the factorization's kernel-derived default.
GlobalOnlineResult global_online(const GlobalFactorization& g, std::span<const double> theta,
                                 double eps, bool compress, std::optional<bool> clip = {});

/// Chebyshev-regularity error term E(k) of the interpolation analysis,
/// parameterized by the derivative-bound constants (C_f, gamma_f, sigma) of
/// the kernel and the enclosing domain. Diagnostic only; single-argument form.
double interpolation_error_bound(Index k, Index dims, double diam_inf, double c_f, double gamma_f,
                                 Index sigma);

/// Lebesgue-constant bound (2/pi) log(n) + 1.
double lebesgue_bound(Index n);

} // namespace pttk
