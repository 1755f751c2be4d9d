#include "pttk/pttk.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pttk/linalg.hpp"
#include "pttk/par.hpp"
#include "pttk/rng.hpp"
#include "pttk/tt_cross.hpp"

namespace pttk {

Index ParametricFactorization::storage_doubles() const {
    Index total = s.rows() * s.cols() + t.rows() * t.cols();
    for (const auto& c : param_cores) total += c.size();
    return total;
}

namespace {

void check_point_counts(const Matrix& sources, const Matrix& targets) {
    if (sources.rows() == 0 || targets.rows() == 0)
        throw std::invalid_argument("offline: need at least one source and one target point");
}

} // namespace

ParametricFactorization offline(const KernelOracle& oracle, const Matrix& sources,
                                const Matrix& targets, const OfflineOptions& opts) {
    const auto& geom = oracle.geometry();
    check_point_counts(sources, targets);
    if (opts.n < 2) throw std::invalid_argument("offline: n must be >= 2");
    if (opts.eps <= 0.0) throw std::invalid_argument("offline: eps must be positive");

    const std::uint64_t evals_before = oracle.evaluation_count();
    const Index d = geom.d, d_theta = geom.d_theta;

    // Phase 1: Chebyshev grid and factor matrices.
    ChebyshevGrid grid(opts.n, geom.ordered_intervals());
    FactorMatrices fm = factor_matrices(grid, d, d_theta, sources, targets);

    // Phase 2: TT approximation of the coefficient tensor by greedy-cross.
    CoefficientOracle entry_oracle(oracle, grid);
    Rng rng(opts.seed);
    NestedIndexSets init = init_index_sets(entry_oracle, rng, opts.init_max_it);
    CrossOptions copts;
    copts.eps = opts.eps;
    copts.max_sweeps = opts.max_sweeps;
    CrossResult cross = greedy_cross(entry_oracle, copts, init, rng);

    // Phase 3: contract the spatial cores into the factor matrices without
    // materializing any n^d object.
    std::span<const DenseTensor> cores(cross.tt.cores());
    Matrix s = left_contraction(cores.subspan(0, static_cast<std::size_t>(d)), fm.u);
    Matrix t = right_contraction(cores.subspan(static_cast<std::size_t>(d + d_theta)), fm.v);

    // Phase 4: one more rounding pass over [S-twist, parameter cores, T-twist].
    std::vector<DenseTensor> chain;
    chain.reserve(static_cast<std::size_t>(d_theta) + 2);
    chain.push_back(twist(s, 1));
    for (Index j = 0; j < d_theta; ++j)
        chain.push_back(cross.tt.core(d + j));
    chain.push_back(twist(t.transpose(), 3));
    TtTensor rounded = tt_round(TtTensor(std::move(chain)), opts.eps);

    ParametricFactorization f;
    f.s = unfold_view(rounded.core(0), 2); // (1*N_s) x r
    f.t = unfold_view(rounded.core(rounded.order() - 1), 1).transpose();
    f.param_cores.assign(rounded.cores().begin() + 1, rounded.cores().end() - 1);
    f.grid = std::move(grid);
    f.spec = oracle.spec();
    f.geom = geom;
    f.n = opts.n;
    f.eps = opts.eps;
    f.seed = opts.seed;
    f.converged = cross.converged;
    f.sampled_error = cross.sampled_error;
    f.ns = sources.rows();
    f.nt = targets.rows();
    f.cross_ranks = cross.ranks;
    f.offline_kernel_evals = oracle.evaluation_count() - evals_before;
    return f;
}

ParametricFactorization ttk(const KernelOracle& oracle, const Matrix& sources,
                            const Matrix& targets, const OfflineOptions& opts) {
    if (oracle.geometry().d_theta != 0)
        throw std::invalid_argument("ttk: kernel must be non-parametric (d_theta = 0)");
    return offline(oracle, sources, targets, opts);
}

namespace {

void check_theta(const ProblemGeometry& geom, std::span<const double> theta) {
    if (static_cast<Index>(theta.size()) != geom.d_theta)
        throw std::invalid_argument("online: theta arity mismatch");
    for (Index j = 0; j < geom.d_theta; ++j)
        if (!contains(geom.theta_box[static_cast<std::size_t>(j)], theta[static_cast<std::size_t>(j)]))
            throw std::invalid_argument("online: theta outside parameter box");
}

// G x_2 q: contracts the middle mode of an order-3 core with a row vector.
Matrix core_mode2(const DenseTensor& core, const RowVector& q) {
    const Index r0 = core.dim(0), n = core.dim(1), r1 = core.dim(2);
    Matrix h = Matrix::Zero(r0, r1);
    for (Index l = 0; l < n; ++l) {
        Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> slab(core.data() + l * r0, r0, r1,
                                                               Eigen::OuterStride<>(r0 * n));
        h.noalias() += q[l] * slab;
    }
    return h;
}

Matrix h_matrix(const ChebyshevGrid& grid, const ProblemGeometry& geom,
                std::span<const DenseTensor> param_cores, std::span<const double> theta,
                Index identity_rank) {
    check_theta(geom, theta);
    if (geom.d_theta == 0) return Matrix::Identity(identity_rank, identity_rank);
    Matrix h = core_mode2(param_cores[0], grid.q_row(geom.d, theta[0]));
    for (Index j = 1; j < geom.d_theta; ++j) {
        const RowVector q = grid.q_row(geom.d + j, theta[static_cast<std::size_t>(j)]);
        h = h * core_mode2(param_cores[static_cast<std::size_t>(j)], q);
    }
    return h;
}

} // namespace

Matrix online(const ParametricFactorization& f, std::span<const double> theta) {
    return h_matrix(f.grid, f.geom, f.param_cores, theta, f.rank_s());
}

Matrix evaluate(const ParametricFactorization& f, std::span<const double> theta,
                std::span<const Index> rows, std::span<const Index> cols) {
    const Matrix h = online(f, theta);
    const auto pick = [](const Matrix& m, std::span<const Index> idx) {
        if (idx.empty()) return m;
        Matrix out(static_cast<Index>(idx.size()), m.cols());
        for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = m.row(idx[i]);
        return out;
    };
    const Matrix srows = pick(f.s, rows);
    const Matrix tcols = pick(f.t, cols);
    return srows * h * tcols.transpose();
}

GlobalFactorization global_offline(const KernelOracle& oracle, const Matrix& points,
                                   const OfflineOptions& opts) {
    const auto& geom = oracle.geometry();
    if (geom.source_box.size() != geom.target_box.size())
        throw std::invalid_argument("global_offline: box dimension mismatch");
    for (std::size_t i = 0; i < geom.source_box.size(); ++i)
        if (geom.source_box[i].lo != geom.target_box[i].lo ||
            geom.source_box[i].hi != geom.target_box[i].hi)
            throw std::invalid_argument("global_offline: source and target boxes must coincide");

    ParametricFactorization f = offline(oracle, points, points, opts);

    Matrix st(f.s.rows(), f.s.cols() + f.t.cols());
    st << f.s, f.t;
    auto qr = linalg::thin_qr(st);

    // Trim trailing columns whose diagonal is at round-off scale relative to
    // the leading one, so degenerate inputs (e.g. a constant kernel) do not
    // carry exactly dependent directions into the eigenproblem. The threshold
    // sits three orders below the smallest tolerance the offline stage
    // accepts, so genuine directions are never trimmed.
    Index k = qr.r.rows();
    const double trim_tol = std::abs(qr.r(0, 0)) * 1e-12;
    while (k > 1 && std::abs(qr.r(k - 1, k - 1)) <= trim_tol) --k;

    GlobalFactorization g;
    g.q = qr.q.leftCols(k);
    g.r = qr.r.topRows(k);
    g.split = f.s.cols();
    g.param_cores = std::move(f.param_cores);
    g.grid = std::move(f.grid);
    g.spec = f.spec;
    g.geom = f.geom;
    g.n = f.n;
    g.eps = f.eps;
    g.seed = f.seed;
    g.converged = f.converged;
    g.sampled_error = f.sampled_error;
    g.ns = f.ns;
    g.offline_kernel_evals = f.offline_kernel_evals;
    g.cross_ranks = f.cross_ranks;
    // Eigenvalue clipping is for PSD kernels; indefinite families keep their
    // negative part by default.
    switch (g.spec.family) {
        case KernelFamily::squared_exponential:
        case KernelFamily::matern:
        case KernelFamily::exponential:
            g.clip_default = true;
            break;
        default:
            g.clip_default = false;
            break;
    }
    return g;
}

GlobalOnlineResult global_online(const GlobalFactorization& g, std::span<const double> theta,
                                 double eps, bool compress, std::optional<bool> clip) {
    // H via the parametric online stage, then B = R_S H R_T^T in the small
    // coordinates of Q.
    const Matrix h = h_matrix(g.grid, g.geom, g.param_cores, theta, g.split);

    const Matrix r_s = g.r.leftCols(g.split);
    const Matrix r_t = g.r.rightCols(g.r.cols() - g.split);
    const Matrix b = r_s * h * r_t.transpose(); // k x k
    const Matrix sym = 0.5 * (b + b.transpose());

    auto eig = linalg::sym_eig(sym);
    const Index k = sym.rows();

    // Order by |lambda| descending, ties by original index.
    std::vector<Index> order(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index bidx) {
        return std::abs(eig.values[a]) > std::abs(eig.values[bidx]);
    });

    const bool do_clip = clip.value_or(g.clip_default);
    std::vector<Index> kept;
    kept.reserve(order.size());
    for (Index i : order)
        if (!do_clip || eig.values[i] >= 0.0) kept.push_back(i);

    Index m = static_cast<Index>(kept.size());
    if (compress) {
        // Smallest leading set of eigenpairs with
        // |Q U L U^T Q^T - S H T^T|_F <= eps |S H T^T|_F; the skew part of B
        // is orthogonal to every symmetric matrix, so the error splits as
        // sqrt(|B|^2 - sum kept lambda^2).
        const double target = eps * b.norm();
        const double b2 = b.squaredNorm();
        double kept2 = 0.0;
        Index needed = m;
        for (Index i = 0; i < m; ++i) {
            kept2 += eig.values[kept[static_cast<std::size_t>(i)]] *
                     eig.values[kept[static_cast<std::size_t>(i)]];
            if (std::sqrt(std::max(0.0, b2 - kept2)) <= target) {
                needed = i + 1;
                break;
            }
        }
        m = std::max<Index>(1, needed);
    }

    GlobalOnlineResult out;
    out.rank = m;
    Matrix u(k, m);
    Vector lam(m);
    for (Index i = 0; i < m; ++i) {
        u.col(i) = eig.vectors.col(kept[static_cast<std::size_t>(i)]);
        lam[i] = eig.values[kept[static_cast<std::size_t>(i)]];
    }

    if (compress) {
        out.q = g.q * u;
        out.w = lam.asDiagonal();
    } else {
        out.q = g.q;
        Matrix w = u * lam.asDiagonal() * u.transpose();
        // Mirror the upper triangle so the output is exactly symmetric.
        for (Index j = 0; j < k; ++j)
            for (Index i = j + 1; i < k; ++i) w(i, j) = w(j, i);
        out.w = std::move(w);
    }
    return out;
}

double lebesgue_bound(Index n) {
    return 2.0 / std::numbers::pi * std::log(static_cast<double>(n)) + 1.0;
}

double interpolation_error_bound(Index k, Index dims, double diam_inf, double c_f, double gamma_f,
                                 Index sigma) {
    const double lam = lebesgue_bound(std::max<Index>(k, 2)); // bounds lambda_{k-1}
    const double rho = 2.0 * gamma_f / diam_inf;
    const double zeta = rho + std::sqrt(1.0 + rho * rho);
    return 2.0 * std::numbers::e * static_cast<double>(dims) * c_f *
           std::pow(lam + 1.0, static_cast<double>(dims)) *
           std::pow(static_cast<double>(k + 1), static_cast<double>(sigma)) *
           (1.0 + diam_inf / gamma_f) * std::pow(zeta, -static_cast<double>(k));
}

} // namespace pttk
