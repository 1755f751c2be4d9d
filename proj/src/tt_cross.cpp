#include "pttk/tt_cross.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>
#include <cstdio>
#include <cstdlib>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "pttk/linalg.hpp"

namespace pttk {

namespace {

constexpr double kCondLimit = 1e14;
// Sampled residuals at or below this fraction of the sampled entry magnitude
// are treated as the paper's "exactly zero" signal; exact skeletons hit
// round-off, not 0.0.
constexpr double kResidualZero = 1e-14;

} // namespace

// ---------------------------------------------------------------------------
// NestedIndexSets

void NestedIndexSets::validate(std::span<const Index> shape) const {
    const Index n_dims = static_cast<Index>(shape.size());
    if (static_cast<Index>(left.size()) != n_dims - 1 ||
        static_cast<Index>(right.size()) != n_dims - 1)
        throw std::invalid_argument("NestedIndexSets: need N-1 left and right sets");

    auto check_set = [&](const std::vector<std::vector<Index>>& set, Index arity, Index k,
                         bool is_left) {
        if (set.empty()) throw std::invalid_argument("NestedIndexSets: empty set");
        std::unordered_set<std::string> seen;
        for (const auto& tup : set) {
            if (static_cast<Index>(tup.size()) != arity)
                throw std::invalid_argument("NestedIndexSets: tuple arity mismatch");
            std::string key;
            for (std::size_t c = 0; c < tup.size(); ++c) {
                const Index dim = is_left ? static_cast<Index>(c) : n_dims - arity + static_cast<Index>(c);
                if (tup[c] < 0 || tup[c] >= shape[static_cast<std::size_t>(dim)])
                    throw std::invalid_argument("NestedIndexSets: index out of range");
                key += std::to_string(tup[c]) + ",";
            }
            if (!seen.insert(key).second)
                throw std::invalid_argument("NestedIndexSets: duplicate tuple in set " +
                                            std::to_string(k));
        }
    };

    for (std::size_t k = 0; k < left.size(); ++k)
        check_set(left[k], static_cast<Index>(k) + 1, static_cast<Index>(k), true);
    for (std::size_t k = 0; k < right.size(); ++k)
        check_set(right[k], n_dims - 1 - static_cast<Index>(k), static_cast<Index>(k), false);

    for (std::size_t k = 0; k < left.size(); ++k)
        if (left[k].size() != right[k].size())
            throw std::invalid_argument("NestedIndexSets: left/right cardinality mismatch");

    // Nestedness.
    for (std::size_t k = 1; k < left.size(); ++k)
        for (const auto& tup : left[k]) {
            std::vector<Index> prefix(tup.begin(), tup.end() - 1);
            if (std::find(left[k - 1].begin(), left[k - 1].end(), prefix) == left[k - 1].end())
                throw std::invalid_argument("NestedIndexSets: left sets not nested");
        }
    for (std::size_t k = 0; k + 1 < right.size(); ++k)
        for (const auto& tup : right[k]) {
            std::vector<Index> suffix(tup.begin() + 1, tup.end());
            if (std::find(right[k + 1].begin(), right[k + 1].end(), suffix) == right[k + 1].end())
                throw std::invalid_argument("NestedIndexSets: right sets not nested");
        }
}

std::vector<Index> NestedIndexSets::bond_ranks() const {
    std::vector<Index> r;
    r.reserve(left.size());
    for (const auto& s : left) r.push_back(static_cast<Index>(s.size()));
    return r;
}

// ---------------------------------------------------------------------------
// Shared greedy enlargement step

namespace {

struct BondSolver {
    bool use_lu = true;
    Eigen::PartialPivLU<Matrix> lu;   // of C
    Eigen::PartialPivLU<Matrix> lu_t; // of C^T
    Matrix u, v;                      // pinv pieces when !use_lu
    Vector sinv;
    double cond = 1.0;

    void factor(const Matrix& cross) {
        Vector s = linalg::singular_values(cross);
        cond = linalg::cond_from_singular_values(s);
        if (cond <= kCondLimit) {
            use_lu = true;
            lu.compute(cross);
            lu_t.compute(cross.transpose());
        } else {
            use_lu = false;
            auto svd = linalg::thin_svd(cross);
            u = svd.u;
            v = svd.v;
            sinv = svd.s;
            const double cutoff =
                svd.s.size() ? svd.s[0] * static_cast<double>(cross.rows()) *
                                   std::numeric_limits<double>::epsilon()
                             : 0.0;
            for (Index i = 0; i < sinv.size(); ++i)
                sinv[i] = svd.s[i] > cutoff ? 1.0 / svd.s[i] : 0.0;
        }
    }

    // Solves C x = b.
    Vector solve(const Vector& b) const {
        if (use_lu) return lu.solve(b);
        return v * (sinv.asDiagonal() * (u.transpose() * b));
    }

    Matrix solve(const Matrix& b) const {
        if (use_lu) return lu.solve(b);
        return v * (sinv.asDiagonal() * (u.transpose() * b)).eval();
    }

    // Returns x with x C = w, i.e. solves C^T x^T = w^T.
    RowVector solve_left(const Eigen::Ref<const RowVector>& w) const {
        if (use_lu) return lu_t.solve(w.transpose()).transpose();
        return (u * (sinv.asDiagonal() * (v.transpose() * w.transpose()))).transpose();
    }

    // Returns B C^{-1}.
    Matrix solve_right_of(const Matrix& b) const {
        if (use_lu) return lu_t.solve(b.transpose()).transpose();
        return ((u * (sinv.asDiagonal() * (v.transpose() * b.transpose()))).transpose()).eval();
    }
};

// residual_floor: absolute residual magnitude below which the bond counts as
// resolved (the driver sets it from the target tolerance; 0 keeps only the
// round-off rule).
CrossUpdateResult cross_update_step(Index rows, Index cols, Eigen::Ref<const Matrix> a_cols,
                                    Eigen::Ref<const Matrix> a_rows, const Matrix& cross,
                                    const std::function<double(Index, Index)>& fresh,
                                    const std::vector<Index>& rows_used,
                                    const std::vector<Index>& cols_used, Rng& rng,
                                    double residual_floor = 0.0) {
    CrossUpdateResult out;
    const Index r = cross.rows();

    BondSolver solver;
    solver.factor(cross);
    if (solver.cond > kCondLimit) {
        out.status = CrossUpdateStatus::ill_conditioned;
        return out;
    }

    // Sample max(rows, cols) distinct positions of the residual.
    const Index n_samples = std::min(std::max(rows, cols), rows * cols);
    std::vector<std::pair<Index, Index>> samples;
    samples.reserve(static_cast<std::size_t>(n_samples));
    {
        std::unordered_set<std::uint64_t> seen;
        while (static_cast<Index>(samples.size()) < n_samples) {
            const Index i = rng.uniform_int(rows);
            const Index j = rng.uniform_int(cols);
            if (seen.insert(static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(cols) +
                            static_cast<std::uint64_t>(j))
                    .second)
                samples.emplace_back(i, j);
        }
    }

    // Residual at the samples: a_cols.row(i) * C^{-1} * a_rows.col(j) - A(i,j).
    // Solve once per distinct sampled column.
    std::vector<Index> distinct_cols;
    std::vector<Index> col_pos(static_cast<std::size_t>(cols), -1);
    for (const auto& [i, j] : samples)
        if (col_pos[static_cast<std::size_t>(j)] < 0) {
            col_pos[static_cast<std::size_t>(j)] = static_cast<Index>(distinct_cols.size());
            distinct_cols.push_back(j);
        }
    Matrix rhs(r, static_cast<Index>(distinct_cols.size()));
    for (std::size_t c = 0; c < distinct_cols.size(); ++c)
        rhs.col(static_cast<Index>(c)) = a_rows.col(distinct_cols[c]);
    const Matrix w = solver.solve(rhs);

    std::vector<double> res(samples.size());
    std::vector<double> avals(samples.size());
#pragma omp parallel for schedule(static)
    for (Index s = 0; s < static_cast<Index>(samples.size()); ++s) {
        const auto [i, j] = samples[static_cast<std::size_t>(s)];
        const double skel = a_cols.row(i).dot(w.col(col_pos[static_cast<std::size_t>(j)]));
        const double aij = fresh(i, j);
        avals[static_cast<std::size_t>(s)] = aij;
        res[static_cast<std::size_t>(s)] = skel - aij;
    }

    double scale = 0.0;
    for (double a : avals) scale = std::max(scale, std::abs(a));
    const double zero_thresh = std::max(kResidualZero * scale, residual_floor);

    std::vector<Index> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        return std::abs(res[static_cast<std::size_t>(a)]) > std::abs(res[static_cast<std::size_t>(b)]);
    });

    out.max_residual = samples.empty() ? 0.0 : std::abs(res[static_cast<std::size_t>(order[0])]);
    if (out.max_residual <= zero_thresh) {
        out.status = CrossUpdateStatus::converged_here;
        return out;
    }

    std::vector<char> row_mask(static_cast<std::size_t>(rows), 0);
    std::vector<char> col_mask(static_cast<std::size_t>(cols), 0);
    for (Index i : rows_used) row_mask[static_cast<std::size_t>(i)] = 1;
    for (Index j : cols_used) col_mask[static_cast<std::size_t>(j)] = 1;

    const bool along_row = rng.coin();

    for (Index cand : order) {
        if (std::abs(res[static_cast<std::size_t>(cand)]) <= zero_thresh) break;
        const auto [si, sj] = samples[static_cast<std::size_t>(cand)];

        if (along_row) {
            if (row_mask[static_cast<std::size_t>(si)]) continue; // duplicate row pivot
            const RowVector vrow = solver.solve_left(a_cols.row(si));
            Vector rrow(cols);
#pragma omp parallel for schedule(static)
            for (Index j = 0; j < cols; ++j) {
                if (col_mask[static_cast<std::size_t>(j)]) {
                    rrow[j] = 0.0;
                    continue;
                }
                rrow[j] = vrow.dot(a_rows.col(j)) - fresh(si, j);
            }
            Index best = -1;
            double best_val = zero_thresh;
            for (Index j = 0; j < cols; ++j)
                if (!col_mask[static_cast<std::size_t>(j)] && std::abs(rrow[j]) > best_val) {
                    best_val = std::abs(rrow[j]);
                    best = j;
                }
            if (best < 0) continue;
            out.status = CrossUpdateStatus::updated;
            out.row = si;
            out.col = best;
            return out;
        }

        if (col_mask[static_cast<std::size_t>(sj)]) continue; // duplicate column pivot
        const Vector wcol = solver.solve(Vector(a_rows.col(sj)));
        Vector rcol(rows);
#pragma omp parallel for schedule(static)
        for (Index i = 0; i < rows; ++i) {
            if (row_mask[static_cast<std::size_t>(i)]) {
                rcol[i] = 0.0;
                continue;
            }
            rcol[i] = a_cols.row(i).dot(wcol) - fresh(i, sj);
        }
        Index best = -1;
        double best_val = zero_thresh;
        for (Index i = 0; i < rows; ++i)
            if (!row_mask[static_cast<std::size_t>(i)] && std::abs(rcol[i]) > best_val) {
                best_val = std::abs(rcol[i]);
                best = i;
            }
        if (best < 0) continue;
        out.status = CrossUpdateStatus::updated;
        out.row = best;
        out.col = sj;
        return out;
    }

    out.status = CrossUpdateStatus::converged_here;
    return out;
}

} // namespace

CrossUpdateResult update_cross(const MatrixOracle& a, std::vector<Index>& row_set,
                               std::vector<Index>& col_set, Rng& rng) {
    if (row_set.empty() || row_set.size() != col_set.size())
        throw std::invalid_argument("update_cross: index sets must be non-empty and equal size");
    const Index rows = a.rows(), cols = a.cols();
    const Index r = static_cast<Index>(row_set.size());

    Matrix a_cols(rows, r), a_rows(r, cols), cross(r, r);
    for (Index t = 0; t < r; ++t)
        for (Index i = 0; i < rows; ++i) a_cols(i, t) = a.at(i, col_set[static_cast<std::size_t>(t)]);
    for (Index s = 0; s < r; ++s)
        for (Index j = 0; j < cols; ++j) a_rows(s, j) = a.at(row_set[static_cast<std::size_t>(s)], j);
    for (Index s = 0; s < r; ++s)
        for (Index t = 0; t < r; ++t)
            cross(s, t) = a_rows(s, col_set[static_cast<std::size_t>(t)]);

    auto fresh = [&](Index i, Index j) { return a.at(i, j); };
    auto result = cross_update_step(rows, cols, a_cols, a_rows, cross, fresh, row_set, col_set, rng);
    if (result.status == CrossUpdateStatus::updated) {
        row_set.push_back(result.row);
        col_set.push_back(result.col);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Index initialization (condition-number heuristic)

namespace {

double entry_at(const EntryOracle& oracle, std::vector<Index>& scratch,
                std::span<const Index> prefix, Index mid, std::span<const Index> suffix) {
    scratch.clear();
    scratch.insert(scratch.end(), prefix.begin(), prefix.end());
    scratch.push_back(mid);
    scratch.insert(scratch.end(), suffix.begin(), suffix.end());
    return oracle(scratch);
}

struct InitFamily {
    std::vector<std::vector<std::vector<Index>>> left, right;
    double max_cond = std::numeric_limits<double>::infinity();
};

} // namespace

NestedIndexSets init_index_sets(const EntryOracle& oracle, std::uint64_t seed, Index max_it) {
    Rng rng(seed);
    return init_index_sets(oracle, rng, max_it);
}

NestedIndexSets init_index_sets(const EntryOracle& oracle, Rng& rng, Index max_it) {
    const auto& shape = oracle.shape();
    const Index n_dims = oracle.order();
    if (n_dims < 2) throw std::invalid_argument("init_index_sets: need order >= 2");
    for (Index nk : shape)
        if (nk < 2) throw std::invalid_argument("init_index_sets: every mode size must be >= 2");

    // Two random index vectors; the right sets are their suffixes, so making
    // the last coordinates differ keeps every right set duplicate-free.
    std::vector<Index> q1(static_cast<std::size_t>(n_dims)), q2(static_cast<std::size_t>(n_dims));
    for (Index j = 0; j < n_dims; ++j) {
        q1[static_cast<std::size_t>(j)] = rng.uniform_int(shape[static_cast<std::size_t>(j)]);
        q2[static_cast<std::size_t>(j)] = rng.uniform_int(shape[static_cast<std::size_t>(j)]);
    }
    while (q2.back() == q1.back()) q2.back() = rng.uniform_int(shape.back());

    // left[k]: members of I^{<=k} (k = 1..N-1); right[k]: members of I^{>k}.
    std::vector<std::vector<std::vector<Index>>> left(static_cast<std::size_t>(n_dims));
    std::vector<std::vector<std::vector<Index>>> right(static_cast<std::size_t>(n_dims));
    for (Index k = 1; k <= n_dims - 1; ++k) {
        std::vector<Index> t1(q1.begin() + k, q1.end());
        std::vector<Index> t2(q2.begin() + k, q2.end());
        right[static_cast<std::size_t>(k)] = {t1, t2};
    }

    std::vector<InitFamily> candidates;
    std::vector<Index> scratch;
    scratch.reserve(static_cast<std::size_t>(n_dims));

    bool all_zero_slice = false;
    Index zero_bond = -1;

    auto sweep_cond = [&](std::vector<double>& conds) {
        conds.assign(static_cast<std::size_t>(n_dims), 0.0);
    };

    for (Index it = 0; it < max_it; ++it) {
        // Left-to-right: rebuild left sets against the current right sets.
        std::vector<double> conds;
        sweep_cond(conds);
        for (Index k = 1; k <= n_dims - 1; ++k) {
            const auto& rset = right[static_cast<std::size_t>(k)];
            std::span<const Index> pa, pb;
            if (k > 1) {
                pa = left[static_cast<std::size_t>(k - 1)][0];
                pb = left[static_cast<std::size_t>(k - 1)][1];
            }
            const Index nk = shape[static_cast<std::size_t>(k - 1)];
            // Distinct entries needed: 4 per node index.
            Matrix vals(nk, 4);
            for (Index j = 0; j < nk; ++j) {
                vals(j, 0) = entry_at(oracle, scratch, pa, j, rset[0]);
                vals(j, 1) = entry_at(oracle, scratch, pa, j, rset[1]);
                vals(j, 2) = entry_at(oracle, scratch, pb, j, rset[0]);
                vals(j, 3) = entry_at(oracle, scratch, pb, j, rset[1]);
            }
            double best_cond = std::numeric_limits<double>::infinity();
            double best_smax = -1.0;
            Index bj1 = -1, bj2 = -1;
            for (Index j1 = 0; j1 < nk; ++j1)
                for (Index j2 = 0; j2 < nk; ++j2) {
                    if (k == 1 && j1 == j2) continue;
                    const double c =
                        linalg::cond_2x2(vals(j1, 0), vals(j1, 1), vals(j2, 2), vals(j2, 3));
                    const double smax = std::sqrt(vals(j1, 0) * vals(j1, 0) + vals(j1, 1) * vals(j1, 1) +
                                                  vals(j2, 2) * vals(j2, 2) + vals(j2, 3) * vals(j2, 3));
                    const bool better =
                        std::isinf(best_cond) && std::isinf(c) ? smax > best_smax : c < best_cond;
                    if (better) {
                        best_cond = c;
                        best_smax = smax;
                        bj1 = j1;
                        bj2 = j2;
                    }
                }
            if (best_smax <= 0.0) { all_zero_slice = true; zero_bond = k; }
            std::vector<Index> m1(pa.begin(), pa.end());
            m1.push_back(bj1);
            std::vector<Index> m2(pb.begin(), pb.end());
            m2.push_back(bj2);
            left[static_cast<std::size_t>(k)] = {m1, m2};
            conds[static_cast<std::size_t>(k)] = best_cond;
        }
        candidates.push_back(
            {std::vector(left.begin() + 1, left.begin() + n_dims),
             std::vector(right.begin() + 1, right.begin() + n_dims),
             *std::max_element(conds.begin() + 1, conds.end())});

        // Right-to-left: rebuild right sets against the (now fixed) left sets.
        sweep_cond(conds);
        for (Index k = n_dims; k >= 2; --k) {
            const auto& lset = left[static_cast<std::size_t>(k - 1)];
            std::span<const Index> ta, tb;
            if (k < n_dims) {
                ta = right[static_cast<std::size_t>(k)][0];
                tb = right[static_cast<std::size_t>(k)][1];
            }
            const Index nk = shape[static_cast<std::size_t>(k - 1)];
            Matrix vals(nk, 4);
            for (Index j = 0; j < nk; ++j) {
                vals(j, 0) = entry_at(oracle, scratch, lset[0], j, ta);
                vals(j, 1) = entry_at(oracle, scratch, lset[0], j, tb);
                vals(j, 2) = entry_at(oracle, scratch, lset[1], j, ta);
                vals(j, 3) = entry_at(oracle, scratch, lset[1], j, tb);
            }
            double best_cond = std::numeric_limits<double>::infinity();
            double best_smax = -1.0;
            Index bj1 = -1, bj2 = -1;
            for (Index j1 = 0; j1 < nk; ++j1)
                for (Index j2 = 0; j2 < nk; ++j2) {
                    if (k == n_dims && j1 == j2) continue;
                    const double c =
                        linalg::cond_2x2(vals(j1, 0), vals(j2, 1), vals(j1, 2), vals(j2, 3));
                    const double smax = std::sqrt(vals(j1, 0) * vals(j1, 0) + vals(j2, 1) * vals(j2, 1) +
                                                  vals(j1, 2) * vals(j1, 2) + vals(j2, 3) * vals(j2, 3));
                    const bool better =
                        std::isinf(best_cond) && std::isinf(c) ? smax > best_smax : c < best_cond;
                    if (better) {
                        best_cond = c;
                        best_smax = smax;
                        bj1 = j1;
                        bj2 = j2;
                    }
                }
            if (best_smax <= 0.0) { all_zero_slice = true; zero_bond = k; }
            std::vector<Index> m1{bj1};
            m1.insert(m1.end(), ta.begin(), ta.end());
            std::vector<Index> m2{bj2};
            m2.insert(m2.end(), tb.begin(), tb.end());
            right[static_cast<std::size_t>(k - 1)] = {m1, m2};
            conds[static_cast<std::size_t>(k - 1)] = best_cond;
        }
        candidates.push_back(
            {std::vector(left.begin() + 1, left.begin() + n_dims),
             std::vector(right.begin() + 1, right.begin() + n_dims),
             *std::max_element(conds.begin() + 1, conds.end())});
    }

    if (all_zero_slice)
        throw std::runtime_error("init_index_sets: all candidate cross matrices vanish at bond " +
                                 std::to_string(zero_bond));

    const auto best = std::min_element(candidates.begin(), candidates.end(),
                                       [](const InitFamily& a, const InitFamily& b) {
                                           return a.max_cond < b.max_cond;
                                       });
    NestedIndexSets out;
    out.left = best->left;
    out.right = best->right;
    return out;
}

// ---------------------------------------------------------------------------
// TT greedy-cross

namespace {

// Mutable sweep state: nested sets with parent/child links and the cached
// cross slices X(I^{<=k-1}, :, I^{>k}) for each bond.
struct GreedyState {
    const EntryOracle* oracle = nullptr;
    Index n_dims = 0;
    std::vector<Index> shape;

    // left[k] = I^{<=k} (left[0] is the empty sentinel tuple), right[k] = I^{>k}
    // (right[n_dims] is the sentinel). Links give the nested decomposition:
    // left member = left[k-1][parent] + (coord); right member = (coord) + right[k+1][child].
    std::vector<std::vector<std::vector<Index>>> left, right;
    std::vector<std::vector<std::pair<Index, Index>>> left_link, right_link;
    std::vector<DenseTensor> slice; // slice[k], k = 1..n_dims

    Index rank(Index k) const {
        if (k == 0 || k == n_dims) return 1;
        return static_cast<Index>(left[static_cast<std::size_t>(k)].size());
    }

    double entry(std::vector<Index>& scratch, std::span<const Index> prefix, Index a, Index b,
                 std::span<const Index> suffix) const {
        scratch.clear();
        scratch.insert(scratch.end(), prefix.begin(), prefix.end());
        scratch.push_back(a);
        scratch.push_back(b);
        scratch.insert(scratch.end(), suffix.begin(), suffix.end());
        return (*oracle)(scratch);
    }

    void rebuild_slice(Index k) {
        const Index r0 = rank(k - 1), nk = shape[static_cast<std::size_t>(k - 1)], r1 = rank(k);
        DenseTensor t({r0, nk, r1});
        std::vector<Index> scratch;
        for (Index tcol = 0; tcol < r1; ++tcol)
            for (Index l = 0; l < nk; ++l)
                for (Index s = 0; s < r0; ++s) {
                    scratch.clear();
                    const auto& pre = left[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(s)];
                    const auto& suf = right[static_cast<std::size_t>(k)][static_cast<std::size_t>(tcol)];
                    scratch.insert(scratch.end(), pre.begin(), pre.end());
                    scratch.push_back(l);
                    scratch.insert(scratch.end(), suf.begin(), suf.end());
                    t({s, l, tcol}) = (*oracle)(scratch);
                }
        slice[static_cast<std::size_t>(k)] = std::move(t);
    }

    Matrix gather_cross(Index k) const {
        const Index r = rank(k);
        Matrix c(r, r);
        const auto& links = left_link[static_cast<std::size_t>(k)];
        const auto& sl = slice[static_cast<std::size_t>(k)];
        for (Index s = 0; s < r; ++s) {
            const auto [p, a] = links[static_cast<std::size_t>(s)];
            for (Index t = 0; t < r; ++t) c(s, t) = sl({p, a, t});
        }
        return c;
    }
};

GreedyState build_state(const EntryOracle& oracle, const NestedIndexSets& init) {
    GreedyState st;
    st.oracle = &oracle;
    st.shape = oracle.shape();
    st.n_dims = oracle.order();
    const Index n = st.n_dims;

    st.left.assign(static_cast<std::size_t>(n + 1), {});
    st.right.assign(static_cast<std::size_t>(n + 1), {});
    st.left_link.assign(static_cast<std::size_t>(n + 1), {});
    st.right_link.assign(static_cast<std::size_t>(n + 1), {});
    st.slice.resize(static_cast<std::size_t>(n + 1));

    st.left[0] = {{}};
    st.right[static_cast<std::size_t>(n)] = {{}};
    for (Index k = 1; k <= n - 1; ++k) {
        st.left[static_cast<std::size_t>(k)] = init.left[static_cast<std::size_t>(k - 1)];
        st.right[static_cast<std::size_t>(k)] = init.right[static_cast<std::size_t>(k - 1)];
    }

    // Recover the nested decomposition links.
    for (Index k = 1; k <= n - 1; ++k) {
        for (const auto& tup : st.left[static_cast<std::size_t>(k)]) {
            std::vector<Index> prefix(tup.begin(), tup.end() - 1);
            const auto& prev = st.left[static_cast<std::size_t>(k - 1)];
            const auto it = std::find(prev.begin(), prev.end(), prefix);
            st.left_link[static_cast<std::size_t>(k)].emplace_back(
                static_cast<Index>(it - prev.begin()), tup.back());
        }
        for (const auto& tup : st.right[static_cast<std::size_t>(k)]) {
            std::vector<Index> suffix(tup.begin() + 1, tup.end());
            const auto& next = st.right[static_cast<std::size_t>(k + 1)];
            const auto it = std::find(next.begin(), next.end(), suffix);
            st.right_link[static_cast<std::size_t>(k)].emplace_back(
                tup.front(), static_cast<Index>(it - next.begin()));
        }
    }

    for (Index k = 1; k <= n; ++k) st.rebuild_slice(k);
    return st;
}

// Per-bond factorizations of the cross matrices for entry evaluation and
// core assembly.
std::vector<BondSolver> factor_bonds(const GreedyState& st) {
    std::vector<BondSolver> solvers(static_cast<std::size_t>(st.n_dims));
    for (Index k = 1; k <= st.n_dims - 1; ++k)
        solvers[static_cast<std::size_t>(k)].factor(st.gather_cross(k));
    return solvers;
}

Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> slice_mid(const DenseTensor& t, Index mid) {
    const Index r0 = t.dim(0), n = t.dim(1), r1 = t.dim(2);
    return {t.data() + mid * r0, r0, r1, Eigen::OuterStride<>(r0 * n)};
}

struct ChainWorkspace {
    RowVector a, b;
    void reserve(Index max_rank) {
        if (a.size() < max_rank) {
            a.resize(max_rank);
            b.resize(max_rank);
        }
    }
};

double chain_entry(const GreedyState& st, const std::vector<BondSolver>& solvers,
                   std::span<const Index> idx, ChainWorkspace& ws) {
    Index r = st.slice[1].dim(2);
    ws.a.head(r) = slice_mid(st.slice[1], idx[0]).row(0);
    for (Index k = 1; k <= st.n_dims - 1; ++k) {
        const auto& solver = solvers[static_cast<std::size_t>(k)];
        if (solver.use_lu)
            ws.b.head(r).transpose() = solver.lu_t.solve(ws.a.head(r).transpose());
        else
            ws.b.head(r) = solver.solve_left(ws.a.head(r));
        const auto& next = st.slice[static_cast<std::size_t>(k + 1)];
        const Index r_next = next.dim(2);
        ws.a.head(r_next).noalias() =
            ws.b.head(r) * slice_mid(next, idx[static_cast<std::size_t>(k)]);
        r = r_next;
    }
    return ws.a(0);
}

TtTensor assemble(const GreedyState& st, const std::vector<BondSolver>& solvers) {
    std::vector<DenseTensor> cores;
    cores.reserve(static_cast<std::size_t>(st.n_dims));
    for (Index k = 1; k <= st.n_dims - 1; ++k) {
        const auto& sl = st.slice[static_cast<std::size_t>(k)];
        Matrix g = solvers[static_cast<std::size_t>(k)].solve_right_of(unfold_view(sl, 2));
        cores.push_back(fold(g, {sl.dim(0), sl.dim(1), sl.dim(2)}));
    }
    cores.push_back(st.slice[static_cast<std::size_t>(st.n_dims)]);
    return TtTensor(std::move(cores));
}

} // namespace

CrossResult greedy_cross(const EntryOracle& oracle, const CrossOptions& opts,
                         const NestedIndexSets& init) {
    Rng rng(opts.seed);
    return greedy_cross(oracle, opts, init, rng);
}

CrossResult greedy_cross(const EntryOracle& oracle, const CrossOptions& opts,
                         const NestedIndexSets& init, Rng& rng) {
    const auto& shape = oracle.shape();
    const Index n_dims = oracle.order();
    if (n_dims < 2) {
        // Degenerate order-1 tensor: the exact "train" is the vector itself.
        DenseTensor core({1, shape[0], 1});
        std::vector<Index> idx(1);
        for (Index i = 0; i < shape[0]; ++i) {
            idx[0] = i;
            core({0, i, 0}) = oracle(idx);
        }
        return {TtTensor({core}), true, 0.0, 0, {}};
    }

    init.validate(shape);
    GreedyState st = build_state(oracle, init);

    // Fixed sample pool for the stopping rule; error is re-measured on the
    // same pool every sweep so the criterion is monotone-comparable.
    const Index n_max = *std::max_element(shape.begin(), shape.end());
    const Index pool_size = std::max<Index>(opts.pool_min, 10 * n_dims * n_max);
    std::vector<std::vector<Index>> pool(static_cast<std::size_t>(pool_size));
    for (auto& tup : pool) {
        tup.resize(static_cast<std::size_t>(n_dims));
        for (Index j = 0; j < n_dims; ++j)
            tup[static_cast<std::size_t>(j)] = rng.uniform_int(shape[static_cast<std::size_t>(j)]);
    }
    Vector pool_vals(pool_size);
    for (Index s = 0; s < pool_size; ++s) pool_vals[s] = oracle(pool[static_cast<std::size_t>(s)]);
    const double pool_scale = pool_vals.cwiseAbs().maxCoeff();

    CrossResult result;
    double best_err = std::numeric_limits<double>::infinity();
    NestedIndexSets best_sets;

    auto snapshot_sets = [&]() {
        NestedIndexSets s;
        s.left.assign(st.left.begin() + 1, st.left.begin() + n_dims);
        s.right.assign(st.right.begin() + 1, st.right.begin() + n_dims);
        return s;
    };

    auto measure = [&](const std::vector<BondSolver>& solvers) {
        if (pool_scale == 0.0) return 0.0; // sampled-zero tensor
        Index max_rank = 1;
        for (Index k = 0; k <= n_dims; ++k) max_rank = std::max(max_rank, st.rank(k));
        Vector errs(pool_size);
#pragma omp parallel
        {
            ChainWorkspace ws;
            ws.reserve(max_rank);
#pragma omp for schedule(static)
            for (Index s = 0; s < pool_size; ++s)
                errs[s] = std::abs(chain_entry(st, solvers, pool[static_cast<std::size_t>(s)], ws) -
                                   pool_vals[s]);
        }
        return errs.maxCoeff() / pool_scale;
    };

    bool converged = false;
    Index sweeps_done = 0;
    const bool trace = std::getenv("PTTK_TRACE") != nullptr;

    for (Index sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        Index updates = 0, singular_skips = 0;

        for (Index k = 1; k <= n_dims - 1; ++k) {
            const Index r_prev = st.rank(k - 1);
            const Index nk = shape[static_cast<std::size_t>(k - 1)];
            const Index nk1 = shape[static_cast<std::size_t>(k)];
            const Index r_next = st.rank(k + 1);
            const Index rows = r_prev * nk, cols = nk1 * r_next;
            if (st.rank(k) >= std::min(rows, cols)) continue; // bond saturated

            // Current set positions inside the supercore matrix.
            std::vector<Index> rows_used, cols_used;
            for (const auto& [p, a] : st.left_link[static_cast<std::size_t>(k)])
                rows_used.push_back(p + a * r_prev);
            for (const auto& [b, c] : st.right_link[static_cast<std::size_t>(k)])
                cols_used.push_back(b + c * nk1);

            std::vector<Index> scratch;
            auto fresh = [&](Index i, Index j) {
                thread_local std::vector<Index> tl_scratch;
                const Index p = i % r_prev, a = i / r_prev;
                const Index b = j % nk1, c = j / nk1;
                return st.entry(tl_scratch, st.left[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(p)],
                                a, b,
                                st.right[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(c)]);
            };

            // A bond whose sampled residual is already well inside the target
            // tolerance is resolved; letting it grow further only adds
            // noise-level pivots that degrade the cross conditioning and
            // constrain the nested sets of the inner bonds.
            const double residual_floor = 0.25 * opts.eps * pool_scale;
            auto res = cross_update_step(rows, cols, unfold_view(st.slice[static_cast<std::size_t>(k)], 2),
                                         unfold_view(st.slice[static_cast<std::size_t>(k + 1)], 1),
                                         st.gather_cross(k), fresh, rows_used, cols_used, rng,
                                         residual_floor);

            if (trace && res.status != CrossUpdateStatus::updated)
                std::fprintf(stderr, "  sweep %lld bond %lld: %s (max residual %.2e)\n",
                             static_cast<long long>(sweep), static_cast<long long>(k),
                             res.status == CrossUpdateStatus::ill_conditioned ? "ill-conditioned"
                                                                              : "converged-here",
                             res.max_residual);
            if (res.status == CrossUpdateStatus::ill_conditioned) {
                ++singular_skips;
                continue;
            }
            if (res.status == CrossUpdateStatus::converged_here) continue;

            // Decode the supercore pivot back into nested tuples and grow.
            const Index p = res.row % r_prev, a = res.row / r_prev;
            const Index b = res.col % nk1, c = res.col / nk1;

            std::vector<Index> new_left = st.left[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(p)];
            new_left.push_back(a);
            std::vector<Index> new_right{b};
            const auto& tail = st.right[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(c)];
            new_right.insert(new_right.end(), tail.begin(), tail.end());

            st.left[static_cast<std::size_t>(k)].push_back(std::move(new_left));
            st.left_link[static_cast<std::size_t>(k)].emplace_back(p, a);
            st.right[static_cast<std::size_t>(k)].push_back(std::move(new_right));
            st.right_link[static_cast<std::size_t>(k)].emplace_back(b, c);

            // Grow slice[k] by one third-dimension slab (the new right member)
            // and slice[k+1] by one first-dimension slab (the new left member).
            {
                auto& sl = st.slice[static_cast<std::size_t>(k)];
                const Index r0 = sl.dim(0), n_mid = sl.dim(1), r1 = sl.dim(2);
                std::vector<double> data = std::move(sl.storage());
                data.resize(static_cast<std::size_t>(r0 * n_mid * (r1 + 1)));
                std::vector<Index> scratch2;
                const auto& new_r = st.right[static_cast<std::size_t>(k)].back();
                for (Index l = 0; l < n_mid; ++l)
                    for (Index s = 0; s < r0; ++s) {
                        scratch2.clear();
                        const auto& pre = st.left[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(s)];
                        scratch2.insert(scratch2.end(), pre.begin(), pre.end());
                        scratch2.push_back(l);
                        scratch2.insert(scratch2.end(), new_r.begin(), new_r.end());
                        data[static_cast<std::size_t>(s + l * r0 + r1 * r0 * n_mid)] = oracle(scratch2);
                    }
                sl = DenseTensor({r0, n_mid, r1 + 1}, std::move(data));
            }
            {
                auto& sl = st.slice[static_cast<std::size_t>(k + 1)];
                const Index r0 = sl.dim(0), n_mid = sl.dim(1), r1 = sl.dim(2);
                DenseTensor grown({r0 + 1, n_mid, r1});
                for (Index t = 0; t < r1; ++t)
                    for (Index l = 0; l < n_mid; ++l)
                        for (Index s = 0; s < r0; ++s) grown({s, l, t}) = sl({s, l, t});
                std::vector<Index> scratch2;
                const auto& new_l = st.left[static_cast<std::size_t>(k)].back();
                for (Index t = 0; t < r1; ++t)
                    for (Index l = 0; l < n_mid; ++l) {
                        scratch2.clear();
                        scratch2.insert(scratch2.end(), new_l.begin(), new_l.end());
                        scratch2.push_back(l);
                        const auto& suf = st.right[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(t)];
                        scratch2.insert(scratch2.end(), suf.begin(), suf.end());
                        grown({r0, l, t}) = oracle(scratch2);
                    }
                sl = std::move(grown);
            }
            ++updates;
        }

        sweeps_done = sweep;
        auto solvers = factor_bonds(st);
        const double err = measure(solvers);
        if (trace) {
            std::fprintf(stderr, "sweep %lld: err %.3e, updates %lld, ranks",
                         static_cast<long long>(sweep), err, static_cast<long long>(updates));
            for (Index k = 1; k <= n_dims - 1; ++k)
                std::fprintf(stderr, " %lld(c%.0e)", static_cast<long long>(st.rank(k)),
                             solvers[static_cast<std::size_t>(k)].cond);
            std::fprintf(stderr, "\n");
        }
        if (err < best_err) {
            best_err = err;
            best_sets = snapshot_sets();
        }
        if (err <= opts.eps) {
            converged = true;
            break;
        }
        if (updates == 0) {
            if (sweep == 1 && singular_skips == n_dims - 1)
                throw CrossInitError(
                    "greedy_cross: every initialization cross matrix is singular; "
                    "re-run index initialization");
            break; // no bond can improve further
        }
    }

    // Return the best family seen (normally the final one).
    if (best_err < std::numeric_limits<double>::infinity()) {
        NestedIndexSets current = snapshot_sets();
        bool same = current.left == best_sets.left && current.right == best_sets.right;
        if (!same) st = build_state(oracle, best_sets);
    }

    auto solvers = factor_bonds(st);
    result.tt = assemble(st, solvers);
    result.converged = converged;
    result.sampled_error = best_err == std::numeric_limits<double>::infinity() ? 0.0 : best_err;
    result.sweeps = sweeps_done;
    auto ranks = result.tt.ranks();
    result.ranks.assign(ranks.begin() + 1, ranks.end() - 1);
    result.sets = snapshot_sets();
    return result;
}

double sample_error(const EntryOracle& oracle, const TtTensor& t,
                    std::span<const std::vector<Index>> samples) {
    if (samples.empty()) throw std::domain_error("sample_error: empty sample set");
    double num = 0.0, den = 0.0;
    for (const auto& tup : samples) {
        const double x = oracle(tup);
        const double xhat = tt_entry(t, tup);
        num = std::max(num, std::abs(x - xhat));
        den = std::max(den, std::abs(x));
    }
    if (den == 0.0) throw std::domain_error("sample_error: all sampled reference values are zero");
    return num / den;
}

} // namespace pttk
