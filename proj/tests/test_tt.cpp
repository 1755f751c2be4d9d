#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pttk/tt.hpp"

#include <cmath>

#include "pttk/rng.hpp"
#include "support.hpp"

using namespace pttk;

TEST_CASE("tt_entry on a rank-1 train is a product of core slices") {
    Rng rng(31);
    TtTensor t = test::random_tt({3, 4, 5}, {1, 1}, rng);
    std::vector<Index> idx{2, 1, 4};
    const double expect = t.core(0)({0, 2, 0}) * t.core(1)({0, 1, 0}) * t.core(2)({0, 4, 0});
    CHECK(tt_entry(t, idx) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("two-core train is a matrix factorization") {
    Rng rng(32);
    TtTensor t = test::random_tt({4, 6}, {3}, rng);
    Matrix g1 = unfold(t.core(0), 2);          // 4 x 3
    Matrix g2 = unfold(t.core(1), 1);          // 3 x 6
    Matrix product = g1 * g2;
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 6; ++j) {
            std::vector<Index> idx{i, j};
            CHECK(tt_entry(t, idx) == doctest::Approx(product(i, j)).epsilon(1e-13));
        }
}

TEST_CASE("tt_entry agrees with tt_full") {
    Rng rng(33);
    TtTensor t = test::random_tt({3, 4, 5}, {2, 3}, rng);
    DenseTensor full = tt_full(t);
    test::for_each_index(t.shape(), [&](const std::vector<Index>& idx) {
        CHECK(tt_entry(t, idx) == doctest::Approx(full(idx)).epsilon(1e-13));
    });
}

TEST_CASE("tt_entry vs tt_full exhaustively at shape (4,4,4,4)") {
    Rng rng(34);
    TtTensor t = test::random_tt({4, 4, 4, 4}, {3, 4, 2}, rng);
    DenseTensor full = tt_full(t);
    test::for_each_index(t.shape(), [&](const std::vector<Index>& idx) {
        REQUIRE(tt_entry(t, idx) == doctest::Approx(full(idx)).epsilon(1e-12));
    });
}

TEST_CASE("tt_full of a rank-1 train is the outer product") {
    Rng rng(35);
    TtTensor t = test::random_tt({3, 2}, {1}, rng);
    DenseTensor full = tt_full(t);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 2; ++j)
            CHECK(full({i, j}) ==
                  doctest::Approx(t.core(0)({0, i, 0}) * t.core(1)({0, j, 0})).epsilon(1e-15));
}

TEST_CASE("tt_full respects the size cap") {
    Rng rng(36);
    TtTensor t = test::random_tt({10, 10, 10}, {2, 2}, rng);
    CHECK_THROWS_AS(tt_full(t, 999), std::length_error);
}

TEST_CASE("tt_round keeps an already rank-1 train") {
    Rng rng(37);
    TtTensor t = test::random_tt({3, 4, 2}, {1, 1}, rng);
    TtTensor rounded = tt_round(t, 1e-8);
    CHECK(rounded.ranks() == std::vector<Index>{1, 1, 1, 1});
    DenseTensor a = tt_full(t), b = tt_full(rounded);
    for (Index i = 0; i < a.size(); ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
}

TEST_CASE("tt_round recovers the original ranks of a zero-padded train") {
    Rng rng(38);
    TtTensor t = test::random_tt({4, 5, 3}, {2, 3}, rng);

    // Pad every bond with zero blocks, doubling the ranks without changing
    // the represented tensor.
    std::vector<DenseTensor> padded;
    const auto ranks = t.ranks();
    for (Index k = 0; k < t.order(); ++k) {
        const Index r0 = ranks[static_cast<std::size_t>(k)];
        const Index r1 = ranks[static_cast<std::size_t>(k + 1)];
        const Index p0 = k == 0 ? 1 : 2 * r0;
        const Index p1 = k == t.order() - 1 ? 1 : 2 * r1;
        DenseTensor core({p0, t.core(k).dim(1), p1});
        for (Index b = 0; b < r1; ++b)
            for (Index l = 0; l < t.core(k).dim(1); ++l)
                for (Index a = 0; a < r0; ++a) core({a, l, b}) = t.core(k)({a, l, b});
        padded.push_back(std::move(core));
    }
    TtTensor fat(std::move(padded));
    REQUIRE(fat.ranks() == std::vector<Index>{1, 4, 6, 1});

    TtTensor rounded = tt_round(fat, 1e-12);
    CHECK(rounded.ranks() == t.ranks());
    DenseTensor a = tt_full(t), b = tt_full(rounded);
    CHECK((Eigen::Map<const Vector>(a.data(), a.size()) -
           Eigen::Map<const Vector>(b.data(), b.size()))
              .norm() <= 1e-12 * frobenius_norm(t.core(0)) * 100);
}

TEST_CASE("tt_round meets the requested relative error") {
    Rng rng(39);
    TtTensor t = test::random_tt({5, 4, 6, 3}, {4, 8, 3}, rng);
    const double eps = 1e-6;
    TtTensor rounded = tt_round(t, eps);
    DenseTensor a = tt_full(t), b = tt_full(rounded);
    double diff2 = 0.0, ref2 = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        diff2 += (a[i] - b[i]) * (a[i] - b[i]);
        ref2 += a[i] * a[i];
    }
    CHECK(std::sqrt(diff2) <= eps * std::sqrt(ref2));
}

TEST_CASE("tt_round never increases ranks and preserves the norm") {
    Rng rng(40);
    for (int trial = 0; trial < 4; ++trial) {
        TtTensor t = test::random_tt({6, 6, 6, 6}, {5, 7, 4}, rng);
        const double eps = trial % 2 ? 1e-10 : 1e-3;
        TtTensor rounded = tt_round(t, eps);
        const auto r0 = t.ranks(), r1 = rounded.ranks();
        for (std::size_t k = 0; k < r0.size(); ++k) CHECK(r1[k] <= r0[k]);
        const double n0 = frobenius_norm(tt_full(t));
        const double n1 = frobenius_norm(tt_full(rounded));
        CHECK(std::abs(n0 - n1) <= eps * n0 * (1.0 + 1e-10));
    }
}

TEST_CASE("tt_round agrees with the dense TT-SVD oracle on ranks") {
    Rng rng(41);
    TtTensor t = test::random_tt({4, 4, 4}, {3, 3}, rng);
    // Inflate then round at a loose tolerance; the dense oracle at the same
    // tolerance gives the reference ranks.
    const double eps = 1e-2;
    TtTensor rounded = tt_round(t, eps);
    TtTensor oracle = test::tt_svd_oracle(tt_full(t), eps);
    CHECK(rounded.ranks() == oracle.ranks());
}

TEST_CASE("unfolding of the reconstruction matches the core-product formula") {
    // X^{j} = prod_{i<j} (I kron G_i^{2}) G_j^{2} G_{j+1}^{1} prod_{i>j+1} (G_i^{1} kron I).
    Rng rng(42);
    std::vector<Index> shape{3, 2, 4, 3};
    TtTensor t = test::random_tt(shape, {2, 3, 2}, rng);
    DenseTensor full = tt_full(t);

    for (Index j = 1; j <= 3; ++j) {
        Matrix left = unfold(t.core(0), 2);
        for (Index i = 1; i < j; ++i) {
            const Index ni = t.core(i).dim(1);
            left = kron(Matrix::Identity(ni, ni), left.eval()) * unfold(t.core(i), 2);
        }
        Matrix right = unfold(t.core(j), 1);
        Index n_acc = t.core(j).dim(1);
        for (Index i = j + 1; i < 4; ++i) {
            right = right * kron(unfold(t.core(i), 1), Matrix::Identity(n_acc, n_acc));
            n_acc *= t.core(i).dim(1);
        }
        Matrix expect = left * right;
        Matrix got = unfold(full, j);
        CHECK((got - expect).norm() <= 1e-12 * (expect.norm() + 1.0));
    }
}

TEST_CASE("left_contraction base case and dense oracle") {
    Rng rng(43);
    const Index n = 3, ns = 5;

    SUBCASE("single factor: S = U G^{2}") {
        TtTensor t = test::random_tt({n}, {}, rng);
        Matrix u = test::random_matrix(ns, n, rng);
        std::vector<Matrix> factors{u};
        Matrix s = left_contraction(t.cores(), factors);
        Matrix expect = u * unfold(t.core(0), 2);
        CHECK((s - expect).norm() <= 1e-13 * expect.norm());
    }

    SUBCASE("two factors equal the materialized face-split product") {
        DenseTensor g1 = test::random_tensor({1, n, 2}, rng);
        DenseTensor g2 = test::random_tensor({2, n, 4}, rng);
        Matrix u1 = test::random_matrix(ns, n, rng);
        Matrix u2 = test::random_matrix(ns, n, rng);
        std::vector<DenseTensor> cores{g1, g2};
        std::vector<Matrix> factors{u1, u2};
        Matrix s = left_contraction(cores, factors);

        // Dense: (U2 fs U1) (I_n kron G1^{2}) G2^{2}
        Matrix fs = face_split(u2, u1);
        Matrix expect = fs * kron(Matrix::Identity(n, n), unfold(g1, 2)) * unfold(g2, 2);
        CHECK((s - expect).norm() <= 1e-12 * expect.norm());
    }

    SUBCASE("three factors follow the expanded recursion") {
        DenseTensor g1 = test::random_tensor({1, n, 2}, rng);
        DenseTensor g2 = test::random_tensor({2, n, 3}, rng);
        DenseTensor g3 = test::random_tensor({3, n, 2}, rng);
        Matrix u1 = test::random_matrix(ns, n, rng);
        Matrix u2 = test::random_matrix(ns, n, rng);
        Matrix u3 = test::random_matrix(ns, n, rng);
        std::vector<DenseTensor> cores{g1, g2, g3};
        std::vector<Matrix> factors{u1, u2, u3};
        Matrix s = left_contraction(cores, factors);

        Matrix fs = face_split(u3, face_split(u2, u1));
        Matrix expect = fs * kron(Matrix::Identity(n * n, n * n), unfold(g1, 2)) *
                        kron(Matrix::Identity(n, n), unfold(g2, 2)) * unfold(g3, 2);
        CHECK((s - expect).norm() <= 1e-12 * expect.norm());
    }
}

TEST_CASE("right_contraction matches the dense oracle") {
    Rng rng(44);
    const Index n = 3, nt = 4;
    DenseTensor g1 = test::random_tensor({2, n, 3}, rng); // G_{D-1}
    DenseTensor g2 = test::random_tensor({3, n, 1}, rng); // G_D
    Matrix v1 = test::random_matrix(nt, n, rng);
    Matrix v2 = test::random_matrix(nt, n, rng);
    std::vector<DenseTensor> cores{g1, g2};
    std::vector<Matrix> factors{v1, v2};
    Matrix t = right_contraction(cores, factors);

    // T^T = G_{D-1}^{1} (G_D^{1} V_2^T kr V_1^T)
    Matrix inner = unfold(g2, 1) * v2.transpose();       // 3 x nt
    Matrix expect_t = unfold(g1, 1) * khatri_rao(inner, v1.transpose());
    CHECK((t - expect_t.transpose()).norm() <= 1e-12 * expect_t.norm());
}

TEST_CASE("delta-row factors select rows of the contracted core product") {
    // Factors that are one-hot rows at node indices make S pick entries of the
    // underlying unfolded core product.
    Rng rng(45);
    const Index n = 3;
    DenseTensor g1 = test::random_tensor({1, n, 2}, rng);
    DenseTensor g2 = test::random_tensor({2, n, 2}, rng);
    Matrix u1 = Matrix::Zero(2, n), u2 = Matrix::Zero(2, n);
    u1(0, 1) = 1.0; // point 0 selects (i_1, i_2) = (1, 2)
    u2(0, 2) = 1.0;
    u1(1, 0) = 1.0; // point 1 selects (0, 1)
    u2(1, 1) = 1.0;
    std::vector<DenseTensor> cores{g1, g2};
    std::vector<Matrix> factors{u1, u2};
    Matrix s = left_contraction(cores, factors);

    for (Index b = 0; b < 2; ++b) {
        double e0 = 0.0, e1 = 0.0;
        for (Index a = 0; a < 2; ++a) {
            e0 += g1({0, 1, a}) * g2({a, 2, b});
            e1 += g1({0, 0, a}) * g2({a, 1, b});
        }
        CHECK(s(0, b) == doctest::Approx(e0).epsilon(1e-14));
        CHECK(s(1, b) == doctest::Approx(e1).epsilon(1e-14));
    }
}

TEST_CASE("TtTensor validates its core chain") {
    Rng rng(46);
    std::vector<DenseTensor> bad{test::random_tensor({1, 3, 2}, rng),
                                 test::random_tensor({3, 3, 1}, rng)};
    CHECK_THROWS_AS(TtTensor(std::move(bad)), std::invalid_argument);
    std::vector<DenseTensor> bad2{test::random_tensor({2, 3, 1}, rng)};
    CHECK_THROWS_AS(TtTensor(std::move(bad2)), std::invalid_argument);
}
