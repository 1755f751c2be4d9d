#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pttk/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "pttk/pttk.hpp"
#include "pttk/rng.hpp"
#include "support.hpp"

using namespace pttk;

namespace {

double cheb_t(Index k, double x) {
    double prev = 1.0, cur = x;
    if (k == 0) return 1.0;
    for (Index i = 1; i < k; ++i) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

} // namespace

TEST_CASE("cheb_nodes at small n") {
    CHECK(cheb_nodes(1) == std::vector<double>{std::cos(std::numbers::pi / 2.0)});
    CHECK(std::abs(cheb_nodes(1)[0]) < 1e-16);

    auto z2 = cheb_nodes(2);
    CHECK(z2[0] == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
    CHECK(z2[1] == doctest::Approx(-std::sqrt(2.0) / 2.0).epsilon(1e-15));

    CHECK_THROWS_AS(cheb_nodes(0), std::invalid_argument);
}

TEST_CASE("cheb_nodes(27) are roots of T_27") {
    for (double z : cheb_nodes(27)) CHECK(std::abs(cheb_t(27, z)) <= 1e-12);
}

TEST_CASE("affine map orientation and inverse") {
    const Interval iv{2.0, 5.0};
    CHECK(affine_to_interval(iv, 1.0) == 2.0);  // +1 -> lo per the formula
    CHECK(affine_to_interval(iv, -1.0) == 5.0); // -1 -> hi

    const Interval sym{-1.0, 1.0};
    CHECK(affine_to_interval(sym, 0.25) == -0.25); // orientation flip

    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        CHECK(affine_from_interval(iv, affine_to_interval(iv, x)) ==
              doctest::Approx(x).epsilon(1e-15));
    }
}

TEST_CASE("basis delta property at the nodes") {
    const Interval iv{-2.0, 7.0};
    for (Index n : {1, 2, 3, 4, 5, 6, 7, 8, 16, 27, 32, 64}) {
        ChebyshevGrid grid(n, {iv});
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) {
                const double v = basis_eval(iv, n, i, grid.node(0, j));
                CHECK(std::abs(v - (i == j ? 1.0 : 0.0)) <= 1e-12);
            }
    }
}

TEST_CASE("n=1 basis is the constant 1") {
    const Interval iv{0.0, 1.0};
    CHECK(basis_eval(iv, 1, 0, 0.3) == 1.0);
    CHECK(basis_eval(iv, 1, 0, 0.9) == 1.0);
}

TEST_CASE("interpolation reproduces x^{n-1}") {
    const Interval iv{-1.5, 2.0};
    const Index n = 9;
    ChebyshevGrid grid(n, {iv});
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const double x = rng.uniform(iv.lo, iv.hi);
        double approx = 0.0;
        for (Index i = 0; i < n; ++i)
            approx += std::pow(grid.node(0, i), n - 1) * basis_eval(iv, n, i, x);
        const double exact = std::pow(x, n - 1);
        CHECK(std::abs(approx - exact) <= 1e-10 * std::max(1.0, std::abs(exact)));
    }
}

TEST_CASE("q_row: node evaluation gives a standard basis row") {
    const Interval iv{0.0, 4.0};
    const Index n = 8;
    ChebyshevGrid grid(n, {iv});
    RowVector q = q_row(iv, n, grid.node(0, 2));
    for (Index i = 0; i < n; ++i) CHECK(std::abs(q[i] - (i == 2 ? 1.0 : 0.0)) <= 1e-12);

    // Cached-table path agrees with the direct loop.
    RowVector qg = grid.q_row(0, 1.234);
    RowVector qd = q_row(iv, n, 1.234);
    for (Index i = 0; i < n; ++i) CHECK(qg[i] == doctest::Approx(qd[i]).epsilon(1e-14));
}

TEST_CASE("q_row entries sum to one") {
    const Interval iv{1.0, 3.0};
    Rng rng(6);
    for (Index n : {2, 5, 16, 27}) {
        for (int trial = 0; trial < 20; ++trial) {
            RowVector q = q_row(iv, n, rng.uniform(iv.lo, iv.hi));
            CHECK(std::abs(q.sum() - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("Lebesgue bound on the basis row 1-norm") {
    const Interval iv{-1.0, 1.0};
    Rng rng(8);
    for (Index n : {4, 8, 16, 27, 32}) {
        const double bound = lebesgue_bound(n) + 1e-9;
        ChebyshevGrid grid(n, {iv});
        double worst = 0.0;
        for (int trial = 0; trial < 10000; ++trial) {
            const double x = rng.uniform(-1.0, 1.0);
            worst = std::max(worst, grid.q_row(0, x).cwiseAbs().sum());
        }
        CHECK(worst <= bound);
    }
}

TEST_CASE("factor matrices") {
    const Index d = 2, d_theta = 1, n = 5;
    std::vector<Interval> ivs{{0.0, 1.0}, {0.0, 2.0}, {0.5, 3.0}, {2.0, 3.0}, {2.0, 4.0}};
    ChebyshevGrid grid(n, ivs);

    SUBCASE("grid nodes give standard basis rows") {
        Matrix src(n, d);
        for (Index i = 0; i < n; ++i) {
            src(i, 0) = grid.node(0, i);
            src(i, 1) = grid.node(1, i);
        }
        Matrix tgt(1, d);
        tgt << 2.5, 3.0;
        auto fm = factor_matrices(grid, d, d_theta, src, tgt);
        REQUIRE(fm.u.size() == 2);
        REQUIRE(fm.v.size() == 2);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                CHECK(std::abs(fm.u[0](i, j) - (i == j ? 1.0 : 0.0)) <= 1e-12);
        CHECK(fm.v[0].rows() == 1); // single target point: one q_row
    }

    SUBCASE("entries match direct basis evaluation") {
        Rng rng(9);
        Matrix src(7, d), tgt(4, d);
        for (Index i = 0; i < 7; ++i) {
            src(i, 0) = rng.uniform(0.0, 1.0);
            src(i, 1) = rng.uniform(0.0, 2.0);
        }
        for (Index i = 0; i < 4; ++i) {
            tgt(i, 0) = rng.uniform(2.0, 3.0);
            tgt(i, 1) = rng.uniform(2.0, 4.0);
        }
        auto fm = factor_matrices(grid, d, d_theta, src, tgt);
        for (Index i = 0; i < 7; ++i)
            for (Index j = 0; j < n; ++j)
                CHECK(fm.u[1](i, j) ==
                      doctest::Approx(basis_eval(ivs[1], n, j, src(i, 1))).epsilon(1e-13));
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < n; ++j)
                CHECK(fm.v[0](i, j) ==
                      doctest::Approx(basis_eval(ivs[3], n, j, tgt(i, 0))).epsilon(1e-13));
    }

    SUBCASE("a point outside its box is rejected with its index") {
        Matrix src(2, d);
        src << 0.5, 1.0, 0.5, 2.5; // second point exceeds [0,2] in coordinate 1
        Matrix tgt(1, d);
        tgt << 2.5, 3.0;
        CHECK_THROWS_WITH_AS(factor_matrices(grid, d, d_theta, src, tgt),
                             doctest::Contains("point 1"), std::invalid_argument);
    }

    SUBCASE("boundary tolerance accepts round-off excursions") {
        Matrix src(1, d);
        src << 1.0 + 1e-13, 2.0;
        Matrix tgt(1, d);
        tgt << 2.5, 3.0;
        CHECK_NOTHROW(factor_matrices(grid, d, d_theta, src, tgt));
    }
}

TEST_CASE("tensor-product interpolation reproduces a low-degree polynomial") {
    // f(x, y) = (2x^2 - y)(y + 1) has degree <= 2 < n in each variable.
    const Index n = 6;
    std::vector<Interval> ivs{{-1.0, 1.0}, {0.0, 2.0}};
    ChebyshevGrid grid(n, ivs);
    auto f = [](double x, double y) { return (2.0 * x * x - y) * (y + 1.0); };

    Rng rng(10);
    for (int trial = 0; trial < 40; ++trial) {
        const double x = rng.uniform(-1.0, 1.0), y = rng.uniform(0.0, 2.0);
        RowVector qx = grid.q_row(0, x), qy = grid.q_row(1, y);
        double approx = 0.0;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
                approx += f(grid.node(0, i), grid.node(1, j)) * qx[i] * qy[j];
        const double exact = f(x, y);
        CHECK(std::abs(approx - exact) <= 1e-9 * std::max(1.0, std::abs(exact)));
    }
}
