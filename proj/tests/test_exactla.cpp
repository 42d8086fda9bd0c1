#include <random>

#include "bisyz/exactla.hpp"
#include "doctest.h"

using namespace bisyz;

namespace {

Field<Rational> Q;

Matrix<Rational> mat(std::initializer_list<std::initializer_list<long>> rows) {
    Matrix<Rational> m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (auto r : rows) {
        Eigen::Index j = 0;
        for (long v : r) m(i, j++) = Rational(v);
        ++i;
    }
    return m;
}

template <class S>
Matrix<S> random_matrix(std::mt19937_64& rng, int rows, int cols, const Field<S>& f, long bound = 5) {
    Matrix<S> m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = f.random(rng, bound);
    return m;
}

// Independent oracle: Laplace expansion along the first row.
Rational cofactor_det(const Matrix<Rational>& m) {
    const auto n = m.rows();
    if (n == 0) return 1;
    if (n == 1) return m(0, 0);
    Rational acc = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        Matrix<Rational> minor(n - 1, n - 1);
        for (Eigen::Index r = 1; r < n; ++r)
            for (Eigen::Index c = 0, cc = 0; c < n; ++c)
                if (c != j) minor(r - 1, cc++) = m(r, c);
        Rational term = m(0, j) * cofactor_det(minor);
        acc += j % 2 ? Rational(-term) : term;
    }
    return acc;
}

}  // namespace

TEST_CASE("rref and rank") {
    CHECK(rank(mat({{1, 2}, {2, 4}})) == 1);
    auto id = mat({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    auto e = rref(id);
    CHECK(e.rank == 3);
    CHECK(e.reduced == id);
    CHECK(e.pivots == std::vector<int>{0, 1, 2});
    CHECK(rank(zeros(2, 5, Q)) == 0);
    auto r = rref(mat({{0, 2, 4}, {1, 1, 1}}));
    CHECK(r.reduced == mat({{1, 0, -1}, {0, 1, 2}}));
}

TEST_CASE("nullspace") {
    auto n = nullspace(mat({{1, 1}}), Q);
    CHECK(n.cols() == 1);
    CHECK(n(0, 0) == -1);
    CHECK(n(1, 0) == 1);
    CHECK(nullspace(mat({{1, 0}, {0, 1}}), Q).cols() == 0);
    CHECK(nullspace(mat({{1, 2, 3}, {2, 4, 6}}), Q).cols() == 2);
}

TEST_CASE("nullspace properties on random matrices") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        int rows = 1 + static_cast<int>(rng() % 6), cols = 1 + static_cast<int>(rng() % 7);
        auto m = random_matrix(rng, rows, cols, Q, 3);
        if (trial % 3 == 0 && rows > 1) m.row(rows - 1) = m.row(0) * Rational(2, 3);
        auto n = nullspace(m, Q);
        Matrix<Rational> prod = m * n;
        CHECK(prod.isZero(0));
        CHECK(rank(m) + n.cols() == cols);
        CHECK(rank(n) == n.cols());
    }
}

TEST_CASE("Bareiss determinant") {
    CHECK(det_bareiss(mat({{1, 2}, {3, 4}}), Q) == -2);
    CHECK(det_bareiss(mat({{1, 2}, {2, 4}}), Q) == 0);
    CHECK(det_bareiss(mat({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), Q) == 1);
    CHECK(det_bareiss(mat({{0, 1}, {1, 0}}), Q) == -1);
    CHECK_THROWS_AS(det_bareiss(mat({{1, 2, 3}}), Q), std::invalid_argument);

    std::mt19937_64 rng(7);
    for (int n = 1; n <= 5; ++n)
        for (int trial = 0; trial < 10; ++trial) {
            auto m = random_matrix(rng, n, n, Q, 4);
            if (trial == 0) m(0, 0) = 0;
            CHECK(det_bareiss(m, Q) == cofactor_det(m));
            Matrix<Rational> scaled = m;
            scaled.row(0) *= Rational(1, 3);
            CHECK(det_bareiss(scaled, Q) == cofactor_det(m) / 3);
        }
}

TEST_CASE("modular rank never exceeds rational rank and agrees for random primes") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        int rows = 2 + static_cast<int>(rng() % 6), cols = 2 + static_cast<int>(rng() % 6);
        auto m = random_matrix(rng, rows, cols, Q, 20);
        if (trial % 2) m.col(0) = m.col(1) * Rational(3) - m.col(cols - 1);
        int rq = rank(m);
        for (int k = 0; k < 3; ++k) {
            Field<Zp> F(random_prime(rng));
            Matrix<Zp> mp(rows, cols);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j) mp(i, j) = F.from_rational(m(i, j));
            CHECK(rank(mp) == rq);
        }
    }
    // a prime dividing a minor can only lower the rank
    Field<Zp> F5(5);
    Matrix<Zp> m5(2, 2);
    m5 << F5.from_int(1), F5.from_int(2), F5.from_int(3), F5.from_int(11);
    CHECK(rank(m5) == 1);
    CHECK(rank(mat({{1, 2}, {3, 11}})) == 2);
}

TEST_CASE("characteristic polynomial and pencil determinant") {
    std::mt19937_64 rng(17);
    for (int n = 1; n <= 6; ++n) {
        auto a = random_matrix(rng, n, n, Q, 3);
        auto cp = charpoly(a, Q);
        REQUIRE(cp.size() == static_cast<std::size_t>(n + 1));
        CHECK(cp.back() == 1);
        CHECK(cp[0] == (n % 2 ? Rational(-det_bareiss(a, Q)) : det_bareiss(a, Q)));
        for (long x : {-2L, 3L}) {
            Matrix<Rational> xm = -a;
            for (int i = 0; i < n; ++i) xm(i, i) += x;
            CHECK(upoly::eval(cp, Rational(x), Q.zero()) == det_bareiss(xm, Q));
        }
        auto b = random_matrix(rng, n, n, Q, 3);
        auto pd = pencil_det(a, b, Q);
        for (long lam : {-3L, 5L, 11L}) {
            Matrix<Rational> m = a + b * Rational(lam);
            CHECK(upoly::eval(pd, Rational(lam), Q.zero()) == det_bareiss(m, Q));
        }
    }
    Field<Zp> F(1000003);
    auto a = random_matrix(rng, 5, 5, F);
    auto cp = charpoly(a, F);
    Matrix<Zp> xm = -a;
    for (int i = 0; i < 5; ++i) xm(i, i) += F.from_int(9);
    CHECK(upoly::eval(cp, F.from_int(9), F.zero()) == det_bareiss(xm, F));
}

TEST_CASE("univariate gcd") {
    using upoly::UPoly;
    // (x-1)(x+2) and (x-1)(x-3)
    UPoly<Rational> a{-2, 1, 1}, b{3, -4, 1};
    CHECK(upoly::gcd(a, b) == UPoly<Rational>{-1, 1});
    CHECK(upoly::gcd(a, UPoly<Rational>{}) == a);
}
