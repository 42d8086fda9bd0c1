#include <random>

#include "bisyz/exactla.hpp"
#include "bisyz/parse.hpp"
#include "bisyz/tpoly.hpp"
#include "doctest.h"

using namespace bisyz;

namespace {

Field<Rational> Q;
Poly<Rational> T(std::string_view s) { return parse_polynomial(s, Ring::T); }

Poly<Rational> random_poly(std::mt19937_64& rng, int terms, int deg, bool homogeneous) {
    std::vector<Poly<Rational>::Term> t;
    for (int i = 0; i < terms; ++i) {
        Exponents e{};
        if (homogeneous) {
            int left = deg;
            for (int v = 0; v < 3; ++v) {
                e[v] = static_cast<int>(rng() % (left + 1));
                left -= e[v];
            }
            e[3] = left;
        } else {
            for (auto& x : e) x = static_cast<int>(rng() % (deg + 1));
        }
        t.emplace_back(mono::make(e), Q.random(rng, 7));
    }
    return Poly<Rational>::from_terms(Ring::T, t);
}

}  // namespace

TEST_CASE("mvgcd basics") {
    CHECK(mvgcd(T("T1^2 - T2^2"), T("T1^2 + 2*T1*T2 + T2^2")) == T("T1 + T2"));
    CHECK(mvgcd(T("-3*T1*T4 + 3*T2*T3"), T("0")) == T("T1*T4 - T2*T3"));
    CHECK(mvgcd(T("T1 + 1"), T("T2 - 1")) == T("1"));
    CHECK(mvgcd(T("T1^3*T4^2"), T("T1*T4^5 + T1^2*T4^4")) == T("T1*T4^2"));
    CHECK(mvgcd(T("2*T1*T3 + 4*T3"), T("T3^2*T1 + 2*T3^2")) == T("T1*T3 + 2*T3"));
    CHECK_THROWS(mvgcd(T("0"), T("0")));
}

TEST_CASE("mvgcd recovers a planted common factor") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 25; ++trial) {
        bool hom = trial % 2 == 0;
        auto f = random_poly(rng, 3, 2, hom);
        auto g1 = random_poly(rng, 3, 2, hom), g2 = random_poly(rng, 3, 2, hom);
        if (f.is_zero() || g1.is_zero() || g2.is_zero() || f.is_constant()) continue;
        auto g = mvgcd(f * g1, f * g2);
        CHECK(g.divisible_by(f));
        CHECK(g.leading_coeff() == 1);
        // the cofactors are generically coprime, so the gcd is exactly f
        if (mvgcd(g1, g2).is_constant()) CHECK(g == f.monic());
    }
}

TEST_CASE("mvgcd(a*c, b*c) is divisible by c") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 25; ++trial) {
        auto a = random_poly(rng, 4, 2, false), b = random_poly(rng, 3, 2, false), c = random_poly(rng, 3, 2, false);
        if (a.is_zero() || b.is_zero() || c.is_zero()) continue;
        CHECK(mvgcd(a * c, b * c).divisible_by(c));
    }
}

TEST_CASE("polydet") {
    PolyGrid<Rational> g{{T("T1"), T("T2")}, {T("T3"), T("T4")}};
    CHECK(polydet(g, Ring::T, Q) == T("T1*T4 - T2*T3"));
    PolyGrid<Rational> diag(4, std::vector<Poly<Rational>>(4, Poly<Rational>(Ring::T)));
    for (int i = 0; i < 4; ++i) diag[i][i] = T("T1");
    CHECK(polydet(diag, Ring::T, Q) == T("T1^4"));
    PolyGrid<Rational> rep{{T("T1"), T("T2 + 1"), T("T3")}, {T("T4"), T("1"), T("T2")}, {T("T1"), T("T2 + 1"), T("T3")}};
    CHECK(polydet(rep, Ring::T, Q).is_zero());
    PolyGrid<Rational> zero_pivot{{T("0"), T("T1")}, {T("T2"), T("T3")}};
    CHECK(polydet(zero_pivot, Ring::T, Q) == T("-T1*T2"));
    CHECK_THROWS(polydet(PolyGrid<Rational>{{T("T1"), T("T2")}}, Ring::T, Q));
}

TEST_CASE("polydet on constants agrees with det_bareiss; evaluation commutes with det") {
    std::mt19937_64 rng(8);
    for (int n = 1; n <= 4; ++n) {
        PolyGrid<Rational> g(n, std::vector<Poly<Rational>>(n, Poly<Rational>(Ring::T)));
        Matrix<Rational> c(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                c(i, j) = Q.random(rng, 6);
                g[i][j] = Poly<Rational>(Ring::T, c(i, j));
            }
        auto d = polydet(g, Ring::T, Q);
        CHECK(d.is_constant());
        CHECK(d.coeff(0, Q.zero()) == det_bareiss(c, Q));

        PolyGrid<Rational> lin(n, std::vector<Poly<Rational>>(n, Poly<Rational>(Ring::T)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                lin[i][j] = to_poly(LinearForm<Rational>{Q.random(rng, 3), Q.random(rng, 3), Q.random(rng, 3), Q.random(rng, 3)});
        auto det = polydet(lin, Ring::T, Q);
        for (int trial = 0; trial < 3; ++trial) {
            std::array<Rational, 4> p{Q.random(rng, 9), Q.random(rng, 9), Q.random(rng, 9), Q.random(rng, 9)};
            Matrix<Rational> at(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) at(i, j) = lin[i][j].eval(p, Q.zero());
            CHECK(det.eval(p, Q.zero()) == det_bareiss(at, Q));
        }
    }
}

TEST_CASE("mvgcd over a prime field") {
    Field<Zp> F(1000003);
    auto conv = [&](std::string_view s) {
        return T(s).map_coeffs([&](const Rational& q) { return F.from_rational(q); });
    };
    auto g = mvgcd(conv("T1^2 - T2^2"), conv("3*T1^2 + 6*T1*T2 + 3*T2^2"));
    CHECK(g == conv("T1 + T2"));
}
