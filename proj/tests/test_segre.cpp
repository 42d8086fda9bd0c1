#include <random>

#include "bisyz/parse.hpp"
#include "bisyz/segre.hpp"
#include "doctest.h"

using namespace bisyz;

namespace {

Field<Rational> Q;
Poly<Rational> X(std::string_view s) { return parse_polynomial(s, Ring::Segre); }
Poly<Rational> P(std::string_view s) { return parse_polynomial(s, Ring::Param); }

}  // namespace

TEST_CASE("normal form") {
    SegreElem<Rational> q(X("X1*X4 - X2*X3"), 2);
    CHECK(q.is_zero());
    SegreElem<Rational> a(X("X1^3*X4^2"), 5);
    CHECK(a.poly() == X("X1*X2^2*X3^2"));
    auto x1 = SegreElem<Rational>(X("X1"), 1), x4 = SegreElem<Rational>(X("X4"), 1);
    CHECK(nf_mul(x1, x4).poly() == X("X2*X3"));
    CHECK(nf_mul(x1, x4).degree() == 2);
    CHECK_THROWS(SegreElem<Rational>(X("X1 + X2^2"), 1));
    CHECK_THROWS(x1 + SegreElem<Rational>(X("X2^2"), 2));
}

TEST_CASE("basis sizes and order") {
    for (int n = 0; n <= 12; ++n) CHECK(basis(n).size() == static_cast<std::size_t>((n + 1) * (n + 1)));
    const auto& b1 = basis(1);
    CHECK(b1.monomials == std::vector<std::uint64_t>{mono::make({1, 0, 0, 0}), mono::make({0, 1, 0, 0}),
                                                      mono::make({0, 0, 1, 0}), mono::make({0, 0, 0, 1})});
    const auto& b2 = basis(2);
    CHECK(b2.monomials.front() == mono::make({2, 0, 0, 0}));
    CHECK(b2.monomials.back() == mono::make({0, 0, 0, 2}));
    CHECK(b2.position(mono::make({0, 1, 1, 0})) == 4);
    CHECK_THROWS(b2.position(mono::make({1, 0, 0, 1})));
}

TEST_CASE("omega and theta on examples") {
    auto w = [](std::string_view f) { return omega(BiHomPoly<Rational>(P(f), 2, 2)).poly(); };
    CHECK(w("s^2*t*v") == X("X1*X2"));
    CHECK(w("u^2*t*v") == X("X3*X4"));
    CHECK(w("s^2*t^2") == X("X1^2"));
    CHECK(w("u^2*v^2") == X("X4^2"));
    CHECK(w("s*u*t*v") == X("X2*X3"));
    CHECK(w("u^2*t^2 + s*u*v^2") == X("X3^2 + X2*X4"));

    auto th = theta(SegreElem<Rational>(X("X1*X4"), 2));
    CHECK(th.poly() == P("s*u*t*v"));
    CHECK(theta(SegreElem<Rational>(X("X2*X3"), 2)) == th);
    CHECK_THROWS(omega(BiHomPoly<Rational>(P("s*t^2"), 1, 2)));
}

TEST_CASE("theta and omega are inverse isomorphisms") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = static_cast<int>(rng() % 5);
        std::vector<Poly<Rational>::Term> terms;
        const int count = 1 + static_cast<int>(rng() % 6);
        for (int c = 0; c < count; ++c) {
            int i = static_cast<int>(rng() % (n + 1)), j = static_cast<int>(rng() % (n + 1));
            terms.emplace_back(mono::make({i, n - i, j, n - j}), Q.random(rng, 50));
        }
        BiHomPoly<Rational> f(Poly<Rational>::from_terms(Ring::Param, std::move(terms)), n, n);
        CHECK(theta(omega(f)) == f);

        const auto& b = basis(n);
        std::vector<Poly<Rational>::Term> xs;
        for (int c = 0; c < count; ++c) xs.emplace_back(b.monomials[rng() % b.size()], Q.random(rng, 50));
        SegreElem<Rational> x(Poly<Rational>::from_terms(Ring::Segre, std::move(xs)), n);
        CHECK(omega(theta(x)) == x);
    }
}

TEST_CASE("theta is a ring map") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        auto random_elem = [&](int n) {
            const auto& b = basis(n);
            std::vector<Poly<Rational>::Term> xs;
            for (int c = 0; c < 4; ++c) xs.emplace_back(b.monomials[rng() % b.size()], Q.random(rng, 9));
            return SegreElem<Rational>(Poly<Rational>::from_terms(Ring::Segre, std::move(xs)), n);
        };
        auto x = random_elem(2), y = random_elem(3);
        CHECK(theta(nf_mul(x, y)) == theta(x) * theta(y));
    }
}
