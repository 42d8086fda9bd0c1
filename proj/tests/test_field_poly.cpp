#include <random>

#include "bisyz/field.hpp"
#include "bisyz/parse.hpp"
#include "bisyz/poly.hpp"
#include "doctest.h"

using namespace bisyz;

namespace {
Poly<Rational> T(std::string_view s) { return parse_polynomial(s, Ring::T); }
}  // namespace

TEST_CASE("rationals stay reduced with positive denominator") {
    Rational q(6, -4);
    q.canonicalize();
    CHECK(q.get_den() == 2);
    CHECK(q.get_num() == -3);
    CHECK(to_string(q) == "-3/2");
}

TEST_CASE("prime field residues") {
    Field<Zp> f(101);
    Zp a = f.from_int(-1);
    CHECK(a.residue() == 100);
    CHECK((a * a).residue() == 1);
    CHECK((f.from_int(7) / f.from_int(7)).residue() == 1);
    CHECK(f.from_rational(Rational(1, 2)) * f.from_int(2) == f.one());
    CHECK_THROWS(f.from_rational(Rational(1, 101)));
    CHECK_THROWS(f.zero().inverse());
    // unbound literals adopt the modulus they meet
    CHECK((Zp(1) + f.from_int(100)).residue() == 0);
}

TEST_CASE("primality") {
    CHECK(is_prime(2));
    CHECK(is_prime(1000000007));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(561));
    CHECK(is_prime(2305843009213693951ULL));  // 2^61 - 1
    std::mt19937_64 rng(3);
    auto p = random_prime(rng);
    CHECK(is_prime(p));
    CHECK(p < (std::uint64_t{1} << 62));
}

TEST_CASE("ring arithmetic") {
    CHECK(pow(T("T1 + T2"), 2, Rational(1)) == T("T1^2 + 2*T1*T2 + T2^2"));
    auto a = T("3*T1*T4 - T2 + 7");
    CHECK((a * Poly<Rational>(Ring::T)).is_zero());
    CHECK(a * Poly<Rational>(Ring::T, Rational(1)) == a);
    CHECK((a - a).is_zero());
    CHECK_THROWS_AS(a + parse_polynomial("s", Ring::Param), std::invalid_argument);
}

TEST_CASE("exact division") {
    CHECK(T("T1^2 - T2^2").exact_div(T("T1 - T2")) == T("T1 + T2"));
    auto a = T("T1^3*T2 - 5*T3 + 1/2");
    CHECK(a.exact_div(a) == T("1"));
    CHECK_THROWS_AS(T("T1*T4 - T2*T3").exact_div(T("T1")), NotDivisible);
    CHECK_FALSE(T("T1^2 + 1").divisible_by(T("T1 + 1")));
}

TEST_CASE("exact division inverts multiplication on random inputs") {
    std::mt19937_64 rng(11);
    Field<Rational> Q;
    auto random_poly = [&](int terms, int deg) {
        std::vector<Poly<Rational>::Term> t;
        for (int i = 0; i < terms; ++i) {
            Exponents e{static_cast<int>(rng() % (deg + 1)), static_cast<int>(rng() % (deg + 1)),
                        static_cast<int>(rng() % (deg + 1)), static_cast<int>(rng() % (deg + 1))};
            t.emplace_back(mono::make(e), Q.random(rng, 9));
        }
        return Poly<Rational>::from_terms(Ring::T, t);
    };
    for (int trial = 0; trial < 50; ++trial) {
        auto a = random_poly(6, 3), b = random_poly(5, 2);
        if (b.is_zero()) continue;
        CHECK((a * b).exact_div(b) == a);
    }
}

TEST_CASE("evaluation") {
    Field<Rational> Q;
    auto quadric = T("T1*T4 - T2*T3");
    CHECK(quadric.eval({Q.one(), Q.one(), Q.one(), Q.one()}, Q.zero()) == 0);
    CHECK(quadric.eval({Q.one(), Q.one(), Q.one(), Q.from_int(2)}, Q.zero()) == 1);
    CHECK(T("-5/3").eval({Q.from_int(4), Q.zero(), Q.one(), Q.one()}, Q.zero()) == Rational(-5, 3));
}

TEST_CASE("printing re-parses") {
    for (const char* s : {"T1*T4 - T2*T3", "-T1^2 + 3/2*T2*T3 - 7", "T4^12", "-1/9"}) {
        auto p = T(s);
        CHECK(to_string(p) == s);
        CHECK(T(to_string(p)) == p);
    }
    CHECK(to_string(Poly<Rational>(Ring::T)) == "0");
}

TEST_CASE("parse errors carry positions") {
    try {
        parse_polynomial("T1 + * T2", Ring::T, 4, 10);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
        CHECK(e.column() == 15);
    }
    CHECK_THROWS_AS(parse_polynomial("T5", Ring::T), ParseError);
    CHECK_THROWS_AS(parse_polynomial("(T1 + T2", Ring::T), ParseError);
    CHECK_THROWS_AS(parse_polynomial("1/0", Ring::T), ParseError);
    CHECK_THROWS_AS(parse_polynomial("x", Ring::Param), ParseError);
}
