#pragma once

// Bi-homogeneous parametrizations P1 x P1 -> P3 in the variables s,u,t,v.

#include <array>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bisyz/poly.hpp"
#include "bisyz/tpoly.hpp"

namespace bisyz {

/// Polynomial in s,u,t,v, homogeneous of degree d1 in (s,u) and d2 in (t,v).
template <class S>
class BiHomPoly {
public:
    BiHomPoly() : poly_(Ring::Param) {}
    BiHomPoly(Poly<S> p, int d1, int d2) : d1_(d1), d2_(d2), poly_(std::move(p)) {
        if (d1 < 0 || d2 < 0) throw std::invalid_argument("negative bidegree");
        if (poly_.ring() != Ring::Param) throw std::invalid_argument("BiHomPoly needs the s,u,t,v ring");
        for (const auto& [k, c] : poly_.terms())
            if (mono::exp(k, 0) + mono::exp(k, 1) != d1 || mono::exp(k, 2) + mono::exp(k, 3) != d2)
                throw std::invalid_argument("term " + mono::to_string(k, Ring::Param) + " is not of bidegree (" +
                                            std::to_string(d1) + "," + std::to_string(d2) + ")");
    }

    int d1() const { return d1_; }
    int d2() const { return d2_; }
    const Poly<S>& poly() const { return poly_; }
    bool is_zero() const { return poly_.is_zero(); }

    friend BiHomPoly operator+(const BiHomPoly& a, const BiHomPoly& b) {
        same_bidegree(a, b);
        return BiHomPoly(a.poly_ + b.poly_, a.d1_, a.d2_);
    }
    friend BiHomPoly operator-(const BiHomPoly& a, const BiHomPoly& b) {
        same_bidegree(a, b);
        return BiHomPoly(a.poly_ - b.poly_, a.d1_, a.d2_);
    }
    friend BiHomPoly operator*(const BiHomPoly& a, const BiHomPoly& b) {
        return BiHomPoly(a.poly_ * b.poly_, a.d1_ + b.d1_, a.d2_ + b.d2_);
    }
    friend bool operator==(const BiHomPoly& a, const BiHomPoly& b) {
        return a.d1_ == b.d1_ && a.d2_ == b.d2_ && a.poly_ == b.poly_;
    }

    /// Term keys in print order: s-exponent descending, then t-exponent descending.
    std::vector<std::uint64_t> print_order() const {
        std::vector<std::uint64_t> keys;
        for (const auto& [k, c] : poly_.terms()) keys.push_back(k);
        std::sort(keys.begin(), keys.end(), [](std::uint64_t a, std::uint64_t b) {
            if (mono::exp(a, 0) != mono::exp(b, 0)) return mono::exp(a, 0) > mono::exp(b, 0);
            return mono::exp(a, 2) > mono::exp(b, 2);
        });
        return keys;
    }

private:
    static void same_bidegree(const BiHomPoly& a, const BiHomPoly& b) {
        if (a.d1_ != b.d1_ || a.d2_ != b.d2_) throw std::invalid_argument("bidegree mismatch");
    }

    int d1_ = 0;
    int d2_ = 0;
    Poly<S> poly_;
};

template <class S>
std::string to_string(const BiHomPoly<S>& f) {
    auto order = f.print_order();
    return to_string(f.poly(), &order);
}

/// Four bi-homogeneous polynomials of a shared bidegree over one field.
template <class S>
struct Parametrization {
    std::array<BiHomPoly<S>, 4> f;
    Field<S> field;

    Parametrization(std::array<BiHomPoly<S>, 4> fs, Field<S> fld) : f(std::move(fs)), field(fld) {
        for (const auto& g : f)
            if (g.d1() != f[0].d1() || g.d2() != f[0].d2())
                throw std::invalid_argument("coordinate functions have different bidegrees");
        if (std::all_of(f.begin(), f.end(), [](const BiHomPoly<S>& g) { return g.is_zero(); }))
            throw std::invalid_argument("all four coordinate functions are zero");
    }
    int d1() const { return f[0].d1(); }
    int d2() const { return f[0].d2(); }
    bool unmixed() const { return d1() == d2(); }

    /// Value of (f1..f4) at a parameter point (s,u,t,v).
    std::array<S, 4> eval(const std::array<S, 4>& point) const {
        std::array<S, 4> out;
        for (int i = 0; i < 4; ++i) out[i] = f[i].poly().eval(point, field.zero());
        return out;
    }
};

/// Parser output: exact rational coefficients plus the declared field.
struct ParsedInput {
    Parametrization<Rational> param;
    std::optional<std::uint64_t> prime;  // set by `field: GF <p>`
};

/// Reads the input format (`degree:`, optional `field:`, `f1:`..`f4:` lines,
/// `#` comments). Input without u and v is bi-homogenized to the declared
/// bidegree. Throws ParseError.
ParsedInput parse_parametrization(std::string_view text);

/// Canonical text; parse_parametrization reads it back unchanged.
template <class S>
std::string print_parametrization(const Parametrization<S>& p) {
    std::string out = "degree: " + std::to_string(p.d1()) + " " + std::to_string(p.d2()) + "\n";
    out += "field: " + p.field.name() + "\n";
    for (int i = 0; i < 4; ++i) out += "f" + std::to_string(i + 1) + ": " + to_string(p.f[i]) + "\n";
    return out;
}

template <class S>
Parametrization<S> to_field(const Parametrization<Rational>& p, const Field<S>& field) {
    std::array<BiHomPoly<S>, 4> fs;
    for (int i = 0; i < 4; ++i)
        fs[i] = BiHomPoly<S>(p.f[i].poly().map_coeffs([&](const Rational& q) { return field.from_rational(q); }),
                             p.d1(), p.d2());
    return Parametrization<S>(std::move(fs), field);
}

/// gcd(f1, f2, f3, f4), monic; a constant means finitely many base points.
template <class S>
Poly<S> gcd_of_inputs(const Parametrization<S>& p) {
    Poly<S> g(Ring::Param);
    for (const auto& fi : p.f) {
        if (fi.is_zero()) continue;
        g = g.is_zero() ? fi.poly().monic() : mvgcd(g, fi.poly());
        if (g.is_constant()) break;
    }
    return g;
}

/// Substitutes s <- s^(L/d1), u <- u^(L/d1), t <- t^(L/d2), v <- v^(L/d2)
/// with L = lcm(d1, d2); the result has bidegree (L, L).
template <class S>
Parametrization<S> lift_mixed(const Parametrization<S>& p) {
    if (p.d1() < 1 || p.d2() < 1) throw std::invalid_argument("lift_mixed: bidegree components must be positive");
    const int L = std::lcm(p.d1(), p.d2());
    const int a = L / p.d1(), b = L / p.d2();
    std::array<BiHomPoly<S>, 4> fs;
    for (int i = 0; i < 4; ++i) {
        Poly<S> q = p.f[i].poly().map_monomials(Ring::Param, [&](std::uint64_t k) {
            Exponents e = mono::unpack(k);
            return mono::make({e[0] * a, e[1] * a, e[2] * b, e[3] * b});
        });
        fs[i] = BiHomPoly<S>(std::move(q), L, L);
    }
    return Parametrization<S>(std::move(fs), p.field);
}

/// Extra exponent picked up by the determinant after lift_mixed:
/// lcm(d1,d2)/gcd(d1,d2).
inline int lift_exponent(int d1, int d2) { return std::lcm(d1, d2) / std::gcd(d1, d2); }

}  // namespace bisyz
