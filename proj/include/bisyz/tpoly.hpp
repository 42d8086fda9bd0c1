#pragma once

// Multivariate gcd, determinants with polynomial entries and linear forms.

#include <array>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bisyz/poly.hpp"

namespace bisyz {

template <class S>
using TPoly = Poly<S>;

/// c1*T1 + c2*T2 + c3*T3 + c4*T4.
template <class S>
using LinearForm = std::array<S, 4>;

template <class S>
TPoly<S> to_poly(const LinearForm<S>& l) {
    std::vector<typename TPoly<S>::Term> terms;
    for (int i = 0; i < 4; ++i) {
        Exponents e{0, 0, 0, 0};
        e[i] = 1;
        terms.emplace_back(mono::make(e), l[i]);
    }
    return TPoly<S>::from_terms(Ring::T, std::move(terms));
}

template <class S>
S eval(const LinearForm<S>& l, const std::array<S, 4>& p) {
    return l[0] * p[0] + l[1] * p[1] + l[2] * p[2] + l[3] * p[3];
}

namespace detail {

template <class S>
using Dense = std::vector<Poly<S>>;  // coefficients in one variable, low to high

template <class S>
Dense<S> split(const Poly<S>& p, int var) {
    int d = std::max(0, p.degree_in(var));
    std::vector<std::vector<typename Poly<S>::Term>> buckets(d + 1);
    for (const auto& [k, c] : p.terms()) {
        int e = mono::exp(k, var);
        Exponents x = mono::unpack(k);
        x[var] = 0;
        buckets[e].emplace_back(mono::make(x), c);
    }
    Dense<S> out;
    out.reserve(d + 1);
    for (auto& b : buckets) out.push_back(Poly<S>::from_terms(p.ring(), std::move(b)));
    return out;
}

template <class S>
Poly<S> join(const Dense<S>& coeffs, int var, Ring ring) {
    std::vector<typename Poly<S>::Term> terms;
    for (std::size_t e = 0; e < coeffs.size(); ++e) {
        for (const auto& [k, c] : coeffs[e].terms()) {
            Exponents x = mono::unpack(k);
            x[var] = static_cast<int>(e);
            terms.emplace_back(mono::make(x), c);
        }
    }
    return Poly<S>::from_terms(ring, std::move(terms));
}

template <class S>
void trim(Dense<S>& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

// Pseudo-remainder of a by b in the split variable.
template <class S>
Dense<S> prem(Dense<S> a, const Dense<S>& b) {
    trim(a);
    const int db = static_cast<int>(b.size()) - 1;
    int e = static_cast<int>(a.size()) - db;
    const Poly<S>& lb = b.back();
    while (static_cast<int>(a.size()) - 1 >= db && !a.empty()) {
        const int shift = static_cast<int>(a.size()) - 1 - db;
        Poly<S> la = a.back();
        for (auto& c : a) c = c * lb;
        for (int j = 0; j <= db; ++j) a[shift + j] -= la * b[j];
        trim(a);
        --e;
    }
    if (e > 0 && !a.empty()) {
        Poly<S> f = lb;
        for (int i = 1; i < e; ++i) f *= lb;
        for (auto& c : a) c = c * f;
    }
    return a;
}

}  // namespace detail

template <class S>
Poly<S> mvgcd(const Poly<S>& a, const Poly<S>& b);

/// Gcd of the coefficients of p viewed as a polynomial in `var`.
template <class S>
Poly<S> content_in(const Poly<S>& p, int var) {
    auto parts = detail::split(p, var);
    Poly<S> g(p.ring());
    for (const auto& c : parts) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c.monic() : mvgcd(g, c);
        if (g.is_constant()) break;
    }
    return g;
}

namespace detail {

template <class S>
Poly<S> gcd_inhomogeneous(const Poly<S>& a, const Poly<S>& b) {
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();
    if (a.is_constant() || b.is_constant()) return Poly<S>(a.ring(), inverse(a.leading_coeff()) * a.leading_coeff());
    if (auto q = a.try_div(b)) return b.monic();
    if (auto q = b.try_div(a)) return a.monic();

    int var = 3;
    while (var >= 0 && a.degree_in(var) <= 0 && b.degree_in(var) <= 0) --var;
    if (a.degree_in(var) <= 0) return mvgcd(a, content_in(b, var));
    if (b.degree_in(var) <= 0) return mvgcd(content_in(a, var), b);

    Poly<S> ca = content_in(a, var), cb = content_in(b, var);
    Poly<S> cont = mvgcd(ca, cb);
    Dense<S> A = split(a.exact_div(ca), var), B = split(b.exact_div(cb), var);
    trim(A);
    trim(B);
    if (A.size() < B.size()) std::swap(A, B);

    const S one = inverse(a.leading_coeff()) * a.leading_coeff();
    Poly<S> g(a.ring(), one), h(a.ring(), one);
    for (;;) {
        const int delta = static_cast<int>(A.size()) - static_cast<int>(B.size());
        Dense<S> r = prem(A, B);
        if (r.empty()) break;
        if (r.size() == 1) {
            B = {Poly<S>(a.ring(), one)};
            break;
        }
        Poly<S> div = g * pow(h, delta, one);
        for (auto& c : r) c = c.exact_div(div);
        A = std::move(B);
        B = std::move(r);
        g = A.back();
        if (delta > 0) h = pow(g, delta, one).exact_div(pow(h, delta - 1, one));
    }
    Poly<S> last = join(B, var, a.ring());
    last = last.exact_div(content_in(last, var));
    return (cont * last).monic();
}

}  // namespace detail

/// Greatest common divisor, normalized to leading coefficient one (graded
/// lex, T1 > T2 > T3 > T4). Homogeneous inputs are dehomogenized in their
/// last variable first.
template <class S>
Poly<S> mvgcd(const Poly<S>& a, const Poly<S>& b) {
    if (a.ring() != b.ring()) throw std::invalid_argument("mvgcd: mixed rings");
    if (a.is_zero() && b.is_zero()) throw std::invalid_argument("mvgcd: both arguments zero");
    if (a.is_zero() || b.is_zero() || !a.is_homogeneous() || !b.is_homogeneous() || a.is_constant() ||
        b.is_constant())
        return detail::gcd_inhomogeneous(a, b);

    int var = 3;
    while (var >= 0 && a.degree_in(var) <= 0 && b.degree_in(var) <= 0) --var;
    auto low = [&](const Poly<S>& p) {
        int m = mono::exp(p.terms().front().first, var);
        for (const auto& [k, c] : p.terms()) m = std::min(m, mono::exp(k, var));
        return m;
    };
    auto dehom = [&](const Poly<S>& p) {
        return p.map_monomials(p.ring(), [&](std::uint64_t k) {
            Exponents e = mono::unpack(k);
            e[var] = 0;
            return mono::make(e);
        });
    };
    Poly<S> g = detail::gcd_inhomogeneous(dehom(a), dehom(b));
    const int dg = g.degree();
    Exponents shift{0, 0, 0, 0};
    shift[var] = std::min(low(a), low(b));
    const std::uint64_t sk = mono::make(shift);
    Poly<S> h = g.map_monomials(g.ring(), [&](std::uint64_t k) {
        Exponents e = mono::unpack(k);
        e[var] = dg - mono::total(k);
        return mono::mul(mono::make(e), sk);
    });
    return h.monic();
}

template <class S>
using PolyGrid = std::vector<std::vector<Poly<S>>>;

/// Determinant of a square matrix with polynomial entries (Bareiss).
template <class S>
Poly<S> polydet(PolyGrid<S> m, Ring ring, const Field<S>& field) {
    const std::size_t n = m.size();
    for (const auto& row : m)
        if (row.size() != n) throw std::invalid_argument("polydet: matrix is not square");
    if (n == 0) return Poly<S>(ring, field.one());
    Poly<S> prev(ring, field.one());
    bool negate = false;
    for (std::size_t k = 0; k < n; ++k) {
        if (m[k][k].is_zero()) {
            std::size_t i = k + 1;
            while (i < n && m[i][k].is_zero()) ++i;
            if (i == n) return Poly<S>(ring);
            std::swap(m[i], m[k]);
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]).exact_div(prev);
            m[i][k] = Poly<S>(ring);
        }
        prev = m[k][k];
    }
    return negate ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

}  // namespace bisyz
