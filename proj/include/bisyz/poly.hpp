#pragma once

// Sparse polynomials in four variables with exact coefficients.
//
// The same container serves three rings: T1..T4 (implicit equations),
// s,u,t,v (parametrizations) and X1..X4 (the Segre ring before reduction).

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bisyz/field.hpp"

namespace bisyz {

enum class Ring : std::uint8_t { T, Param, Segre };

inline std::string_view ring_name(Ring r) {
    switch (r) {
        case Ring::T: return "T";
        case Ring::Param: return "Param";
        case Ring::Segre: return "Segre";
    }
    return "?";
}

inline const std::array<std::string_view, 4>& var_names(Ring r) {
    static const std::array<std::string_view, 4> t{"T1", "T2", "T3", "T4"};
    static const std::array<std::string_view, 4> p{"s", "u", "t", "v"};
    static const std::array<std::string_view, 4> x{"X1", "X2", "X3", "X4"};
    switch (r) {
        case Ring::T: return t;
        case Ring::Param: return p;
        case Ring::Segre: return x;
    }
    return t;
}

using Exponents = std::array<int, 4>;

/// Packed monomial: total degree in the high word, one byte per exponent
/// below it. Comparing keys as integers gives graded lex with var0 > var3.
namespace mono {

inline constexpr int kMaxExp = 255;

inline std::uint64_t make(const Exponents& e) {
    std::uint64_t total = 0, key = 0;
    for (int i = 0; i < 4; ++i) {
        if (e[i] < 0 || e[i] > kMaxExp) throw std::overflow_error("monomial exponent out of range");
        total += static_cast<std::uint64_t>(e[i]);
        key |= static_cast<std::uint64_t>(e[i]) << (24 - 8 * i);
    }
    return (total << 32) | key;
}
inline int exp(std::uint64_t key, int i) { return static_cast<int>((key >> (24 - 8 * i)) & 0xffu); }
inline int total(std::uint64_t key) { return static_cast<int>(key >> 32); }
inline Exponents unpack(std::uint64_t key) { return {exp(key, 0), exp(key, 1), exp(key, 2), exp(key, 3)}; }
inline bool divides(std::uint64_t a, std::uint64_t b) {
    for (int i = 0; i < 4; ++i)
        if (exp(a, i) > exp(b, i)) return false;
    return true;
}
inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t k = a + b;
    int sum = 0;
    for (int i = 0; i < 4; ++i) sum += exp(k, i);
    if (sum != total(k)) throw std::overflow_error("monomial exponent overflow");
    return k;
}
/// a / b, assuming divides(b, a).
inline std::uint64_t div(std::uint64_t a, std::uint64_t b) { return a - b; }

inline std::string to_string(std::uint64_t key, Ring ring) {
    const auto& names = var_names(ring);
    std::string out;
    for (int i = 0; i < 4; ++i) {
        int e = exp(key, i);
        if (e == 0) continue;
        if (!out.empty()) out += '*';
        out += names[i];
        if (e > 1) out += '^' + std::to_string(e);
    }
    return out.empty() ? "1" : out;
}

}  // namespace mono

inline bool is_negative(const Rational& x) { return sgn(x) < 0; }
inline bool is_negative(const Zp&) { return false; }

/// Thrown by exact division when the divisor does not divide.
struct NotDivisible : std::domain_error {
    NotDivisible() : std::domain_error("polynomial division is not exact") {}
};

template <class S>
class Poly {
public:
    using Scalar = S;
    using Term = std::pair<std::uint64_t, S>;

    explicit Poly(Ring ring = Ring::T) : ring_(ring) {}
    Poly(Ring ring, const S& constant) : ring_(ring) {
        if (!bisyz::is_zero(constant)) terms_.emplace_back(mono::make({0, 0, 0, 0}), constant);
    }

    static Poly monomial(Ring ring, const Exponents& e, const S& c) {
        Poly p(ring);
        if (!bisyz::is_zero(c)) p.terms_.emplace_back(mono::make(e), c);
        return p;
    }
    static Poly variable(Ring ring, int i, const S& one) {
        Exponents e{0, 0, 0, 0};
        e[i] = 1;
        return monomial(ring, e, one);
    }
    /// Builds from arbitrary (key, coeff) pairs; merges duplicates, drops zeros.
    static Poly from_terms(Ring ring, std::vector<Term> terms) {
        Poly p(ring);
        std::sort(terms.begin(), terms.end(),
                  [](const Term& a, const Term& b) { return a.first > b.first; });
        for (auto& t : terms) {
            if (!p.terms_.empty() && p.terms_.back().first == t.first)
                p.terms_.back().second += t.second;
            else
                p.terms_.push_back(std::move(t));
        }
        p.drop_zeros();
        return p;
    }

    Ring ring() const { return ring_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
    const Term& leading() const { return terms_.front(); }
    const S& leading_coeff() const { return terms_.front().second; }

    /// Total degree; -1 for the zero polynomial.
    int degree() const { return terms_.empty() ? -1 : mono::total(terms_.front().first); }
    int degree_in(int var) const {
        int d = -1;
        for (const auto& [k, c] : terms_) d = std::max(d, mono::exp(k, var));
        return d;
    }
    bool is_homogeneous() const {
        return std::all_of(terms_.begin(), terms_.end(), [&](const Term& t) {
            return mono::total(t.first) == mono::total(terms_.front().first);
        });
    }
    S coeff(std::uint64_t key, const S& zero) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                                   [](const Term& t, std::uint64_t k) { return t.first > k; });
        return it != terms_.end() && it->first == key ? it->second : zero;
    }

    friend Poly operator+(const Poly& a, const Poly& b) { return merge(a, b, false); }
    friend Poly operator-(const Poly& a, const Poly& b) { return merge(a, b, true); }
    Poly operator-() const {
        Poly r = *this;
        for (auto& t : r.terms_) t.second = -t.second;
        return r;
    }
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    friend Poly operator*(const Poly& a, const S& c) {
        Poly r(a.ring_);
        if (bisyz::is_zero(c)) return r;
        r.terms_.reserve(a.terms_.size());
        for (const auto& [k, x] : a.terms_) r.terms_.emplace_back(k, x * c);
        r.drop_zeros();
        return r;
    }
    friend Poly operator*(const S& c, const Poly& a) { return a * c; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        check_ring(a, b);
        Poly r(a.ring_);
        if (a.is_zero() || b.is_zero()) return r;
        if (a.size() < b.size()) return b * a;
        if (b.size() == 1) {
            const auto& [kb, cb] = b.terms_.front();
            r.terms_.reserve(a.size());
            for (const auto& [k, c] : a.terms_) r.terms_.emplace_back(mono::mul(k, kb), c * cb);
            r.drop_zeros();
            return r;
        }
        std::unordered_map<std::uint64_t, S> acc;
        acc.reserve(a.size() * b.size() / 2 + 8);
        for (const auto& [kb, cb] : b.terms_) {
            for (const auto& [ka, ca] : a.terms_) {
                auto [it, fresh] = acc.try_emplace(mono::mul(ka, kb));
                if (fresh)
                    it->second = ca * cb;
                else
                    it->second += ca * cb;
            }
        }
        r.terms_.reserve(acc.size());
        for (auto& [k, c] : acc)
            if (!bisyz::is_zero(c)) r.terms_.emplace_back(k, std::move(c));
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& x, const Term& y) { return x.first > y.first; });
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.ring_ == b.ring_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    /// Quotient when `b` divides `*this` exactly, nullopt otherwise.
    std::optional<Poly> try_div(const Poly& b) const {
        check_ring(*this, b);
        if (b.is_zero()) throw std::domain_error("polynomial division by zero");
        Poly q(ring_);
        if (is_zero()) return q;
        if (b.size() == 1) {
            const auto& [kb, cb] = b.leading();
            S inv = inverse(cb);
            q.terms_.reserve(size());
            for (const auto& [k, c] : terms_) {
                if (!mono::divides(kb, k)) return std::nullopt;
                q.terms_.emplace_back(mono::div(k, kb), c * inv);
            }
            return q;
        }
        if (degree() < b.degree() || mono::total(terms_.back().first) < mono::total(b.terms_.back().first))
            return std::nullopt;
        const auto& [lk, lc] = b.leading();
        S inv = inverse(lc);
        std::map<std::uint64_t, S, std::greater<>> rem(terms_.begin(), terms_.end());
        std::vector<Term> quot;
        while (!rem.empty()) {
            auto top = rem.begin();
            if (!mono::divides(lk, top->first)) return std::nullopt;
            std::uint64_t qk = mono::div(top->first, lk);
            S qc = top->second * inv;
            rem.erase(top);
            for (std::size_t i = 1; i < b.terms_.size(); ++i) {
                std::uint64_t k = mono::mul(qk, b.terms_[i].first);
                auto [it, fresh] = rem.try_emplace(k);
                if (fresh)
                    it->second = -(qc * b.terms_[i].second);
                else {
                    it->second -= qc * b.terms_[i].second;
                    if (bisyz::is_zero(it->second)) rem.erase(it);
                }
            }
            quot.emplace_back(qk, std::move(qc));
        }
        q.terms_ = std::move(quot);
        return q;
    }
    /// Exact quotient; throws NotDivisible when the division leaves a remainder.
    Poly exact_div(const Poly& b) const {
        auto q = try_div(b);
        if (!q) throw NotDivisible();
        return *std::move(q);
    }
    bool divisible_by(const Poly& b) const { return try_div(b).has_value(); }

    S eval(const std::array<S, 4>& point, const S& zero) const {
        S acc = zero;
        std::array<std::vector<S>, 4> powers;
        for (int i = 0; i < 4; ++i) {
            int d = std::max(0, degree_in(i));
            powers[i].reserve(d + 1);
            powers[i].push_back(zero + S(1));
            for (int e = 1; e <= d; ++e) powers[i].push_back(powers[i].back() * point[i]);
        }
        for (const auto& [k, c] : terms_) {
            S t = c;
            for (int i = 0; i < 4; ++i)
                if (int e = mono::exp(k, i)) t *= powers[i][e];
            acc += t;
        }
        return acc;
    }

    /// Scales so the leading coefficient (graded lex) is one.
    Poly monic() const {
        if (is_zero()) return *this;
        return *this * inverse(leading_coeff());
    }

    template <class F>
    auto map_coeffs(F&& f) const {
        using T = std::decay_t<decltype(f(std::declval<const S&>()))>;
        std::vector<std::pair<std::uint64_t, T>> out;
        out.reserve(terms_.size());
        for (const auto& [k, c] : terms_) out.emplace_back(k, f(c));
        return Poly<T>::from_terms(ring_, std::move(out));
    }
    /// Applies a monomial map; coefficients of colliding images add up.
    template <class F>
    Poly map_monomials(Ring target, F&& f) const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const auto& [k, c] : terms_) out.emplace_back(f(k), c);
        return from_terms(target, std::move(out));
    }

    Poly with_ring(Ring r) const {
        Poly p = *this;
        p.ring_ = r;
        return p;
    }

private:
    static void check_ring(const Poly& a, const Poly& b) {
        if (a.ring_ != b.ring_)
            throw std::invalid_argument("mixing polynomials of rings " + std::string(ring_name(a.ring_)) +
                                        " and " + std::string(ring_name(b.ring_)));
    }
    static Poly merge(const Poly& a, const Poly& b, bool subtract) {
        check_ring(a, b);
        Poly r(a.ring_);
        r.terms_.reserve(a.size() + b.size());
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a.terms_[i].first > b.terms_[j].first)) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.size() || b.terms_[j].first > a.terms_[i].first) {
                r.terms_.emplace_back(b.terms_[j].first, subtract ? S(-b.terms_[j].second) : b.terms_[j].second);
                ++j;
            } else {
                S c = subtract ? S(a.terms_[i].second - b.terms_[j].second)
                               : S(a.terms_[i].second + b.terms_[j].second);
                if (!bisyz::is_zero(c)) r.terms_.emplace_back(a.terms_[i].first, std::move(c));
                ++i, ++j;
            }
        }
        return r;
    }
    void drop_zeros() {
        terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                    [](const Term& t) { return bisyz::is_zero(t.second); }),
                     terms_.end());
    }

    Ring ring_;
    std::vector<Term> terms_;
};

template <class S>
Poly<S> pow(const Poly<S>& base, int e, const S& one) {
    if (e < 0) throw std::invalid_argument("negative polynomial power");
    Poly<S> acc(base.ring(), one), b = base;
    while (e) {
        if (e & 1) acc *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return acc;
}

/// Renders a polynomial in the input grammar. `order` lists term keys in the
/// desired print order; by default graded lex descending.
template <class S>
std::string to_string(const Poly<S>& p, const std::vector<std::uint64_t>* order = nullptr) {
    if (p.is_zero()) return "0";
    std::vector<const typename Poly<S>::Term*> terms;
    terms.reserve(p.size());
    if (order) {
        for (auto k : *order)
            for (const auto& t : p.terms())
                if (t.first == k) terms.push_back(&t);
    } else {
        for (const auto& t : p.terms()) terms.push_back(&t);
    }
    std::string out;
    bool first = true;
    for (const auto* t : terms) {
        bool neg = is_negative(t->second);
        S mag = neg ? S(-t->second) : t->second;
        if (first)
            out += neg ? "-" : "";
        else
            out += neg ? " - " : " + ";
        first = false;
        bool unit = mag == S(1);
        std::string m = mono::to_string(t->first, p.ring());
        if (t->first == 0)
            out += to_string(mag);
        else if (unit)
            out += m;
        else
            out += to_string(mag) + "*" + m;
    }
    return out;
}

}  // namespace bisyz
