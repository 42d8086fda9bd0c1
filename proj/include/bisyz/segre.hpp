#pragma once

// The Segre ring A = K[X1..X4]/(X1*X4 - X2*X3) and the maps between bi-forms
// of bidegree (n,n) and A_n.
//
// Normal form: no monomial divisible by X1*X4. Rewriting X1*X4 -> X2*X3
// lowers the X1 exponent, so a monomial X1^a X2^b X3^c X4^e reduces in one
// step to X1^(a-k) X2^(b+k) X3^(c+k) X4^(e-k) with k = min(a, e).

#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bisyz/biparam.hpp"
#include "bisyz/poly.hpp"

namespace bisyz {

namespace segre_detail {
inline std::uint64_t reduce(std::uint64_t key) {
    Exponents e = mono::unpack(key);
    int k = std::min(e[0], e[3]);
    if (k == 0) return key;
    return mono::make({e[0] - k, e[1] + k, e[2] + k, e[3] - k});
}
}  // namespace segre_detail

/// Homogeneous element of A of degree n, stored in normal form.
template <class S>
class SegreElem {
public:
    explicit SegreElem(int degree = 0) : degree_(degree), poly_(Ring::Segre) {}
    /// Reduces `p` to normal form; every term must have total degree `degree`.
    SegreElem(const Poly<S>& p, int degree) : degree_(degree) {
        if (p.ring() != Ring::Segre) throw std::invalid_argument("SegreElem needs the X1..X4 ring");
        for (const auto& [k, c] : p.terms())
            if (mono::total(k) != degree) throw std::invalid_argument("SegreElem: inhomogeneous input");
        poly_ = p.map_monomials(Ring::Segre, segre_detail::reduce);
    }

    int degree() const { return degree_; }
    const Poly<S>& poly() const { return poly_; }
    bool is_zero() const { return poly_.is_zero(); }

    friend SegreElem operator+(const SegreElem& a, const SegreElem& b) {
        same_degree(a, b);
        return raw(a.poly_ + b.poly_, a.degree_);
    }
    friend SegreElem operator-(const SegreElem& a, const SegreElem& b) {
        same_degree(a, b);
        return raw(a.poly_ - b.poly_, a.degree_);
    }
    friend SegreElem operator*(const SegreElem& a, const S& c) { return raw(a.poly_ * c, a.degree_); }
    friend bool operator==(const SegreElem& a, const SegreElem& b) {
        return a.degree_ == b.degree_ && a.poly_ == b.poly_;
    }

    /// Already-reduced input; skips the reduction pass.
    static SegreElem raw(Poly<S> p, int degree) {
        SegreElem x(degree);
        x.poly_ = std::move(p);
        return x;
    }

private:
    static void same_degree(const SegreElem& a, const SegreElem& b) {
        if (a.degree_ != b.degree_) throw std::invalid_argument("SegreElem: degree mismatch");
    }

    int degree_;
    Poly<S> poly_;
};

/// Product in A, reduced to normal form.
template <class S>
SegreElem<S> nf_mul(const SegreElem<S>& x, const SegreElem<S>& y) {
    return SegreElem<S>::raw((x.poly() * y.poly()).map_monomials(Ring::Segre, segre_detail::reduce),
                             x.degree() + y.degree());
}

template <class S>
std::string to_string(const SegreElem<S>& x) {
    return to_string(x.poly());
}

/// The (n+1)^2 normal-form monomials of degree n, ordered lexicographically
/// on (a,b,c) descending (e is determined).
struct SegreBasis {
    int degree = 0;
    std::vector<std::uint64_t> monomials;
    std::unordered_map<std::uint64_t, int> index;

    std::size_t size() const { return monomials.size(); }
    int position(std::uint64_t key) const {
        auto it = index.find(key);
        if (it == index.end()) throw std::out_of_range("monomial not in basis");
        return it->second;
    }
};

/// Memoized per degree; safe to call concurrently.
const SegreBasis& basis(int n);

/// s^i u^(n-i) t^j v^(n-j) -> X1^(i+j-n+k) X2^(n-j-k) X3^(n-i-k) X4^k with
/// k = max(0, n-i-j); coefficients carried over unchanged.
template <class S>
SegreElem<S> omega(const BiHomPoly<S>& f) {
    if (f.d1() != f.d2()) throw std::invalid_argument("omega: bidegree components differ");
    const int n = f.d1();
    Poly<S> g = f.poly().map_monomials(Ring::Segre, [n](std::uint64_t key) {
        const int i = mono::exp(key, 0), j = mono::exp(key, 2);
        const int k = std::max(0, n - i - j);
        return mono::make({i + j - n + k, n - j - k, n - i - k, k});
    });
    return SegreElem<S>::raw(std::move(g), n);
}

/// X1 -> st, X2 -> sv, X3 -> ut, X4 -> uv.
template <class S>
BiHomPoly<S> theta(const SegreElem<S>& x) {
    Poly<S> f = x.poly().map_monomials(Ring::Param, [](std::uint64_t key) {
        Exponents e = mono::unpack(key);
        return mono::make({e[0] + e[1], e[2] + e[3], e[0] + e[2], e[1] + e[3]});
    });
    return BiHomPoly<S>(std::move(f), x.degree(), x.degree());
}

}  // namespace bisyz
