#pragma once

// Dense univariate polynomials over a field, coefficients low to high.

#include <stdexcept>
#include <utility>
#include <vector>

#include "bisyz/field.hpp"

namespace bisyz::upoly {

template <class S>
using UPoly = std::vector<S>;

template <class S>
void trim(UPoly<S>& p) {
    while (!p.empty() && is_zero(p.back())) p.pop_back();
}

template <class S>
int degree(const UPoly<S>& p) {
    return static_cast<int>(p.size()) - 1;
}

template <class S>
UPoly<S> mul(const UPoly<S>& a, const UPoly<S>& b) {
    if (a.empty() || b.empty()) return {};
    UPoly<S> r(a.size() + b.size() - 1, a[0] - a[0]);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (is_zero(a[i])) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

/// Quotient and remainder of a by b (b nonzero).
template <class S>
std::pair<UPoly<S>, UPoly<S>> divmod(UPoly<S> a, const UPoly<S>& b) {
    if (b.empty()) throw std::domain_error("univariate division by zero");
    trim(a);
    if (a.size() < b.size()) return {{}, a};
    S inv = inverse(b.back());
    UPoly<S> q(a.size() - b.size() + 1, b[0] - b[0]);
    for (int i = degree(a) - degree(b); i >= 0; --i) {
        S c = a[i + b.size() - 1] * inv;
        q[i] = c;
        if (is_zero(c)) continue;
        for (std::size_t j = 0; j < b.size(); ++j) a[i + j] -= c * b[j];
    }
    trim(a);
    trim(q);
    return {q, a};
}

template <class S>
UPoly<S> monic(UPoly<S> p) {
    trim(p);
    if (p.empty()) return p;
    S inv = inverse(p.back());
    for (auto& c : p) c *= inv;
    return p;
}

/// Monic gcd by the Euclidean algorithm; gcd(0, 0) = 0.
template <class S>
UPoly<S> gcd(UPoly<S> a, UPoly<S> b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        auto r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(std::move(a));
}

template <class S>
S eval(const UPoly<S>& p, const S& x, const S& zero) {
    S acc = zero;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

/// Newton interpolation through (xs[i], ys[i]) with distinct xs.
template <class S>
UPoly<S> interpolate(const std::vector<S>& xs, std::vector<S> ys) {
    const std::size_t n = xs.size();
    if (n == 0) return {};
    const S zero = xs[0] - xs[0];
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = n - 1; i >= j; --i) ys[i] = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - j]);
    UPoly<S> r{ys[n - 1]};
    for (std::size_t i = n - 1; i-- > 0;) {
        // r = r * (x - xs[i]) + ys[i]
        UPoly<S> next(r.size() + 1, zero);
        for (std::size_t k = 0; k < r.size(); ++k) {
            next[k + 1] += r[k];
            next[k] -= r[k] * xs[i];
        }
        next[0] += ys[i];
        r = std::move(next);
    }
    trim(r);
    return r;
}

}  // namespace bisyz::upoly
