#pragma once

// Word-size arithmetic modulo a prime below 2^62 (Montgomery form), and the
// pieces of a black-box determinant pipeline built on it: dense inversion,
// characteristic polynomials, univariate gcd, Newton interpolation on a
// total-degree grid, CRT and rational reconstruction.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bisyz/field.hpp"

namespace bisyz::modp {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using Vec = std::vector<u64>;

class Mont {
public:
    explicit Mont(u64 p) : p_(p) {
        if (p < 3 || p % 2 == 0 || p >= (u64{1} << 62)) throw std::invalid_argument("Mont: odd prime below 2^62 required");
        u64 inv = p;  // p * inv == 1 mod 2^64 by Newton iteration
        for (int i = 0; i < 6; ++i) inv *= 2 - p * inv;
        ninv_ = ~inv + 1;
        r2_ = static_cast<u64>((static_cast<u128>(1) << 64) % p);
        r2_ = static_cast<u64>(static_cast<u128>(r2_) * r2_ % p);
        one_ = to(1);
    }

    u64 prime() const { return p_; }
    u64 one() const { return one_; }
    u64 to(u64 a) const { return mul(a % p_, r2_); }
    u64 from(u64 a) const { return reduce(a); }

    u64 reduce(u128 t) const {
        u64 m = static_cast<u64>(t) * ninv_;
        u64 r = static_cast<u64>((t + static_cast<u128>(m) * p_) >> 64);
        return r >= p_ ? r - p_ : r;
    }
    u64 mul(u64 a, u64 b) const { return reduce(static_cast<u128>(a) * b); }
    u64 add(u64 a, u64 b) const {
        u64 s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p_ - b; }
    u64 neg(u64 a) const { return a ? p_ - a : 0; }
    u64 pow(u64 a, u64 e) const {
        u64 acc = one_;
        while (e) {
            if (e & 1) acc = mul(acc, a);
            a = mul(a, a);
            e >>= 1;
        }
        return acc;
    }
    u64 inv(u64 a) const {
        if (a == 0) throw std::domain_error("Mont: inverse of zero");
        return pow(a, p_ - 2);
    }

    u64 from_zp(const Zp& z) const { return to(z.residue()); }
    Zp to_zp(u64 a) const { return Zp::from_residue(from(a), p_); }
    /// Throws std::domain_error when p divides the denominator.
    u64 from_rational(const Rational& q) const { return from_zp(Field<Zp>(p_).from_rational(q)); }

private:
    u64 p_, ninv_ = 0, r2_ = 0, one_ = 0;
};

/// In-place inverse of the n x n row-major matrix `a`; false if singular.
inline bool invert(const Mont& f, Vec& a, int n) {
    Vec inv(static_cast<std::size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i) * n + i] = f.one();
    for (int c = 0; c < n; ++c) {
        int piv = c;
        while (piv < n && a[static_cast<std::size_t>(piv) * n + c] == 0) ++piv;
        if (piv == n) return false;
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a[static_cast<std::size_t>(piv) * n + j], a[static_cast<std::size_t>(c) * n + j]);
                std::swap(inv[static_cast<std::size_t>(piv) * n + j], inv[static_cast<std::size_t>(c) * n + j]);
            }
        u64* rc = &a[static_cast<std::size_t>(c) * n];
        u64* ic = &inv[static_cast<std::size_t>(c) * n];
        const u64 s = f.inv(rc[c]);
        for (int j = 0; j < n; ++j) {
            rc[j] = f.mul(rc[j], s);
            ic[j] = f.mul(ic[j], s);
        }
        for (int i = 0; i < n; ++i) {
            if (i == c) continue;
            u64* ri = &a[static_cast<std::size_t>(i) * n];
            const u64 x = ri[c];
            if (x == 0) continue;
            u64* ii = &inv[static_cast<std::size_t>(i) * n];
            for (int j = 0; j < n; ++j) {
                ri[j] = f.sub(ri[j], f.mul(x, rc[j]));
                ii[j] = f.sub(ii[j], f.mul(x, ic[j]));
            }
        }
    }
    a = std::move(inv);
    return true;
}

/// (r x n) * (n x c), row-major.
inline Vec matmul(const Mont& f, const Vec& a, const Vec& b, int r, int n, int c) {
    Vec out(static_cast<std::size_t>(r) * c, 0);
    for (int i = 0; i < r; ++i)
        for (int l = 0; l < n; ++l) {
            const u64 x = a[static_cast<std::size_t>(i) * n + l];
            if (x == 0) continue;
            const u64* bl = &b[static_cast<std::size_t>(l) * c];
            u64* oi = &out[static_cast<std::size_t>(i) * c];
            for (int j = 0; j < c; ++j) oi[j] = f.add(oi[j], f.mul(x, bl[j]));
        }
    return out;
}

/// det(x I - h), coefficients low to high, by reduction to Hessenberg form.
inline Vec charpoly(const Mont& f, Vec h, int n) {
    auto at = [&](int i, int j) -> u64& { return h[static_cast<std::size_t>(i) * n + j]; };
    for (int j = 0; j + 2 < n; ++j) {
        int piv = j + 1;
        while (piv < n && at(piv, j) == 0) ++piv;
        if (piv == n) continue;
        if (piv != j + 1) {
            for (int c = 0; c < n; ++c) std::swap(at(piv, c), at(j + 1, c));
            for (int r = 0; r < n; ++r) std::swap(at(r, piv), at(r, j + 1));
        }
        const u64 inv = f.inv(at(j + 1, j));
        for (int r = j + 2; r < n; ++r) {
            const u64 u = f.mul(at(r, j), inv);
            if (u == 0) continue;
            for (int c = j; c < n; ++c) at(r, c) = f.sub(at(r, c), f.mul(u, at(j + 1, c)));
            for (int c = 0; c < n; ++c) at(c, j + 1) = f.add(at(c, j + 1), f.mul(u, at(c, r)));
        }
    }
    std::vector<Vec> p(n + 1);
    p[0] = {f.one()};
    for (int m = 0; m < n; ++m) {
        Vec next(m + 2, 0);
        for (int i = 0; i <= m; ++i) {
            next[i + 1] = f.add(next[i + 1], p[m][i]);
            next[i] = f.sub(next[i], f.mul(at(m, m), p[m][i]));
        }
        u64 t = f.one();
        for (int i = m - 1; i >= 0; --i) {
            t = f.mul(t, at(i + 1, i));
            const u64 c = f.mul(at(i, m), t);
            if (c == 0) continue;
            for (std::size_t l = 0; l < p[i].size(); ++l) next[l] = f.sub(next[l], f.mul(c, p[i][l]));
        }
        p[m + 1] = std::move(next);
    }
    return p[n];
}

inline void trim(Vec& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

/// Monic gcd of univariate polynomials (low to high); empty for gcd(0, 0).
inline Vec gcd(const Mont& f, Vec a, Vec b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        const u64 inv = f.inv(b.back());
        while (a.size() >= b.size()) {
            const u64 q = f.mul(a.back(), inv);
            const std::size_t shift = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = f.sub(a[shift + i], f.mul(q, b[i]));
            trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    if (!a.empty()) {
        const u64 inv = f.inv(a.back());
        for (auto& x : a) x = f.mul(x, inv);
    }
    return a;
}

inline u64 eval(const Mont& f, const Vec& p, u64 x) {
    u64 acc = 0;
    for (std::size_t i = p.size(); i-- > 0;) acc = f.add(f.mul(acc, x), p[i]);
    return acc;
}

/// Univariate interpolation through (xs[i], ys[i]), coefficients low to high.
inline Vec interpolate(const Mont& f, const Vec& xs, Vec ys) {
    const std::size_t n = xs.size();
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = n - 1; i >= j; --i)
            ys[i] = f.mul(f.sub(ys[i], ys[i - 1]), f.inv(f.sub(xs[i], xs[i - j])));
    Vec out(n, 0);
    Vec acc{ys[n - 1]};
    for (std::size_t i = n - 1; i-- > 0;) {
        Vec next(acc.size() + 1, 0);
        for (std::size_t l = 0; l < acc.size(); ++l) {
            next[l + 1] = f.add(next[l + 1], acc[l]);
            next[l] = f.sub(next[l], f.mul(xs[i], acc[l]));
        }
        next[0] = f.add(next[0], ys[i]);
        acc = std::move(next);
    }
    return acc;
}

/// Points (a, b, c) with a + b + c <= degree, addressed by a dense index.
class LowerSet {
public:
    explicit LowerSet(int degree) : degree_(degree), index_((degree + 1) * (degree + 1) * (degree + 1), -1) {
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b)
                for (int c = 0; a + b + c <= degree; ++c) {
                    index_[slot(a, b, c)] = static_cast<int>(points_.size());
                    points_.push_back({a, b, c});
                }
    }
    int degree() const { return degree_; }
    std::size_t size() const { return points_.size(); }
    const std::array<int, 3>& point(std::size_t i) const { return points_[i]; }
    int index(int a, int b, int c) const { return index_[slot(a, b, c)]; }

private:
    std::size_t slot(int a, int b, int c) const {
        return (static_cast<std::size_t>(a) * (degree_ + 1) + b) * (degree_ + 1) + c;
    }
    int degree_;
    std::vector<int> index_;
    std::vector<std::array<int, 3>> points_;
};

/// Given values of a polynomial of total degree <= set.degree() at the
/// points (X[a], Y[b], Z[c]), returns its coefficients of x^a y^b z^c in the
/// same indexing.
inline Vec interpolate_lower_set(const Mont& f, const LowerSet& set, const std::array<Vec, 3>& nodes, Vec v) {
    const int n = set.degree();
    auto line = [&](int axis, int i, int j, int len) {
        std::vector<int> idx(len);
        for (int t = 0; t < len; ++t) {
            std::array<int, 3> p{};
            p[axis] = t;
            p[(axis + 1) % 3] = i;
            p[(axis + 2) % 3] = j;
            idx[t] = set.index(p[0], p[1], p[2]);
        }
        return idx;
    };
    // Divided differences along each axis in turn.
    for (int axis = 0; axis < 3; ++axis) {
        const Vec& X = nodes[axis];
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) {
                const int len = n - i - j + 1;
                auto idx = line(axis, i, j, len);
                for (int s = 1; s < len; ++s)
                    for (int t = len - 1; t >= s; --t)
                        v[idx[t]] = f.mul(f.sub(v[idx[t]], v[idx[t - 1]]), f.inv(f.sub(X[t], X[t - s])));
            }
    }
    // Newton basis to monomials, again axis by axis.
    for (int axis = 0; axis < 3; ++axis) {
        const Vec& X = nodes[axis];
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) {
                const int len = n - i - j + 1;
                auto idx = line(axis, i, j, len);
                Vec acc{v[idx[len - 1]]};
                for (int t = len - 2; t >= 0; --t) {
                    Vec next(acc.size() + 1, 0);
                    for (std::size_t l = 0; l < acc.size(); ++l) {
                        next[l + 1] = f.add(next[l + 1], acc[l]);
                        next[l] = f.sub(next[l], f.mul(X[t], acc[l]));
                    }
                    next[0] = f.add(next[0], v[idx[t]]);
                    acc = std::move(next);
                }
                for (int t = 0; t < len; ++t) v[idx[t]] = acc[t];
            }
    }
    return v;
}

/// x == a mod m and x == b mod p  ->  x mod m*p, with 0 <= x < m*p.
inline void crt_step(mpz_class& a, const mpz_class& m, u64 b, u64 p) {
    const u64 am = mpz_fdiv_ui(a.get_mpz_t(), p);
    const u64 mm = mpz_fdiv_ui(m.get_mpz_t(), p);
    const Zp diff = Zp::from_residue(b, p) - Zp::from_residue(am, p);
    const Zp t = diff / Zp::from_residue(mm, p);
    a += m * mpz_class(static_cast<unsigned long>(t.residue()));
}

/// n/d == u mod m with |n|, d <= sqrt(m/2); nullopt when none exists.
inline std::optional<Rational> rational_reconstruction(const mpz_class& u, const mpz_class& m) {
    mpz_class bound;
    mpz_class half = m / 2;
    mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
    mpz_class r0 = m, r1 = u % m, s0 = 0, s1 = 1;
    if (r1 < 0) r1 += m;
    while (r1 > bound) {
        mpz_class q = r0 / r1;
        mpz_class r2 = r0 - q * r1, s2 = s0 - q * s1;
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    if (s1 == 0 || abs(s1) > bound) return std::nullopt;
    mpz_class g = gcd(r1, s1);
    if (g != 1) return std::nullopt;
    Rational q(r1, s1);
    q.canonicalize();
    return q;
}

}  // namespace bisyz::modp
