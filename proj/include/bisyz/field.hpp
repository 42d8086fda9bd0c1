#pragma once

// Exact scalars: arbitrary-precision rationals (GMP) and residues modulo a
// runtime prime below 2^62.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <gmpxx.h>

namespace bisyz {

using Rational = mpq_class;

/// Residue modulo a prime chosen at runtime.
///
/// A value built without a modulus (e.g. `Zp(0)`, `Zp(1)` created inside
/// Eigen) is an unbound small integer; it binds to the modulus of the first
/// bound operand it meets.
class Zp {
public:
    Zp() = default;
    Zp(long long raw) : raw_(raw) {}  // NOLINT: unbound literal
    Zp(long long value, std::uint64_t modulus) : mod_(modulus) {
        long long r = value % static_cast<long long>(modulus);
        if (r < 0) r += static_cast<long long>(modulus);
        val_ = static_cast<std::uint64_t>(r);
    }
    static Zp from_residue(std::uint64_t residue, std::uint64_t modulus) {
        Zp z;
        z.mod_ = modulus;
        z.val_ = residue;
        return z;
    }

    std::uint64_t residue() const { return mod_ ? val_ : static_cast<std::uint64_t>(raw_); }
    std::uint64_t modulus() const { return mod_; }
    bool bound() const { return mod_ != 0; }
    bool is_zero() const { return mod_ ? val_ == 0 : raw_ == 0; }

    Zp bind(std::uint64_t m) const { return mod_ || m == 0 ? *this : Zp(raw_, m); }

    friend Zp operator+(const Zp& a, const Zp& b) {
        std::uint64_t m = a.mod_ ? a.mod_ : b.mod_;
        if (!m) return Zp(a.raw_ + b.raw_);
        Zp x = a.bind(m), y = b.bind(m);
        std::uint64_t s = x.val_ + y.val_;
        if (s >= m) s -= m;
        return from_residue(s, m);
    }
    friend Zp operator-(const Zp& a, const Zp& b) {
        std::uint64_t m = a.mod_ ? a.mod_ : b.mod_;
        if (!m) return Zp(a.raw_ - b.raw_);
        Zp x = a.bind(m), y = b.bind(m);
        return from_residue(x.val_ >= y.val_ ? x.val_ - y.val_ : x.val_ + m - y.val_, m);
    }
    friend Zp operator*(const Zp& a, const Zp& b) {
        std::uint64_t m = a.mod_ ? a.mod_ : b.mod_;
        if (!m) return Zp(a.raw_ * b.raw_);
        Zp x = a.bind(m), y = b.bind(m);
        return from_residue(static_cast<std::uint64_t>(
                                static_cast<unsigned __int128>(x.val_) * y.val_ % m),
                            m);
    }
    friend Zp operator/(const Zp& a, const Zp& b) { return a * b.inverse(); }
    Zp operator-() const { return Zp(0) - *this; }
    Zp& operator+=(const Zp& o) { return *this = *this + o; }
    Zp& operator-=(const Zp& o) { return *this = *this - o; }
    Zp& operator*=(const Zp& o) { return *this = *this * o; }
    Zp& operator/=(const Zp& o) { return *this = *this / o; }

    Zp pow(std::uint64_t e) const {
        Zp base = *this, acc = Zp::from_residue(1 % mod_, mod_);
        while (e) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }
    Zp inverse() const {
        if (!mod_) throw std::domain_error("Zp: inverse of an unbound value");
        if (val_ == 0) throw std::domain_error("Zp: division by zero");
        return pow(mod_ - 2);
    }

    friend bool operator==(const Zp& a, const Zp& b) {
        std::uint64_t m = a.mod_ ? a.mod_ : b.mod_;
        return a.bind(m).residue() == b.bind(m).residue();
    }
    friend bool operator!=(const Zp& a, const Zp& b) { return !(a == b); }

private:
    std::uint64_t val_ = 0;
    std::uint64_t mod_ = 0;
    long long raw_ = 0;
};

inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
inline bool is_zero(const Zp& x) { return x.is_zero(); }

inline Rational inverse(const Rational& x) {
    if (sgn(x) == 0) throw std::domain_error("division by zero");
    return Rational(1) / x;
}
inline Zp inverse(const Zp& x) { return x.inverse(); }

inline std::string to_string(const Rational& x) { return x.get_str(); }
inline std::string to_string(const Zp& x) { return std::to_string(x.residue()); }

bool is_prime(std::uint64_t n);

/// Field descriptor: builds constants and names the field.
template <class S>
struct Field;

template <>
struct Field<Rational> {
    using Scalar = Rational;
    Rational from_int(long long n) const { return Rational(static_cast<long>(n)); }
    Rational from_rational(const Rational& q) const { return q; }
    Rational zero() const { return Rational(0); }
    Rational one() const { return Rational(1); }
    /// Small signed integer in [-bound, bound].
    template <class Rng>
    Rational random(Rng& rng, long long bound = 1000) const {
        return from_int(static_cast<long long>(rng() % static_cast<std::uint64_t>(2 * bound + 1)) - bound);
    }
    std::string name() const { return "QQ"; }
    friend bool operator==(const Field&, const Field&) { return true; }
};

template <>
struct Field<Zp> {
    using Scalar = Zp;
    std::uint64_t p = 0;

    explicit Field(std::uint64_t prime = 0) : p(prime) {}
    Zp from_int(long long n) const { return Zp(n, p); }
    Zp from_rational(const Rational& q) const {
        unsigned long num = mpz_fdiv_ui(q.get_num_mpz_t(), p);
        unsigned long den = mpz_fdiv_ui(q.get_den_mpz_t(), p);
        if (den == 0) throw std::domain_error("denominator vanishes modulo " + std::to_string(p));
        return Zp::from_residue(num, p) / Zp::from_residue(den, p);
    }
    Zp zero() const { return Zp::from_residue(0, p); }
    Zp one() const { return Zp::from_residue(1, p); }
    template <class Rng>
    Zp random(Rng& rng, long long = 0) const {
        return Zp::from_residue(rng() % p, p);
    }
    std::string name() const { return "GF " + std::to_string(p); }
    friend bool operator==(const Field& a, const Field& b) { return a.p == b.p; }
};

/// The field an element lives in.
inline Field<Rational> field_of(const Rational&) { return {}; }
inline Field<Zp> field_of(const Zp& x) { return Field<Zp>(x.modulus()); }

/// Random prime in [2^61, 2^62).
template <class Rng>
std::uint64_t random_prime(Rng& rng) {
    for (;;) {
        std::uint64_t c = (std::uint64_t{1} << 61) | (rng() & ((std::uint64_t{1} << 61) - 1)) | 1u;
        if (is_prime(c)) return c;
    }
}

}  // namespace bisyz

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
    using Real = mpq_class;
    using NonInteger = mpq_class;
    using Literal = mpq_class;
    using Nested = mpq_class;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 6,
        AddCost = 150,
        MulCost = 100
    };
    static inline Real epsilon() { return 0; }
    static inline Real dummy_precision() { return 0; }
    static inline int digits10() { return 0; }
};

template <>
struct NumTraits<bisyz::Zp> : GenericNumTraits<bisyz::Zp> {
    using Real = bisyz::Zp;
    using NonInteger = bisyz::Zp;
    using Literal = bisyz::Zp;
    using Nested = bisyz::Zp;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 0,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 2,
        MulCost = 8
    };
    static inline Real epsilon() { return 0; }
    static inline Real dummy_precision() { return 0; }
    static inline int digits10() { return 0; }
};

}  // namespace Eigen
