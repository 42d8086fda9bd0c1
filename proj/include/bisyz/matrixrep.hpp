#pragma once

// The representation matrix M of a strand: rows follow the monomial basis of
// A_nu, columns the linear syzygies, entries are linear forms in T1..T4.
// Membership by rank drop, the implicit equation as gcd of maximal minors,
// and two independent checks (substitution, interpolation).

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bisyz/exactla.hpp"
#include "bisyz/modular.hpp"
#include "bisyz/tpoly.hpp"
#include "bisyz/zcomplex.hpp"

namespace bisyz {

using Rng = std::mt19937_64;

template <class S>
struct RepMatrix {
    int nu = 0;
    std::vector<std::uint64_t> row_basis;
    std::vector<Syzygy<S>> syzygies;
    std::array<Matrix<S>, 4> coeff;  // M = T1*coeff[0] + ... + T4*coeff[3]
    Field<S> field;

    int rows() const { return static_cast<int>(row_basis.size()); }
    int cols() const { return static_cast<int>(syzygies.size()); }
    LinearForm<S> entry(int r, int c) const {
        return {coeff[0](r, c), coeff[1](r, c), coeff[2](r, c), coeff[3](r, c)};
    }
    Matrix<S> at(const std::array<S, 4>& point) const {
        Matrix<S> m = coeff[0] * point[0];
        for (int i = 1; i < 4; ++i) m += coeff[i] * point[i];
        return m;
    }
};

template <class S>
RepMatrix<S> build_matrix(const SegreIdeal<S>& I, int nu) {
    if (nu < 0) throw std::invalid_argument("build_matrix: negative nu");
    RepMatrix<S> M{nu, basis(nu).monomials, syzygy_strand(I, nu), {}, I.field};
    const int k = M.rows(), m = M.cols();
    for (int i = 0; i < 4; ++i) {
        M.coeff[i] = zeros<S>(k, m, I.field);
        for (int c = 0; c < m; ++c)
            for (const auto& [key, v] : M.syzygies[c][i].poly().terms()) M.coeff[i](basis(nu).position(key), c) = v;
    }
    return M;
}

/// Sum_i a_i T_i for column c, with a_i read back from the matrix.
template <class S>
std::array<SegreElem<S>, 4> column_syzygy(const RepMatrix<S>& M, int c) {
    std::array<SegreElem<S>, 4> a;
    for (int i = 0; i < 4; ++i) {
        std::vector<typename Poly<S>::Term> terms;
        for (int r = 0; r < M.rows(); ++r)
            if (!is_zero(M.coeff[i](r, c))) terms.emplace_back(M.row_basis[r], M.coeff[i](r, c));
        a[i] = SegreElem<S>::raw(Poly<S>::from_terms(Ring::Segre, std::move(terms)), M.nu);
    }
    return a;
}

struct Membership {
    bool on_surface = false;
    int rank = 0;
    int k = 0;
};

template <class S>
Membership membership(const RepMatrix<S>& M, const std::array<S, 4>& point) {
    if (std::all_of(point.begin(), point.end(), [](const S& x) { return is_zero(x); }))
        throw std::invalid_argument("membership: (0,0,0,0) is not a projective point");
    Membership out;
    out.k = M.rows();
    out.rank = rank(M.at(point));
    out.on_surface = out.rank < out.k;
    return out;
}

/// All sampled maximal minors vanished: M has lower rank than its row count.
struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Strategy {
    bool all = false;
    int n = 4;  // minors per batch for the sampled strategy
};

/// "all" or "sampled:N".
inline Strategy parse_strategy(std::string_view s) {
    if (s == "all") return {true, 0};
    if (s.substr(0, 8) == "sampled:") {
        std::string num(s.substr(8));
        if (!num.empty() && num.size() < 7 && std::all_of(num.begin(), num.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            int n = std::stoi(num);
            if (n >= 1) return {false, n};
        }
    }
    if (s == "sampled") return {};
    throw std::invalid_argument("strategy must be 'all' or 'sampled:N' with N >= 1, got '" + std::string(s) + "'");
}

namespace detail {

using Subset = std::vector<int>;

inline double binomial(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline std::vector<Subset> all_subsets(int m, int k) {
    std::vector<Subset> out;
    Subset s(k);
    std::iota(s.begin(), s.end(), 0);
    for (;;) {
        out.push_back(s);
        int i = k - 1;
        while (i >= 0 && s[i] == m - k + i) --i;
        if (i < 0) break;
        ++s[i];
        for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
    }
    return out;
}

// Columns picked greedily in random order while they stay independent at a
// random point, so the minor on them does not vanish there; nullopt when the
// matrix has rank below k at that point.
template <class S>
std::optional<Subset> random_basis_subset(const Matrix<Zp>& at, Rng& rng) {
    const int k = static_cast<int>(at.rows()), m = static_cast<int>(at.cols());
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i + 1 < m; ++i) std::swap(order[i], order[i + rng() % static_cast<std::uint64_t>(m - i)]);
    std::vector<std::vector<Zp>> reduced;
    std::vector<int> pivot;
    Subset chosen;
    for (int c : order) {
        std::vector<Zp> v(k);
        for (int r = 0; r < k; ++r) v[r] = at(r, c);
        for (std::size_t b = 0; b < reduced.size(); ++b) {
            if (is_zero(v[pivot[b]])) continue;
            const Zp f = v[pivot[b]];
            for (int r = 0; r < k; ++r) v[r] -= f * reduced[b][r];
        }
        int piv = 0;
        while (piv < k && is_zero(v[piv])) ++piv;
        if (piv == k) continue;
        const Zp inv = v[piv].inverse();
        for (auto& x : v) x *= inv;
        reduced.push_back(std::move(v));
        pivot.push_back(piv);
        chosen.push_back(c);
        if (static_cast<int>(chosen.size()) == k) break;
    }
    if (static_cast<int>(chosen.size()) < k) return std::nullopt;
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

// Up to n distinct column subsets with nonvanishing minors (all subsets when
// there are no more than n), sorted for a canonical fold order. Throws
// RankDeficient when M has rank below k at random points.
template <class S>
std::vector<Subset> sample_subsets(const RepMatrix<S>& M, Rng& rng, int n) {
    const int k = M.rows(), m = M.cols();
    if (binomial(m, k) <= n) return all_subsets(m, k);
    Field<Zp> F;
    if constexpr (std::is_same_v<S, Zp>)
        F = M.field;
    else
        F = Field<Zp>(random_prime(rng));
    Matrix<Zp> at;
    for (int attempt = 0;; ++attempt) {
        try {
            at = zeros<Zp>(k, m, F);
            for (int i = 0; i < 4; ++i) {
                const Zp x = F.random(rng);
                for (int r = 0; r < k; ++r)
                    for (int c = 0; c < m; ++c) {
                        if constexpr (std::is_same_v<S, Zp>)
                            at(r, c) += x * M.coeff[i](r, c);
                        else
                            at(r, c) += x * F.from_rational(M.coeff[i](r, c));
                    }
            }
        } catch (const std::domain_error&) {
            if constexpr (!std::is_same_v<S, Zp>) F = Field<Zp>(random_prime(rng));
            continue;
        }
        if (rank(at) == k) break;
        if (attempt >= 3) throw RankDeficient("M has rank below " + std::to_string(k) + " at random points; every maximal minor vanishes");
    }
    std::vector<Subset> out;
    for (int tries = 0; static_cast<int>(out.size()) < n && tries < 20 * n; ++tries) {
        auto s = random_basis_subset<S>(at, rng);
        if (s && std::find(out.begin(), out.end(), *s) == out.end()) out.push_back(std::move(*s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

template <class S>
Poly<S> symbolic_minor(const RepMatrix<S>& M, const Subset& cols) {
    const int k = M.rows();
    PolyGrid<S> g(k, std::vector<Poly<S>>(k, Poly<S>(Ring::T)));
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) g[r][c] = to_poly(M.entry(r, cols[c]));
    return polydet(std::move(g), Ring::T, M.field);
}

// Gcd of the minors on `cols`, folded in the given order; zero if all vanish.
template <class S>
Poly<S> fold_minors(const RepMatrix<S>& M, const std::vector<Subset>& cols) {
    Poly<S> g(Ring::T);
    for (const auto& c : cols) {
        Poly<S> d = symbolic_minor(M, c);
        if (d.is_zero()) continue;
        g = g.is_zero() ? d.monic() : mvgcd(g, d);
    }
    return g;
}

template <class S>
Poly<S> symbolic_gcd(const RepMatrix<S>& M, const Strategy& st, Rng& rng) {
    const int k = M.rows(), m = M.cols();
    if (st.all) {
        Poly<S> g = fold_minors(M, all_subsets(m, k));
        if (g.is_zero()) throw RankDeficient("every maximal minor vanishes");
        return g;
    }
    int n = st.n;
    std::vector<Subset> used = sample_subsets(M, rng, n);
    Poly<S> g = fold_minors(M, used);
    if (g.is_zero()) throw RankDeficient("all " + std::to_string(used.size()) + " sampled maximal minors vanish");
    for (int round = 0; round < 8; ++round) {
        if (binomial(m, k) <= static_cast<double>(used.size())) return g;
        auto fresh = sample_subsets(M, rng, n);
        bool ok = true;
        for (const auto& c : fresh) {
            Poly<S> d = symbolic_minor(M, c);
            if (d.is_zero()) continue;
            if (!d.divisible_by(g)) {
                ok = false;
                g = mvgcd(g, d);
            }
        }
        if (ok) return g;
        used.insert(used.end(), fresh.begin(), fresh.end());
        n *= 2;
    }
    throw std::runtime_error("gcd of sampled minors did not stabilize");
}

// Restrictions of maximal minors to lines through a fixed base point P0,
// computed modulo one prime. For a column subset S with A = M_S(P0)
// invertible, M_S(P0 + lambda Q) = A (I + lambda A^{-1} M_S(Q)), so the
// restriction divided by the minor at P0 is det(I + lambda C) with
// C = sum_i Q_i A^{-1} K_{S,i}.
class LineMinors {
public:
    LineMinors(const modp::Mont& f, const std::array<modp::Vec, 4>& K, int k, int m, const std::array<modp::u64, 4>& base)
        : f_(f), K_(K), k_(k), m_(m), base_(base) {}

    // False when the minor vanishes at the base point.
    bool add(const Subset& cols) {
        const std::size_t kk = static_cast<std::size_t>(k_) * k_;
        std::array<modp::Vec, 4> ks;
        modp::Vec a(kk, 0);
        for (int i = 0; i < 4; ++i) {
            ks[i].assign(kk, 0);
            for (int r = 0; r < k_; ++r)
                for (int c = 0; c < k_; ++c) {
                    const modp::u64 x = K_[i][static_cast<std::size_t>(r) * m_ + cols[c]];
                    ks[i][static_cast<std::size_t>(r) * k_ + c] = x;
                    a[static_cast<std::size_t>(r) * k_ + c] = f_.add(a[static_cast<std::size_t>(r) * k_ + c], f_.mul(base_[i], x));
                }
        }
        if (!modp::invert(f_, a, k_)) return false;
        std::array<modp::Vec, 4> w;
        for (int i = 0; i < 4; ++i) w[i] = modp::matmul(f_, a, ks[i], k_, k_, k_);
        prepared_.push_back(std::move(w));
        return true;
    }
    std::size_t size() const { return prepared_.size(); }

    // det(I + lambda C) for prepared subset j, low to high.
    modp::Vec restricted(std::size_t j, const std::array<modp::u64, 4>& q) const {
        const std::size_t kk = static_cast<std::size_t>(k_) * k_;
        modp::Vec c(kk, 0);
        for (int i = 0; i < 4; ++i) {
            if (q[i] == 0) continue;
            const auto& w = prepared_[j][i];
            for (std::size_t t = 0; t < kk; ++t) c[t] = f_.add(c[t], f_.mul(q[i], w[t]));
        }
        modp::Vec cp = modp::charpoly(f_, std::move(c), k_);
        modp::Vec out(k_ + 1);
        for (int i = 0; i <= k_; ++i) out[i] = i % 2 ? f_.neg(cp[k_ - i]) : cp[k_ - i];
        modp::trim(out);
        return out;
    }

    // Moves the subsets that lower the gcd degree on the line through q to
    // the front, so later lines reach the target degree sooner.
    void prioritize(const std::array<modp::u64, 4>& q) {
        std::vector<std::size_t> useful, rest;
        modp::Vec g;
        for (std::size_t j = 0; j < prepared_.size(); ++j) {
            modp::Vec next = g.empty() ? restricted(j, q) : modp::gcd(f_, g, restricted(j, q));
            if (g.empty() || next.size() < g.size())
                useful.push_back(j);
            else
                rest.push_back(j);
            g = std::move(next);
        }
        useful.insert(useful.end(), rest.begin(), rest.end());
        std::vector<std::array<modp::Vec, 4>> reordered;
        for (auto j : useful) reordered.push_back(std::move(prepared_[j]));
        prepared_ = std::move(reordered);
    }

    // Gcd of the restrictions, scaled to constant term one. With a target
    // degree, stops as soon as the gcd is no larger.
    modp::Vec line_gcd(const std::array<modp::u64, 4>& q, int target = -1) const {
        modp::Vec g;
        for (std::size_t j = 0; j < prepared_.size(); ++j) {
            g = g.empty() ? restricted(j, q) : modp::gcd(f_, std::move(g), restricted(j, q));
            if (target >= 0 && static_cast<int>(g.size()) - 1 <= target) break;
        }
        const modp::u64 inv = f_.inv(g[0]);
        for (auto& x : g) x = f_.mul(x, inv);
        return g;
    }

private:
    const modp::Mont& f_;
    const std::array<modp::Vec, 4>& K_;
    int k_, m_;
    std::array<modp::u64, 4> base_;
    std::vector<std::array<modp::Vec, 4>> prepared_;
};

struct ModImage {
    int degree = -1;                // -1: all minors vanished at the base point; -2: failed
    std::vector<modp::u64> coeffs;  // plain residues in LowerSet(degree) order, x^a y^b z^c
    std::uint64_t lead = 0;         // leading monomial of the homogenization (graded lex)
};

inline std::uint64_t lower_set_key(const std::array<int, 3>& p, int degree) {
    return mono::make({p[0], p[1], p[2], degree - p[0] - p[1] - p[2]});
}

inline modp::u64 random_nonzero(Rng& rng, modp::u64 p) { return 1 + rng() % (p - 1); }

// D mod p, normalized monic, from the minors on `cols`. `degree` fixes the
// expected degree when known from an earlier prime.
inline ModImage modular_image(const modp::Mont& f, const std::array<modp::Vec, 4>& K, int k, int m,
                              const std::vector<Subset>& cols, Rng& rng, int degree = -1) {
    const modp::u64 p = f.prime();
    std::array<modp::u64, 4> base;
    for (auto& x : base) x = f.to(random_nonzero(rng, p));
    LineMinors lines(f, K, k, m, base);
    for (const auto& c : cols) lines.add(c);
    ModImage img;
    if (lines.size() == 0) return img;

    std::array<modp::u64, 4> probe;
    for (auto& x : probe) x = f.to(random_nonzero(rng, p));
    const int found = static_cast<int>(lines.line_gcd(probe).size()) - 1;
    img.degree = degree >= 0 ? std::min(degree, found) : found;
    lines.prioritize(probe);

    modp::LowerSet set(img.degree);
    std::array<modp::Vec, 3> nodes;
    for (auto& axis : nodes) {
        axis.clear();
        while (static_cast<int>(axis.size()) <= img.degree) {
            modp::u64 x = f.to(random_nonzero(rng, p));
            if (std::find(axis.begin(), axis.end(), x) == axis.end()) axis.push_back(x);
        }
    }
    modp::Vec values(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& pt = set.point(i);
        std::array<modp::u64, 4> q{nodes[0][pt[0]], nodes[1][pt[1]], nodes[2][pt[2]], f.one()};
        modp::Vec g = lines.line_gcd(q, img.degree);
        const int dg = static_cast<int>(g.size()) - 1;
        if (dg > img.degree) {
            img.degree = -2;  // no subset combination isolates the determinant on this line
            return img;
        }
        values[i] = dg == img.degree ? g[img.degree] : 0;
    }
    modp::Vec mono = modp::interpolate_lower_set(f, set, nodes, std::move(values));
    std::size_t lead = set.size();
    for (std::size_t i = 0; i < set.size(); ++i)
        if (mono[i] != 0 && (lead == set.size() || lower_set_key(set.point(i), img.degree) >
                                                       lower_set_key(set.point(lead), img.degree)))
            lead = i;
    if (lead == set.size()) {
        img.degree = -2;
        return img;
    }
    const modp::u64 inv = f.inv(mono[lead]);
    img.coeffs.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) img.coeffs[i] = f.from(f.mul(mono[i], inv));
    img.lead = lower_set_key(set.point(lead), img.degree);
    return img;
}

template <class S>
std::array<modp::Vec, 4> reduce_matrix(const RepMatrix<S>& M, const modp::Mont& f) {
    std::array<modp::Vec, 4> K;
    for (int i = 0; i < 4; ++i) {
        K[i].resize(static_cast<std::size_t>(M.rows()) * M.cols());
        for (int r = 0; r < M.rows(); ++r)
            for (int c = 0; c < M.cols(); ++c) {
                const auto& x = M.coeff[i](r, c);
                if constexpr (std::is_same_v<S, Rational>)
                    K[i][static_cast<std::size_t>(r) * M.cols() + c] = f.from_rational(x);
                else
                    K[i][static_cast<std::size_t>(r) * M.cols() + c] = f.from_zp(x);
            }
    }
    return K;
}

template <class S, class Coeff>
Poly<S> image_to_poly(const std::vector<Coeff>& coeffs, int degree) {
    modp::LowerSet set(degree);
    std::vector<typename Poly<S>::Term> terms;
    for (std::size_t i = 0; i < set.size(); ++i)
        if (!is_zero(coeffs[i])) terms.emplace_back(lower_set_key(set.point(i), degree), coeffs[i]);
    return Poly<S>::from_terms(Ring::T, std::move(terms));
}

// Restricts D and the minors on `cols` to a random line P1 + lambda P2
// modulo p and checks that D divides every restricted minor. Throws
// std::domain_error when p divides a denominator.
template <class S>
bool check_on_line(const RepMatrix<S>& M, const Poly<S>& D, const modp::Mont& f, const std::vector<Subset>& cols,
                   Rng& rng) {
    const std::array<modp::Vec, 4> K = reduce_matrix(M, f);
    const modp::u64 p = f.prime();
    std::array<modp::u64, 4> p1, p2;
    for (auto& x : p1) x = f.to(random_nonzero(rng, p));
    for (auto& x : p2) x = f.to(random_nonzero(rng, p));
    LineMinors lines(f, K, M.rows(), M.cols(), p1);
    for (const auto& c : cols) lines.add(c);
    if (lines.size() == 0) return false;
    const int delta = D.degree();
    std::vector<std::pair<std::uint64_t, modp::u64>> terms;
    for (const auto& [key, c] : D.terms()) {
        if constexpr (std::is_same_v<S, Rational>)
            terms.emplace_back(key, f.from_rational(c));
        else
            terms.emplace_back(key, f.from_zp(c));
    }
    // D(P1 + lambda P2) by evaluation and interpolation.
    modp::Vec xs, ys;
    for (int j = 0; j <= delta; ++j) {
        const modp::u64 lam = f.to(static_cast<modp::u64>(j + 1));
        std::array<modp::Vec, 4> pw;
        for (int i = 0; i < 4; ++i) {
            const modp::u64 x = f.add(p1[i], f.mul(lam, p2[i]));
            pw[i] = {f.one()};
            for (int e = 1; e <= delta; ++e) pw[i].push_back(f.mul(pw[i].back(), x));
        }
        modp::u64 acc = 0;
        for (const auto& [key, c] : terms) {
            modp::u64 t = c;
            for (int i = 0; i < 4; ++i) t = f.mul(t, pw[i][mono::exp(key, i)]);
            acc = f.add(acc, t);
        }
        xs.push_back(lam);
        ys.push_back(acc);
    }
    modp::Vec h = modp::interpolate(f, xs, ys);
    modp::trim(h);
    if (static_cast<int>(h.size()) - 1 != delta) return false;
    for (std::size_t j = 0; j < lines.size(); ++j) {
        modp::Vec r = lines.restricted(j, p2);
        if (modp::gcd(f, r, h).size() != h.size()) return false;
    }
    return true;
}

// Degree of the gcd of the restricted minors on `a` and on `a` plus `b`,
// along one random line modulo a random prime.
template <class S>
std::pair<int, int> line_degrees(const RepMatrix<S>& M, const std::vector<Subset>& a, const std::vector<Subset>& b,
                                 Rng& rng) {
    for (;;) {
        modp::u64 p = 0;
        if constexpr (std::is_same_v<S, Zp>)
            p = M.field.p;
        else
            p = random_prime(rng);
        modp::Mont f(p);
        std::array<modp::Vec, 4> K;
        try {
            K = reduce_matrix(M, f);
        } catch (const std::domain_error&) {
            continue;
        }
        std::array<modp::u64, 4> base, dir;
        for (auto& x : base) x = f.to(random_nonzero(rng, p));
        for (auto& x : dir) x = f.to(random_nonzero(rng, p));
        LineMinors first(f, K, M.rows(), M.cols(), base), both(f, K, M.rows(), M.cols(), base);
        for (const auto& c : a) {
            first.add(c);
            both.add(c);
        }
        for (const auto& c : b) both.add(c);
        if (first.size() == 0 || both.size() == 0) return {-1, -1};
        return {static_cast<int>(first.line_gcd(dir).size()) - 1, static_cast<int>(both.line_gcd(dir).size()) - 1};
    }
}

inline void merge_subsets(std::vector<Subset>& into, const std::vector<Subset>& more) {
    into.insert(into.end(), more.begin(), more.end());
    std::sort(into.begin(), into.end());
    into.erase(std::unique(into.begin(), into.end()), into.end());
}

template <class S>
bool passes_line_checks(const RepMatrix<S>& M, const Poly<S>& D, const std::vector<Subset>& cols, Rng& rng) {
    for (int attempt = 0; attempt < 8; ++attempt) {
        modp::u64 p = 0;
        if constexpr (std::is_same_v<S, Zp>)
            p = M.field.p;
        else
            p = random_prime(rng);
        modp::Mont f(p);
        try {
            return check_on_line(M, D, f, cols, rng) && check_on_line(M, D, f, cols, rng);
        } catch (const std::domain_error&) {
            if constexpr (std::is_same_v<S, Zp>) throw;
        }
    }
    throw std::runtime_error("no usable prime for the line check");
}

template <class S>
Poly<S> modular_gcd(const RepMatrix<S>& M, const Strategy& st, Rng& rng) {
    const int k = M.rows(), m = M.cols();
    constexpr double kMaxAll = 20000;
    if (st.all && binomial(m, k) > kMaxAll)
        throw std::invalid_argument("strategy 'all' would need " + std::to_string(static_cast<long long>(binomial(m, k))) +
                                    " minors; use sampled:N");
    int n = st.n;
    std::vector<Subset> cols = st.all ? all_subsets(m, k) : sample_subsets(M, rng, n);
    // Grow the batch until a fresh batch no longer lowers the gcd degree.
    for (int round = 0; !st.all && round < 8; ++round) {
        auto fresh = sample_subsets(M, rng, n);
        auto [before, after] = line_degrees(M, cols, fresh, rng);
        if (before < 0) throw RankDeficient("all sampled maximal minors vanish");
        if (after == before) break;
        merge_subsets(cols, fresh);
        n *= 2;
    }

    for (int round = 0; round < 6; ++round) {
        Poly<S> D(Ring::T);
        if constexpr (std::is_same_v<S, Zp>) {
            modp::Mont f(M.field.p);
            ModImage img = modular_image(f, reduce_matrix(M, f), k, m, cols, rng);
            if (img.degree == -1) throw RankDeficient("all sampled maximal minors vanish");
            if (img.degree >= 0) {
                std::vector<Zp> z;
                for (auto x : img.coeffs) z.push_back(Zp::from_residue(x, f.prime()));
                D = image_to_poly<Zp>(z, img.degree);
            }
        } else {
            int degree = -1, zero_images = 0;
            std::uint64_t lead = 0;
            std::vector<mpz_class> acc;
            mpz_class modulus = 1;
            std::optional<std::vector<Rational>> candidate;
            for (int prime_count = 0; prime_count < 80; ++prime_count) {
                modp::Mont f(random_prime(rng));
                std::array<modp::Vec, 4> K;
                try {
                    K = reduce_matrix(M, f);
                } catch (const std::domain_error&) {
                    continue;
                }
                ModImage img = modular_image(f, K, k, m, cols, rng, degree);
                if (img.degree == -1) {
                    if (++zero_images >= 2) throw RankDeficient("all sampled maximal minors vanish");
                    continue;
                }
                if (img.degree < 0) continue;
                // Unlucky primes raise the degree or lower the leading monomial.
                const bool better = degree < 0 || img.degree < degree || (img.degree == degree && img.lead > lead);
                const bool worse = !better && (img.degree > degree || img.lead < lead);
                if (worse) continue;
                if (better) {
                    degree = img.degree;
                    lead = img.lead;
                    acc.assign(img.coeffs.size(), 0);
                    modulus = 1;
                    candidate.reset();
                } else if (candidate) {
                    bool agree = true;
                    for (std::size_t i = 0; i < acc.size() && agree; ++i) {
                        try {
                            agree = Field<Zp>(f.prime()).from_rational((*candidate)[i]).residue() == img.coeffs[i];
                        } catch (const std::domain_error&) {
                            agree = false;
                        }
                    }
                    if (agree) break;
                    candidate.reset();
                }
                for (std::size_t i = 0; i < acc.size(); ++i) modp::crt_step(acc[i], modulus, img.coeffs[i], f.prime());
                modulus *= mpz_class(std::to_string(f.prime()));
                std::vector<Rational> rec;
                rec.reserve(acc.size());
                for (const auto& a : acc) {
                    auto q = modp::rational_reconstruction(a, modulus);
                    if (!q) break;
                    rec.push_back(*q);
                }
                if (rec.size() == acc.size()) candidate = std::move(rec);
            }
            if (!candidate) throw std::runtime_error("modular reconstruction of the determinant did not converge");
            D = image_to_poly<Rational>(*candidate, degree);
        }

        if (!D.is_zero()) {
            auto fresh = st.all ? cols : sample_subsets(M, rng, n);
            if (passes_line_checks(M, D, fresh, rng)) return D;
            if (st.all) throw std::runtime_error("gcd of all minors failed its line check");
            merge_subsets(cols, fresh);
        }
        n *= 2;
        if (!st.all) merge_subsets(cols, sample_subsets(M, rng, n));
    }
    throw std::runtime_error("gcd of sampled minors did not stabilize");
}

template <class S>
bool use_symbolic(const RepMatrix<S>& M) {
    if constexpr (std::is_same_v<S, Zp>) {
        if (M.field.p < (std::uint64_t{1} << 30)) return true;
    }
    return M.rows() <= 4;
}

}  // namespace detail

/// Gcd of the k x k minors of M, monic in graded lex order.
template <class S>
Poly<S> extract_gcd_of_minors(const RepMatrix<S>& M, const Strategy& strategy, Rng& rng) {
    if (M.cols() < M.rows())
        throw RankDeficient("M has " + std::to_string(M.cols()) + " columns but " + std::to_string(M.rows()) +
                            " rows; no maximal minors of size k");
    if (M.rows() == 0) return Poly<S>(Ring::T, M.field.one());
    return detail::use_symbolic(M) ? detail::symbolic_gcd(M, strategy, rng) : detail::modular_gcd(M, strategy, rng);
}

/// Monomials of total degree n in T1..T4, graded lex descending.
inline std::vector<std::uint64_t> monomials_of_degree(int n) {
    std::vector<std::uint64_t> out;
    for (int a = n; a >= 0; --a)
        for (int b = n - a; b >= 0; --b)
            for (int c = n - a - b; c >= 0; --c) out.push_back(mono::make({a, b, c, n - a - b - c}));
    return out;
}

namespace detail {

template <class S>
std::array<S, 4> random_parameter(const Field<S>& field, Rng& rng) {
    return {field.random(rng, 40), field.random(rng, 40), field.random(rng, 40), field.random(rng, 40)};
}

template <class S>
Matrix<S> vandermonde(const std::vector<std::array<S, 4>>& values, const std::vector<std::uint64_t>& monos,
                      const Field<S>& field, int degree) {
    Matrix<S> v = zeros<S>(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(monos.size()), field);
    for (std::size_t r = 0; r < values.size(); ++r) {
        std::array<std::vector<S>, 4> pw;
        for (int i = 0; i < 4; ++i) {
            pw[i] = {field.one()};
            for (int e = 1; e <= degree; ++e) pw[i].push_back(pw[i].back() * values[r][i]);
        }
        for (std::size_t c = 0; c < monos.size(); ++c)
            v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                pw[0][mono::exp(monos[c], 0)] * pw[1][mono::exp(monos[c], 1)] * pw[2][mono::exp(monos[c], 2)] *
                pw[3][mono::exp(monos[c], 3)];
    }
    return v;
}

}  // namespace detail

namespace detail {

// Kernel of a rational matrix known to have nullity one modulo `p0`: the
// kernel vector is reconstructed from modular images and accepted only if it
// annihilates the matrix exactly. Nullity one modulo a prime bounds the
// rational nullity by one, so success certifies a one-dimensional kernel.
inline std::optional<std::vector<Rational>> rational_kernel_vector(const Matrix<Rational>& v, Rng& rng) {
    const Eigen::Index cols = v.cols();
    std::vector<mpz_class> acc(cols, 0);
    mpz_class modulus = 1;
    std::optional<Eigen::Index> lead;
    for (int prime_count = 0; prime_count < 200; ++prime_count) {
        Field<Zp> F(random_prime(rng));
        Matrix<Zp> vp(v.rows(), cols);
        try {
            for (Eigen::Index r = 0; r < v.rows(); ++r)
                for (Eigen::Index c = 0; c < cols; ++c) vp(r, c) = F.from_rational(v(r, c));
        } catch (const std::domain_error&) {
            continue;
        }
        Matrix<Zp> kernel = nullspace(vp, F);
        if (kernel.cols() != 1) return std::nullopt;
        Eigen::Index first = 0;
        while (is_zero(kernel(first, 0))) ++first;
        if (lead && first != *lead) {
            if (first > *lead) continue;  // unlucky prime
            acc.assign(cols, 0);
            modulus = 1;
        }
        lead = first;
        const Zp inv = kernel(first, 0).inverse();
        for (Eigen::Index c = 0; c < cols; ++c) modp::crt_step(acc[c], modulus, (kernel(c, 0) * inv).residue(), F.p);
        modulus *= mpz_class(std::to_string(F.p));
        std::vector<Rational> rec;
        for (const auto& x : acc) {
            auto q = modp::rational_reconstruction(x, modulus);
            if (!q) break;
            rec.push_back(*q);
        }
        if (rec.size() != static_cast<std::size_t>(cols)) continue;
        bool exact = true;
        for (Eigen::Index r = 0; r < v.rows() && exact; ++r) {
            Rational dot = 0;
            for (Eigen::Index c = 0; c < cols; ++c)
                if (sgn(rec[c]) != 0) dot += v(r, c) * rec[c];
            exact = sgn(dot) == 0;
        }
        if (exact) return rec;
    }
    throw std::runtime_error("kernel reconstruction did not converge");
}

}  // namespace detail

/// Least-degree polynomial vanishing on the image, found as the first degree
/// whose Vandermonde system on sampled image points has a one-dimensional
/// kernel. Points come from `rng`.
template <class S>
Poly<S> interpolation_oracle(const Parametrization<S>& P, int max_degree, Rng& rng) {
    if (max_degree < 1) throw std::invalid_argument("interpolation_oracle: max_degree must be >= 1");
    for (int deg = 1; deg <= max_degree; ++deg) {
        const auto monos = monomials_of_degree(deg);
        const std::size_t count = 2 * monos.size();
        std::vector<std::array<S, 4>> values;
        values.reserve(count);
        while (values.size() < count) {
            auto q = P.eval(detail::random_parameter(P.field, rng));
            if (std::any_of(q.begin(), q.end(), [](const S& x) { return !is_zero(x); })) values.push_back(q);
        }
        Matrix<S> v = detail::vandermonde(values, monos, P.field, deg);
        std::vector<S> kernel;
        if constexpr (std::is_same_v<S, Rational>) {
            Field<Zp> F(random_prime(rng));
            Matrix<Zp> vp(v.rows(), v.cols());
            bool usable = true;
            for (Eigen::Index r = 0; r < v.rows() && usable; ++r)
                for (Eigen::Index c = 0; c < v.cols() && usable; ++c) {
                    try {
                        vp(r, c) = F.from_rational(v(r, c));
                    } catch (const std::domain_error&) {
                        usable = false;
                    }
                }
            const int nullity = usable ? static_cast<int>(v.cols()) - rank(vp) : -1;
            if (nullity == 0) continue;
            std::optional<std::vector<Rational>> vec;
            if (nullity == 1) vec = detail::rational_kernel_vector(v, rng);
            if (vec) {
                kernel = std::move(*vec);
            } else {
                Matrix<Rational> k = nullspace(v, P.field);
                if (k.cols() != 1) continue;
                for (Eigen::Index c = 0; c < k.rows(); ++c) kernel.push_back(k(c, 0));
            }
        } else {
            Matrix<S> k = nullspace(v, P.field);
            if (k.cols() != 1) continue;
            for (Eigen::Index c = 0; c < k.rows(); ++c) kernel.push_back(k(c, 0));
        }
        std::vector<typename Poly<S>::Term> terms;
        for (std::size_t c = 0; c < monos.size(); ++c)
            if (!is_zero(kernel[c])) terms.emplace_back(monos[c], kernel[c]);
        return Poly<S>::from_terms(Ring::T, std::move(terms)).monic();
    }
    throw std::runtime_error("no implicit equation of degree <= " + std::to_string(max_degree) + " found by interpolation");
}

namespace detail {

// F(f1..f4) expanded in s,u,t,v.
template <class S>
Poly<S> substitute(const Poly<S>& F, const Parametrization<S>& P) {
    const int deg = std::max(0, F.degree());
    std::array<std::vector<Poly<S>>, 4> pw;
    for (int i = 0; i < 4; ++i) {
        pw[i] = {Poly<S>(Ring::Param, P.field.one())};
        for (int e = 1; e <= deg; ++e) pw[i].push_back(pw[i].back() * P.f[i].poly());
    }
    Poly<S> acc(Ring::Param);
    for (const auto& [key, c] : F.terms()) {
        Poly<S> t = pw[0][mono::exp(key, 0)] * c;
        for (int i = 1; i < 4; ++i) t = t * pw[i][mono::exp(key, i)];
        acc += t;
    }
    return acc;
}

// F(f) restricted to u = v = 1 and evaluated on an (a+1) x (b+1) grid modulo
// one prime; all values zero means F(f) vanishes modulo p.
template <class S>
bool vanishes_on_grid(const Poly<S>& F, const Parametrization<S>& P, const modp::Mont& f) {
    const int deg = F.degree();
    const int a = deg * P.d1(), b = deg * P.d2();
    auto red = [&](const S& x) {
        if constexpr (std::is_same_v<S, Rational>)
            return f.from_rational(x);
        else
            return f.from_zp(x);
    };
    std::vector<std::pair<std::uint64_t, modp::u64>> fterms, terms[4];
    for (const auto& [key, c] : F.terms()) fterms.emplace_back(key, red(c));
    for (int i = 0; i < 4; ++i)
        for (const auto& [key, c] : P.f[i].poly().terms()) terms[i].emplace_back(key, red(c));
    for (int x = 0; x <= a; ++x) {
        const modp::u64 xs = f.to(static_cast<modp::u64>(x + 2));
        for (int y = 0; y <= b; ++y) {
            const modp::u64 ys = f.to(static_cast<modp::u64>(y + 3));
            std::array<modp::Vec, 4> pw;
            for (int i = 0; i < 4; ++i) {
                modp::u64 v = 0;
                for (const auto& [key, c] : terms[i])
                    v = f.add(v, f.mul(c, f.mul(f.pow(xs, mono::exp(key, 0)), f.pow(ys, mono::exp(key, 2)))));
                pw[i] = {f.one()};
                for (int e = 1; e <= deg; ++e) pw[i].push_back(f.mul(pw[i].back(), v));
            }
            modp::u64 acc = 0;
            for (const auto& [key, c] : fterms)
                acc = f.add(acc, f.mul(f.mul(c, f.mul(pw[0][mono::exp(key, 0)], pw[1][mono::exp(key, 1)])),
                                       f.mul(pw[2][mono::exp(key, 2)], pw[3][mono::exp(key, 3)])));
            if (acc != 0) return false;
        }
    }
    return true;
}

inline mpz_class abs_sum_numerators(const std::vector<Rational>& cs, const mpz_class& scale) {
    mpz_class s = 0;
    for (const auto& c : cs) s += abs(mpz_class(c * scale));
    return s;
}

}  // namespace detail

/// True iff F(f1, f2, f3, f4) is the zero polynomial. Small cases expand
/// exactly; large ones evaluate on a grid that determines the polynomial,
/// modulo enough primes to exceed a bound on its integer coefficients.
template <class S>
bool verify_substitution(const Poly<S>& F, const Parametrization<S>& P) {
    if (F.ring() != Ring::T) throw std::invalid_argument("verify_substitution: equation must be in T1..T4");
    if (F.is_zero()) return true;
    const int deg = F.degree();
    const double work = static_cast<double>(F.size()) * (deg * P.d1() + 1) * (deg * P.d2() + 1);
    if (work < 2e6 || !F.is_homogeneous()) return detail::substitute(F, P).is_zero();

    if constexpr (std::is_same_v<S, Zp>) {
        const int need = deg * std::max(P.d1(), P.d2()) + 4;
        if (P.field.p <= static_cast<std::uint64_t>(need) || P.field.p % 2 == 0) return detail::substitute(F, P).is_zero();
        return detail::vanishes_on_grid(F, P, modp::Mont(P.field.p));
    } else {
        // Clear denominators: H = den(F) * prod c_i^deg * F(g_1/c_1, ..., g_4/c_4)
        // with g_i integral; bound |coefficients of H| by the l1 norms.
        mpz_class fden = 1;
        std::vector<Rational> fc;
        for (const auto& [key, c] : F.terms()) {
            mpz_lcm(fden.get_mpz_t(), fden.get_mpz_t(), c.get_den_mpz_t());
            fc.push_back(c);
        }
        std::array<mpz_class, 4> cden, gnorm;
        for (int i = 0; i < 4; ++i) {
            cden[i] = 1;
            std::vector<Rational> cs;
            for (const auto& [key, c] : P.f[i].poly().terms()) {
                mpz_lcm(cden[i].get_mpz_t(), cden[i].get_mpz_t(), c.get_den_mpz_t());
                cs.push_back(c);
            }
            gnorm[i] = detail::abs_sum_numerators(cs, cden[i]);
        }
        mpz_class bound = 0;
        for (const auto& [key, c] : F.terms()) {
            mpz_class t = abs(mpz_class(c * fden));
            for (int i = 0; i < 4; ++i) {
                mpz_class g, h;
                mpz_pow_ui(g.get_mpz_t(), gnorm[i].get_mpz_t(), mono::exp(key, i));
                mpz_pow_ui(h.get_mpz_t(), cden[i].get_mpz_t(), deg - mono::exp(key, i));
                t *= g * h;
            }
            bound += t;
        }
        mpz_class covered = 1, target = 2 * bound + 1;
        Rng rng(0x5eed);
        while (covered <= target) {
            modp::Mont f(random_prime(rng));
            try {
                if (!detail::vanishes_on_grid(F, P, f)) return false;
            } catch (const std::domain_error&) {
                continue;
            }
            covered *= mpz_class(std::to_string(f.prime()));
        }
        return true;
    }
}

template <class S>
struct LciDiagnostic {
    int e = 0;
    Poly<S> G{Ring::T};
    bool lci = false;
};

/// Largest e with F^e | D, G = D / F^e, lci iff G is constant.
template <class S>
LciDiagnostic<S> lci_diagnostic(const Poly<S>& D, const Poly<S>& F) {
    if (F.is_constant()) throw std::invalid_argument("lci_diagnostic: F must be nonconstant");
    if (D.is_zero()) throw std::invalid_argument("lci_diagnostic: D is zero");
    LciDiagnostic<S> out;
    Poly<S> cur = D;
    while (auto q = cur.try_div(F)) {
        cur = *std::move(q);
        ++out.e;
    }
    if (out.e == 0) throw std::domain_error("lci_diagnostic: F does not divide D");
    out.G = cur;
    out.lci = cur.is_constant();
    return out;
}

template <class S>
struct EquationReport {
    Poly<S> D{Ring::T};
    std::optional<Poly<S>> F;
    std::optional<int> e;
    std::optional<Poly<S>> G;
    std::optional<bool> lci;
};

}  // namespace bisyz
