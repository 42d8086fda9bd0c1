#pragma once

// Graded strands of the approximation complex of cycles built on the Koszul
// complex of (g1, g2, g3, g4) in the Segre ring A.

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bisyz/biparam.hpp"
#include "bisyz/exactla.hpp"
#include "bisyz/segre.hpp"

namespace bisyz {

/// I = (g1, g2, g3, g4) with every g_i of degree d.
template <class S>
struct SegreIdeal {
    std::array<SegreElem<S>, 4> g;
    int d = 0;
    Field<S> field;

    SegreIdeal(std::array<SegreElem<S>, 4> gs, Field<S> fld) : g(std::move(gs)), field(fld) {
        d = g[0].degree();
        for (const auto& x : g)
            if (x.degree() != d) throw std::invalid_argument("SegreIdeal: generators of different degrees");
        if (d < 1) throw std::invalid_argument("SegreIdeal: generators must have degree >= 1");
        if (std::all_of(g.begin(), g.end(), [](const SegreElem<S>& x) { return x.is_zero(); }))
            throw std::invalid_argument("SegreIdeal: all generators are zero");
    }
};

/// g_i = omega(f_i); needs an unmixed bidegree (d, d).
template <class S>
SegreIdeal<S> segre_ideal(const Parametrization<S>& p) {
    if (!p.unmixed()) throw std::invalid_argument("parametrization has mixed bidegree; lift it first");
    return SegreIdeal<S>({omega(p.f[0]), omega(p.f[1]), omega(p.f[2]), omega(p.f[3])}, p.field);
}

/// Subsets of {0,1,2,3} of size k in lexicographic order.
inline const std::vector<std::vector<int>>& subsets(int k) {
    static const std::array<std::vector<std::vector<int>>, 5> all = [] {
        std::array<std::vector<std::vector<int>>, 5> out;
        for (int mask = 0; mask < 16; ++mask) {
            std::vector<int> s;
            for (int i = 0; i < 4; ++i)
                if (mask >> i & 1) s.push_back(i);
            out[s.size()].push_back(s);
        }
        for (auto& v : out) std::sort(v.begin(), v.end());
        return out;
    }();
    if (k < 0 || k > 4) throw std::out_of_range("subset size");
    return all[k];
}

namespace detail {

// Coordinates of (monomial of degree nu) * g in basis(nu + deg g).
template <class S>
std::vector<std::pair<int, S>> times_monomial(std::uint64_t m, const SegreElem<S>& g) {
    const SegreBasis& target = basis(mono::total(m) + g.degree());
    std::vector<std::pair<int, S>> out;
    out.reserve(g.poly().size());
    for (const auto& [k, c] : g.poly().terms()) out.emplace_back(target.position(segre_detail::reduce(mono::mul(m, k))), c);
    return out;
}

}  // namespace detail

/// Matrix of the Koszul differential d_i in the strand whose source is
/// (A_nu)^C(4,i) and target (A_{nu+d})^C(4,i-1). Blocks follow subsets(),
/// monomials follow basis(); d(e_S) = sum_{j in S} (-1)^pos(j,S) g_j e_{S\j}.
template <class S>
Matrix<S> koszul_matrix(const SegreIdeal<S>& I, int i, int nu) {
    if (i < 1 || i > 4) throw std::out_of_range("koszul_matrix: i must be 1..4");
    if (nu < 0) throw std::invalid_argument("koszul_matrix: negative degree");
    const SegreBasis& src = basis(nu);
    const SegreBasis& dst = basis(nu + I.d);
    const auto& from = subsets(i);
    const auto& to = subsets(i - 1);
    const auto ns = static_cast<Eigen::Index>(src.size()), nt = static_cast<Eigen::Index>(dst.size());
    Matrix<S> m = zeros<S>(nt * static_cast<Eigen::Index>(to.size()), ns * static_cast<Eigen::Index>(from.size()), I.field);
    for (std::size_t b = 0; b < from.size(); ++b) {
        const auto& set = from[b];
        for (std::size_t pos = 0; pos < set.size(); ++pos) {
            const int j = set[pos];
            std::vector<int> rest;
            for (int x : set)
                if (x != j) rest.push_back(x);
            const auto row_block = static_cast<Eigen::Index>(std::find(to.begin(), to.end(), rest) - to.begin());
            for (Eigen::Index c = 0; c < ns; ++c) {
                for (auto& [r, v] : detail::times_monomial(src.monomials[c], I.g[j])) {
                    S& slot = m(row_block * nt + r, static_cast<Eigen::Index>(b) * ns + c);
                    if (pos % 2)
                        slot -= v;
                    else
                        slot += v;
                }
            }
        }
    }
    return m;
}

/// The matrix N: rows basis(nu + d), columns the coefficients of a1..a4 in
/// basis(nu), block by block.
template <class S>
Matrix<S> syzygy_matrix(const SegreIdeal<S>& I, int nu) {
    return koszul_matrix(I, 1, nu);
}

template <class S>
using Syzygy = std::array<SegreElem<S>, 4>;

/// Basis of {(a1..a4) in (A_nu)^4 : sum a_i g_i = 0}, in nullspace order.
template <class S>
std::vector<Syzygy<S>> syzygy_strand(const SegreIdeal<S>& I, int nu) {
    Matrix<S> kernel = nullspace(syzygy_matrix(I, nu), I.field);
    const SegreBasis& b = basis(nu);
    const auto k = static_cast<Eigen::Index>(b.size());
    std::vector<Syzygy<S>> out;
    out.reserve(kernel.cols());
    for (Eigen::Index col = 0; col < kernel.cols(); ++col) {
        Syzygy<S> a;
        for (int i = 0; i < 4; ++i) {
            std::vector<typename Poly<S>::Term> terms;
            for (Eigen::Index r = 0; r < k; ++r)
                if (!is_zero(kernel(i * k + r, col))) terms.emplace_back(b.monomials[r], kernel(i * k + r, col));
            a[i] = SegreElem<S>::raw(Poly<S>::from_terms(Ring::Segre, std::move(terms)), nu);
        }
        out.push_back(std::move(a));
    }
    return out;
}

/// dim (Z_i)_mu: kernel dimension of d_i in internal degree mu, i.e. on the
/// strand with source (A_{mu - i d})^C(4,i).
template <class S>
int cycles_dim(const SegreIdeal<S>& I, int i, int mu) {
    if (i < 1 || i > 3) throw std::out_of_range("cycles_dim: i must be 1, 2 or 3");
    const int nu = mu - i * I.d;
    if (nu < 0) return 0;
    Matrix<S> m = koszul_matrix(I, i, nu);
    return static_cast<int>(m.cols()) - rank(m);
}

/// Dimensions (Z_i)_{nu + i d} for i = 0..3, with Z_0 = A.
template <class S>
std::array<int, 4> strand_dims(const SegreIdeal<S>& I, int nu) {
    return {static_cast<int>(basis(nu).size()), cycles_dim(I, 1, nu + I.d), cycles_dim(I, 2, nu + 2 * I.d),
            cycles_dim(I, 3, nu + 3 * I.d)};
}

inline int euler_characteristic(const std::array<int, 4>& dims) { return dims[0] - dims[1] + dims[2] - dims[3]; }
inline int expected_degree(const std::array<int, 4>& dims) { return dims[1] - 2 * dims[2] + 3 * dims[3]; }

/// Dimensions of (I : m^e)_mu for mu = 0..d and e = 1, 2, ... as probed by
/// indeg_sat, and the resulting initial degree.
struct SaturationProbe {
    std::vector<std::vector<int>> dims;  // dims[e-1][mu]
    int indeg = 0;
    bool stabilized = false;
};

/// Probes the saturation of I by graded linear algebra: computes
/// dim (I : m^e)_mu for mu = 0..d, raising e until the whole vector repeats
/// or e reaches e_max (default 2d). indeg is the least mu with a nonzero
/// piece, or d when no mu < d has one.
template <class S>
SaturationProbe probe_saturation(const SegreIdeal<S>& I, int e_max = -1) {
    const int d = I.d;
    if (e_max < 0) e_max = 2 * d;
    if (e_max < 1) throw std::invalid_argument("indeg_sat: e_max must be >= 1");

    // Reduced echelon form of I_D for each needed total degree D.
    std::map<int, Echelon<S>> ideal;
    auto ideal_in = [&](int D) -> const Echelon<S>& {
        auto it = ideal.find(D);
        if (it != ideal.end()) return it->second;
        const SegreBasis& gens = basis(D - d);
        const SegreBasis& target = basis(D);
        Matrix<S> span = zeros<S>(static_cast<Eigen::Index>(4 * gens.size()), static_cast<Eigen::Index>(target.size()), I.field);
        for (int j = 0; j < 4; ++j)
            for (std::size_t m = 0; m < gens.size(); ++m)
                for (auto& [c, v] : detail::times_monomial(gens.monomials[m], I.g[j]))
                    span(static_cast<Eigen::Index>(j * gens.size() + m), c) += v;
        return ideal.emplace(D, rref(span)).first->second;
    };

    auto colon_dim = [&](int mu, int e) {
        const int D = mu + e;
        const SegreBasis& src = basis(mu);
        const SegreBasis& mult = basis(e);
        const SegreBasis& target = basis(D);
        if (D < d) return 0;
        const Echelon<S>& ech = ideal_in(D);
        std::vector<int> pivot_row(target.size(), -1);
        for (int r = 0; r < ech.rank; ++r) pivot_row[ech.pivots[r]] = r;
        std::vector<int> free_cols;
        for (std::size_t c = 0; c < target.size(); ++c)
            if (pivot_row[c] < 0) free_cols.push_back(static_cast<int>(c));
        if (free_cols.empty()) return static_cast<int>(src.size());
        const auto nf = static_cast<Eigen::Index>(free_cols.size());
        Matrix<S> cond = zeros<S>(static_cast<Eigen::Index>(mult.size()) * nf, static_cast<Eigen::Index>(src.size()), I.field);
        for (std::size_t x = 0; x < src.size(); ++x) {
            for (std::size_t w = 0; w < mult.size(); ++w) {
                int col = target.position(segre_detail::reduce(mono::mul(src.monomials[x], mult.monomials[w])));
                const auto base = static_cast<Eigen::Index>(w) * nf;
                if (pivot_row[col] < 0) {
                    auto it = std::lower_bound(free_cols.begin(), free_cols.end(), col);
                    cond(base + (it - free_cols.begin()), static_cast<Eigen::Index>(x)) = I.field.one();
                } else {
                    for (Eigen::Index f = 0; f < nf; ++f) {
                        const S& v = ech.reduced(pivot_row[col], free_cols[f]);
                        if (!is_zero(v)) cond(base + f, static_cast<Eigen::Index>(x)) = -v;
                    }
                }
            }
        }
        return static_cast<int>(src.size()) - rank(cond);
    };

    SaturationProbe probe;
    for (int e = 1; e <= e_max; ++e) {
        std::vector<int> row;
        for (int mu = 0; mu <= d; ++mu) row.push_back(colon_dim(mu, e));
        probe.dims.push_back(std::move(row));
        if (probe.dims.size() >= 2 && probe.dims[probe.dims.size() - 1] == probe.dims[probe.dims.size() - 2]) {
            probe.stabilized = true;
            break;
        }
    }
    probe.indeg = d;
    for (int mu = 0; mu < d; ++mu)
        if (probe.dims.back()[mu] > 0) {
            probe.indeg = mu;
            break;
        }
    return probe;
}

template <class S>
int indeg_sat(const SegreIdeal<S>& I, int e_max = -1) {
    return probe_saturation(I, e_max).indeg;
}

/// Critical degree: conservative 2d-1, optionally lowered by the saturation
/// probe and accepted only when the lowered strand still has Euler
/// characteristic 0 and the same determinant degree as the 2d-1 strand.
struct Nu0Info {
    int conservative = 0;
    std::optional<int> optimized;  // candidate 2d-1-indeg before validation
    std::optional<int> indeg;
    bool validated = false;
    int value = 0;  // the degree to use
};

template <class S>
Nu0Info analyze_nu0(const SegreIdeal<S>& I, bool saturate) {
    Nu0Info info;
    info.conservative = 2 * I.d - 1;
    info.value = info.conservative;
    if (!saturate) return info;
    info.indeg = indeg_sat(I);
    info.optimized = 2 * I.d - 1 - *info.indeg;
    if (*info.optimized == info.conservative) {
        info.validated = true;
        return info;
    }
    auto low = strand_dims(I, *info.optimized);
    auto high = strand_dims(I, info.conservative);
    info.validated = euler_characteristic(low) == 0 && euler_characteristic(high) == 0 &&
                     expected_degree(low) == expected_degree(high);
    if (info.validated) info.value = *info.optimized;
    return info;
}

template <class S>
int nu0(const SegreIdeal<S>& I, bool saturate) {
    return analyze_nu0(I, saturate).value;
}

struct StrandReport {
    int d = 0;
    int nu = 0;
    std::array<int, 4> dims{};  // dim A_nu, (Z1)_{nu+d}, (Z2)_{nu+2d}, (Z3)_{nu+3d}
    int euler = 0;
    int expected_deg_D = 0;
    int nu0_conservative = 0;
    std::optional<int> nu0_optimized;
    std::optional<int> indeg_sat;
    bool nu0_validated = false;
    int sum_dp = 0;  // 2d^2 - expected_deg_D
    bool nu_at_least_nu0 = false;
};

template <class S>
StrandReport strand_report(const SegreIdeal<S>& I, int nu, const Nu0Info& n0) {
    StrandReport r;
    r.d = I.d;
    r.nu = nu;
    r.dims = strand_dims(I, nu);
    r.euler = euler_characteristic(r.dims);
    r.expected_deg_D = expected_degree(r.dims);
    r.nu0_conservative = n0.conservative;
    r.nu0_optimized = n0.validated ? n0.optimized : std::nullopt;
    r.indeg_sat = n0.indeg;
    r.nu0_validated = n0.validated;
    r.sum_dp = 2 * I.d * I.d - r.expected_deg_D;
    r.nu_at_least_nu0 = nu >= n0.value;
    return r;
}

template <class S>
StrandReport strand_report(const SegreIdeal<S>& I, int nu, bool saturate = false) {
    return strand_report(I, nu, analyze_nu0(I, saturate));
}

}  // namespace bisyz
