#pragma once

// Dense exact linear algebra over Q and GF(p).

#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bisyz/field.hpp"
#include "bisyz/upoly.hpp"

namespace bisyz {

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class S>
Matrix<S> zeros(Eigen::Index rows, Eigen::Index cols, const Field<S>& field) {
    return Matrix<S>::Constant(rows, cols, field.zero());
}

template <class S>
struct Echelon {
    Matrix<S> reduced;
    int rank = 0;
    std::vector<int> pivots;
};

namespace detail {

// Scale each row of a rational matrix to a primitive integer row.
inline void clear_row_denominators(Matrix<Rational>& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        mpz_class lcm = 1, g = 0;
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (sgn(m(i, j)) != 0) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), m(i, j).get_den_mpz_t());
        if (lcm == 1) {
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (sgn(m(i, j)) != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), m(i, j).get_num_mpz_t());
        } else {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (sgn(m(i, j)) == 0) continue;
                m(i, j) *= lcm;
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), m(i, j).get_num_mpz_t());
            }
        }
        if (g > 1)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (sgn(m(i, j)) != 0) m(i, j) /= g;
    }
}
inline void clear_row_denominators(Matrix<Zp>&) {}

// Gaussian elimination in place; pivot = first nonzero entry in column order.
// With `reduce` the result is the reduced row echelon form, otherwise only the
// rows below each pivot are cleared and pivot rows are not normalized.
template <class S>
Echelon<S> eliminate(Matrix<S> m, bool reduce) {
    Echelon<S> out;
    const Eigen::Index rows = m.rows(), cols = m.cols();
    clear_row_denominators(m);
    std::vector<Eigen::Index> nz;
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
        Eigen::Index piv = r;
        while (piv < rows && is_zero(m(piv, c))) ++piv;
        if (piv == rows) continue;
        if (piv != r) m.row(piv).swap(m.row(r));
        if (reduce) {
            S inv = inverse(m(r, c));
            for (Eigen::Index j = c; j < cols; ++j)
                if (!is_zero(m(r, j))) m(r, j) *= inv;
        }
        nz.clear();
        for (Eigen::Index j = c + 1; j < cols; ++j)
            if (!is_zero(m(r, j))) nz.push_back(j);
        S pinv = reduce ? S(m(r, c)) : inverse(m(r, c));
        for (Eigen::Index i = reduce ? 0 : r + 1; i < rows; ++i) {
            if (i == r || is_zero(m(i, c))) continue;
            S f = reduce ? S(m(i, c)) : S(m(i, c) * pinv);
            m(i, c) -= m(i, c);
            for (Eigen::Index j : nz) m(i, j) -= f * m(r, j);
        }
        out.pivots.push_back(static_cast<int>(c));
        ++r;
    }
    out.rank = static_cast<int>(r);
    out.reduced = std::move(m);
    return out;
}

}  // namespace detail

/// Reduced row echelon form with rank and pivot columns.
template <class S>
Echelon<S> rref(const Matrix<S>& m) {
    return detail::eliminate(m, true);
}

template <class S>
int rank(const Matrix<S>& m) {
    if (m.rows() > m.cols()) return detail::eliminate<S>(m.transpose(), false).rank;
    return detail::eliminate(m, false).rank;
}

/// Column basis of {x : m x = 0}: one vector per free column, that free
/// variable set to one and the other free variables to zero.
template <class S>
Matrix<S> nullspace(const Matrix<S>& m, const Field<S>& field) {
    auto e = rref(m);
    const Eigen::Index cols = m.cols();
    std::vector<bool> is_pivot(cols, false);
    for (int p : e.pivots) is_pivot[p] = true;
    Matrix<S> basis = zeros(cols, cols - e.rank, field);
    Eigen::Index k = 0;
    for (Eigen::Index f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        basis(f, k) = field.one();
        for (int i = 0; i < e.rank; ++i)
            if (!is_zero(e.reduced(i, f))) basis(e.pivots[i], k) = -e.reduced(i, f);
        ++k;
    }
    return basis;
}

/// Exact determinant by fraction-free (Bareiss) elimination.
template <class S>
S det_bareiss(Matrix<S> m, const Field<S>& field) {
    if (m.rows() != m.cols()) throw std::invalid_argument("det_bareiss: matrix is not square");
    const Eigen::Index n = m.rows();
    if (n == 0) return field.one();
    S scale = field.one();
    if constexpr (std::is_same_v<S, Rational>) {
        Matrix<S> before = m;
        detail::clear_row_denominators(m);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (sgn(before(i, j)) != 0) {
                    scale *= before(i, j) / m(i, j);
                    break;
                }
    }
    S prev = field.one();
    bool negate = false;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (is_zero(m(k, k))) {
            Eigen::Index i = k + 1;
            while (i < n && is_zero(m(i, k))) ++i;
            if (i == n) return field.zero();
            m.row(i).swap(m.row(k));
            negate = !negate;
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            for (Eigen::Index j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
            m(i, k) = field.zero();
        }
        prev = m(k, k);
    }
    S d = m(n - 1, n - 1) * scale;
    return negate ? S(-d) : d;
}

/// Characteristic polynomial det(x I - m) through a Hessenberg reduction.
template <class S>
upoly::UPoly<S> charpoly(Matrix<S> h, const Field<S>& field) {
    if (h.rows() != h.cols()) throw std::invalid_argument("charpoly: matrix is not square");
    const Eigen::Index n = h.rows();
    for (Eigen::Index m = 1; m + 1 < n; ++m) {
        Eigen::Index i = m;
        while (i < n && is_zero(h(i, m - 1))) ++i;
        if (i == n) continue;
        if (i != m) {
            h.row(i).swap(h.row(m));
            h.col(i).swap(h.col(m));
        }
        S inv = inverse(h(m, m - 1));
        for (Eigen::Index r = m + 1; r < n; ++r) {
            if (is_zero(h(r, m - 1))) continue;
            S u = h(r, m - 1) * inv;
            for (Eigen::Index c = m - 1; c < n; ++c)
                if (!is_zero(h(m, c))) h(r, c) -= u * h(m, c);
            for (Eigen::Index c = 0; c < n; ++c)
                if (!is_zero(h(c, r))) h(c, m) += u * h(c, r);
        }
    }
    std::vector<upoly::UPoly<S>> p(n + 1);
    p[0] = {field.one()};
    for (Eigen::Index m = 1; m <= n; ++m) {
        // (x - h[m-1][m-1]) * p[m-1]
        upoly::UPoly<S> cur(m + 1, field.zero());
        for (Eigen::Index k = 0; k < m; ++k) {
            cur[k + 1] += p[m - 1][k];
            cur[k] -= h(m - 1, m - 1) * p[m - 1][k];
        }
        S t = field.one();
        for (Eigen::Index i = 1; i < m; ++i) {
            t *= h(m - i, m - i - 1);
            if (is_zero(t)) break;
            S f = t * h(m - i - 1, m - 1);
            if (is_zero(f)) continue;
            for (std::size_t k = 0; k < p[m - i - 1].size(); ++k) cur[k] -= f * p[m - i - 1][k];
        }
        p[m] = std::move(cur);
    }
    return p[n];
}

/// det(a + lambda b) as a polynomial in lambda, by evaluation at
/// lambda = 0..n and interpolation.
template <class S>
upoly::UPoly<S> pencil_det(const Matrix<S>& a, const Matrix<S>& b, const Field<S>& field) {
    if (a.rows() != a.cols() || b.rows() != a.rows() || b.cols() != a.cols())
        throw std::invalid_argument("pencil_det: shape mismatch");
    const Eigen::Index n = a.rows();
    std::vector<S> xs, ys;
    for (Eigen::Index i = 0; i <= n; ++i) {
        S lambda = field.from_int(i);
        Matrix<S> m = a;
        if (i != 0) m += b * lambda;
        xs.push_back(lambda);
        ys.push_back(det_bareiss(std::move(m), field));
    }
    return upoly::interpolate(xs, std::move(ys));
}

}  // namespace bisyz
