#pragma once

#include <vector>

#include "qpcalc/polynomial.hpp"

namespace qpcalc {

// ---------------------------------------------------------------------------
// Berezin integration over odd coordinates.
//
// Single-variable rule: the integral of f1 + f2*theta over d theta is f2.
// The iterated measure d theta^1 ... d theta^k applies the single-variable
// rule innermost-rightmost, realised as left derivatives:
//     int d theta^1 ... d theta^k p = d^L_{theta^1} ... d^L_{theta^k} p
// (rightmost variable first).  Measure orientation fixed once:
//     int d theta^1 d theta^2 (theta^2 theta^1) = +1.
// ---------------------------------------------------------------------------

inline void require_odd_distinct(const ChartPtr& chart, const std::vector<CoordId>& vars) {
    for (size_t i = 0; i < vars.size(); ++i) {
        if (vars[i] >= chart->size())
            fail(ErrorKind::UnknownCoordinate, "integration variable is not in the chart");
        if (chart->coord(vars[i]).parity() != 1)
            fail(ErrorKind::InvalidArgument,
                 "integration variable " + chart->coord(vars[i]).str() + " is not odd");
        for (size_t j = i + 1; j < vars.size(); ++j)
            if (vars[i] == vars[j])
                fail(ErrorKind::InvalidArgument, "repeated integration variable");
    }
}

inline GradedPolynomial berezin_integral(const GradedPolynomial& p, const std::vector<CoordId>& vars) {
    require_odd_distinct(p.chart(), vars);
    GradedPolynomial r = p;
    for (auto it = vars.rbegin(); it != vars.rend(); ++it)
        r = derive(r, *it, DeriveSide::Left);
    return r;
}

inline GradedPolynomial berezin_integral(const GradedPolynomial& p,
                                         const std::vector<std::pair<std::string, std::vector<int>>>& vars) {
    std::vector<CoordId> ids;
    ids.reserve(vars.size());
    for (const auto& [name, idx] : vars)
        ids.push_back(p.chart()->id_of(name, idx));
    return berezin_integral(p, ids);
}

// ---------------------------------------------------------------------------
// Polynomial matrices over the even (commutative) part of the algebra.
// ---------------------------------------------------------------------------

using PolyMatrix = std::vector<std::vector<GradedPolynomial>>;

inline PolyMatrix poly_matrix_mul(const PolyMatrix& a, const PolyMatrix& b, const ChartPtr& chart) {
    size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
    PolyMatrix r(n, std::vector<GradedPolynomial>(m, GradedPolynomial::zero(chart)));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j)
            for (size_t l = 0; l < k; ++l)
                r[i][j] += a[i][l] * b[l][j];
    return r;
}

// Determinant by cofactor expansion; valid because all entries are even and
// hence commute.
inline GradedPolynomial poly_det(const PolyMatrix& m, const ChartPtr& chart) {
    size_t n = m.size();
    if (n == 0)
        return GradedPolynomial::one(chart);
    if (n == 1)
        return m[0][0];
    GradedPolynomial det = GradedPolynomial::zero(chart);
    for (size_t j = 0; j < n; ++j) {
        if (m[0][j].is_zero())
            continue;
        PolyMatrix minor;
        minor.reserve(n - 1);
        for (size_t i = 1; i < n; ++i) {
            std::vector<GradedPolynomial> row;
            row.reserve(n - 1);
            for (size_t jj = 0; jj < n; ++jj)
                if (jj != j)
                    row.push_back(m[i][jj]);
            minor.push_back(std::move(row));
        }
        GradedPolynomial c = m[0][j] * poly_det(minor, chart);
        det += (j % 2) ? -c : c;
    }
    return det;
}

// Body of a polynomial: its constant (coordinate- and jet-free) term.
inline Scalar body_scalar(const GradedPolynomial& p) {
    auto it = p.terms().find(Monomial{});
    return it == p.terms().end() ? Scalar() : it->second;
}

// Inverse of an even element u = b + nu with invertible scalar body b and
// nilpotent nu, via the terminating geometric series b^{-1} sum (-nu/b)^k.
inline GradedPolynomial even_inverse(const GradedPolynomial& u, ErrorKind on_singular = ErrorKind::SingularD) {
    const ChartPtr& chart = u.chart();
    Scalar b = body_scalar(u);
    if (b.is_zero())
        fail(on_singular, "element has zero body and is not invertible");
    Scalar binv = b.inverse();
    GradedPolynomial nu = (u - GradedPolynomial::constant(chart, b)) * binv;
    GradedPolynomial acc = GradedPolynomial::one(chart);
    GradedPolynomial power = GradedPolynomial::one(chart);
    // nilpotency bound: each power adds at least one odd factor
    size_t cap = 2 * chart->size() + 4;
    for (size_t k = 0; k < cap && !power.is_zero(); ++k) {
        power = power * nu;
        power = -power;
        acc += power;
    }
    if (!power.is_zero())
        fail(ErrorKind::InvalidArgument, "nilpotent part of the element does not terminate");
    return acc * binv;
}

// Inverse of an even matrix via the adjugate and the body-series inverse of
// the determinant.
inline PolyMatrix poly_matrix_inverse(const PolyMatrix& m, const ChartPtr& chart,
                                      ErrorKind on_singular = ErrorKind::SingularD) {
    size_t n = m.size();
    GradedPolynomial det = poly_det(m, chart);
    GradedPolynomial det_inv = even_inverse(det, on_singular);
    PolyMatrix inv(n, std::vector<GradedPolynomial>(n, GradedPolynomial::zero(chart)));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            PolyMatrix minor;
            for (size_t r = 0; r < n; ++r) {
                if (r == j)
                    continue;
                std::vector<GradedPolynomial> row;
                for (size_t c = 0; c < n; ++c)
                    if (c != i)
                        row.push_back(m[r][c]);
                minor.push_back(std::move(row));
            }
            GradedPolynomial cof = poly_det(minor, chart) * det_inv;
            inv[i][j] = ((i + j) % 2) ? -cof : cof;
        }
    return inv;
}

// ---------------------------------------------------------------------------
// Supermatrices and the Berezinian.
// ---------------------------------------------------------------------------

// Block supermatrix [[A, B], [C, D]] with even-parity entries in A, D and
// odd-parity entries in B, C.  A is p x p, D is q x q.
struct SuperMatrix {
    ChartPtr chart;
    PolyMatrix a, b, c, d;

    size_t even_dim() const { return a.size(); }
    size_t odd_dim() const { return d.size(); }

    void validate() const {
        size_t p = a.size(), q = d.size();
        auto check_block = [&](const PolyMatrix& blk, size_t rows, size_t cols, int parity,
                               const char* name) {
            if (blk.size() != rows)
                fail(ErrorKind::InvalidArgument, std::string("block ") + name + " has wrong shape");
            for (const auto& row : blk) {
                if (row.size() != cols)
                    fail(ErrorKind::InvalidArgument, std::string("block ") + name + " has wrong shape");
                for (const auto& e : row)
                    for (const auto& [mono, s] : e.terms())
                        if (mono.parity(*chart) != parity)
                            fail(ErrorKind::InvalidArgument,
                                 std::string("block ") + name + " violates the parity layout");
            }
        };
        check_block(a, p, p, 0, "A");
        check_block(b, p, q, 1, "B");
        check_block(c, q, p, 1, "C");
        check_block(d, q, q, 0, "D");
    }

    SuperMatrix operator*(const SuperMatrix& o) const {
        if (chart.get() != o.chart.get() || even_dim() != o.even_dim() || odd_dim() != o.odd_dim())
            fail(ErrorKind::ChartMismatch, "supermatrix shapes or charts differ");
        SuperMatrix r;
        r.chart = chart;
        auto add = [&](const PolyMatrix& x, const PolyMatrix& y) {
            PolyMatrix s = x;
            for (size_t i = 0; i < x.size(); ++i)
                for (size_t j = 0; j < x[i].size(); ++j)
                    s[i][j] = x[i][j] + y[i][j];
            return s;
        };
        r.a = add(poly_matrix_mul(a, o.a, chart), poly_matrix_mul(b, o.c, chart));
        r.b = add(poly_matrix_mul(a, o.b, chart), poly_matrix_mul(b, o.d, chart));
        r.c = add(poly_matrix_mul(c, o.a, chart), poly_matrix_mul(d, o.c, chart));
        r.d = add(poly_matrix_mul(c, o.b, chart), poly_matrix_mul(d, o.d, chart));
        return r;
    }

    static SuperMatrix identity(ChartPtr chart, size_t p, size_t q) {
        SuperMatrix m;
        m.chart = chart;
        m.a = PolyMatrix(p, std::vector<GradedPolynomial>(p, GradedPolynomial::zero(chart)));
        m.b = PolyMatrix(p, std::vector<GradedPolynomial>(q, GradedPolynomial::zero(chart)));
        m.c = PolyMatrix(q, std::vector<GradedPolynomial>(p, GradedPolynomial::zero(chart)));
        m.d = PolyMatrix(q, std::vector<GradedPolynomial>(q, GradedPolynomial::zero(chart)));
        for (size_t i = 0; i < p; ++i)
            m.a[i][i] = GradedPolynomial::one(chart);
        for (size_t i = 0; i < q; ++i)
            m.d[i][i] = GradedPolynomial::one(chart);
        return m;
    }
};

// Ber(M) = det(A - B D^{-1} C) * det(D)^{-1}.  Requires the scalar body of
// det(D) to be nonzero; nilpotent corrections are inverted by the finite
// geometric series.
inline GradedPolynomial berezinian(const SuperMatrix& m) {
    m.validate();
    const ChartPtr& chart = m.chart;
    GradedPolynomial det_d = poly_det(m.d, chart);
    GradedPolynomial det_d_inv = even_inverse(det_d, ErrorKind::SingularD);
    PolyMatrix d_inv = poly_matrix_inverse(m.d, chart, ErrorKind::SingularD);
    PolyMatrix bdc = poly_matrix_mul(poly_matrix_mul(m.b, d_inv, chart), m.c, chart);
    PolyMatrix schur = m.a;
    for (size_t i = 0; i < schur.size(); ++i)
        for (size_t j = 0; j < schur[i].size(); ++j)
            schur[i][j] -= bdc[i][j];
    return poly_det(schur, chart) * det_d_inv;
}

} // namespace qpcalc
