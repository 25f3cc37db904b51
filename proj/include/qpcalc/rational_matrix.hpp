#pragma once

#include <vector>

#include "qpcalc/errors.hpp"
#include "qpcalc/scalar.hpp"

namespace qpcalc {

using RationalMatrix = std::vector<std::vector<Rational>>;

inline RationalMatrix rational_matrix_inverse(const RationalMatrix& m) {
    size_t n = m.size();
    RationalMatrix a = m;
    RationalMatrix inv(n, std::vector<Rational>(n, 0));
    for (size_t i = 0; i < n; ++i) {
        if (a[i].size() != n)
            fail(ErrorKind::InvalidArgument, "matrix is not square");
        inv[i][i] = 1;
    }
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col] == 0)
            ++piv;
        if (piv == n)
            fail(ErrorKind::InvalidArgument, "matrix is singular");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        Rational d = a[col][col];
        for (size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0)
                continue;
            Rational f = a[row][col];
            for (size_t j = 0; j < n; ++j) {
                a[row][j] -= f * a[col][j];
                inv[row][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

inline Rational rational_matrix_det(const RationalMatrix& m) {
    size_t n = m.size();
    RationalMatrix a = m;
    Rational det = 1;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a[piv][col] == 0)
            ++piv;
        if (piv == n)
            return 0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        Rational d = a[col][col];
        for (size_t row = col + 1; row < n; ++row) {
            if (a[row][col] == 0)
                continue;
            Rational f = a[row][col] / d;
            for (size_t j = col; j < n; ++j)
                a[row][j] -= f * a[col][j];
        }
    }
    return det;
}

} // namespace qpcalc
