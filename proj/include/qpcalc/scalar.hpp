#pragma once

#include <gmpxx.h>

#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "qpcalc/errors.hpp"

namespace qpcalc {

using Rational = mpq_class;

inline std::string rational_str(const Rational& q) {
    return q.get_str();
}

// Element of Q(i): re + im*i with i^2 = -1.
struct Gaussian {
    Rational re = 0;
    Rational im = 0;

    bool is_zero() const { return re == 0 && im == 0; }

    Gaussian operator+(const Gaussian& o) const { return {re + o.re, im + o.im}; }
    Gaussian operator-(const Gaussian& o) const { return {re - o.re, im - o.im}; }
    Gaussian operator-() const { return {-re, -im}; }
    Gaussian operator*(const Gaussian& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    Gaussian inverse() const {
        Rational n = re * re + im * im;
        if (n == 0)
            fail(ErrorKind::InvalidArgument, "division by zero scalar");
        return {re / n, -im / n};
    }
    bool operator==(const Gaussian& o) const { return re == o.re && im == o.im; }
};

// Scalar ring of the engine: polynomials in the formal symbol hbar with
// coefficients in Q(i).  The empty map is zero.  Exact arithmetic throughout;
// no tolerances anywhere.
class Scalar {
public:
    Scalar() = default;
    Scalar(long n) { set(0, Gaussian{Rational(n), 0}); } // NOLINT: implicit by design
    Scalar(const Rational& q) { set(0, Gaussian{q, 0}); } // NOLINT
    Scalar(long num, long den) {
        Rational q(num, den);
        q.canonicalize();
        set(0, Gaussian{q, 0});
    }

    static Scalar rational(const Rational& q) { return Scalar(q); }
    static Scalar imaginary_unit() {
        Scalar s;
        s.set(0, Gaussian{0, 1});
        return s;
    }
    static Scalar hbar(int power = 1) {
        Scalar s;
        s.set(power, Gaussian{1, 0});
        return s;
    }

    bool is_zero() const { return terms_.empty(); }

    // True when the scalar is a plain rational (no i, no hbar).
    bool is_rational() const {
        if (terms_.empty())
            return true;
        return terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second.im == 0;
    }

    Rational rational_value() const {
        if (terms_.empty())
            return 0;
        if (!is_rational())
            fail(ErrorKind::InvalidArgument, "scalar is not a plain rational");
        return terms_.begin()->second.re;
    }

    Scalar operator+(const Scalar& o) const {
        Scalar r = *this;
        for (const auto& [p, g] : o.terms_)
            r.set(p, r.get(p) + g);
        return r;
    }
    Scalar operator-(const Scalar& o) const {
        Scalar r = *this;
        for (const auto& [p, g] : o.terms_)
            r.set(p, r.get(p) - g);
        return r;
    }
    Scalar operator-() const {
        Scalar r;
        for (const auto& [p, g] : terms_)
            r.terms_.emplace(p, -g);
        return r;
    }
    Scalar operator*(const Scalar& o) const {
        Scalar r;
        for (const auto& [p1, g1] : terms_)
            for (const auto& [p2, g2] : o.terms_)
                r.set(p1 + p2, r.get(p1 + p2) + g1 * g2);
        return r;
    }

    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    // Inverse is defined for hbar-free scalars only.
    Scalar inverse() const {
        if (terms_.size() != 1 || terms_.begin()->first != 0)
            fail(ErrorKind::InvalidArgument, "scalar inverse requires an hbar-free value");
        Scalar r;
        r.set(0, terms_.begin()->second.inverse());
        return r;
    }

    // Evaluation at hbar = 0: keeps only the constant-in-hbar part.
    Scalar at_hbar_zero() const {
        Scalar r;
        auto it = terms_.find(0);
        if (it != terms_.end())
            r.set(0, it->second);
        return r;
    }

    bool operator==(const Scalar& o) const { return terms_ == o.terms_; }
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    // Canonical rendering, e.g. "3/2", "-i", "(1/2+3*i)", "2*hbar^2".
    std::string str() const {
        if (terms_.empty())
            return "0";
        std::ostringstream out;
        bool first = true;
        for (const auto& [p, g] : terms_) {
            std::string coeff = gaussian_str(g, p != 0);
            if (!first)
                out << (coeff[0] == '-' ? "" : "+");
            first = false;
            if (p == 0) {
                out << coeff;
            } else {
                if (coeff == "1")
                    out << "hbar";
                else if (coeff == "-1")
                    out << "-hbar";
                else
                    out << coeff << "*hbar";
                if (p != 1)
                    out << "^" << p;
            }
        }
        return out.str();
    }

    // Rendering for use as a multiplicative prefix of a monomial: always
    // parenthesised when it is a sum.
    std::string prefix_str() const {
        std::string s = str();
        if (terms_.size() > 1)
            return "(" + s + ")";
        return s;
    }

    const std::map<int, Gaussian>& terms() const { return terms_; }

private:
    static std::string gaussian_str(const Gaussian& g, bool as_factor) {
        if (g.im == 0)
            return g.re.get_str();
        std::ostringstream out;
        if (g.re == 0) {
            if (g.im == 1)
                out << "i";
            else if (g.im == -1)
                out << "-i";
            else
                out << g.im.get_str() << "*i";
            return out.str();
        }
        out << "(" << g.re.get_str() << (g.im > 0 ? "+" : "-");
        Rational a = abs(g.im);
        if (a == 1)
            out << "i";
        else
            out << a.get_str() << "*i";
        out << ")";
        (void)as_factor;
        return out.str();
    }

    Gaussian get(int p) const {
        auto it = terms_.find(p);
        return it == terms_.end() ? Gaussian{} : it->second;
    }
    void set(int p, const Gaussian& g) {
        if (g.is_zero())
            terms_.erase(p);
        else
            terms_[p] = g;
    }

    std::map<int, Gaussian> terms_;
};

inline Scalar operator*(long n, const Scalar& s) { return Scalar(n) * s; }

} // namespace qpcalc
