#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qpcalc/polynomial.hpp"
#include "qpcalc/rational_matrix.hpp"

namespace qpcalc {

// A Darboux conjugate pair (a, b) of total degree n; the bracket is
// normalised so that {a, b} = weight.
struct ConjugatePair {
    CoordId a;
    CoordId b;
    Rational weight = 1;
};

// Self-paired block of degree-(n/2) coordinates with a symmetric invertible
// fiber metric k; the bracket contracts through the exact inverse k^{ab}.
struct MetricBlock {
    std::vector<CoordId> coords;
    RationalMatrix k;     // k_{ab}
    RationalMatrix k_inv; // k^{ab}
};

// A graded symplectic chart of degree n in Darboux form: every coordinate
// sits in exactly one conjugate pair or in the metric block.
class SymplecticChart {
public:
    SymplecticChart(ChartPtr chart, int degree, std::vector<ConjugatePair> pairs,
                    std::optional<MetricBlock> metric = std::nullopt)
        : chart_(std::move(chart)), degree_(degree), pairs_(std::move(pairs)),
          metric_(std::move(metric)) {
        std::vector<int> used(chart_->size(), 0);
        for (const auto& p : pairs_) {
            if (p.a >= chart_->size() || p.b >= chart_->size() || p.a == p.b)
                fail(ErrorKind::InvalidArgument, "invalid conjugate pair");
            if (chart_->coord(p.a).degree + chart_->coord(p.b).degree != degree_)
                fail(ErrorKind::DegreeMismatch,
                     "pair (" + chart_->coord(p.a).str() + ", " + chart_->coord(p.b).str() +
                         ") does not sum to chart degree " + std::to_string(degree_));
            if (p.weight == 0)
                fail(ErrorKind::InvalidArgument, "pair weight must be nonzero");
            ++used[p.a];
            ++used[p.b];
        }
        if (metric_) {
            size_t r = metric_->coords.size();
            if (metric_->k.size() != r)
                fail(ErrorKind::InvalidArgument, "fiber metric has wrong size");
            for (size_t i = 0; i < r; ++i) {
                if (metric_->k[i].size() != r)
                    fail(ErrorKind::InvalidArgument, "fiber metric is not square");
                for (size_t j = 0; j < r; ++j)
                    if (metric_->k[i][j] != metric_->k[j][i])
                        fail(ErrorKind::InvalidArgument, "fiber metric must be symmetric");
            }
            for (CoordId c : metric_->coords) {
                if (2 * chart_->coord(c).degree != degree_)
                    fail(ErrorKind::DegreeMismatch,
                         "metric-block coordinate " + chart_->coord(c).str() +
                             " must have degree n/2");
                ++used[c];
            }
            if (metric_->k_inv.empty())
                metric_->k_inv = rational_matrix_inverse(metric_->k);
        }
        for (CoordId c = 0; c < chart_->size(); ++c)
            if (used[c] != 1)
                fail(ErrorKind::InvalidArgument,
                     "coordinate " + chart_->coord(c).str() +
                         " must appear in exactly one pair or the metric block");
    }

    const ChartPtr& chart() const { return chart_; }
    int degree() const { return degree_; }
    const std::vector<ConjugatePair>& pairs() const { return pairs_; }
    const std::optional<MetricBlock>& metric() const { return metric_; }

    GradedPolynomial zero() const { return GradedPolynomial::zero(chart_); }

private:
    ChartPtr chart_;
    int degree_;
    std::vector<ConjugatePair> pairs_;
    std::optional<MetricBlock> metric_;
};

// ---------------------------------------------------------------------------
// The graded Poisson bracket of degree -n.
//
// Component realisation over the Darboux data, with one global sign
// convention fixed by {a, b} = +weight for every declared pair (in
// particular {x^i, xi_j} = +delta^i_j) and {eta^a, eta^b} = k^{ab} on the
// metric block:
//
//   {f,g} = sum_pairs w [ (d^R f/d a)(d^L g/d b)
//                         - (-1)^{|a||b|} (d^R f/d b)(d^L g/d a) ]
//         + sum_metric (d^R f/d eta^a) k^{ab} (d^L g/d eta^b),
//
// where |.| is parity.  Antisymmetry, Leibniz and Jacobi are enforced by the
// property suite.
// ---------------------------------------------------------------------------
inline GradedPolynomial poisson_bracket(const GradedPolynomial& f, const GradedPolynomial& g,
                                        const SymplecticChart& sc) {
    const ChartPtr& chart = sc.chart();
    if (f.chart().get() != chart.get() || g.chart().get() != chart.get())
        fail(ErrorKind::ChartMismatch, "bracket arguments must live on the bracket's chart");

    GradedPolynomial r(chart);
    for (const auto& p : sc.pairs()) {
        int pa = chart->coord(p.a).parity();
        int pb = chart->coord(p.b).parity();
        int cross_sign = (pa * pb) & 1 ? -1 : 1;
        GradedPolynomial t1 = derive(f, p.a, DeriveSide::Right) * derive(g, p.b, DeriveSide::Left);
        GradedPolynomial t2 = derive(f, p.b, DeriveSide::Right) * derive(g, p.a, DeriveSide::Left);
        r += (t1 - t2 * Scalar(cross_sign)) * Scalar(p.weight);
    }
    if (sc.metric()) {
        const MetricBlock& mb = *sc.metric();
        size_t n = mb.coords.size();
        std::vector<GradedPolynomial> df, dg;
        df.reserve(n);
        dg.reserve(n);
        for (CoordId c : mb.coords) {
            df.push_back(derive(f, c, DeriveSide::Right));
            dg.push_back(derive(g, c, DeriveSide::Left));
        }
        for (size_t a = 0; a < n; ++a) {
            if (df[a].is_zero())
                continue;
            for (size_t b = 0; b < n; ++b) {
                if (mb.k_inv[a][b] == 0 || dg[b].is_zero())
                    continue;
                r += df[a] * dg[b] * Scalar(mb.k_inv[a][b]);
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Homological function and master-equation checks.
// ---------------------------------------------------------------------------

struct HomologicalFunction {
    GradedPolynomial theta;

    HomologicalFunction(GradedPolynomial t, const SymplecticChart& sc) : theta(std::move(t)) {
        if (!theta.is_homogeneous_of(sc.degree() + 1))
            fail(ErrorKind::DegreeMismatch,
                 "homological function must be homogeneous of degree n+1 = " +
                     std::to_string(sc.degree() + 1));
    }
};

struct CheckReport {
    bool pass = false;
    GradedPolynomial obstruction;
    std::string provenance;

    static CheckReport from_obstruction(GradedPolynomial obs, std::string provenance) {
        CheckReport r;
        r.pass = obs.is_zero();
        r.obstruction = std::move(obs);
        r.provenance = std::move(provenance);
        return r;
    }
};

// Q(f) = {Theta, f}; raises degree by exactly one for homogeneous f.
inline GradedPolynomial q_apply(const GradedPolynomial& theta, const GradedPolynomial& f,
                                const SymplecticChart& sc) {
    HomologicalFunction check(theta, sc);
    return poisson_bracket(theta, f, sc);
}

// Classical master obstruction (1/2){Theta, Theta}; pass iff it vanishes
// identically (for formal coefficients: as a polynomial in jet symbols).
inline CheckReport master_obstruction(const GradedPolynomial& theta, const SymplecticChart& sc) {
    HomologicalFunction check(theta, sc);
    GradedPolynomial obs = poisson_bracket(theta, theta, sc) * Scalar(1, 2);
    return CheckReport::from_obstruction(std::move(obs), "master_obstruction");
}

// Derived bracket {{a, Theta}, b}; structure extractors add their own overall
// signs on top of this raw value.
inline GradedPolynomial derived_bracket(const GradedPolynomial& a, const GradedPolynomial& b,
                                        const GradedPolynomial& theta, const SymplecticChart& sc) {
    return poisson_bracket(poisson_bracket(a, theta, sc), b, sc);
}

// ---------------------------------------------------------------------------
// Degree -1 layer: BV Laplacian and the quantum master equation.
// ---------------------------------------------------------------------------

inline void require_bv_chart(const SymplecticChart& sc) {
    if (sc.degree() != -1)
        fail(ErrorKind::WrongChartDegree, "operation requires a chart of degree -1");
    if (sc.metric())
        fail(ErrorKind::WrongChartDegree, "degree -1 charts have no metric block");
}

// Delta F = sum over pairs (Phi, Phi*) of
//     (-1)^{|Phi|} (d^L/d Phi)(d^L/d Phi*) F / weight.
// The per-pair parity sign makes Delta generate the degree -1 bracket:
//     Delta(fg) - (Delta f) g - (-1)^{|f|} f (Delta g) = (-1)^{|f|} {f, g},
// uniformly across pairs of either parity order, and Delta(Phi Phi*) = +1
// for an even field Phi.  Delta^2 = 0 holds for any per-pair signs.
inline GradedPolynomial bv_laplacian(const GradedPolynomial& f, const SymplecticChart& sc) {
    require_bv_chart(sc);
    if (f.chart().get() != sc.chart().get())
        fail(ErrorKind::ChartMismatch, "polynomial lives on a different chart");
    GradedPolynomial r(sc.chart());
    for (const auto& p : sc.pairs()) {
        int sgn = sc.chart()->coord(p.a).parity() == 1 ? -1 : 1;
        r += derive(derive(f, p.b, DeriveSide::Left), p.a, DeriveSide::Left) *
             Scalar(Rational(sgn) / p.weight);
    }
    return r;
}

// Quantum master obstruction -2*i*hbar*Delta(S) + {S, S}; pass iff it is
// identically zero as a polynomial in hbar.  At hbar = 0 it reduces to twice
// the classical obstruction.
inline CheckReport quantum_master_obstruction(const GradedPolynomial& s, const SymplecticChart& sc) {
    require_bv_chart(sc);
    GradedPolynomial obs = bv_laplacian(s, sc) * (Scalar(-2) * Scalar::imaginary_unit() * Scalar::hbar()) +
                           poisson_bracket(s, s, sc);
    return CheckReport::from_obstruction(std::move(obs), "quantum_master_obstruction");
}

} // namespace qpcalc
