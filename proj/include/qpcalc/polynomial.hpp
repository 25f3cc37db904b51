#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>
#include <variant>
#include <vector>

#include "qpcalc/chart.hpp"
#include "qpcalc/errors.hpp"
#include "qpcalc/scalar.hpp"

namespace qpcalc {

// One concrete jet factor: declared symbol, canonicalised index tuple and a
// sorted multiset of degree-0 coordinate ids the symbol has been
// differentiated by.  Mixed partials commute, hence the sorted storage.
struct JetFactor {
    uint32_t decl = 0;
    std::vector<int> indices;
    std::vector<CoordId> deriv;

    auto tie() const { return std::tie(decl, indices, deriv); }
    bool operator<(const JetFactor& o) const { return tie() < o.tie(); }
    bool operator==(const JetFactor& o) const { return tie() == o.tie(); }
};

// A normalised monomial: coordinate factors sorted by canonical coordinate
// order (odd exponents are exactly 1), and a sorted multiset of jet factors.
struct Monomial {
    std::vector<std::pair<CoordId, uint32_t>> coords; // (coordinate, exponent)
    std::vector<JetFactor> jets;

    bool is_constant() const { return coords.empty() && jets.empty(); }

    int degree(const Chart& chart) const {
        int d = 0;
        for (auto [id, e] : coords)
            d += chart.coord(id).degree * (int)e;
        return d; // jets are degree 0
    }

    int parity(const Chart& chart) const {
        int p = 0;
        for (auto [id, e] : coords)
            p += chart.coord(id).parity() * (int)e;
        return p & 1;
    }

    auto tie() const { return std::tie(coords, jets); }
    bool operator<(const Monomial& o) const { return tie() < o.tie(); }
    bool operator==(const Monomial& o) const { return tie() == o.tie(); }
};

namespace detail {

// Multiply two normalised monomials; returns the Koszul sign (or 0 when an
// odd coordinate squares) and writes the merged monomial.
inline int merge_monomials(const Chart& chart, const Monomial& a, const Monomial& b, Monomial& out) {
    out.coords.clear();
    out.jets.clear();
    int sign = 1;
    // Count of odd factors of `a` not yet emitted; every odd factor of `b`
    // emitted before them anticommutes past all of them.
    int odd_left_in_a = 0;
    for (auto [id, e] : a.coords)
        odd_left_in_a += chart.coord(id).parity() * (int)e;

    size_t ia = 0, ib = 0;
    while (ia < a.coords.size() || ib < b.coords.size()) {
        bool take_a;
        if (ia == a.coords.size())
            take_a = false;
        else if (ib == b.coords.size())
            take_a = true;
        else if (a.coords[ia].first == b.coords[ib].first) {
            const auto& c = chart.coord(a.coords[ia].first);
            if (c.parity() == 1)
                return 0; // odd nilpotency
            out.coords.emplace_back(a.coords[ia].first, a.coords[ia].second + b.coords[ib].second);
            ++ia;
            ++ib;
            continue;
        } else
            take_a = a.coords[ia].first < b.coords[ib].first;

        if (take_a) {
            odd_left_in_a -= chart.coord(a.coords[ia].first).parity() * (int)a.coords[ia].second;
            out.coords.push_back(a.coords[ia++]);
        } else {
            int p = chart.coord(b.coords[ib].first).parity() * (int)b.coords[ib].second;
            if ((p & 1) && (odd_left_in_a & 1))
                sign = -sign;
            out.coords.push_back(b.coords[ib++]);
        }
    }
    out.jets.resize(a.jets.size() + b.jets.size());
    std::merge(a.jets.begin(), a.jets.end(), b.jets.begin(), b.jets.end(), out.jets.begin());
    return sign;
}

} // namespace detail

enum class DeriveSide { Left, Right };

// Canonical-form element of the free graded-commutative algebra over a chart:
// a map monomial -> scalar with no zero coefficients stored.  Structural
// equality of the stored map is algebra equality.
class GradedPolynomial {
public:
    GradedPolynomial() = default;
    explicit GradedPolynomial(ChartPtr chart) : chart_(std::move(chart)) {}

    static GradedPolynomial zero(ChartPtr chart) { return GradedPolynomial(std::move(chart)); }

    static GradedPolynomial constant(ChartPtr chart, Scalar s) {
        GradedPolynomial p(std::move(chart));
        p.add_term(Monomial{}, std::move(s));
        return p;
    }

    static GradedPolynomial one(ChartPtr chart) { return constant(std::move(chart), Scalar(1)); }

    static GradedPolynomial coordinate(ChartPtr chart, CoordId id) {
        if (id >= chart->size())
            fail(ErrorKind::UnknownCoordinate, "coordinate id out of range");
        GradedPolynomial p(chart);
        Monomial m;
        m.coords.emplace_back(id, 1);
        p.add_term(std::move(m), Scalar(1));
        return p;
    }

    static GradedPolynomial coordinate(const ChartPtr& chart, const std::string& name,
                                       const std::vector<int>& index = {}) {
        return coordinate(chart, chart->id_of(name, index));
    }

    // Jet symbol factor pi[indices]; the declared symmetry is applied, which
    // may reorder indices with a sign or collapse the term to zero.
    static GradedPolynomial jet(const ChartPtr& chart, const std::string& base,
                                std::vector<int> indices, std::vector<CoordId> deriv = {}) {
        uint32_t decl_id = chart->jet_id(base);
        int sign = canonicalize_jet_indices(chart->jet_decl(decl_id), indices);
        GradedPolynomial p(chart);
        if (sign == 0)
            return p;
        std::sort(deriv.begin(), deriv.end());
        for (CoordId c : deriv)
            if (chart->coord(c).degree != 0)
                fail(ErrorKind::InvalidArgument, "jet derivatives must be degree-0 directions");
        Monomial m;
        m.jets.push_back(JetFactor{decl_id, std::move(indices), std::move(deriv)});
        p.add_term(std::move(m), Scalar(sign));
        return p;
    }

    const ChartPtr& chart() const { return chart_; }
    const std::map<Monomial, Scalar>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }

    bool operator==(const GradedPolynomial& o) const { return terms_ == o.terms_; }
    bool operator!=(const GradedPolynomial& o) const { return !(*this == o); }

    // Degree of a homogeneous polynomial; nullopt for 0 or mixed degrees.
    std::optional<int> degree() const {
        std::optional<int> d;
        for (const auto& [m, s] : terms_) {
            int md = m.degree(*chart_);
            if (d && *d != md)
                return std::nullopt;
            d = md;
        }
        return d;
    }

    bool is_homogeneous() const { return terms_.empty() || degree().has_value(); }

    // Homogeneous of the given degree (zero counts for every degree).
    bool is_homogeneous_of(int deg) const {
        for (const auto& [m, s] : terms_)
            if (m.degree(*chart_) != deg)
                return false;
        return true;
    }

    int parity_of_degree(int deg) const { return ((deg % 2) + 2) % 2; }

    GradedPolynomial operator+(const GradedPolynomial& o) const {
        require_same_chart(o);
        GradedPolynomial r = *this;
        for (const auto& [m, s] : o.terms_)
            r.add_term(m, s);
        return r;
    }
    GradedPolynomial operator-(const GradedPolynomial& o) const {
        require_same_chart(o);
        GradedPolynomial r = *this;
        for (const auto& [m, s] : o.terms_)
            r.add_term(m, -s);
        return r;
    }
    GradedPolynomial operator-() const {
        GradedPolynomial r(chart_);
        for (const auto& [m, s] : terms_)
            r.terms_.emplace(m, -s);
        return r;
    }
    GradedPolynomial& operator+=(const GradedPolynomial& o) { return *this = *this + o; }
    GradedPolynomial& operator-=(const GradedPolynomial& o) { return *this = *this - o; }

    GradedPolynomial operator*(const Scalar& s) const {
        GradedPolynomial r(chart_);
        if (s.is_zero())
            return r;
        for (const auto& [m, c] : terms_)
            r.add_term(m, c * s);
        return r;
    }

    GradedPolynomial operator*(const GradedPolynomial& o) const {
        require_same_chart(o);
        GradedPolynomial r(chart_);
        Monomial merged;
        for (const auto& [ma, sa] : terms_)
            for (const auto& [mb, sb] : o.terms_) {
                int sign = detail::merge_monomials(*chart_, ma, mb, merged);
                if (sign == 0)
                    continue;
                r.add_term(merged, sa * sb * Scalar(sign));
            }
        return r;
    }
    GradedPolynomial& operator*=(const GradedPolynomial& o) { return *this = *this * o; }

    GradedPolynomial pow(uint32_t e) const {
        GradedPolynomial r = one(chart_);
        for (uint32_t k = 0; k < e; ++k)
            r = r * *this;
        return r;
    }

    void add_term(const Monomial& m, const Scalar& s) {
        if (s.is_zero())
            return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, s);
        } else {
            it->second += s;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }

    void require_same_chart(const GradedPolynomial& o) const {
        if (chart_.get() != o.chart_.get())
            fail(ErrorKind::ChartMismatch, "polynomials live on different charts");
    }

    std::string str() const {
        if (terms_.empty())
            return "0";
        std::ostringstream out;
        bool first = true;
        for (const auto& [m, s] : terms_) {
            std::string t = term_str(m, s);
            if (!first)
                out << (t[0] == '-' ? " - " : " + ");
            if (!first && t[0] == '-')
                t = t.substr(1);
            out << t;
            first = false;
        }
        return out.str();
    }

    // One canonical string per term, used by report serialisation.
    std::vector<std::string> term_strings() const {
        std::vector<std::string> r;
        r.reserve(terms_.size());
        for (const auto& [m, s] : terms_)
            r.push_back(term_str(m, s));
        return r;
    }

    std::string term_str(const Monomial& m, const Scalar& s) const {
        std::ostringstream out;
        std::string coeff = s.prefix_str();
        if (m.is_constant())
            return coeff;
        if (coeff == "1")
            coeff.clear();
        else if (coeff == "-1")
            coeff = "-";
        out << coeff;
        bool need_star = !coeff.empty() && coeff != "-";
        for (const auto& [id, e] : m.coords) {
            if (need_star)
                out << "*";
            out << chart_->coord(id).str();
            if (e != 1)
                out << "^" << e;
            need_star = true;
        }
        for (const auto& j : m.jets) {
            if (need_star)
                out << "*";
            out << chart_->jet_decl(j.decl).base << "[";
            for (size_t i = 0; i < j.indices.size(); ++i)
                out << (i ? "," : "") << j.indices[i];
            out << "]";
            for (CoordId c : j.deriv)
                out << "," << chart_->coord(c).str();
            need_star = true;
        }
        return out.str();
    }

private:
    ChartPtr chart_;
    std::map<Monomial, Scalar> terms_;
};

inline GradedPolynomial operator*(const Scalar& s, const GradedPolynomial& p) { return p * s; }

// ---------------------------------------------------------------------------
// normalize: build a polynomial from raw factor lists in arbitrary order.
// Koszul signs come from the sorting permutation restricted to odd factors,
// odd squares vanish, zero coefficients are dropped.
// ---------------------------------------------------------------------------

struct RawJetFactor {
    std::string base;
    std::vector<int> indices;
    std::vector<CoordId> deriv;
};

using RawFactor = std::variant<CoordId, RawJetFactor>;

struct RawTerm {
    Scalar coeff = Scalar(1);
    std::vector<RawFactor> factors;
};

inline GradedPolynomial normalize(const ChartPtr& chart, const std::vector<RawTerm>& raw) {
    GradedPolynomial acc = GradedPolynomial::zero(chart);
    for (const auto& term : raw) {
        GradedPolynomial p = GradedPolynomial::constant(chart, term.coeff);
        for (const auto& f : term.factors) {
            if (std::holds_alternative<CoordId>(f)) {
                CoordId id = std::get<CoordId>(f);
                if (id >= chart->size())
                    fail(ErrorKind::UnknownCoordinate, "coordinate id out of range");
                p *= GradedPolynomial::coordinate(chart, id);
            } else {
                const auto& j = std::get<RawJetFactor>(f);
                p *= GradedPolynomial::jet(chart, j.base, j.indices, j.deriv);
            }
        }
        acc += p;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Graded derivations.
// ---------------------------------------------------------------------------

// Left or right derivative with respect to a chart coordinate.  Acting on a
// jet factor in a degree-0 direction appends that direction to the factor's
// derivative multiset.
inline GradedPolynomial derive(const GradedPolynomial& p, CoordId c, DeriveSide side = DeriveSide::Left) {
    const ChartPtr& chart = p.chart();
    if (c >= chart->size())
        fail(ErrorKind::UnknownCoordinate, "coordinate id out of range");
    const GradedCoordinate& coord = chart->coord(c);
    GradedPolynomial r(chart);

    for (const auto& [m, s] : p.terms()) {
        // coordinate-factor contributions
        for (size_t pos = 0; pos < m.coords.size(); ++pos) {
            if (m.coords[pos].first != c)
                continue;
            Monomial out = m;
            uint32_t e = out.coords[pos].second;
            Scalar factor;
            if (coord.parity() == 0) {
                factor = Scalar((long)e);
                if (e == 1)
                    out.coords.erase(out.coords.begin() + pos);
                else
                    out.coords[pos].second = e - 1;
            } else {
                int before = 0;
                for (size_t k = 0; k < pos; ++k)
                    before += chart->coord(m.coords[k].first).parity() * (int)m.coords[k].second;
                int after = 0;
                for (size_t k = pos + 1; k < m.coords.size(); ++k)
                    after += chart->coord(m.coords[k].first).parity() * (int)m.coords[k].second;
                int sgn = (side == DeriveSide::Left) ? ((before & 1) ? -1 : 1)
                                                     : ((after & 1) ? -1 : 1);
                factor = Scalar(sgn);
                out.coords.erase(out.coords.begin() + pos);
            }
            r.add_term(out, s * factor);
        }
        // jet contributions for degree-0 directions
        if (coord.degree == 0) {
            for (size_t pos = 0; pos < m.jets.size(); ++pos) {
                Monomial out = m;
                JetFactor j = out.jets[pos];
                out.jets.erase(out.jets.begin() + pos);
                j.deriv.insert(std::upper_bound(j.deriv.begin(), j.deriv.end(), c), c);
                out.jets.insert(std::upper_bound(out.jets.begin(), out.jets.end(), j), j);
                r.add_term(out, s);
            }
        }
    }
    return r;
}

inline GradedPolynomial derive(const GradedPolynomial& p, const std::string& name,
                               const std::vector<int>& index = {},
                               DeriveSide side = DeriveSide::Left) {
    return derive(p, p.chart()->id_of(name, index), side);
}

// ---------------------------------------------------------------------------
// Substitution.
// ---------------------------------------------------------------------------

// Explicit values for a jet-symbol family: canonical index tuple -> degree-0
// polynomial.  Lookups apply the declared symmetry; absent canonical entries
// read as zero.
class JetBinding {
public:
    void set(const JetSymbolDecl& decl, std::vector<int> indices, GradedPolynomial value) {
        int sign = canonicalize_jet_indices(decl, indices);
        if (sign == 0) {
            if (!value.is_zero())
                fail(ErrorKind::InvalidArgument,
                     "binding a symmetry-forbidden index pattern of " + decl.base + " to a nonzero value");
            return;
        }
        if (sign < 0)
            value = -value;
        entries_[indices] = std::move(value);
    }

    GradedPolynomial value(const JetSymbolDecl& decl, std::vector<int> indices,
                           const ChartPtr& chart) const {
        int sign = canonicalize_jet_indices(decl, indices);
        if (sign == 0)
            return GradedPolynomial::zero(chart);
        auto it = entries_.find(indices);
        if (it == entries_.end())
            return GradedPolynomial::zero(chart);
        return sign < 0 ? -it->second : it->second;
    }

    const std::map<std::vector<int>, GradedPolynomial>& entries() const { return entries_; }

private:
    std::map<std::vector<int>, GradedPolynomial> entries_;
};

struct Substitution {
    std::map<CoordId, GradedPolynomial> coords;
    std::map<uint32_t, JetBinding> jets; // by jet decl id
};

// Parity-respecting algebra morphism.  Coordinate images must be homogeneous
// of the coordinate's degree; jet images must be degree-0 polynomials in the
// degree-0 coordinates, and derivatives of a bound symbol become actual
// derivatives of the bound polynomial.
inline GradedPolynomial substitute(const GradedPolynomial& p, const Substitution& sub) {
    const ChartPtr& chart = p.chart();
    for (const auto& [id, value] : sub.coords) {
        if (value.chart().get() != chart.get())
            fail(ErrorKind::ChartMismatch, "substitution value lives on a different chart");
        if (!value.is_homogeneous_of(chart->coord(id).degree))
            fail(ErrorKind::DegreeMismatch,
                 "substitution for " + chart->coord(id).str() + " must be homogeneous of degree " +
                     std::to_string(chart->coord(id).degree));
    }
    for (const auto& [decl_id, binding] : sub.jets) {
        for (const auto& [idx, value] : binding.entries()) {
            for (const auto& [m, s] : value.terms())
                for (const auto& [cid, e] : m.coords)
                    if (chart->coord(cid).degree != 0)
                        fail(ErrorKind::DegreeMismatch,
                             "jet binding for " + chart->jet_decl(decl_id).base +
                                 " must only involve degree-0 coordinates");
        }
    }

    GradedPolynomial r(chart);
    for (const auto& [m, s] : p.terms()) {
        GradedPolynomial term = GradedPolynomial::constant(chart, s);
        // factors multiplied in stored (canonical) order; images share the
        // original parities, so this is the morphism value
        for (const auto& [id, e] : m.coords) {
            auto it = sub.coords.find(id);
            GradedPolynomial img =
                it == sub.coords.end() ? GradedPolynomial::coordinate(chart, id) : it->second;
            term *= img.pow(e);
            if (term.is_zero())
                break;
        }
        if (!term.is_zero()) {
            for (const auto& j : m.jets) {
                auto it = sub.jets.find(j.decl);
                if (it == sub.jets.end()) {
                    GradedPolynomial img(chart);
                    Monomial jm;
                    jm.jets.push_back(j);
                    img.add_term(jm, Scalar(1));
                    term *= img;
                } else {
                    GradedPolynomial img =
                        it->second.value(chart->jet_decl(j.decl), j.indices, chart);
                    for (CoordId dir : j.deriv)
                        img = derive(img, dir);
                    term *= img;
                }
                if (term.is_zero())
                    break;
            }
        }
        r += term;
    }
    return r;
}

// Substitute hbar := 0 in every coefficient.
inline GradedPolynomial at_hbar_zero(const GradedPolynomial& p) {
    GradedPolynomial r(p.chart());
    for (const auto& [m, s] : p.terms())
        r.add_term(m, s.at_hbar_zero());
    return r;
}

// Rebuild a polynomial over another chart, matching coordinates by
// (name, index) and jet factors by (base, indices, derivative directions).
// Fails when a factor has no counterpart on the target chart.  Both charts
// must agree on the matched coordinates' degrees.
inline GradedPolynomial transplant(const GradedPolynomial& p, const ChartPtr& target) {
    const ChartPtr& src = p.chart();
    if (src.get() == target.get())
        return p;
    GradedPolynomial r(target);
    for (const auto& [m, s] : p.terms()) {
        GradedPolynomial term = GradedPolynomial::constant(target, s);
        for (const auto& [id, e] : m.coords) {
            const GradedCoordinate& gc = src->coord(id);
            CoordId tid = target->id_of(gc.name, gc.index);
            if (target->coord(tid).degree != gc.degree)
                fail(ErrorKind::DegreeMismatch,
                     "coordinate " + gc.str() + " changes degree across charts");
            term *= GradedPolynomial::coordinate(target, tid).pow(e);
        }
        for (const auto& j : m.jets) {
            std::vector<CoordId> deriv;
            deriv.reserve(j.deriv.size());
            for (CoordId dir : j.deriv) {
                const GradedCoordinate& gc = src->coord(dir);
                deriv.push_back(target->id_of(gc.name, gc.index));
            }
            term *= GradedPolynomial::jet(target, src->jet_decl(j.decl).base, j.indices, deriv);
        }
        r += term;
    }
    return r;
}

} // namespace qpcalc
