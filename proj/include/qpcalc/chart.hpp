#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qpcalc/errors.hpp"
#include "qpcalc/scalar.hpp"

namespace qpcalc {

// A graded coordinate: name, optional concrete index tuple and an integer
// degree (negative degrees allowed).  Parity is degree mod 2, never assigned
// independently.
struct GradedCoordinate {
    std::string name;
    std::vector<int> index;
    int degree = 0;

    int parity() const { return ((degree % 2) + 2) % 2; }

    std::string str() const {
        std::ostringstream out;
        out << name;
        if (!index.empty()) {
            out << "[";
            for (size_t i = 0; i < index.size(); ++i)
                out << (i ? "," : "") << index[i];
            out << "]";
        }
        return out.str();
    }
};

enum class IndexSymmetry {
    None,
    SymmetricPair,         // symmetric in two designated slots
    AntisymmetricPair,     // antisymmetric in two designated slots
    TotallyAntisymmetric,  // antisymmetric in all slots
};

// Declaration of a formal structure-function family ("jet symbol"), e.g.
// pi[i,j] antisymmetric, rho[i,a] with no symmetry, C[c,a,b] antisymmetric in
// the last two slots.  The symmetry is fixed at declaration and enforced at
// construction of every concrete instance.
struct JetSymbolDecl {
    std::string base;
    int arity = 0;
    IndexSymmetry symmetry = IndexSymmetry::None;
    int slot_a = 0; // pairwise symmetries act on (slot_a, slot_b)
    int slot_b = 1;
};

using CoordId = uint32_t;

// A chart: a finite ordered set of graded coordinates plus the jet-symbol
// declarations usable over it.  Coordinates are stored in the canonical order
// ascending (degree, name, index); ids follow that order, so sorting factor
// lists by id is sorting into canonical order.  Immutable once built.
class Chart {
public:
    static std::shared_ptr<const Chart> create(std::vector<GradedCoordinate> coords,
                                               std::vector<JetSymbolDecl> jets = {}) {
        auto chart = std::shared_ptr<Chart>(new Chart());
        std::sort(coords.begin(), coords.end(), [](const auto& a, const auto& b) {
            return std::tie(a.degree, a.name, a.index) < std::tie(b.degree, b.name, b.index);
        });
        for (size_t i = 0; i + 1 < coords.size(); ++i) {
            if (coords[i].name == coords[i + 1].name && coords[i].index == coords[i + 1].index)
                fail(ErrorKind::InvalidArgument, "duplicate coordinate " + coords[i].str());
        }
        chart->coords_ = std::move(coords);
        for (CoordId id = 0; id < chart->coords_.size(); ++id) {
            const auto& c = chart->coords_[id];
            chart->lookup_[key_of(c.name, c.index)] = id;
            if (c.degree == 0)
                chart->degree0_.push_back(id);
        }
        chart->jets_ = std::move(jets);
        for (uint32_t j = 0; j < chart->jets_.size(); ++j) {
            if (chart->jet_lookup_.count(chart->jets_[j].base))
                fail(ErrorKind::InvalidArgument, "duplicate jet symbol " + chart->jets_[j].base);
            chart->jet_lookup_[chart->jets_[j].base] = j;
        }
        return chart;
    }

    size_t size() const { return coords_.size(); }
    const GradedCoordinate& coord(CoordId id) const { return coords_.at(id); }
    const std::vector<GradedCoordinate>& coords() const { return coords_; }
    const std::vector<CoordId>& degree0_ids() const { return degree0_; }

    std::optional<CoordId> find(const std::string& name, const std::vector<int>& index = {}) const {
        auto it = lookup_.find(key_of(name, index));
        if (it == lookup_.end())
            return std::nullopt;
        return it->second;
    }

    CoordId id_of(const std::string& name, const std::vector<int>& index = {}) const {
        auto id = find(name, index);
        if (!id)
            fail(ErrorKind::UnknownCoordinate,
                 "coordinate " + GradedCoordinate{name, index, 0}.str() + " is not in the chart");
        return *id;
    }

    const std::vector<JetSymbolDecl>& jet_decls() const { return jets_; }
    const JetSymbolDecl& jet_decl(uint32_t id) const { return jets_.at(id); }

    std::optional<uint32_t> find_jet(const std::string& base) const {
        auto it = jet_lookup_.find(base);
        if (it == jet_lookup_.end())
            return std::nullopt;
        return it->second;
    }

    uint32_t jet_id(const std::string& base) const {
        auto id = find_jet(base);
        if (!id)
            fail(ErrorKind::UndeclaredIdentifier, "jet symbol " + base + " is not declared");
        return *id;
    }

private:
    Chart() = default;

    static std::string key_of(const std::string& name, const std::vector<int>& index) {
        std::ostringstream out;
        out << name;
        for (int i : index)
            out << "," << i;
        return out.str();
    }

    std::vector<GradedCoordinate> coords_;
    std::map<std::string, CoordId> lookup_;
    std::vector<CoordId> degree0_;
    std::vector<JetSymbolDecl> jets_;
    std::map<std::string, uint32_t> jet_lookup_;
};

using ChartPtr = std::shared_ptr<const Chart>;

// Canonicalisation of a jet-symbol index tuple under the declared symmetry.
// Returns the sign (+1/-1) or 0 when the pattern is forbidden (repeated index
// in an antisymmetric slot group).  The tuple is reordered in place.
inline int canonicalize_jet_indices(const JetSymbolDecl& decl, std::vector<int>& idx) {
    if ((int)idx.size() != decl.arity)
        fail(ErrorKind::IndexOutOfRange,
             "jet symbol " + decl.base + " expects " + std::to_string(decl.arity) + " indices");
    switch (decl.symmetry) {
    case IndexSymmetry::None:
        return 1;
    case IndexSymmetry::SymmetricPair: {
        int& a = idx[decl.slot_a];
        int& b = idx[decl.slot_b];
        if (a > b)
            std::swap(a, b);
        return 1;
    }
    case IndexSymmetry::AntisymmetricPair: {
        int& a = idx[decl.slot_a];
        int& b = idx[decl.slot_b];
        if (a == b)
            return 0;
        if (a > b) {
            std::swap(a, b);
            return -1;
        }
        return 1;
    }
    case IndexSymmetry::TotallyAntisymmetric: {
        // insertion sort, tracking permutation parity
        int sign = 1;
        for (size_t i = 1; i < idx.size(); ++i)
            for (size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
                std::swap(idx[j - 1], idx[j]);
                sign = -sign;
            }
        for (size_t i = 0; i + 1 < idx.size(); ++i)
            if (idx[i] == idx[i + 1])
                return 0;
        return sign;
    }
    }
    return 1;
}

} // namespace qpcalc
