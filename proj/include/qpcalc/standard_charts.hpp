#pragma once

#include <string>
#include <vector>

#include "qpcalc/bracket.hpp"

namespace qpcalc {

// Degree-1 symplectic chart T*[1]R^d: coordinates x^i (degree 0) paired with
// xi_i (degree 1), {x^i, xi_j} = delta^i_j.  Carries the formal bivector
// symbol pi and a totally antisymmetric 3-form symbol H for twisted checks.
inline SymplecticChart make_degree1_chart(int d) {
    std::vector<GradedCoordinate> coords;
    for (int i = 1; i <= d; ++i) {
        coords.push_back({"x", {i}, 0});
        coords.push_back({"xi", {i}, 1});
    }
    std::vector<JetSymbolDecl> jets = {
        {"pi", 2, IndexSymmetry::AntisymmetricPair, 0, 1},
        {"H", 3, IndexSymmetry::TotallyAntisymmetric, 0, 1},
    };
    ChartPtr chart = Chart::create(coords, jets);
    std::vector<ConjugatePair> pairs;
    for (int i = 1; i <= d; ++i)
        pairs.push_back({chart->id_of("x", {i}), chart->id_of("xi", {i}), 1});
    return SymplecticChart(chart, 1, pairs);
}

// Degree-2 chart of a Lie-algebra model: odd c^a paired with odd b_a,
// {c^a, b_b} = delta^a_b.  Carries the formal structure constants C[c,a,b],
// antisymmetric in (a, b).
inline SymplecticChart make_lie_algebra_chart(int rank) {
    std::vector<GradedCoordinate> coords;
    for (int a = 1; a <= rank; ++a) {
        coords.push_back({"c", {a}, 1});
        coords.push_back({"b", {a}, 1});
    }
    ChartPtr chart = Chart::create(coords, {{"C", 3, IndexSymmetry::AntisymmetricPair, 1, 2}});
    std::vector<ConjugatePair> pairs;
    for (int a = 1; a <= rank; ++a)
        pairs.push_back({chart->id_of("c", {a}), chart->id_of("b", {a}), 1});
    return SymplecticChart(chart, 2, pairs);
}

// Degree-2 chart T*[2]E[1] over R^d with rank-r fiber: x^i (0) paired with
// xi_i (2); eta^a (1) self-paired through the symmetric invertible fiber
// metric k, {eta^a, eta^b} = k^{ab}.
inline SymplecticChart make_degree2_chart(int d, int r, RationalMatrix k) {
    std::vector<GradedCoordinate> coords;
    for (int i = 1; i <= d; ++i) {
        coords.push_back({"x", {i}, 0});
        coords.push_back({"xi", {i}, 2});
    }
    for (int a = 1; a <= r; ++a)
        coords.push_back({"eta", {a}, 1});
    std::vector<JetSymbolDecl> jets = {
        {"rho", 2, IndexSymmetry::None, 0, 1},
        {"C", 3, IndexSymmetry::TotallyAntisymmetric, 0, 1},
        {"H4", 4, IndexSymmetry::TotallyAntisymmetric, 0, 1},
    };
    ChartPtr chart = Chart::create(coords, jets);
    std::vector<ConjugatePair> pairs;
    for (int i = 1; i <= d; ++i)
        pairs.push_back({chart->id_of("x", {i}), chart->id_of("xi", {i}), 1});
    MetricBlock mb;
    for (int a = 1; a <= r; ++a)
        mb.coords.push_back(chart->id_of("eta", {a}));
    mb.k = std::move(k);
    return SymplecticChart(chart, 2, pairs, mb);
}

// Degree -1 (BV) chart: for every field spec (name, ghost degree, count) the
// chart gets fields name[i] of that degree and antifields name_a[i] of degree
// -1 - deg, declared as conjugate pairs (field, antifield).
struct BvFieldSpec {
    std::string name;
    int degree = 0;
    int count = 1;
};

inline SymplecticChart make_bv_chart(const std::vector<BvFieldSpec>& fields) {
    std::vector<GradedCoordinate> coords;
    for (const auto& f : fields)
        for (int i = 1; i <= f.count; ++i) {
            coords.push_back({f.name, {i}, f.degree});
            coords.push_back({f.name + "_a", {i}, -1 - f.degree});
        }
    ChartPtr chart = Chart::create(coords);
    std::vector<ConjugatePair> pairs;
    for (const auto& f : fields)
        for (int i = 1; i <= f.count; ++i)
            pairs.push_back({chart->id_of(f.name, {i}), chart->id_of(f.name + "_a", {i}), 1});
    return SymplecticChart(chart, -1, pairs);
}

// Off-diagonal block metric of the standard Courant structure on R^d:
// rank 2d, <q^i, p_j> pairing, k = [[0, I], [I, 0]].
inline RationalMatrix standard_courant_metric(int d) {
    RationalMatrix k(2 * d, std::vector<Rational>(2 * d, 0));
    for (int i = 0; i < d; ++i) {
        k[i][d + i] = 1;
        k[d + i][i] = 1;
    }
    return k;
}

} // namespace qpcalc
