#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qpcalc/polynomial.hpp"
#include "qpcalc/rng.hpp"

using namespace qpcalc;

namespace {

// chart with two odd generators theta[1], theta[2] and one even x
ChartPtr small_chart() {
    return Chart::create({
        {"x", {1}, 0},
        {"theta", {1}, 1},
        {"theta", {2}, 1},
    });
}

ChartPtr poisson_chart(int d) {
    std::vector<GradedCoordinate> coords;
    for (int i = 1; i <= d; ++i) {
        coords.push_back({"x", {i}, 0});
        coords.push_back({"xi", {i}, 1});
    }
    std::vector<JetSymbolDecl> jets = {
        {"pi", 2, IndexSymmetry::AntisymmetricPair, 0, 1},
    };
    return Chart::create(coords, jets);
}

GradedPolynomial coord(const ChartPtr& c, const std::string& n, std::vector<int> idx = {}) {
    return GradedPolynomial::coordinate(c, n, idx);
}

} // namespace

TEST_CASE("coordinate parity follows degree") {
    GradedCoordinate even{"x", {}, 0}, odd{"xi", {}, 1}, neg{"cs", {}, -2}, negodd{"phis", {}, -1};
    CHECK(even.parity() == 0);
    CHECK(odd.parity() == 1);
    CHECK(neg.parity() == 0);
    CHECK(negodd.parity() == 1);
}

TEST_CASE("chart rejects duplicate coordinates") {
    CHECK_THROWS_AS(Chart::create({{"x", {1}, 0}, {"x", {1}, 2}}), Error);
}

TEST_CASE("normalize: odd factors anticommute and square to zero") {
    auto c = small_chart();
    CoordId t1 = c->id_of("theta", {1});
    CoordId t2 = c->id_of("theta", {2});

    // theta2 * theta1 -> -theta1 theta2
    GradedPolynomial p = normalize(c, {{Scalar(1), {t2, t1}}});
    GradedPolynomial q = -(coord(c, "theta", {1}) * coord(c, "theta", {2}));
    CHECK(p == q);
    CHECK(p.str() == "-theta[1]*theta[2]");

    // theta1 * theta1 -> 0
    CHECK(normalize(c, {{Scalar(1), {t1, t1}}}).is_zero());

    // x*xi - xi*x -> 0 (even-odd commutation)
    CoordId x = c->id_of("x", {1});
    GradedPolynomial comm = normalize(c, {{Scalar(1), {x, t1}}, {Scalar(-1), {t1, x}}});
    CHECK(comm.is_zero());
}

TEST_CASE("normalize is idempotent and drops zero coefficients") {
    auto c = small_chart();
    CoordId t1 = c->id_of("theta", {1});
    CoordId t2 = c->id_of("theta", {2});
    GradedPolynomial p = normalize(c, {{Scalar(3), {t2, t1}}, {Scalar(3), {t1, t2}}});
    CHECK(p.is_zero());

    // rebuilding from normal-form factors is the identity
    GradedPolynomial q = normalize(c, {{Scalar(5), {t1, t2}}, {Scalar(1, 2), {}}});
    std::vector<RawTerm> again;
    for (const auto& [m, s] : q.terms()) {
        RawTerm t;
        t.coeff = s;
        for (auto [id, e] : m.coords)
            for (uint32_t k = 0; k < e; ++k)
                t.factors.push_back(id);
        again.push_back(t);
    }
    CHECK(normalize(c, again) == q);
}

TEST_CASE("multiply: distributivity and anticommutativity") {
    auto c = small_chart();
    GradedPolynomial t1 = coord(c, "theta", {1});
    GradedPolynomial t2 = coord(c, "theta", {2});

    // (theta1+theta2)^2 = 0
    CHECK(((t1 + t2) * (t1 + t2)).is_zero());

    // (2+theta1)*(3+theta2) = 6 + 3 theta1 + 2 theta2 + theta1 theta2
    GradedPolynomial lhs = (GradedPolynomial::constant(c, Scalar(2)) + t1) *
                           (GradedPolynomial::constant(c, Scalar(3)) + t2);
    GradedPolynomial rhs = GradedPolynomial::constant(c, Scalar(6)) + t1 * Scalar(3) +
                           t2 * Scalar(2) + t1 * t2;
    CHECK(lhs == rhs);
}

TEST_CASE("multiply: jet coefficients are degree 0") {
    auto c = poisson_chart(2);
    GradedPolynomial pi12 = GradedPolynomial::jet(c, "pi", {1, 2});
    GradedPolynomial xi1 = coord(c, "xi", {1});
    GradedPolynomial xi2 = coord(c, "xi", {2});
    GradedPolynomial p = (pi12 * xi1) * xi2;
    CHECK(p == pi12 * (xi1 * xi2));
    CHECK(p.degree() == 2);

    // antisymmetry of pi at construction
    CHECK(GradedPolynomial::jet(c, "pi", {2, 1}) == -pi12);
    CHECK(GradedPolynomial::jet(c, "pi", {1, 1}).is_zero());
}

TEST_CASE("chart mismatch is detected") {
    auto a = small_chart();
    auto b = small_chart();
    CHECK_THROWS_AS(coord(a, "theta", {1}) * coord(b, "theta", {2}), Error);
}

TEST_CASE("derive: left and right odd derivatives") {
    auto c = small_chart();
    GradedPolynomial t1t2 = coord(c, "theta", {1}) * coord(c, "theta", {2});

    // left d/dtheta1 of theta1 theta2 = theta2
    CHECK(derive(t1t2, "theta", {1}, DeriveSide::Left) == coord(c, "theta", {2}));

    // right d/dtheta1 of theta1 theta2 = -theta2
    // oracle: rewrite theta1 theta2 = -theta2 theta1 and strip the rightmost factor
    CHECK(derive(t1t2, "theta", {1}, DeriveSide::Right) == -coord(c, "theta", {2}));

    CHECK_THROWS_AS(derive(t1t2, "nope", {}, DeriveSide::Left), Error);
}

TEST_CASE("derive: jet rule for degree-0 directions") {
    auto c = poisson_chart(2);
    GradedPolynomial p =
        GradedPolynomial::jet(c, "pi", {1, 2}) * coord(c, "xi", {1}) * coord(c, "xi", {2});
    GradedPolynomial dp = derive(p, "x", {1});
    GradedPolynomial expected = GradedPolynomial::jet(c, "pi", {1, 2}, {c->id_of("x", {1})}) *
                                coord(c, "xi", {1}) * coord(c, "xi", {2});
    CHECK(dp == expected);

    // mixed partials commute (sorted multiset storage)
    GradedPolynomial d12 = derive(derive(p, "x", {1}), "x", {2});
    GradedPolynomial d21 = derive(derive(p, "x", {2}), "x", {1});
    CHECK(d12 == d21);
}

TEST_CASE("derive: graded Leibniz property on random inputs") {
    auto c = poisson_chart(3);
    MonomialPool pool(c);
    Rng rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        int dp = (int)rng.below(4);
        int dq = (int)rng.below(4);
        GradedPolynomial p = pool.random_homogeneous(rng, dp);
        GradedPolynomial q = pool.random_homogeneous(rng, dq);
        if (p.is_zero() || q.is_zero())
            continue;
        CoordId cd = (CoordId)rng.below(c->size());
        int pc = c->coord(cd).parity();
        GradedPolynomial lhs = derive(p * q, cd, DeriveSide::Left);
        int sgn = (pc * dp) % 2 ? -1 : 1;
        GradedPolynomial rhs =
            derive(p, cd, DeriveSide::Left) * q + p * derive(q, cd, DeriveSide::Left) * Scalar(sgn);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("derive: second odd derivatives vanish, distinct ones commute with Koszul sign") {
    auto c = poisson_chart(3);
    MonomialPool pool(c);
    Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        GradedPolynomial p = pool.random_homogeneous(rng, (int)rng.below(4));
        CoordId c1 = (CoordId)rng.below(c->size());
        CoordId c2 = (CoordId)rng.below(c->size());
        if (c->coord(c1).parity() == 1)
            CHECK(derive(derive(p, c1), c1).is_zero());
        int sgn = (c->coord(c1).parity() * c->coord(c2).parity()) % 2 ? -1 : 1;
        CHECK(derive(derive(p, c1), c2) == derive(derive(p, c2), c1) * Scalar(sgn));
    }
}

TEST_CASE("substitute: explicit binding of a jet symbol") {
    auto c = poisson_chart(2);

    Substitution sub;
    JetBinding pi;
    pi.set(c->jet_decl(c->jet_id("pi")), {1, 2}, coord(c, "x", {1}));
    sub.jets[c->jet_id("pi")] = pi;

    GradedPolynomial p =
        GradedPolynomial::jet(c, "pi", {1, 2}) * coord(c, "xi", {1}) * coord(c, "xi", {2});
    CHECK(substitute(p, sub) == coord(c, "x", {1}) * coord(c, "xi", {1}) * coord(c, "xi", {2}));

    // derivative of the symbol becomes the derivative of the binding
    GradedPolynomial dp = GradedPolynomial::jet(c, "pi", {1, 2}, {c->id_of("x", {1})}) *
                          coord(c, "xi", {1}) * coord(c, "xi", {2});
    CHECK(substitute(dp, sub) == coord(c, "xi", {1}) * coord(c, "xi", {2}));
}

TEST_CASE("substitute: su(2) structure constants by antisymmetry") {
    // chart of Section-5.1 type: odd c^a, b_a, a = 1..3
    std::vector<GradedCoordinate> coords;
    for (int a = 1; a <= 3; ++a) {
        coords.push_back({"c", {a}, 1});
        coords.push_back({"b", {a}, 1});
    }
    auto chart = Chart::create(coords, {{"C", 3, IndexSymmetry::AntisymmetricPair, 1, 2}});

    // theta = 1/2 C^c_{ab} c^a c^b b_c, formal
    GradedPolynomial theta = GradedPolynomial::zero(chart);
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b)
            for (int cc = 1; cc <= 3; ++cc)
                theta += GradedPolynomial::jet(chart, "C", {cc, a, b}) * coord(chart, "c", {a}) *
                         coord(chart, "c", {b}) * coord(chart, "b", {cc}) * Scalar(1, 2);

    // bind epsilon pattern: C^3_{12} = 1, rest by antisymmetry
    Substitution sub;
    JetBinding bind;
    const auto& decl = chart->jet_decl(chart->jet_id("C"));
    bind.set(decl, {3, 1, 2}, GradedPolynomial::one(chart));
    bind.set(decl, {1, 2, 3}, GradedPolynomial::one(chart));
    bind.set(decl, {2, 3, 1}, GradedPolynomial::one(chart));
    sub.jets[chart->jet_id("C")] = bind;

    // oracle: brute-force expansion over a, b, c in {1,2,3}
    GradedPolynomial expected = coord(chart, "c", {1}) * coord(chart, "c", {2}) * coord(chart, "b", {3}) +
                                coord(chart, "c", {2}) * coord(chart, "c", {3}) * coord(chart, "b", {1}) +
                                coord(chart, "c", {3}) * coord(chart, "c", {1}) * coord(chart, "b", {2});
    CHECK(substitute(theta, sub) == expected);
}

TEST_CASE("substitute: degree mismatch raises") {
    auto c = poisson_chart(2);
    Substitution sub;
    sub.coords[c->id_of("x", {1})] = coord(c, "xi", {1}); // degree 1 into a degree-0 slot
    CHECK_THROWS_AS(substitute(coord(c, "x", {1}), sub), Error);
}

TEST_CASE("substitute respects products") {
    auto c = poisson_chart(2);
    MonomialPool pool(c);
    Rng rng(99);
    Substitution sub;
    sub.coords[c->id_of("x", {2})] = coord(c, "x", {1}) * coord(c, "x", {1});
    sub.coords[c->id_of("xi", {2})] = coord(c, "xi", {1});
    JetBinding pi;
    pi.set(c->jet_decl(c->jet_id("pi")), {1, 2}, coord(c, "x", {1}) * coord(c, "x", {2}));
    sub.jets[c->jet_id("pi")] = pi;
    for (int trial = 0; trial < 40; ++trial) {
        GradedPolynomial p = pool.random_homogeneous(rng, (int)rng.below(3));
        GradedPolynomial q = pool.random_homogeneous(rng, (int)rng.below(3));
        CHECK(substitute(p * q, sub) == substitute(p, sub) * substitute(q, sub));
    }
}

TEST_CASE("graded commutativity on random homogeneous polynomials") {
    auto c = poisson_chart(3);
    MonomialPool pool(c);
    Rng rng(5150);
    for (int trial = 0; trial < 80; ++trial) {
        int dp = (int)rng.below(4);
        int dq = (int)rng.below(4);
        GradedPolynomial p = pool.random_homogeneous(rng, dp);
        GradedPolynomial q = pool.random_homogeneous(rng, dq);
        int sgn = (dp * dq) % 2 ? -1 : 1;
        CHECK(p * q == q * p * Scalar(sgn));
    }
}

TEST_CASE("even coordinates of nonzero degree admit higher powers") {
    auto c = Chart::create({{"x", {}, 0}, {"xi", {}, 2}});
    GradedPolynomial xi = coord(c, "xi");
    GradedPolynomial sq = xi * xi;
    CHECK(!sq.is_zero());
    CHECK(sq.degree() == 4);
}

TEST_CASE("mixed-degree polynomials are flagged inhomogeneous") {
    auto c = small_chart();
    GradedPolynomial p = coord(c, "x", {1}) + coord(c, "theta", {1});
    CHECK(!p.is_homogeneous());
    CHECK(!p.degree().has_value());
    GradedPolynomial q = coord(c, "theta", {1}) * Scalar(4);
    CHECK(q.degree() == 1);
}

TEST_CASE("scalar ring: i and hbar") {
    Scalar i = Scalar::imaginary_unit();
    CHECK(i * i == Scalar(-1));
    Scalar h = Scalar::hbar();
    Scalar s = Scalar(2) * i * h + Scalar(1, 2);
    CHECK(s.at_hbar_zero() == Scalar(1, 2));
    CHECK(s.str() == "1/2+2*i*hbar");
    CHECK((Scalar(3, 2).inverse()) == Scalar(2, 3));
    CHECK_THROWS_AS(h.inverse(), Error);
}
