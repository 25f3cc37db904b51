#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qpcalc/berezin.hpp"
#include "qpcalc/rational_matrix.hpp"
#include "qpcalc/rng.hpp"

using namespace qpcalc;

namespace {

ChartPtr odd_chart(int k, bool with_sigma = false) {
    std::vector<GradedCoordinate> coords;
    if (with_sigma)
        coords.push_back({"sigma", {}, 0});
    for (int i = 1; i <= k; ++i)
        coords.push_back({"theta", {i}, 1});
    return Chart::create(coords);
}

GradedPolynomial th(const ChartPtr& c, int i) {
    return GradedPolynomial::coordinate(c, "theta", {i});
}

// random even / odd parity entries in a pure-odd algebra, scalar body chosen
// by the caller
GradedPolynomial random_even_entry(const ChartPtr& c, const MonomialPool& pool, Rng& rng,
                                   bool unit_body) {
    GradedPolynomial p = GradedPolynomial::constant(
        c, Scalar(unit_body ? rng.small_rational() : Rational(0)));
    p += pool.random_homogeneous(rng, 2, 2);
    return p;
}

GradedPolynomial random_odd_entry(const ChartPtr& c, const MonomialPool& pool, Rng& rng) {
    GradedPolynomial p = pool.random_homogeneous(rng, 1, 2);
    p += pool.random_homogeneous(rng, 3, 1);
    return p;
}

SuperMatrix random_supermatrix(const ChartPtr& c, const MonomialPool& pool, Rng& rng, size_t p,
                               size_t q) {
    SuperMatrix m = SuperMatrix::identity(c, p, q);
    for (size_t i = 0; i < p; ++i)
        for (size_t j = 0; j < p; ++j)
            m.a[i][j] = random_even_entry(c, pool, rng, i == j);
    for (size_t i = 0; i < p; ++i)
        for (size_t j = 0; j < q; ++j)
            m.b[i][j] = random_odd_entry(c, pool, rng);
    for (size_t i = 0; i < q; ++i)
        for (size_t j = 0; j < p; ++j)
            m.c[i][j] = random_odd_entry(c, pool, rng);
    for (size_t i = 0; i < q; ++i)
        for (size_t j = 0; j < q; ++j)
            m.d[i][j] = random_even_entry(c, pool, rng, i == j);
    return m;
}

} // namespace

TEST_CASE("single-variable rule: int d theta (5 + 7 theta) = 7") {
    auto c = odd_chart(1);
    GradedPolynomial p = GradedPolynomial::constant(c, Scalar(5)) + th(c, 1) * Scalar(7);
    CHECK(berezin_integral(p, {{"theta", {1}}}) == GradedPolynomial::constant(c, Scalar(7)));
    CHECK(berezin_integral(GradedPolynomial::one(c), {{"theta", {1}}}).is_zero());
}

TEST_CASE("measure orientation: int d theta1 d theta2 (theta2 theta1) = +1") {
    auto c = odd_chart(2);
    GradedPolynomial t21 = th(c, 2) * th(c, 1);
    GradedPolynomial t12 = th(c, 1) * th(c, 2);
    std::vector<std::pair<std::string, std::vector<int>>> measure = {{"theta", {1}}, {"theta", {2}}};
    CHECK(berezin_integral(t21, measure) == GradedPolynomial::one(c));
    CHECK(berezin_integral(t12, measure) == -GradedPolynomial::one(c));
}

TEST_CASE("berezin integral rejects bad variable lists") {
    auto c = odd_chart(2, /*with_sigma=*/true);
    GradedPolynomial p = th(c, 1);
    CHECK_THROWS_AS(berezin_integral(p, {{"nope", {}}}), Error);
    CHECK_THROWS_AS(berezin_integral(p, {{"sigma", {}}}), Error);
    CHECK_THROWS_AS(berezin_integral(p, {{"theta", {1}}, {"theta", {1}}}), Error);
}

TEST_CASE("linearity and integration by parts") {
    auto c = odd_chart(3);
    MonomialPool pool(c);
    Rng rng(31);
    CoordId t1 = c->id_of("theta", {1});
    auto degrees = pool.degrees();
    for (int trial = 0; trial < 30; ++trial) {
        GradedPolynomial p = pool.random_homogeneous(rng, degrees[rng.below(degrees.size())], 3);
        GradedPolynomial q = pool.random_homogeneous(rng, degrees[rng.below(degrees.size())], 3);
        Scalar a = Scalar(rng.small_rational()), b = Scalar(rng.small_rational());
        CHECK(berezin_integral(p * a + q * b, std::vector<CoordId>{t1}) ==
              berezin_integral(p, std::vector<CoordId>{t1}) * a + berezin_integral(q, std::vector<CoordId>{t1}) * b);
        CHECK(berezin_integral(derive(p, t1, DeriveSide::Left), std::vector<CoordId>{t1}).is_zero());
    }
}

TEST_CASE("berezinian: identity and block-diagonal cases") {
    auto c = odd_chart(2);
    SuperMatrix id = SuperMatrix::identity(c, 2, 2);
    CHECK(berezinian(id) == GradedPolynomial::one(c));

    SuperMatrix m = SuperMatrix::identity(c, 1, 1);
    m.a[0][0] = GradedPolynomial::constant(c, Scalar(2));
    m.d[0][0] = GradedPolynomial::constant(c, Scalar(3));
    CHECK(berezinian(m) == GradedPolynomial::constant(c, Scalar(2, 3)));
}

TEST_CASE("berezinian rejects a singular D and a broken parity layout") {
    auto c = odd_chart(2);
    SuperMatrix m = SuperMatrix::identity(c, 1, 1);
    m.d[0][0] = th(c, 1) * th(c, 2); // zero body
    CHECK_THROWS_AS(berezinian(m), Error);

    SuperMatrix bad = SuperMatrix::identity(c, 1, 1);
    bad.b[0][0] = GradedPolynomial::one(c); // even entry in an odd block
    CHECK_THROWS_AS(berezinian(bad), Error);
}

TEST_CASE("berezinian is multiplicative on random 1|1 and 2|1 supermatrices") {
    auto c = odd_chart(4);
    MonomialPool pool(c);
    Rng rng(47);
    for (auto [p, q] : {std::pair<size_t, size_t>{1, 1}, std::pair<size_t, size_t>{2, 1}}) {
        for (int trial = 0; trial < 25; ++trial) {
            SuperMatrix m = random_supermatrix(c, pool, rng, p, q);
            SuperMatrix n = random_supermatrix(c, pool, rng, p, q);
            GradedPolynomial lhs = berezinian(m * n);
            GradedPolynomial rhs = berezinian(m) * berezinian(n);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("linear odd change of variables scales the top integral by det(M)^{-1}") {
    auto c = odd_chart(3);
    Rng rng(53);
    std::vector<CoordId> thetas = {c->id_of("theta", {1}), c->id_of("theta", {2}),
                                   c->id_of("theta", {3})};
    for (int trial = 0; trial < 15; ++trial) {
        // random invertible rational 3x3
        RationalMatrix m(3, std::vector<Rational>(3, 0));
        Rational det;
        do {
            for (auto& row : m)
                for (auto& e : row)
                    e = rng.small_rational() * (rng.below(2) ? 1 : 0);
            for (int i = 0; i < 3; ++i)
                if (m[i][i] == 0)
                    m[i][i] = 1;
            det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                  m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                  m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        } while (det == 0);
        RationalMatrix minv = rational_matrix_inverse(m);

        // p expressed in the new coordinates theta' = M theta: theta = M^{-1} theta'
        GradedPolynomial p = th(c, 3) * th(c, 2) * th(c, 1) * Scalar(rng.small_rational());
        Substitution sub;
        for (int i = 0; i < 3; ++i) {
            GradedPolynomial img = GradedPolynomial::zero(c);
            for (int j = 0; j < 3; ++j)
                img += GradedPolynomial::coordinate(c, thetas[j]) * Scalar(minv[i][j]);
            sub.coords[thetas[i]] = img;
        }
        GradedPolynomial q = substitute(p, sub);
        GradedPolynomial expected = berezin_integral(p, thetas) * Scalar(Rational(1) / det);
        CHECK(berezin_integral(q, thetas) == expected);
    }
}
