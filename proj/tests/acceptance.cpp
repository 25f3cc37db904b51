// Acceptance suite: runs every acceptance criterion at its stated tolerance
// (all checks are exact; tolerances here are runtime budgets) and prints one
// pass/fail line per criterion.  Exit code 0 iff every criterion passes.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "qpcalc/algebroid.hpp"
#include "qpcalc/berezin.hpp"
#include "qpcalc/checks.hpp"
#include "qpcalc/cli.hpp"

using namespace qpcalc;

namespace {

int eps(int a, int b, int c) {
    int e = (a - b) * (b - c) * (c - a) / 2;
    return e == 0 ? 0 : (e > 0 ? 1 : -1);
}

// recorded normalization constant: (1/2){Theta,Theta} equals this factor
// times the cyclic Jacobi contraction sum_{ijk}[d_m pi^{ij} pi^{mk} + cyc] xi xi xi
const Scalar kJacobiContractionFactor = Scalar(1, 6);

struct Criterion {
    int number;
    std::string title;
    double budget_seconds;
    std::function<bool(std::string&)> run;
};

int parity_of(int k) { return ((k % 2) + 2) % 2; }

bool bracket_axioms_hold(const SymplecticChart& sc, uint64_t seed, int triples, std::string& why) {
    MonomialPool pool(sc.chart());
    auto degrees = pool.degrees();
    Rng rng(seed);
    int n = sc.degree();
    for (int t = 0; t < triples; ++t) {
        int df = degrees[rng.below(degrees.size())];
        int dg = degrees[rng.below(degrees.size())];
        int dh = degrees[rng.below(degrees.size())];
        GradedPolynomial f = pool.random_homogeneous(rng, df, 2);
        GradedPolynomial g = pool.random_homogeneous(rng, dg, 2);
        GradedPolynomial h = pool.random_homogeneous(rng, dh, 2);

        int s_anti = parity_of((df - n) * (dg - n)) ? 1 : -1;
        if (poisson_bracket(f, g, sc) != poisson_bracket(g, f, sc) * Scalar(s_anti)) {
            why = "antisymmetry fails at trial " + std::to_string(t);
            return false;
        }
        int s_leib = parity_of((df - n) * dg) ? -1 : 1;
        if (poisson_bracket(f, g * h, sc) !=
            poisson_bracket(f, g, sc) * h + g * poisson_bracket(f, h, sc) * Scalar(s_leib)) {
            why = "Leibniz fails at trial " + std::to_string(t);
            return false;
        }
        int s_jac = parity_of((df - n) * (dg - n)) ? -1 : 1;
        if (poisson_bracket(f, poisson_bracket(g, h, sc), sc) !=
            poisson_bracket(poisson_bracket(f, g, sc), h, sc) +
                poisson_bracket(g, poisson_bracket(f, h, sc), sc) * Scalar(s_jac)) {
            why = "Jacobi fails at trial " + std::to_string(t);
            return false;
        }
    }
    return true;
}

GradedPolynomial su2_theta(const SymplecticChart& sc, int flip_sign) {
    const ChartPtr& c = sc.chart();
    GradedPolynomial theta = GradedPolynomial::zero(c);
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b)
            for (int cc = 1; cc <= 3; ++cc) {
                int e = eps(a, b, cc);
                if (e == 0)
                    continue;
                // flipping one structure constant C^3_{12} -> -1 (and its
                // antisymmetric partner) when requested
                if (flip_sign && cc == 3 && ((a == 1 && b == 2) || (a == 2 && b == 1)))
                    e = -e;
                theta += GradedPolynomial::coordinate(c, "c", {a}) *
                         GradedPolynomial::coordinate(c, "c", {b}) *
                         GradedPolynomial::coordinate(c, "b", {cc}) * Scalar(e) * Scalar(1, 2);
            }
    return theta;
}

CourantData standard_courant_r3() {
    CourantData data(3, 6, standard_courant_metric(3));
    const ChartPtr& c = data.chart().chart();
    for (int i = 1; i <= 3; ++i)
        data.set_rho(i, i, GradedPolynomial::one(c));
    data.set_c(1, 2, 3, GradedPolynomial::coordinate(c, "x", {1}) + GradedPolynomial::one(c));
    return data;
}

LieAlgebroidData tangent_algebroid(int d) {
    LieAlgebroidData data(d, d);
    for (int i = 1; i <= d; ++i)
        data.set_rho(i, i, GradedPolynomial::one(data.chart()));
    return data;
}

LieAlgebroidData so3_action_algebroid() {
    LieAlgebroidData so3(3, 3);
    const ChartPtr& c = so3.chart();
    for (int i = 1; i <= 3; ++i)
        for (int a = 1; a <= 3; ++a) {
            GradedPolynomial entry = GradedPolynomial::zero(c);
            for (int b = 1; b <= 3; ++b)
                if (eps(a, i, b) != 0)
                    entry += GradedPolynomial::coordinate(c, "x", {b}) * Scalar(eps(a, i, b));
            so3.set_rho(i, a, entry);
        }
    for (int a = 1; a <= 3; ++a)
        for (int b = a + 1; b <= 3; ++b)
            for (int cc = 1; cc <= 3; ++cc)
                if (eps(a, b, cc) != 0)
                    so3.set_c(cc, a, b, GradedPolynomial::constant(c, Scalar(eps(a, b, cc))));
    return so3;
}

LieAlgebroidData su2_fiber(int d) {
    LieAlgebroidData data(d, 3);
    for (int a = 1; a <= 3; ++a)
        for (int b = a + 1; b <= 3; ++b)
            for (int cc = 1; cc <= 3; ++cc)
                if (eps(a, b, cc) != 0)
                    data.set_c(cc, a, b, GradedPolynomial::constant(data.chart(), Scalar(eps(a, b, cc))));
    return data;
}

ConnectionData random_connection(const LieAlgebroidData& data, Rng& rng, int coeff_deg) {
    ConnectionData conn(data.chart(), data.dimension(), data.rank());
    for (int i = 1; i <= data.dimension(); ++i)
        for (int a = 1; a <= data.rank(); ++a)
            for (int b = 1; b <= data.rank(); ++b)
                if (rng.below(2))
                    conn.set_omega(i, a, b, random_body_polynomial(data.chart(), rng, coeff_deg, 1));
    return conn;
}

std::string models_dir() {
#ifdef QPCALC_MODELS_DIR
    return QPCALC_MODELS_DIR;
#else
    return "models";
#endif
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::InvalidArgument, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------

bool criterion1(std::string& why) {
    // >= 500 random polynomials per chart degree (170 triples each)
    if (!bracket_axioms_hold(make_degree1_chart(2), 101, 170, why))
        return false;
    if (!bracket_axioms_hold(make_degree2_chart(2, 2, standard_courant_metric(1)), 102, 170, why))
        return false;
    if (!bracket_axioms_hold(make_bv_chart({{"f", 0, 2}, {"c", 1, 1}}), 103, 170, why))
        return false;
    return true;
}

bool criterion2(std::string& why) {
    PoissonData formal(3, /*formal=*/true);
    const ChartPtr& c = formal.chart().chart();
    CheckReport master = formal.master();
    if (master.pass) {
        why = "formal d=3 master unexpectedly passes";
        return false;
    }

    // oracle 1: the contraction of the cyclic Jacobi expression with xi's
    GradedPolynomial contraction = GradedPolynomial::zero(c);
    auto term = [&](int i, int j, int k) {
        GradedPolynomial t = GradedPolynomial::zero(c);
        for (int m = 1; m <= 3; ++m)
            t += GradedPolynomial::jet(c, "pi", {i, j}, {c->id_of("x", {m})}) *
                 GradedPolynomial::jet(c, "pi", {m, k});
        return t;
    };
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            for (int k = 1; k <= 3; ++k)
                contraction += (term(i, j, k) + term(j, k, i) + term(k, i, j)) *
                               GradedPolynomial::coordinate(c, "xi", {i}) *
                               GradedPolynomial::coordinate(c, "xi", {j}) *
                               GradedPolynomial::coordinate(c, "xi", {k});
    if (master.obstruction != contraction * kJacobiContractionFactor) {
        why = "master obstruction != (1/6) * Jacobi contraction";
        return false;
    }

    // oracle 2: (1/2)[pi,pi]_S from the Schouten route
    GradedPolynomial p = formal.theta();
    GradedPolynomial half_schouten = schouten_bracket(p, p, formal.chart()) * Scalar(1, 2);
    if (master.obstruction != -half_schouten) {
        why = "master obstruction != -(1/2)[pi,pi]_S";
        return false;
    }
    return true;
}

bool criterion3(std::string& why) {
    if (!lie_algebroid_from_q(tangent_algebroid(2)).pass) {
        why = "tangent algebroid fails";
        return false;
    }
    if (!lie_algebroid_from_q(so3_action_algebroid()).pass) {
        why = "so(3) action algebroid fails";
        return false;
    }
    // deliberately broken bracket: C^2_{12} = -1, C^1_{23} = 1, C^3_{31} = 1
    LieAlgebroidData broken(3, 3);
    broken.set_c(2, 1, 2, GradedPolynomial::constant(broken.chart(), Scalar(-1)));
    broken.set_c(1, 2, 3, GradedPolynomial::one(broken.chart()));
    broken.set_c(3, 3, 1, GradedPolynomial::one(broken.chart()));
    LieAlgebroidReport rep = lie_algebroid_from_q(broken);
    if (rep.pass || rep.jacobi.pass || rep.jacobi.obstruction.is_zero()) {
        why = "broken C does not produce a nonzero Jacobi obstruction";
        return false;
    }
    return true;
}

bool criterion4(std::string& why) {
    CourantData data = standard_courant_r3();
    CourantAxiomReport rep = courant_axiom_report(data, 100, 42, 2);
    if (!rep.master.pass) {
        why = "master obstruction nonzero";
        return false;
    }
    for (const auto& a : rep.axioms)
        if (!a.pass) {
            why = "axiom " + a.name + " fails";
            return false;
        }
    return true;
}

bool criterion5(std::string& why) {
    auto sc = make_lie_algebra_chart(3);
    if (!master_obstruction(su2_theta(sc, 0), sc).pass) {
        why = "su(2) fails master";
        return false;
    }
    // Criterion text: flipping one structure constant's sign fails with a
    // nonzero obstruction.  Implemented literally; the flipped constants are
    // those of so(2,1), which is also a Lie algebra, so its obstruction is
    // identically zero and this clause cannot pass.  See the notes ledger.
    CheckReport flipped = master_obstruction(su2_theta(sc, 1), sc);
    if (flipped.pass) {
        why = "flipped structure constant still satisfies the master equation "
              "(the flip yields so(2,1); a genuinely broken bracket is covered by criterion 3)";
        return false;
    }
    return true;
}

bool criterion6(std::string& why) {
    auto sc = make_bv_chart({{"f", 0, 2}, {"c", 1, 1}});
    MonomialPool pool(sc.chart());
    auto degrees = pool.degrees();
    Rng rng(606);
    for (int t = 0; t < 200; ++t) {
        GradedPolynomial p = pool.random_homogeneous(rng, degrees[rng.below(degrees.size())], 3);
        if (!bv_laplacian(bv_laplacian(p, sc), sc).is_zero()) {
            why = "Delta^2 != 0";
            return false;
        }
    }
    for (int t = 0; t < 50; ++t) {
        GradedPolynomial s = pool.random_homogeneous(rng, degrees[rng.below(degrees.size())], 3);
        CheckReport q = quantum_master_obstruction(s, sc);
        if (at_hbar_zero(q.obstruction) != poisson_bracket(s, s, sc)) {
            why = "quantum obstruction at hbar=0 != {S,S}";
            return false;
        }
    }
    return true;
}

bool criterion7(std::string& why) {
    // single-variable rule on a chart with one even and one odd coordinate
    auto c = Chart::create({{"sigma", {}, 0}, {"theta", {}, 1}});
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        GradedPolynomial f1 = random_body_polynomial(c, rng, 3, 3);
        GradedPolynomial f2 = random_body_polynomial(c, rng, 3, 3);
        GradedPolynomial p = f1 + f2 * GradedPolynomial::coordinate(c, "theta");
        if (berezin_integral(p, std::vector<CoordId>{c->id_of("theta")}) != f2) {
            why = "single-variable rule fails";
            return false;
        }
    }

    // multiplicativity on 100 random supermatrices (25 pairs per block size)
    auto oc = Chart::create({{"th", {1}, 1}, {"th", {2}, 1}, {"th", {3}, 1}, {"th", {4}, 1}});
    MonomialPool pool(oc);
    Rng mrng(47);
    auto random_even = [&](bool unit) {
        GradedPolynomial p =
            GradedPolynomial::constant(oc, Scalar(unit ? mrng.small_rational() : Rational(0)));
        return p + pool.random_homogeneous(mrng, 2, 2);
    };
    auto random_odd = [&]() {
        return pool.random_homogeneous(mrng, 1, 2) + pool.random_homogeneous(mrng, 3, 1);
    };
    auto random_super = [&](size_t p, size_t q) {
        SuperMatrix m = SuperMatrix::identity(oc, p, q);
        for (size_t i = 0; i < p; ++i)
            for (size_t j = 0; j < p; ++j)
                m.a[i][j] = random_even(i == j);
        for (size_t i = 0; i < p; ++i)
            for (size_t j = 0; j < q; ++j)
                m.b[i][j] = random_odd();
        for (size_t i = 0; i < q; ++i)
            for (size_t j = 0; j < p; ++j)
                m.c[i][j] = random_odd();
        for (size_t i = 0; i < q; ++i)
            for (size_t j = 0; j < q; ++j)
                m.d[i][j] = random_even(i == j);
        return m;
    };
    for (auto [p, q] : {std::pair<size_t, size_t>{1, 1}, std::pair<size_t, size_t>{2, 1}})
        for (int t = 0; t < 25; ++t) {
            SuperMatrix m = random_super(p, q);
            SuperMatrix n = random_super(p, q);
            if (berezinian(m * n) != berezinian(m) * berezinian(n)) {
                why = "Ber(MN) != Ber(M) Ber(N)";
                return false;
            }
        }

    SuperMatrix bd = SuperMatrix::identity(oc, 1, 1);
    bd.a[0][0] = GradedPolynomial::constant(oc, Scalar(2));
    bd.d[0][0] = GradedPolynomial::constant(oc, Scalar(3));
    if (berezinian(bd) != GradedPolynomial::constant(oc, Scalar(2, 3))) {
        why = "block-diagonal Berezinian != det A / det D";
        return false;
    }
    return true;
}

bool criterion8(std::string& why) {
    // (E d)^2 = 0 on 50 random E-forms split over two distinct algebroids
    for (int which = 0; which < 2; ++which) {
        LieAlgebroidData data = which == 0 ? tangent_algebroid(2) : so3_action_algebroid();
        Rng rng(1000 + which);
        for (int t = 0; t < 25; ++t) {
            int deg = (int)rng.below(3);
            EForm alpha(data.chart(), data.rank(), deg);
            std::vector<int> idx(deg);
            std::function<void(int, int)> walk = [&](int pos, int start) {
                if (pos == deg) {
                    alpha.set(idx, random_body_polynomial(data.chart(), rng, 2, 2));
                    return;
                }
                for (int v = start; v <= data.rank(); ++v) {
                    idx[pos] = v;
                    walk(pos + 1, v + 1);
                }
            };
            walk(0, 1);
            EForm dd = e_differential(e_differential(alpha, data), data);
            for (const auto& [ix, comp] : dd.components())
                if (!comp.is_zero()) {
                    why = "(E d)^2 != 0";
                    return false;
                }
        }
    }

    // basic-curvature decomposition on 20 random small instances
    Rng rng(2024);
    for (int t = 0; t < 20; ++t) {
        LieAlgebroidData data = (t % 3 == 0)   ? tangent_algebroid(2)
                                : (t % 3 == 1) ? so3_action_algebroid()
                                               : su2_fiber(2);
        ConnectionData conn = random_connection(data, rng, 1);
        if (!basic_curvature(data, conn).decomposition_exact) {
            why = "basic-curvature decomposition fails at instance " + std::to_string(t);
            return false;
        }
        // E-torsion and curvature antisymmetry
        for (int a = 1; a <= data.rank(); ++a)
            for (int b = 1; b <= data.rank(); ++b)
                for (int cc = 1; cc <= data.rank(); ++cc)
                    if (e_torsion_component(data, conn, a, b, cc) !=
                        -e_torsion_component(data, conn, b, a, cc)) {
                        why = "torsion antisymmetry fails";
                        return false;
                    }
        for (int i = 1; i <= data.dimension(); ++i)
            for (int j = 1; j <= data.dimension(); ++j)
                for (int a = 1; a <= data.rank(); ++a)
                    for (int b = 1; b <= data.rank(); ++b)
                        if (curvature_component(conn, i, j, a, b) !=
                            -curvature_component(conn, j, i, a, b)) {
                            why = "curvature antisymmetry fails";
                            return false;
                        }
    }
    return true;
}

bool criterion9(std::string& why) {
    // H = 0 standard data: Jacobiator vanishes
    PreCourantData data(standard_courant_r3());
    data.validate();
    PreCourantReport rep = pre_courant_report(data, 10, 7, 2);
    if (!rep.jacobiator.pass) {
        why = "Jacobiator nonzero for H = 0 standard data";
        return false;
    }
    for (const auto& a : rep.axioms)
        if (!a.pass) {
            why = "pre-Courant axiom " + a.name + " fails";
            return false;
        }

    // twisted E-torsion: totally antisymmetric and function-linear on 50 triples
    CourantData cd(2, 4, standard_courant_metric(2));
    const ChartPtr& c = cd.chart().chart();
    for (int i = 1; i <= 2; ++i)
        cd.set_rho(i, i, GradedPolynomial::one(c));
    ConnectionData conn(c, 2, 4);
    CourantGeometry geo(cd, conn);
    Rng rng(41);
    for (int t = 0; t < 50; ++t) {
        Section e1 = random_section(c, 4, rng, 1);
        Section e2 = random_section(c, 4, rng, 1);
        Section e3 = random_section(c, 4, rng, 1);
        GradedPolynomial f = random_body_polynomial(c, rng, 1, 2);
        GradedPolynomial t123 = geo.torsion(e1, e2, e3);
        if (t123 != -geo.torsion(e2, e1, e3) || t123 != -geo.torsion(e1, e3, e2)) {
            why = "twisted torsion is not totally antisymmetric";
            return false;
        }
        Section fe2 = e2;
        for (auto& comp : fe2)
            comp = f * comp;
        if (geo.torsion(e1, fe2, e3) != f * t123) {
            why = "twisted torsion is not function-linear";
            return false;
        }
    }
    return true;
}

bool criterion10(std::string& why) {
    std::vector<std::string> models = {
        "berezin.qp",       "bv_quantum.qp",          "lie_algebroid_so3.qp",
        "poisson_d2.qp",    "poisson_formal_d3.qp",   "pre_courant_h4.qp",
        "standard_courant_r3.qp", "su2.qp",           "twisted_poisson_d3.qp",
    };
    for (const auto& name : models) {
        std::string text = slurp(models_dir() + "/" + name);
        ModelFile m1 = parse_model(text);

        // parse round trip
        std::string p1 = print_model(m1);
        std::string p2 = print_model(parse_model(p1));
        if (p1 != p2) {
            why = "parse round trip differs for " + name;
            return false;
        }

        // golden byte equality of structured reports across two reruns
        RunOptions opts;
        opts.seed = 42;
        std::string j1 = emit_json(run_checks(m1, text, opts));
        std::string j2 = emit_json(run_checks(parse_model(text), text, opts));
        if (j1 != j2) {
            why = "structured report differs across reruns for " + name;
            return false;
        }
    }

    // exit-code contract through the CLI entry point
    auto run = [&](std::vector<std::string> args) {
        std::vector<char*> argv;
        args.insert(args.begin(), "qpcalc");
        for (auto& a : args)
            argv.push_back(a.data());
        std::ostringstream out, err;
        return run_cli((int)argv.size(), argv.data(), out, err);
    };
    if (run({"check", models_dir() + "/su2.qp"}) != 0) {
        why = "passing model does not exit 0";
        return false;
    }
    if (run({"check", models_dir() + "/poisson_formal_d3.qp"}) != 1) {
        why = "failing model does not exit 1";
        return false;
    }
    std::string bad = "/tmp/qpcalc_acceptance_bad.qp";
    {
        std::ofstream f(bad, std::ios::binary);
        f << "chart degree {\n";
    }
    if (run({"check", bad}) != 2) {
        why = "parse error does not exit 2";
        return false;
    }
    if (run({"check"}) != 2) {
        why = "missing model does not exit 2";
        return false;
    }
    return true;
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "bracket axiom suite on chart degrees -1, 1, 2", 10.0, criterion1},
        {2, "Poisson equivalence triangle (master / Jacobi contraction / Schouten)", 1.0, criterion2},
        {3, "degree-1 Q-manifolds induce Lie algebroids", 1.0, criterion3},
        {4, "degree-2 QP induces a Courant algebroid on the standard data", 60.0, criterion4},
        {5, "Lie-algebra chart: su(2) passes, one flipped sign fails", 1.0, criterion5},
        {6, "quantum layer: Delta^2 = 0 and the hbar -> 0 reduction", 5.0, criterion6},
        {7, "Berezin integral and Berezinian multiplicativity", 10.0, criterion7},
        {8, "algebroid calculus: differentials, decomposition, antisymmetries", 60.0, criterion8},
        {9, "pre-Courant Jacobiator and twisted torsion properties", 30.0, criterion9},
        {10, "CLI golden reports, parse round trips, exit codes", 30.0, criterion10},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string why;
        bool ok = false;
        try {
            ok = c.run(why);
        } catch (const std::exception& e) {
            why = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.budget_seconds) {
            ok = false;
            why = (why.empty() ? "" : why + "; ") + std::string("runtime budget exceeded");
        }
        std::printf("[%s] criterion %2d: %s (%.2fs)%s%s\n", ok ? "PASS" : "FAIL", c.number,
                    c.title.c_str(), secs, why.empty() ? "" : " -- ", why.c_str());
        if (!ok)
            ++failures;
    }
    if (failures)
        std::printf("%d criterion(s) failed\n", failures);
    else
        std::printf("all criteria passed\n");
    return failures == 0 ? 0 : 1;
}
