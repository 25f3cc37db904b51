#pragma once

#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qpcalc/algebroid.hpp"
#include "qpcalc/berezin.hpp"
#include "qpcalc/model.hpp"
#include "qpcalc/version.hpp"

namespace qpcalc {

// ---------------------------------------------------------------------------
// Expression evaluation over a chart.
// ---------------------------------------------------------------------------

namespace run_detail {

inline long resolve_index(const IndexExpr& e, const std::map<std::string, long>& env, SourcePos pos) {
    if (!e.is_var)
        return e.value;
    auto it = env.find(e.var);
    if (it == env.end())
        fail(ErrorKind::UndeclaredIdentifier,
             "unbound index variable '" + e.var + "' at " + pos.str());
    return it->second;
}

} // namespace run_detail

inline GradedPolynomial eval_expr(const Expr& e, const ChartPtr& chart,
                                  std::map<std::string, long>& env) {
    using K = Expr::Kind;
    switch (e.kind) {
    case K::Number:
        return GradedPolynomial::constant(chart, Scalar(e.number));
    case K::Hbar:
        return GradedPolynomial::constant(chart, Scalar::hbar());
    case K::Imag:
        return GradedPolynomial::constant(chart, Scalar::imaginary_unit());
    case K::Neg:
        return -eval_expr(*e.a, chart, env);
    case K::Add:
        return eval_expr(*e.a, chart, env) + eval_expr(*e.b, chart, env);
    case K::Sub:
        return eval_expr(*e.a, chart, env) - eval_expr(*e.b, chart, env);
    case K::Mul:
        return eval_expr(*e.a, chart, env) * eval_expr(*e.b, chart, env);
    case K::Div:
        return eval_expr(*e.a, chart, env) * Scalar(Rational(1) / e.number);
    case K::Sum: {
        GradedPolynomial acc = GradedPolynomial::zero(chart);
        if (env.count(e.sum_var))
            fail(ErrorKind::SyntaxError,
                 "sum variable '" + e.sum_var + "' shadows an outer binder at " + e.pos.str());
        for (long v = e.sum_lo; v <= e.sum_hi; ++v) {
            env[e.sum_var] = v;
            acc += eval_expr(*e.a, chart, env);
        }
        env.erase(e.sum_var);
        return acc;
    }
    case K::Ref: {
        std::vector<int> idx;
        idx.reserve(e.indices.size());
        for (const auto& i : e.indices)
            idx.push_back((int)run_detail::resolve_index(i, env, e.pos));
        if (e.derivs.empty()) {
            if (auto id = chart->find(e.name, idx))
                return GradedPolynomial::coordinate(chart, *id);
            if (idx.empty()) {
                if (auto id = chart->find(e.name))
                    return GradedPolynomial::coordinate(chart, *id);
            }
        }
        if (chart->find_jet(e.name)) {
            std::vector<CoordId> dirs;
            const auto& deg0 = chart->degree0_ids();
            for (const auto& d : e.derivs) {
                long k = run_detail::resolve_index(d, env, e.pos);
                if (k < 1 || (size_t)k > deg0.size())
                    fail(ErrorKind::IndexOutOfRange,
                         "derivative direction out of range at " + e.pos.str());
                dirs.push_back(deg0[k - 1]);
            }
            return GradedPolynomial::jet(chart, e.name, idx, dirs);
        }
        fail(ErrorKind::UndeclaredIdentifier,
             "unknown identifier '" + e.name + "' at " + e.pos.str());
    }
    }
    fail(ErrorKind::SyntaxError, "unreachable expression kind");
}

inline GradedPolynomial eval_expr(const Expr& e, const ChartPtr& chart) {
    std::map<std::string, long> env;
    return eval_expr(e, chart, env);
}

// ---------------------------------------------------------------------------
// Realizing the model: charts, bindings, structure data.
// ---------------------------------------------------------------------------

class ModelRealization {
public:
    explicit ModelRealization(const ModelFile& m) : m_(m) {
        for (const auto& s : m_.symbols)
            symbols_[s.name] = &s;
    }

    const ModelFile& ast() const { return m_; }

    // jet declarations shared by every chart built from this model
    std::vector<JetSymbolDecl> jet_decls() const {
        std::vector<JetSymbolDecl> decls;
        for (const auto& s : m_.symbols) {
            JetSymbolDecl d;
            d.base = s.name;
            d.arity = s.arity;
            d.symmetry = s.symmetry;
            if (s.slot_a > 0) {
                d.slot_a = s.slot_a - 1;
                d.slot_b = s.slot_b - 1;
            } else {
                d.slot_a = s.arity >= 2 ? s.arity - 2 : 0;
                d.slot_b = s.arity >= 2 ? s.arity - 1 : 0;
            }
            if (d.slot_a < 0 || d.slot_b >= d.arity || d.slot_a >= d.slot_b) {
                if (s.symmetry == IndexSymmetry::SymmetricPair ||
                    s.symmetry == IndexSymmetry::AntisymmetricPair)
                    fail(ErrorKind::IndexOutOfRange,
                         "invalid symmetry slots for symbol " + s.name + " at " + s.pos.str());
            }
            decls.push_back(std::move(d));
        }
        return decls;
    }

    // the declared chart, built once
    const SymplecticChart& chart() {
        if (!sc_) {
            if (!m_.chart)
                fail(ErrorKind::InvalidArgument, "this check needs a chart block");
            const ChartDecl& cd = *m_.chart;
            std::vector<GradedCoordinate> coords;
            for (const auto& c : cd.coords) {
                if (c.range) {
                    for (long i = c.range->first; i <= c.range->second; ++i)
                        coords.push_back({c.name, {(int)i}, c.degree});
                } else {
                    coords.push_back({c.name, {}, c.degree});
                }
            }
            ChartPtr chart = Chart::create(std::move(coords), jet_decls());

            std::vector<ConjugatePair> pairs;
            for (const auto& p : cd.pairs) {
                auto range_of = [&](const std::string& n) -> std::pair<long, long> {
                    for (const auto& c : cd.coords)
                        if (c.name == n)
                            return c.range.value_or(std::make_pair(0L, 0L));
                    fail(ErrorKind::UndeclaredIdentifier, "unknown coordinate " + n);
                };
                bool var = (p.ai && p.ai->is_var) || (p.bi && p.bi->is_var);
                if (var) {
                    auto ra = range_of(p.a);
                    auto rb = range_of(p.b);
                    if (ra != rb)
                        fail(ErrorKind::IndexOutOfRange,
                             "paired families have different index ranges at " + p.pos.str());
                    if (ra.first == 0 && ra.second == 0)
                        fail(ErrorKind::IndexOutOfRange,
                             "index-variable pair over unindexed coordinates at " + p.pos.str());
                    for (long i = ra.first; i <= ra.second; ++i)
                        pairs.push_back({chart->id_of(p.a, {(int)i}), chart->id_of(p.b, {(int)i}), 1});
                } else {
                    std::vector<int> ia, ib;
                    if (p.ai)
                        ia.push_back((int)p.ai->value);
                    if (p.bi)
                        ib.push_back((int)p.bi->value);
                    pairs.push_back({chart->id_of(p.a, ia), chart->id_of(p.b, ib), 1});
                }
            }

            std::optional<MetricBlock> metric;
            if (cd.metric) {
                MetricBlock mb;
                std::pair<long, long> range{0, 0};
                for (const auto& c : cd.coords)
                    if (c.name == cd.metric->coords && c.range)
                        range = *c.range;
                if (range == std::pair<long, long>{0, 0})
                    fail(ErrorKind::IndexOutOfRange, "metric block needs an indexed family");
                long n = range.second - range.first + 1;
                for (long i = range.first; i <= range.second; ++i)
                    mb.coords.push_back(chart->id_of(cd.metric->coords, {(int)i}));
                mb.k.assign(n, std::vector<Rational>(n, 0));
                for (const auto& b : m_.binds) {
                    if (b.name != cd.metric->symbol)
                        continue;
                    if (b.indices.size() != 2)
                        fail(ErrorKind::IndexOutOfRange, "metric entries take two indices");
                    GradedPolynomial v = eval_expr(*b.value, chart);
                    Scalar s = body_scalar(v);
                    if (v != GradedPolynomial::constant(chart, s) || !s.is_rational())
                        fail(ErrorKind::InvalidArgument, "metric entries must be rational constants");
                    long i = b.indices[0] - range.first;
                    long j = b.indices[1] - range.first;
                    if (i < 0 || i >= n || j < 0 || j >= n)
                        fail(ErrorKind::IndexOutOfRange, "metric index out of range");
                    mb.k[i][j] = s.rational_value();
                    mb.k[j][i] = s.rational_value();
                }
                metric = std::move(mb);
            }
            sc_.emplace(chart, cd.degree, std::move(pairs), std::move(metric));
        }
        return *sc_;
    }

    // substitution carrying every bound symbol (unbound entries read as zero)
    Substitution bindings_for(const ChartPtr& chart) const {
        Substitution sub;
        for (const auto& b : m_.binds) {
            auto jid = chart->find_jet(b.name);
            if (!jid)
                continue;
            std::vector<int> idx(b.indices.begin(), b.indices.end());
            GradedPolynomial value = eval_expr(*b.value, chart);
            sub.jets[*jid].set(chart->jet_decl(*jid), idx, value);
        }
        return sub;
    }

    bool symbol_bound(const std::string& name) const {
        for (const auto& b : m_.binds)
            if (b.name == name)
                return true;
        return false;
    }

    GradedPolynomial theta() {
        const SymplecticChart& sc = chart();
        if (!m_.theta)
            fail(ErrorKind::InvalidArgument, "this check needs a theta declaration");
        GradedPolynomial t = eval_expr(*m_.theta, sc.chart());
        return substitute(t, bindings_for(sc.chart()));
    }

    const DataDecl* find_data(std::initializer_list<DataKind> kinds) const {
        for (const auto& d : m_.data)
            for (DataKind k : kinds)
                if (d.kind == k)
                    return &d;
        return nullptr;
    }

    // table filler: copy bound entries of `symbol` into a structure table
    template <typename SetFn>
    void fill_entries(const std::string& symbol, const ChartPtr& chart, SetFn set) const {
        for (const auto& b : m_.binds) {
            if (b.name != symbol)
                continue;
            std::vector<int> idx(b.indices.begin(), b.indices.end());
            set(idx, eval_expr(*b.value, chart));
        }
    }

    std::string role_of(const DataDecl& d, const std::string& role, bool required) const {
        auto it = d.roles.find(role);
        if (it == d.roles.end()) {
            if (required)
                fail(ErrorKind::InvalidArgument,
                     "data block at " + d.pos.str() + " needs a '" + role + "' symbol");
            return "";
        }
        return it->second;
    }

    PoissonData poisson_data(const DataDecl& d) const {
        if (d.dim < 1)
            fail(ErrorKind::InvalidArgument, "poisson data needs dim");
        std::string pi = role_of(d, "bivector", !d.formal);
        PoissonData data((int)d.dim, d.formal || !symbol_bound(pi));
        if (!pi.empty())
            fill_entries(pi, data.chart().chart(), [&](std::vector<int> idx, GradedPolynomial v) {
                if (idx.size() != 2)
                    fail(ErrorKind::IndexOutOfRange, "bivector entries take two indices");
                data.set_pi(idx[0], idx[1], std::move(v));
            });
        return data;
    }

    TwistedPoissonData twisted_poisson_data(const DataDecl& d) const {
        TwistedPoissonData data(poisson_data(d));
        std::string h = role_of(d, "twist", false);
        if (!h.empty())
            fill_entries(h, data.chart().chart(), [&](std::vector<int> idx, GradedPolynomial v) {
                if (idx.size() != 3)
                    fail(ErrorKind::IndexOutOfRange, "3-form entries take three indices");
                data.set_h(idx[0], idx[1], idx[2], std::move(v));
            });
        data.validate();
        return data;
    }

    LieAlgebroidData lie_algebroid_data(const DataDecl& d) const {
        if (d.dim < 1 || d.rank < 1)
            fail(ErrorKind::InvalidArgument, "lie_algebroid data needs dim and rank");
        LieAlgebroidData data((int)d.dim, (int)d.rank, d.formal);
        std::string rho = role_of(d, "anchor", false);
        std::string c = role_of(d, "bracket", false);
        if (!rho.empty())
            fill_entries(rho, data.chart(), [&](std::vector<int> idx, GradedPolynomial v) {
                if (idx.size() != 2)
                    fail(ErrorKind::IndexOutOfRange, "anchor entries take two indices");
                data.set_rho(idx[0], idx[1], std::move(v));
            });
        if (!c.empty())
            fill_entries(c, data.chart(), [&](std::vector<int> idx, GradedPolynomial v) {
                if (idx.size() != 3)
                    fail(ErrorKind::IndexOutOfRange, "bracket entries take three indices");
                data.set_c(idx[0], idx[1], idx[2], std::move(v));
            });
        return data;
    }

    RationalMatrix metric_matrix(const DataDecl& d, const std::string& symbol) const {
        long r = d.rank;
        RationalMatrix k(r, std::vector<Rational>(r, 0));
        const SymplecticChart* probe = nullptr;
        (void)probe;
        for (const auto& b : m_.binds) {
            if (b.name != symbol)
                continue;
            if (b.indices.size() != 2)
                fail(ErrorKind::IndexOutOfRange, "metric entries take two indices");
            // metric entries are rational constants: evaluate over a tiny chart
            static const ChartPtr scratch = Chart::create({{"x", {1}, 0}});
            GradedPolynomial v = eval_expr(*b.value, scratch);
            Scalar s = body_scalar(v);
            if (v != GradedPolynomial::constant(scratch, s) || !s.is_rational())
                fail(ErrorKind::InvalidArgument, "metric entries must be rational constants");
            long i = b.indices[0] - 1, j = b.indices[1] - 1;
            if (i < 0 || i >= r || j < 0 || j >= r)
                fail(ErrorKind::IndexOutOfRange, "metric index out of range");
            k[i][j] = s.rational_value();
            k[j][i] = s.rational_value();
        }
        return k;
    }

    CourantData courant_data(const DataDecl& d) const {
        if (d.dim < 1 || d.rank < 1)
            fail(ErrorKind::InvalidArgument, "courant data needs dim and rank");
        std::string kname = role_of(d, "metric", true);
        CourantData data((int)d.dim, (int)d.rank, metric_matrix(d, kname), d.formal);
        std::string rho = role_of(d, "anchor", false);
        std::string c = role_of(d, "cform", false);
        if (!rho.empty())
            fill_entries(rho, data.chart().chart(), [&](std::vector<int> idx, GradedPolynomial v) {
                if (idx.size() != 2)
                    fail(ErrorKind::IndexOutOfRange, "anchor entries take two indices");
                data.set_rho(idx[0], idx[1], std::move(v));
            });
        if (!c.empty())
            fill_entries(c, data.chart().chart(), [&](std::vector<int> idx, GradedPolynomial v) {
                if (idx.size() != 3)
                    fail(ErrorKind::IndexOutOfRange, "cform entries take three indices");
                data.set_c(idx[0], idx[1], idx[2], std::move(v));
            });
        return data;
    }

    PreCourantData pre_courant_data(const DataDecl& d) const {
        PreCourantData data(courant_data(d));
        std::string h = role_of(d, "twist", false);
        if (!h.empty())
            fill_entries(h, data.courant().chart().chart(),
                         [&](std::vector<int> idx, GradedPolynomial v) {
                             if (idx.size() != 4)
                                 fail(ErrorKind::IndexOutOfRange, "4-form entries take four indices");
                             data.set_h(idx[0], idx[1], idx[2], idx[3], std::move(v));
                         });
        data.validate();
        return data;
    }

    ConnectionData connection_for(const DataDecl& d, const ChartPtr& chart, int dim, int rank) const {
        ConnectionData conn(chart, dim, rank);
        std::string omega = role_of(d, "connection", false);
        if (!omega.empty())
            fill_entries(omega, chart, [&](std::vector<int> idx, GradedPolynomial v) {
                if (idx.size() != 3)
                    fail(ErrorKind::IndexOutOfRange, "connection entries take three indices");
                conn.set_omega(idx[0], idx[1], idx[2], std::move(v));
            });
        return conn;
    }

private:
    const ModelFile& m_;
    std::map<std::string, const SymbolDeclAst*> symbols_;
    std::optional<SymplecticChart> sc_;
};

// ---------------------------------------------------------------------------
// The check registry and runner.
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    std::string anchor;
    bool pass = false;
    std::vector<std::string> obstruction;
    std::string note;
};

struct RunOptions {
    uint64_t seed = 1;
    long trials = 0; // 0 = per-check default
    bool parallel = false;
};

struct Report {
    std::string model_hash;
    std::string engine;
    uint64_t seed = 1;
    std::map<std::string, std::string> conventions;
    std::vector<CheckResult> results;

    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass)
                return false;
        return true;
    }
};

inline const std::vector<std::pair<std::string, std::string>>& check_catalog() {
    static const std::vector<std::pair<std::string, std::string>> catalog = {
        {"master", "{Theta,Theta} = 0"},
        {"quantum-master", "-2*i*hbar*Delta(S) + {S,S} = 0"},
        {"poisson-jacobi", "pi^{im} d_m pi^{jk} + (ijk cyclic) = 0"},
        {"schouten", "[pi,pi]_S = 0"},
        {"twisted-poisson", "(1/2)[pi,pi]_S = H(pi#,pi#,pi#)"},
        {"lie-algebroid", "Q^2 = 0 on E[1]"},
        {"courant-axioms", "Dorfman bracket axioms 1-5"},
        {"pre-courant-jacobiator", "Jacobiator = rho*H(rho e1, rho e2, rho e3)"},
        {"e-differential-squared", "(E d)^2 = 0"},
        {"basic-curvature-decomposition", "E S = nabla T + 2 Alt iota_rho R"},
        {"bianchi", "d^{E nabla}(E S) = 0"},
        {"twisted-courant-torsion", "T is a totally antisymmetric 3-tensor on E"},
        {"berezinian", "Ber = det(A - B D^-1 C) det(D)^-1"},
    };
    return catalog;
}

inline std::string check_anchor(const std::string& name) {
    for (const auto& [n, a] : check_catalog())
        if (n == name)
            return a;
    fail(ErrorKind::InvalidArgument, "unknown check name '" + name + "'");
}

inline std::map<std::string, std::string> engine_conventions() {
    return {
        {"alt_weight", "Alt X(e,e') = (1/2)(X(e,e') - X(e',e))"},
        {"anchor_sign", "rho(e) f = -{{e,Theta},f}"},
        {"berezin_measure", "int d th^1..d th^k picks th^k..th^1 with sign +1"},
        {"bracket_normalization", "{a,b} = +weight per pair; {eta^a,eta^b} = k^{ab}"},
        {"bv_laplacian", "Delta = sum (-1)^{|Phi|} dL_Phi dL_{Phi*}; Delta(Phi Phi*) = +1"},
        {"dorfman_sign", "[e1,e2]_D = -{{e1,Theta},e2}"},
        {"exact_term_sign", "D f = -{Theta,f}"},
        {"jacobi_contraction_factor", "1/6"},
        {"master_obstruction", "(1/2){Theta,Theta}"},
        {"q_map", "Q(f) = {Theta,f}"},
        {"schouten_sign", "[P,Q]_S = -{P,Q}"},
        {"skew_bracket", "[e1,e2]_E = (1/2)([e1,e2]_D - [e2,e1]_D)"},
        {"twisted_anchor", "rho(alpha)^j = pi^{ij} alpha_i (Leibniz-compatible slot)"},
    };
}

namespace run_detail {

inline long param_or(const CheckDecl& c, const char* key, long fallback) {
    auto it = c.params.find(key);
    return it == c.params.end() ? fallback : it->second;
}

inline CheckResult from_check_report(std::string name, const CheckReport& rep,
                                     const ChartPtr& chart) {
    (void)chart;
    CheckResult r;
    r.name = std::move(name);
    r.anchor = check_anchor(r.name);
    r.pass = rep.pass;
    r.obstruction = rep.obstruction.term_strings();
    return r;
}

} // namespace run_detail

inline CheckResult run_one_check(const ModelFile& model, const CheckDecl& check, uint64_t seed,
                                 long default_trials) {
    using run_detail::param_or;
    ModelRealization real(model);
    CheckResult res;
    res.name = check.name;
    res.anchor = check_anchor(check.name);

    long trials = param_or(check, "trials", default_trials);
    uint64_t check_seed = (uint64_t)param_or(check, "seed", (long)seed);
    long coeff_deg = param_or(check, "degree", 2);

    auto finish = [&](bool pass, const GradedPolynomial& obs) {
        res.pass = pass;
        res.obstruction = obs.term_strings();
        if (pass)
            res.obstruction.clear();
        return res;
    };

    if (check.name == "master") {
        if (model.theta && model.chart) {
            const SymplecticChart& sc = real.chart();
            return run_detail::from_check_report("master", master_obstruction(real.theta(), sc),
                                                 sc.chart());
        }
        if (const DataDecl* d = real.find_data({DataKind::Poisson, DataKind::TwistedPoisson})) {
            PoissonData data = real.poisson_data(*d);
            return run_detail::from_check_report("master", data.master(), data.chart().chart());
        }
        if (const DataDecl* d = real.find_data({DataKind::Courant, DataKind::PreCourant})) {
            CourantData data = d->kind == DataKind::PreCourant
                                   ? real.pre_courant_data(*d).courant()
                                   : real.courant_data(*d);
            return run_detail::from_check_report(
                "master", master_obstruction(data.theta(), data.chart()), data.chart().chart());
        }
        fail(ErrorKind::InvalidArgument, "check master needs a chart+theta or structure data");
    }

    if (check.name == "quantum-master") {
        const SymplecticChart& sc = real.chart();
        return run_detail::from_check_report("quantum-master",
                                             quantum_master_obstruction(real.theta(), sc),
                                             sc.chart());
    }

    if (check.name == "poisson-jacobi") {
        const DataDecl* d = real.find_data({DataKind::Poisson, DataKind::TwistedPoisson});
        if (!d)
            fail(ErrorKind::InvalidArgument, "check poisson-jacobi needs poisson data");
        PoissonData data = real.poisson_data(*d);
        return run_detail::from_check_report("poisson-jacobi", data.jacobi_report(),
                                             data.chart().chart());
    }

    if (check.name == "schouten") {
        const DataDecl* d = real.find_data({DataKind::Poisson, DataKind::TwistedPoisson});
        if (!d)
            fail(ErrorKind::InvalidArgument, "check schouten needs poisson data");
        PoissonData data = real.poisson_data(*d);
        GradedPolynomial p = data.theta();
        GradedPolynomial obs = schouten_bracket(p, p, data.chart());
        return finish(obs.is_zero(), obs);
    }

    if (check.name == "twisted-poisson") {
        const DataDecl* d = real.find_data({DataKind::TwistedPoisson});
        if (!d)
            fail(ErrorKind::InvalidArgument, "check twisted-poisson needs twisted_poisson data");
        TwistedPoissonData data = real.twisted_poisson_data(*d);
        return run_detail::from_check_report("twisted-poisson", twisted_poisson_obstruction(data),
                                             data.chart().chart());
    }

    if (check.name == "lie-algebroid") {
        const DataDecl* d = real.find_data({DataKind::LieAlgebroid});
        if (!d)
            fail(ErrorKind::InvalidArgument, "check lie-algebroid needs lie_algebroid data");
        LieAlgebroidData data = real.lie_algebroid_data(*d);
        LieAlgebroidReport rep = lie_algebroid_from_q(data);
        res.pass = rep.pass;
        if (!rep.anchor_compatibility.pass) {
            res.obstruction = rep.anchor_compatibility.obstruction.term_strings();
            res.note = "anchor compatibility fails";
        } else if (!rep.jacobi.pass) {
            res.obstruction = rep.jacobi.obstruction.term_strings();
            res.note = "Jacobi identity fails";
        }
        return res;
    }

    if (check.name == "courant-axioms") {
        const DataDecl* d = real.find_data({DataKind::Courant, DataKind::PreCourant});
        if (!d)
            fail(ErrorKind::InvalidArgument, "check courant-axioms needs courant data");
        CourantData data = d->kind == DataKind::PreCourant ? real.pre_courant_data(*d).courant()
                                                           : real.courant_data(*d);
        CourantAxiomReport rep =
            courant_axiom_report(data, (int)(trials ? trials : 100), check_seed, (int)coeff_deg);
        res.pass = rep.pass;
        if (!rep.master.pass) {
            res.obstruction = rep.master.obstruction.term_strings();
            res.note = "master equation fails";
        } else {
            for (const auto& a : rep.axioms)
                if (!a.pass) {
                    res.obstruction = a.first_failure.term_strings();
                    res.note = "axiom " + a.name + " fails";
                    break;
                }
        }
        return res;
    }

    if (check.name == "pre-courant-jacobiator") {
        const DataDecl* d = real.find_data({DataKind::PreCourant});
        if (!d)
            fail(ErrorKind::InvalidArgument, "check pre-courant-jacobiator needs pre_courant data");
        PreCourantData data = real.pre_courant_data(*d);
        PreCourantReport rep =
            pre_courant_report(data, (int)(trials ? trials : 25), check_seed, (int)coeff_deg);
        res.pass = rep.pass;
        for (const auto& a : rep.axioms)
            if (!a.pass) {
                res.obstruction = a.first_failure.term_strings();
                res.note = "pre-Courant axiom " + a.name + " fails";
                break;
            }
        if (res.note.empty() && !rep.jacobiator.pass) {
            res.obstruction = rep.jacobiator.first_failure.term_strings();
            res.note = "Jacobiator does not match the 4-form target";
        }
        return res;
    }

    if (check.name == "e-differential-squared") {
        const DataDecl* d = real.find_data({DataKind::LieAlgebroid});
        if (!d)
            fail(ErrorKind::InvalidArgument, "check e-differential-squared needs lie_algebroid data");
        LieAlgebroidData data = real.lie_algebroid_data(*d);
        Rng rng(check_seed);
        GradedPolynomial first = GradedPolynomial::zero(data.chart());
        bool pass = true;
        long n = trials ? trials : 25;
        for (long t = 0; t < n; ++t) {
            int deg = (int)rng.below((uint64_t)std::min(data.rank(), 3) + 1);
            EForm alpha(data.chart(), data.rank(), deg);
            std::vector<int> idx(deg);
            std::function<void(int, int)> walk = [&](int pos, int start) {
                if (pos == deg) {
                    alpha.set(idx, random_body_polynomial(data.chart(), rng, (int)coeff_deg, 2));
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
                if (!comp.is_zero() && pass) {
                    pass = false;
                    first = comp;
                }
        }
        return finish(pass, first);
    }

    if (check.name == "basic-curvature-decomposition" || check.name == "bianchi") {
        const DataDecl* d = real.find_data({DataKind::LieAlgebroid});
        if (!d)
            fail(ErrorKind::InvalidArgument, "check " + check.name + " needs lie_algebroid data");
        LieAlgebroidData data = real.lie_algebroid_data(*d);
        ConnectionData conn =
            real.connection_for(*d, data.chart(), data.dimension(), data.rank());
        if (check.name == "basic-curvature-decomposition") {
            BasicCurvatureResult r = basic_curvature(data, conn);
            res.pass = r.decomposition_exact;
            return res;
        }
        BianchiReport rep = bianchi_check(data, conn);
        res.pass = rep.pass;
        res.obstruction = rep.residual.term_strings();
        if (rep.pass)
            res.obstruction.clear();
        if (!rep.slotwise_zero)
            res.note = "slotwise E-nabla residual nonzero (convention-sensitive); "
                       "exterior-derivative identity " + std::string(rep.pass ? "holds" : "fails");
        return res;
    }

    if (check.name == "twisted-courant-torsion") {
        const DataDecl* d = real.find_data({DataKind::Courant, DataKind::PreCourant});
        if (!d)
            fail(ErrorKind::InvalidArgument, "check twisted-courant-torsion needs courant data");
        CourantData data = d->kind == DataKind::PreCourant ? real.pre_courant_data(*d).courant()
                                                           : real.courant_data(*d);
        ConnectionData conn = real.connection_for(*d, data.chart().chart(), data.dimension(),
                                                  data.rank());
        CourantGeometry geo(data, conn);
        Rng rng(check_seed);
        const ChartPtr& c = data.chart().chart();
        bool pass = true;
        GradedPolynomial first = GradedPolynomial::zero(c);
        long n = trials ? trials : 20;
        for (long t = 0; t < n && pass; ++t) {
            Section e1 = random_section(c, data.rank(), rng, (int)coeff_deg);
            Section e2 = random_section(c, data.rank(), rng, (int)coeff_deg);
            Section e3 = random_section(c, data.rank(), rng, (int)coeff_deg);
            GradedPolynomial f = random_body_polynomial(c, rng, (int)coeff_deg, 2);
            GradedPolynomial t123 = geo.torsion(e1, e2, e3);
            GradedPolynomial r1 = t123 + geo.torsion(e2, e1, e3);
            GradedPolynomial r2 = t123 + geo.torsion(e1, e3, e2);
            Section fe1 = e1;
            for (auto& comp : fe1)
                comp = f * comp;
            GradedPolynomial r3 = geo.torsion(fe1, e2, e3) - f * t123;
            for (const GradedPolynomial* r : {&r1, &r2, &r3})
                if (!r->is_zero() && pass) {
                    pass = false;
                    first = *r;
                }
        }
        return finish(pass, first);
    }

    if (check.name == "berezinian") {
        const SymplecticChart& sc = real.chart();
        const ChartPtr& c = sc.chart();
        std::vector<CoordId> odd;
        for (CoordId id = 0; id < c->size(); ++id)
            if (c->coord(id).parity() == 1)
                odd.push_back(id);
        if (odd.size() < 2)
            fail(ErrorKind::InvalidArgument, "check berezinian needs at least two odd coordinates");
        MonomialPool pool(c);
        Rng rng(check_seed);
        bool pass = true;
        GradedPolynomial first = GradedPolynomial::zero(c);
        auto random_even = [&](bool unit) {
            GradedPolynomial p =
                GradedPolynomial::constant(c, Scalar(unit ? rng.small_rational() : Rational(0)));
            return p + pool.random_homogeneous(rng, 2, 2);
        };
        auto random_odd = [&]() { return pool.random_homogeneous(rng, 1, 2); };
        auto random_super = [&](size_t p, size_t q) {
            SuperMatrix m = SuperMatrix::identity(c, p, q);
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
        long n = trials ? trials : 20;
        for (long t = 0; t < n && pass; ++t) {
            for (auto [p, q] : {std::pair<size_t, size_t>{1, 1}, std::pair<size_t, size_t>{2, 1}}) {
                SuperMatrix m = random_super(p, q);
                SuperMatrix k = random_super(p, q);
                GradedPolynomial lhs = berezinian(m * k);
                GradedPolynomial rhs = berezinian(m) * berezinian(k);
                if (lhs != rhs && pass) {
                    pass = false;
                    first = lhs - rhs;
                }
            }
        }
        // block-diagonal reduction Ber = det A / det D
        SuperMatrix bd = SuperMatrix::identity(c, 1, 1);
        bd.a[0][0] = GradedPolynomial::constant(c, Scalar(2));
        bd.d[0][0] = GradedPolynomial::constant(c, Scalar(3));
        if (berezinian(bd) != GradedPolynomial::constant(c, Scalar(2, 3)))
            pass = false;
        return finish(pass, first);
    }

    fail(ErrorKind::InvalidArgument, "unknown check name '" + check.name + "'");
}

inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline Report run_checks(const ModelFile& model, const std::string& model_text,
                         const RunOptions& options) {
    Report rep;
    std::ostringstream hash;
    hash << "fnv1a:" << std::hex << fnv1a64(model_text);
    rep.model_hash = hash.str();
    rep.engine = std::string(kEngineName) + " " + kEngineVersion;
    rep.seed = options.seed;
    rep.conventions = engine_conventions();

    std::vector<uint64_t> seeds;
    for (size_t i = 0; i < model.checks.size(); ++i)
        seeds.push_back(Rng::derive_seed(options.seed, model.checks[i].name, i));

    if (options.parallel) {
        std::vector<std::future<CheckResult>> futures;
        for (size_t i = 0; i < model.checks.size(); ++i)
            futures.push_back(std::async(std::launch::async, [&, i] {
                return run_one_check(model, model.checks[i], seeds[i], options.trials);
            }));
        for (auto& f : futures)
            rep.results.push_back(f.get());
    } else {
        for (size_t i = 0; i < model.checks.size(); ++i)
            rep.results.push_back(run_one_check(model, model.checks[i], seeds[i], options.trials));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Report emission: stable text and bit-stable JSON.
// ---------------------------------------------------------------------------

inline std::string emit_text(const Report& rep) {
    std::ostringstream out;
    out << "engine: " << rep.engine << "\n";
    out << "model: " << rep.model_hash << "\n";
    out << "seed: " << rep.seed << "\n";
    for (const auto& [k, v] : rep.conventions)
        out << "convention " << k << ": " << v << "\n";
    for (const auto& r : rep.results) {
        out << "check " << r.name << ": " << (r.pass ? "pass" : "fail");
        if (!r.note.empty())
            out << " (" << r.note << ")";
        out << "\n";
        for (const auto& term : r.obstruction)
            out << "  obstruction: " << term << "\n";
    }
    out << "verdict: " << (rep.all_pass() ? "pass" : "fail") << "\n";
    return out.str();
}

inline std::string emit_json(const Report& rep) {
    nlohmann::json j;
    j["model"] = rep.model_hash;
    j["engine"] = rep.engine;
    j["seed"] = rep.seed;
    nlohmann::json conv(nlohmann::json::value_t::object);
    for (const auto& [k, v] : rep.conventions)
        conv[k] = v;
    j["conventions"] = conv;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& r : rep.results) {
        nlohmann::json c;
        c["name"] = r.name;
        c["verdict"] = r.pass ? "pass" : "fail";
        c["obstruction"] = r.obstruction;
        c["paper_anchor"] = r.anchor;
        checks.push_back(c);
    }
    j["checks"] = checks;
    return j.dump(2) + "\n";
}

} // namespace qpcalc
