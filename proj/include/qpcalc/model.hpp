#pragma once

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qpcalc/chart.hpp"
#include "qpcalc/errors.hpp"
#include "qpcalc/scalar.hpp"

namespace qpcalc {

// ---------------------------------------------------------------------------
// Model-file AST.  Grammar (EBNF shipped in docs/model_format.md):
//
//   model     = { chart | symbol | bind | theta | data | check } ;
//   chart     = "chart" "degree" int "{" { coords | pair | metric } "}" ;
//   coords    = "coords" ident [ "[" int ".." int "]" ] ":" int ;
//   pair      = "pair" coordref "<->" coordref ;
//   metric    = "metric" ident ":" ident ;
//   symbol    = "symbol" ident "[" int "]" ":" symmetry [ "(" int "," int ")" ] ;
//   symmetry  = "none" | "symmetric" | "antisymmetric" | "totally-antisymmetric" ;
//   bind      = "bind" ident "[" int { "," int } "]" "=" expr ;
//   theta     = "theta" "=" expr ;
//   data      = "data" kind "{" { field } "}" ;
//   check     = "check" checkname { ident "=" int } ;
//
// Expressions: rational literals, "hbar", "im", identifiers with bracketed
// indices and derivative suffixes ",i", + - * /rational, parentheses, and the
// bounded sum construct "sum(i in lo..hi)(expr)" expanded at evaluation.
// Comments run from '#' to the end of the line.
// ---------------------------------------------------------------------------

struct SourcePos {
    int line = 0;
    int col = 0;
    std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

struct IndexExpr {
    bool is_var = false;
    long value = 0;
    std::string var;

    bool operator==(const IndexExpr& o) const {
        return is_var == o.is_var && value == o.value && var == o.var;
    }
    std::string str() const { return is_var ? var : std::to_string(value); }
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
    enum class Kind { Number, Hbar, Imag, Ref, Neg, Add, Sub, Mul, Div, Sum };
    Kind kind;
    SourcePos pos;

    Rational number;                 // Number, and the divisor for Div
    std::string name;                // Ref
    std::vector<IndexExpr> indices;  // Ref
    std::vector<IndexExpr> derivs;   // Ref
    std::string sum_var;             // Sum
    long sum_lo = 0, sum_hi = 0;     // Sum
    ExprPtr a, b;                    // children

    static ExprPtr make(Kind k, SourcePos pos) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->pos = pos;
        return e;
    }
};

struct CoordDecl {
    std::string name;
    std::optional<std::pair<long, long>> range;
    int degree = 0;
    SourcePos pos;
};

struct PairDecl {
    std::string a, b;
    std::optional<IndexExpr> ai, bi;
    SourcePos pos;
};

struct MetricDecl {
    std::string coords;
    std::string symbol;
    SourcePos pos;
};

struct ChartDecl {
    int degree = 0;
    std::vector<CoordDecl> coords;
    std::vector<PairDecl> pairs;
    std::optional<MetricDecl> metric;
    SourcePos pos;
};

struct SymbolDeclAst {
    std::string name;
    int arity = 0;
    IndexSymmetry symmetry = IndexSymmetry::None;
    int slot_a = -1, slot_b = -1; // 1-based in the source; -1 = default
    SourcePos pos;
};

struct BindDecl {
    std::string name;
    std::vector<long> indices;
    ExprPtr value;
    SourcePos pos;
};

enum class DataKind { Poisson, LieAlgebroid, Courant, TwistedPoisson, PreCourant };

struct DataDecl {
    DataKind kind = DataKind::Poisson;
    long dim = 0;
    long rank = 0;
    bool formal = false;
    std::map<std::string, std::string> roles; // role -> symbol name
    SourcePos pos;
};

struct CheckDecl {
    std::string name;
    std::map<std::string, long> params;
    SourcePos pos;
};

struct ModelFile {
    std::optional<ChartDecl> chart;
    std::vector<SymbolDeclAst> symbols;
    std::vector<BindDecl> binds;
    ExprPtr theta;
    SourcePos theta_pos;
    std::vector<DataDecl> data;
    std::vector<CheckDecl> checks;
};

// ---------------------------------------------------------------------------
// Lexer.
// ---------------------------------------------------------------------------

namespace model_detail {

struct Token {
    enum class Kind { Ident, Int, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    long value = 0;
    SourcePos pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void error(const std::string& msg, SourcePos pos) const {
        fail(ErrorKind::SyntaxError, "syntax error at " + pos.str() + ": " + msg);
    }

private:
    void advance() {
        while (i_ < text_.size()) {
            char c = text_[i_];
            if (c == '#') {
                while (i_ < text_.size() && text_[i_] != '\n')
                    ++i_;
            } else if (c == '\n') {
                ++line_;
                col_ = 1;
                ++i_;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++col_;
                ++i_;
            } else {
                break;
            }
        }
        tok_ = Token{};
        tok_.pos = {line_, col_};
        if (i_ >= text_.size()) {
            tok_.kind = Token::Kind::End;
            return;
        }
        char c = text_[i_];
        if (isalpha((unsigned char)c) || c == '_') {
            size_t start = i_;
            while (i_ < text_.size() &&
                   (isalnum((unsigned char)text_[i_]) || text_[i_] == '_' || text_[i_] == '-')) {
                // identifiers may contain dashes (check names, "totally-antisymmetric"),
                // but a dash followed by a digit or space is arithmetic
                if (text_[i_] == '-') {
                    if (i_ + 1 >= text_.size() || !isalpha((unsigned char)text_[i_ + 1]))
                        break;
                }
                ++i_;
                ++col_;
            }
            tok_.kind = Token::Kind::Ident;
            tok_.text = text_.substr(start, i_ - start);
            return;
        }
        if (isdigit((unsigned char)c)) {
            size_t start = i_;
            while (i_ < text_.size() && isdigit((unsigned char)text_[i_])) {
                ++i_;
                ++col_;
            }
            tok_.kind = Token::Kind::Int;
            tok_.text = text_.substr(start, i_ - start);
            tok_.value = std::stol(tok_.text);
            return;
        }
        // multi-character punctuation
        if (c == '<' && i_ + 2 < text_.size() && text_[i_ + 1] == '-' && text_[i_ + 2] == '>') {
            tok_.kind = Token::Kind::Punct;
            tok_.text = "<->";
            i_ += 3;
            col_ += 3;
            return;
        }
        if (c == '.' && i_ + 1 < text_.size() && text_[i_ + 1] == '.') {
            tok_.kind = Token::Kind::Punct;
            tok_.text = "..";
            i_ += 2;
            col_ += 2;
            return;
        }
        tok_.kind = Token::Kind::Punct;
        tok_.text = std::string(1, c);
        ++i_;
        ++col_;
    }

    const std::string& text_;
    size_t i_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

} // namespace model_detail

// ---------------------------------------------------------------------------
// Parser.
// ---------------------------------------------------------------------------

class ModelParser {
public:
    explicit ModelParser(const std::string& text) : lex_(text) {}

    ModelFile parse() {
        ModelFile m;
        while (!at_end()) {
            const auto& t = lex_.peek();
            if (t.kind != model_detail::Token::Kind::Ident)
                lex_.error("expected a declaration keyword", t.pos);
            if (t.text == "chart") {
                if (m.chart)
                    lex_.error("duplicate chart block", t.pos);
                m.chart = parse_chart();
            } else if (t.text == "symbol") {
                m.symbols.push_back(parse_symbol());
            } else if (t.text == "bind") {
                m.binds.push_back(parse_bind());
            } else if (t.text == "theta") {
                if (m.theta)
                    lex_.error("duplicate theta", t.pos);
                m.theta_pos = t.pos;
                lex_.next();
                expect_punct("=");
                m.theta = parse_expr();
            } else if (t.text == "data") {
                m.data.push_back(parse_data());
            } else if (t.text == "check") {
                m.checks.push_back(parse_check());
            } else {
                lex_.error("unknown declaration '" + t.text + "'", t.pos);
            }
        }
        validate(m);
        return m;
    }

private:
    bool at_end() const { return lex_.peek().kind == model_detail::Token::Kind::End; }

    model_detail::Token expect_ident(const char* what) {
        auto t = lex_.next();
        if (t.kind != model_detail::Token::Kind::Ident)
            lex_.error(std::string("expected ") + what, t.pos);
        return t;
    }

    long expect_int() {
        bool neg = false;
        if (lex_.peek().kind == model_detail::Token::Kind::Punct && lex_.peek().text == "-") {
            lex_.next();
            neg = true;
        }
        auto t = lex_.next();
        if (t.kind != model_detail::Token::Kind::Int)
            lex_.error("expected an integer", t.pos);
        return neg ? -t.value : t.value;
    }

    void expect_punct(const std::string& p) {
        auto t = lex_.next();
        if (t.kind != model_detail::Token::Kind::Punct || t.text != p)
            lex_.error("expected '" + p + "'", t.pos);
    }

    bool peek_punct(const std::string& p) const {
        return lex_.peek().kind == model_detail::Token::Kind::Punct && lex_.peek().text == p;
    }

    bool peek_ident(const std::string& s) const {
        return lex_.peek().kind == model_detail::Token::Kind::Ident && lex_.peek().text == s;
    }

    IndexExpr parse_index() {
        const auto& t = lex_.peek();
        IndexExpr e;
        if (t.kind == model_detail::Token::Kind::Int) {
            e.value = lex_.next().value;
        } else if (t.kind == model_detail::Token::Kind::Ident) {
            e.is_var = true;
            e.var = lex_.next().text;
        } else {
            lex_.error("expected an index", t.pos);
        }
        return e;
    }

    ChartDecl parse_chart() {
        ChartDecl c;
        c.pos = lex_.next().pos; // "chart"
        auto kw = expect_ident("'degree'");
        if (kw.text != "degree")
            lex_.error("expected 'degree'", kw.pos);
        c.degree = (int)expect_int();
        expect_punct("{");
        while (!peek_punct("}")) {
            auto t = expect_ident("a chart item");
            if (t.text == "coords") {
                CoordDecl d;
                d.pos = t.pos;
                d.name = expect_ident("coordinate name").text;
                if (peek_punct("[")) {
                    lex_.next();
                    long lo = expect_int();
                    expect_punct("..");
                    long hi = expect_int();
                    expect_punct("]");
                    if (lo > hi)
                        lex_.error("empty index range", d.pos);
                    d.range = {lo, hi};
                }
                expect_punct(":");
                d.degree = (int)expect_int();
                c.coords.push_back(std::move(d));
            } else if (t.text == "pair") {
                PairDecl p;
                p.pos = t.pos;
                p.a = expect_ident("coordinate name").text;
                if (peek_punct("[")) {
                    lex_.next();
                    p.ai = parse_index();
                    expect_punct("]");
                }
                expect_punct("<->");
                p.b = expect_ident("coordinate name").text;
                if (peek_punct("[")) {
                    lex_.next();
                    p.bi = parse_index();
                    expect_punct("]");
                }
                c.pairs.push_back(std::move(p));
            } else if (t.text == "metric") {
                MetricDecl m;
                m.pos = t.pos;
                m.coords = expect_ident("coordinate name").text;
                expect_punct(":");
                m.symbol = expect_ident("metric symbol").text;
                if (c.metric)
                    lex_.error("duplicate metric block", t.pos);
                c.metric = std::move(m);
            } else {
                lex_.error("unknown chart item '" + t.text + "'", t.pos);
            }
        }
        expect_punct("}");
        return c;
    }

    SymbolDeclAst parse_symbol() {
        SymbolDeclAst s;
        s.pos = lex_.next().pos; // "symbol"
        s.name = expect_ident("symbol name").text;
        expect_punct("[");
        s.arity = (int)expect_int();
        expect_punct("]");
        expect_punct(":");
        auto k = expect_ident("a symmetry kind");
        if (k.text == "none")
            s.symmetry = IndexSymmetry::None;
        else if (k.text == "symmetric")
            s.symmetry = IndexSymmetry::SymmetricPair;
        else if (k.text == "antisymmetric")
            s.symmetry = IndexSymmetry::AntisymmetricPair;
        else if (k.text == "totally-antisymmetric")
            s.symmetry = IndexSymmetry::TotallyAntisymmetric;
        else
            lex_.error("unknown symmetry '" + k.text + "'", k.pos);
        if (peek_punct("(")) {
            lex_.next();
            s.slot_a = (int)expect_int();
            expect_punct(",");
            s.slot_b = (int)expect_int();
            expect_punct(")");
        }
        if (s.arity < 1 || s.arity > 6)
            lex_.error("symbol arity out of range", s.pos);
        return s;
    }

    BindDecl parse_bind() {
        BindDecl b;
        b.pos = lex_.next().pos; // "bind"
        b.name = expect_ident("symbol name").text;
        expect_punct("[");
        b.indices.push_back(expect_int());
        while (peek_punct(",")) {
            lex_.next();
            b.indices.push_back(expect_int());
        }
        expect_punct("]");
        expect_punct("=");
        b.value = parse_expr();
        return b;
    }

    DataDecl parse_data() {
        DataDecl d;
        d.pos = lex_.next().pos; // "data"
        auto k = expect_ident("a data kind");
        if (k.text == "poisson")
            d.kind = DataKind::Poisson;
        else if (k.text == "lie_algebroid")
            d.kind = DataKind::LieAlgebroid;
        else if (k.text == "courant")
            d.kind = DataKind::Courant;
        else if (k.text == "twisted_poisson")
            d.kind = DataKind::TwistedPoisson;
        else if (k.text == "pre_courant")
            d.kind = DataKind::PreCourant;
        else
            lex_.error("unknown data kind '" + k.text + "'", k.pos);
        expect_punct("{");
        while (!peek_punct("}")) {
            auto t = expect_ident("a data field");
            if (t.text == "dim") {
                d.dim = expect_int();
            } else if (t.text == "rank") {
                d.rank = expect_int();
            } else if (t.text == "formal") {
                d.formal = true;
            } else if (t.text == "anchor" || t.text == "bracket" || t.text == "bivector" ||
                       t.text == "cform" || t.text == "metric" || t.text == "twist" ||
                       t.text == "connection") {
                d.roles[t.text] = expect_ident("symbol name").text;
            } else {
                lex_.error("unknown data field '" + t.text + "'", t.pos);
            }
        }
        expect_punct("}");
        return d;
    }

    CheckDecl parse_check() {
        CheckDecl c;
        c.pos = lex_.next().pos; // "check"
        c.name = expect_ident("a check name").text;
        while (lex_.peek().kind == model_detail::Token::Kind::Ident && !is_keyword(lex_.peek().text)) {
            auto p = lex_.next();
            expect_punct("=");
            c.params[p.text] = expect_int();
        }
        return c;
    }

    static bool is_keyword(const std::string& s) {
        return s == "chart" || s == "symbol" || s == "bind" || s == "theta" || s == "data" ||
               s == "check";
    }

    // expr := term (("+" | "-") term)*
    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        while (peek_punct("+") || peek_punct("-")) {
            auto op = lex_.next();
            ExprPtr rhs = parse_term();
            ExprPtr n = Expr::make(op.text == "+" ? Expr::Kind::Add : Expr::Kind::Sub, op.pos);
            n->a = e;
            n->b = rhs;
            e = n;
        }
        return e;
    }

    // term := factor (("*" factor) | ("/" number))*
    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        while (peek_punct("*") || peek_punct("/")) {
            auto op = lex_.next();
            if (op.text == "*") {
                ExprPtr rhs = parse_factor();
                ExprPtr n = Expr::make(Expr::Kind::Mul, op.pos);
                n->a = e;
                n->b = rhs;
                e = n;
            } else {
                long den = expect_int();
                if (den == 0)
                    lex_.error("division by zero", op.pos);
                ExprPtr n = Expr::make(Expr::Kind::Div, op.pos);
                n->a = e;
                n->number = Rational(den);
                e = n;
            }
        }
        return e;
    }

    ExprPtr parse_factor() {
        if (peek_punct("-")) {
            auto op = lex_.next();
            ExprPtr n = Expr::make(Expr::Kind::Neg, op.pos);
            n->a = parse_factor();
            return n;
        }
        return parse_atom();
    }

    ExprPtr parse_atom() {
        const auto& t = lex_.peek();
        if (t.kind == model_detail::Token::Kind::Int) {
            auto tok = lex_.next();
            ExprPtr n = Expr::make(Expr::Kind::Number, tok.pos);
            n->number = Rational(tok.value);
            // rational literal p/q binds tighter than division only through
            // the Div node; plain integers are enough here
            return n;
        }
        if (t.kind == model_detail::Token::Kind::Punct && t.text == "(") {
            lex_.next();
            ExprPtr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (t.kind != model_detail::Token::Kind::Ident)
            lex_.error("expected an expression", t.pos);
        auto tok = lex_.next();
        if (tok.text == "hbar")
            return Expr::make(Expr::Kind::Hbar, tok.pos);
        if (tok.text == "im")
            return Expr::make(Expr::Kind::Imag, tok.pos);
        if (tok.text == "sum") {
            expect_punct("(");
            ExprPtr n = Expr::make(Expr::Kind::Sum, tok.pos);
            n->sum_var = expect_ident("a sum variable").text;
            auto in = expect_ident("'in'");
            if (in.text != "in")
                lex_.error("expected 'in'", in.pos);
            n->sum_lo = expect_int();
            expect_punct("..");
            n->sum_hi = expect_int();
            expect_punct(")");
            expect_punct("(");
            n->a = parse_expr();
            expect_punct(")");
            return n;
        }
        ExprPtr n = Expr::make(Expr::Kind::Ref, tok.pos);
        n->name = tok.text;
        if (peek_punct("[")) {
            lex_.next();
            n->indices.push_back(parse_index());
            while (peek_punct(",")) {
                lex_.next();
                n->indices.push_back(parse_index());
            }
            expect_punct("]");
            // derivative suffixes ",i" directly after the bracket
            while (peek_punct(",")) {
                lex_.next();
                n->derivs.push_back(parse_index());
            }
        }
        return n;
    }

    void validate(const ModelFile& m) {
        if (m.chart) {
            for (const auto& p : m.chart->pairs) {
                auto find = [&](const std::string& n) -> const CoordDecl* {
                    for (const auto& c : m.chart->coords)
                        if (c.name == n)
                            return &c;
                    return nullptr;
                };
                const CoordDecl* a = find(p.a);
                const CoordDecl* b = find(p.b);
                if (!a || !b)
                    fail(ErrorKind::UndeclaredIdentifier,
                         "pair references an undeclared coordinate at " + p.pos.str());
                if (a->degree + b->degree != m.chart->degree)
                    fail(ErrorKind::DegreeMismatch,
                         "pair degrees " + std::to_string(a->degree) + "+" +
                             std::to_string(b->degree) + " do not sum to the chart degree at " +
                             p.pos.str());
            }
            if (m.chart->metric) {
                const CoordDecl* c = nullptr;
                for (const auto& d : m.chart->coords)
                    if (d.name == m.chart->metric->coords)
                        c = &d;
                if (!c)
                    fail(ErrorKind::UndeclaredIdentifier,
                         "metric block references an undeclared coordinate at " +
                             m.chart->metric->pos.str());
                if (2 * c->degree != m.chart->degree)
                    fail(ErrorKind::DegreeMismatch,
                         "metric block requires degree-n/2 coordinates at " +
                             m.chart->metric->pos.str());
            }
        }
        for (const auto& b : m.binds) {
            bool known = false;
            for (const auto& s : m.symbols)
                if (s.name == b.name) {
                    known = true;
                    if ((int)b.indices.size() != s.arity)
                        fail(ErrorKind::IndexOutOfRange,
                             "binding of " + b.name + " has the wrong number of indices at " +
                                 b.pos.str());
                }
            if (!known)
                fail(ErrorKind::UndeclaredIdentifier,
                     "binding of undeclared symbol " + b.name + " at " + b.pos.str());
        }
        for (const auto& d : m.data)
            for (const auto& [role, sym] : d.roles) {
                bool known = false;
                for (const auto& s : m.symbols)
                    known = known || s.name == sym;
                if (!known)
                    fail(ErrorKind::UndeclaredIdentifier,
                         "data field '" + role + "' references undeclared symbol " + sym + " at " +
                             d.pos.str());
            }
    }

    model_detail::Lexer lex_;
};

inline ModelFile parse_model(const std::string& text) {
    return ModelParser(text).parse();
}

// ---------------------------------------------------------------------------
// Canonical printer; parse(print(m)) reproduces the same canonical print.
// ---------------------------------------------------------------------------

inline std::string print_expr(const Expr& e) {
    auto wrap = [](const std::string& s) { return "(" + s + ")"; };
    switch (e.kind) {
    case Expr::Kind::Number:
        return e.number.get_str();
    case Expr::Kind::Hbar:
        return "hbar";
    case Expr::Kind::Imag:
        return "im";
    case Expr::Kind::Ref: {
        std::string s = e.name;
        if (!e.indices.empty()) {
            s += "[";
            for (size_t i = 0; i < e.indices.size(); ++i)
                s += (i ? "," : "") + e.indices[i].str();
            s += "]";
            for (const auto& d : e.derivs)
                s += "," + d.str();
        }
        return s;
    }
    case Expr::Kind::Neg:
        return "-" + wrap(print_expr(*e.a));
    case Expr::Kind::Add:
        return wrap(print_expr(*e.a)) + " + " + wrap(print_expr(*e.b));
    case Expr::Kind::Sub:
        return wrap(print_expr(*e.a)) + " - " + wrap(print_expr(*e.b));
    case Expr::Kind::Mul:
        return wrap(print_expr(*e.a)) + "*" + wrap(print_expr(*e.b));
    case Expr::Kind::Div:
        return wrap(print_expr(*e.a)) + "/" + e.number.get_str();
    case Expr::Kind::Sum:
        return "sum(" + e.sum_var + " in " + std::to_string(e.sum_lo) + ".." +
               std::to_string(e.sum_hi) + ")(" + print_expr(*e.a) + ")";
    }
    return "";
}

inline std::string print_model(const ModelFile& m) {
    std::ostringstream out;
    if (m.chart) {
        out << "chart degree " << m.chart->degree << " {\n";
        for (const auto& c : m.chart->coords) {
            out << "  coords " << c.name;
            if (c.range)
                out << "[" << c.range->first << ".." << c.range->second << "]";
            out << " : " << c.degree << "\n";
        }
        for (const auto& p : m.chart->pairs) {
            out << "  pair " << p.a;
            if (p.ai)
                out << "[" << p.ai->str() << "]";
            out << " <-> " << p.b;
            if (p.bi)
                out << "[" << p.bi->str() << "]";
            out << "\n";
        }
        if (m.chart->metric)
            out << "  metric " << m.chart->metric->coords << " : " << m.chart->metric->symbol
                << "\n";
        out << "}\n";
    }
    for (const auto& s : m.symbols) {
        out << "symbol " << s.name << "[" << s.arity << "] : ";
        switch (s.symmetry) {
        case IndexSymmetry::None: out << "none"; break;
        case IndexSymmetry::SymmetricPair: out << "symmetric"; break;
        case IndexSymmetry::AntisymmetricPair: out << "antisymmetric"; break;
        case IndexSymmetry::TotallyAntisymmetric: out << "totally-antisymmetric"; break;
        }
        if (s.slot_a > 0)
            out << " (" << s.slot_a << "," << s.slot_b << ")";
        out << "\n";
    }
    for (const auto& b : m.binds) {
        out << "bind " << b.name << "[";
        for (size_t i = 0; i < b.indices.size(); ++i)
            out << (i ? "," : "") << b.indices[i];
        out << "] = " << print_expr(*b.value) << "\n";
    }
    if (m.theta)
        out << "theta = " << print_expr(*m.theta) << "\n";
    for (const auto& d : m.data) {
        out << "data ";
        switch (d.kind) {
        case DataKind::Poisson: out << "poisson"; break;
        case DataKind::LieAlgebroid: out << "lie_algebroid"; break;
        case DataKind::Courant: out << "courant"; break;
        case DataKind::TwistedPoisson: out << "twisted_poisson"; break;
        case DataKind::PreCourant: out << "pre_courant"; break;
        }
        out << " {\n";
        if (d.dim)
            out << "  dim " << d.dim << "\n";
        if (d.rank)
            out << "  rank " << d.rank << "\n";
        if (d.formal)
            out << "  formal\n";
        for (const auto& [role, sym] : d.roles)
            out << "  " << role << " " << sym << "\n";
        out << "}\n";
    }
    for (const auto& c : m.checks) {
        out << "check " << c.name;
        for (const auto& [k, v] : c.params)
            out << " " << k << "=" << v;
        out << "\n";
    }
    return out.str();
}

} // namespace qpcalc
