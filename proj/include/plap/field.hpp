#pragma once

#include "plap/error.hpp"
#include "plap/jet.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace plap {

/// Immutable expression tree over chart coordinates, evaluable either in
/// plain arithmetic or as an order-3 jet at a point.
///
/// Besides the closed grammar (constants, coordinates, + - * /, integer and
/// real powers, exp/sin/cos/log) a field may wrap a computed node: a named
/// callable returning a jet. Composed geometric fields such as |∇u|^p are
/// built that way and carry their own validity order.
class ScalarField {
public:
    using JetFn = std::function<Jet(std::span<const double>)>;

    ScalarField() : ScalarField(constant(0.0)) {}

    static ScalarField constant(double v) { return ScalarField(make(Op::constant, v)); }

    static ScalarField coordinate(int i, std::string name = {}) {
        auto n = make(Op::coordinate, 0.0);
        n->index = i;
        n->name = name.empty() ? "x" + std::to_string(i) : std::move(name);
        return ScalarField(std::move(n));
    }

    static ScalarField computed(std::string name, JetFn fn) {
        auto n = make(Op::computed, 0.0);
        n->name = std::move(name);
        n->fn = std::move(fn);
        return ScalarField(std::move(n));
    }

    bool is_constant() const { return node_->op == Op::constant; }
    double constant_value() const { return node_->value; }

    /// Order-3 jet at x; the jet dimension is x.size().
    Jet jet(std::span<const double> x) const { return eval_jet(*node_, x); }

    /// Plain real-arithmetic evaluation.
    double operator()(std::span<const double> x) const { return eval_plain(*node_, x); }
    double operator()(std::initializer_list<double> x) const {
        return (*this)(std::span<const double>(x.begin(), x.size()));
    }

    std::string str() const { return print(*node_); }

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
        if (a.is_constant() && b.is_constant()) return constant(a.constant_value() + b.constant_value());
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        return binary(Op::add, a, b);
    }
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b) {
        if (a.is_constant() && b.is_constant()) return constant(a.constant_value() - b.constant_value());
        if (b.is_zero()) return a;
        return binary(Op::sub, a, b);
    }
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
        if (a.is_constant() && b.is_constant()) return constant(a.constant_value() * b.constant_value());
        if (a.is_zero() || b.is_zero()) return constant(0.0);
        if (a.is_constant() && a.constant_value() == 1.0) return b;
        if (b.is_constant() && b.constant_value() == 1.0) return a;
        return binary(Op::mul, a, b);
    }
    friend ScalarField operator/(const ScalarField& a, const ScalarField& b) {
        if (b.is_constant()) {
            require(b.constant_value() != 0.0, ErrorKind::domain_error, "division by constant zero");
            return a * constant(1.0 / b.constant_value());
        }
        return binary(Op::div, a, b);
    }
    friend ScalarField operator-(const ScalarField& a) {
        if (a.is_constant()) return constant(-a.constant_value());
        return unary(Op::neg, a);
    }
    friend ScalarField operator*(double s, const ScalarField& a) { return constant(s) * a; }
    friend ScalarField operator+(double s, const ScalarField& a) { return constant(s) + a; }

    friend ScalarField exp(const ScalarField& a) { return unary(Op::exp, a); }
    friend ScalarField sin(const ScalarField& a) { return unary(Op::sin, a); }
    friend ScalarField cos(const ScalarField& a) { return unary(Op::cos, a); }
    friend ScalarField log(const ScalarField& a) { return unary(Op::log, a); }
    /// Real power; the base must stay positive wherever it is evaluated.
    friend ScalarField pow(const ScalarField& a, double alpha) {
        auto n = make(Op::pow, alpha);
        n->lhs = a.node_;
        return ScalarField(std::move(n));
    }
    friend ScalarField ipow(const ScalarField& a, int k) {
        auto n = make(Op::ipow, static_cast<double>(k));
        n->lhs = a.node_;
        return ScalarField(std::move(n));
    }

private:
    enum class Op { constant, coordinate, computed, add, sub, mul, div, neg, exp, sin, cos, log, pow, ipow };

    struct Node {
        Op op;
        double value = 0.0;
        int index = 0;
        std::string name;
        JetFn fn;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;
    };

    explicit ScalarField(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static std::shared_ptr<Node> make(Op op, double v) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->value = v;
        return n;
    }
    static ScalarField binary(Op op, const ScalarField& a, const ScalarField& b) {
        auto n = make(op, 0.0);
        n->lhs = a.node_;
        n->rhs = b.node_;
        return ScalarField(std::move(n));
    }
    static ScalarField unary(Op op, const ScalarField& a) {
        auto n = make(op, 0.0);
        n->lhs = a.node_;
        return ScalarField(std::move(n));
    }

    bool is_zero() const { return is_constant() && constant_value() == 0.0; }

    static void check_coordinate(const Node& n, std::span<const double> x) {
        require(n.index >= 0 && static_cast<std::size_t>(n.index) < x.size(), ErrorKind::invalid_argument,
                "coordinate '" + n.name + "' not available in a " + std::to_string(x.size()) + "-d point");
    }

    static Jet eval_jet(const Node& n, std::span<const double> x) {
        const int dim = static_cast<int>(x.size());
        switch (n.op) {
            case Op::constant: return Jet::constant(n.value, dim);
            case Op::coordinate:
                check_coordinate(n, x);
                return Jet::seed(x[static_cast<std::size_t>(n.index)], n.index, dim);
            case Op::computed: return n.fn(x);
            case Op::add: return eval_jet(*n.lhs, x) + eval_jet(*n.rhs, x);
            case Op::sub: return eval_jet(*n.lhs, x) - eval_jet(*n.rhs, x);
            case Op::mul: return eval_jet(*n.lhs, x) * eval_jet(*n.rhs, x);
            case Op::div: return eval_jet(*n.lhs, x) / eval_jet(*n.rhs, x);
            case Op::neg: return -eval_jet(*n.lhs, x);
            case Op::exp: return plap::exp(eval_jet(*n.lhs, x));
            case Op::sin: return plap::sin(eval_jet(*n.lhs, x));
            case Op::cos: return plap::cos(eval_jet(*n.lhs, x));
            case Op::log: return plap::log(eval_jet(*n.lhs, x));
            case Op::pow: return plap::pow(eval_jet(*n.lhs, x), n.value);
            case Op::ipow: return plap::ipow(eval_jet(*n.lhs, x), static_cast<int>(n.value));
        }
        return Jet(dim);
    }

    static double eval_plain(const Node& n, std::span<const double> x) {
        switch (n.op) {
            case Op::constant: return n.value;
            case Op::coordinate: check_coordinate(n, x); return x[static_cast<std::size_t>(n.index)];
            case Op::computed: return n.fn(x).value();
            case Op::add: return eval_plain(*n.lhs, x) + eval_plain(*n.rhs, x);
            case Op::sub: return eval_plain(*n.lhs, x) - eval_plain(*n.rhs, x);
            case Op::mul: return eval_plain(*n.lhs, x) * eval_plain(*n.rhs, x);
            case Op::div: {
                const double d = eval_plain(*n.rhs, x);
                require(d != 0.0, ErrorKind::domain_error, "division by zero");
                return eval_plain(*n.lhs, x) / d;
            }
            case Op::neg: return -eval_plain(*n.lhs, x);
            case Op::exp: return std::exp(eval_plain(*n.lhs, x));
            case Op::sin: return std::sin(eval_plain(*n.lhs, x));
            case Op::cos: return std::cos(eval_plain(*n.lhs, x));
            case Op::log: {
                const double a = eval_plain(*n.lhs, x);
                require(a > 0.0, ErrorKind::domain_error, "log of nonpositive value");
                return std::log(a);
            }
            case Op::pow: {
                const double a = eval_plain(*n.lhs, x);
                require(a > 0.0, ErrorKind::domain_error, "pow of nonpositive base");
                return std::pow(a, n.value);
            }
            case Op::ipow: {
                const double a = eval_plain(*n.lhs, x);
                const int k = static_cast<int>(n.value);
                double r = 1.0;
                for (int i = 0; i < std::abs(k); ++i) r *= a;
                if (k < 0) {
                    require(r != 0.0, ErrorKind::domain_error, "negative power of zero");
                    r = 1.0 / r;
                }
                return r;
            }
        }
        return 0.0;
    }

    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    static std::string print(const Node& n) {
        switch (n.op) {
            case Op::constant: return num(n.value);
            case Op::coordinate: return n.name;
            case Op::computed: return n.name;
            case Op::add: return "(" + print(*n.lhs) + " + " + print(*n.rhs) + ")";
            case Op::sub: return "(" + print(*n.lhs) + " - " + print(*n.rhs) + ")";
            case Op::mul: return "(" + print(*n.lhs) + " * " + print(*n.rhs) + ")";
            case Op::div: return "(" + print(*n.lhs) + " / " + print(*n.rhs) + ")";
            case Op::neg: return "(-" + print(*n.lhs) + ")";
            case Op::exp: return "exp(" + print(*n.lhs) + ")";
            case Op::sin: return "sin(" + print(*n.lhs) + ")";
            case Op::cos: return "cos(" + print(*n.lhs) + ")";
            case Op::log: return "log(" + print(*n.lhs) + ")";
            case Op::pow: return "pow(" + print(*n.lhs) + ", " + num(n.value) + ")";
            case Op::ipow: return "(" + print(*n.lhs) + ")^" + num(n.value);
        }
        return "?";
    }

    std::shared_ptr<const Node> node_;
};

/// Parses the closed expression grammar used by scenario configs:
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?
///     primary := number | 'pi' | coordinate | func '(' args ')' | '(' expr ')'
///
/// Functions: sin, cos, exp, log, sqrt, pow(base, constant). Exponents must
/// be constant; integer exponents allow any base.
class FieldParser {
public:
    explicit FieldParser(std::vector<std::string> coordinates) : coords_(std::move(coordinates)) {}

    ScalarField parse(const std::string& text) const {
        State s{text, 0};
        ScalarField r = expr(s);
        skip(s);
        if (s.pos != s.text.size()) {
            error(s, "unexpected trailing input");
        }
        return r;
    }

private:
    struct State {
        const std::string& text;
        std::size_t pos;
    };

    [[noreturn]] static void error(const State& s, const std::string& msg) {
        fail(ErrorKind::config, "expression '" + s.text + "' at offset " + std::to_string(s.pos) + ": " + msg);
    }

    static void skip(State& s) {
        while (s.pos < s.text.size() && std::isspace(static_cast<unsigned char>(s.text[s.pos]))) ++s.pos;
    }

    static bool accept(State& s, char c) {
        skip(s);
        if (s.pos < s.text.size() && s.text[s.pos] == c) {
            ++s.pos;
            return true;
        }
        return false;
    }

    static void expect(State& s, char c) {
        if (!accept(s, c)) error(s, std::string("expected '") + c + "'");
    }

    ScalarField expr(State& s) const {
        ScalarField r = term(s);
        for (;;) {
            if (accept(s, '+')) {
                r = r + term(s);
            } else if (accept(s, '-')) {
                r = r - term(s);
            } else {
                return r;
            }
        }
    }

    ScalarField term(State& s) const {
        ScalarField r = unary(s);
        for (;;) {
            if (accept(s, '*')) {
                r = r * unary(s);
            } else if (accept(s, '/')) {
                r = r / unary(s);
            } else {
                return r;
            }
        }
    }

    ScalarField unary(State& s) const {
        if (accept(s, '-')) return -unary(s);
        if (accept(s, '+')) return unary(s);
        return power(s);
    }

    static ScalarField raise(const State& s, const ScalarField& base, const ScalarField& exponent) {
        if (!exponent.is_constant()) error(s, "exponent must be a constant");
        const double e = exponent.constant_value();
        if (base.is_constant()) {
            return ScalarField::constant(std::pow(base.constant_value(), e));
        }
        if (e == std::floor(e) && std::abs(e) <= 64.0) {
            return ipow(base, static_cast<int>(e));
        }
        return pow(base, e);
    }

    ScalarField power(State& s) const {
        ScalarField base = primary(s);
        if (accept(s, '^')) {
            ScalarField e = unary(s);
            return raise(s, base, e);
        }
        return base;
    }

    ScalarField primary(State& s) const {
        skip(s);
        if (s.pos >= s.text.size()) error(s, "unexpected end of input");
        const char c = s.text[s.pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s.text.substr(s.pos), &used);
            } catch (const std::exception&) {
                error(s, "malformed number");
            }
            s.pos += used;
            return ScalarField::constant(v);
        }
        if (accept(s, '(')) {
            ScalarField r = expr(s);
            expect(s, ')');
            return r;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = s.pos;
            while (s.pos < s.text.size() &&
                   (std::isalnum(static_cast<unsigned char>(s.text[s.pos])) || s.text[s.pos] == '_')) {
                ++s.pos;
            }
            const std::string id = s.text.substr(start, s.pos - start);
            skip(s);
            if (s.pos < s.text.size() && s.text[s.pos] == '(') {
                ++s.pos;
                return call(s, id);
            }
            if (id == "pi") return ScalarField::constant(3.14159265358979323846);
            for (std::size_t i = 0; i < coords_.size(); ++i) {
                if (coords_[i] == id) return ScalarField::coordinate(static_cast<int>(i), id);
            }
            error(s, "unknown identifier '" + id + "'");
        }
        error(s, std::string("unexpected character '") + c + "'");
    }

    ScalarField call(State& s, const std::string& fn) const {
        ScalarField a = expr(s);
        if (fn == "pow") {
            expect(s, ',');
            ScalarField e = expr(s);
            expect(s, ')');
            return raise(s, a, e);
        }
        expect(s, ')');
        auto fold = [&](double (*f)(double), ScalarField (*g)(const ScalarField&)) {
            return a.is_constant() ? ScalarField::constant(f(a.constant_value())) : g(a);
        };
        if (fn == "sin") return fold([](double v) { return std::sin(v); }, [](const ScalarField& x) { return sin(x); });
        if (fn == "cos") return fold([](double v) { return std::cos(v); }, [](const ScalarField& x) { return cos(x); });
        if (fn == "exp") return fold([](double v) { return std::exp(v); }, [](const ScalarField& x) { return exp(x); });
        if (fn == "log") return fold([](double v) { return std::log(v); }, [](const ScalarField& x) { return log(x); });
        if (fn == "sqrt") {
            return a.is_constant() ? ScalarField::constant(std::sqrt(a.constant_value())) : pow(a, 0.5);
        }
        error(s, "unknown function '" + fn + "'");
    }

    std::vector<std::string> coords_;
};

}  // namespace plap
