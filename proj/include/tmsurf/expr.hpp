#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "tmsurf/jet.hpp"

namespace tmsurf {

// AST of a one-variable analytic expression. Trees are immutable and shared;
// copying an Expr is O(1).
enum class NodeKind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double value = 0.0;       // Const
    int exponent = 0;         // Pow
    Kernel kernel{};          // Call
    NodePtr a, b;
};

class Expr {
public:
    Expr() = default;

    static Expr parse(std::string_view text);

    // Builders for programmatic construction.
    static Expr constant(double v) { return make({NodeKind::Const, v, 0, Kernel::Sin, nullptr, nullptr}); }
    static Expr var() { return make({NodeKind::Var, 0, 0, Kernel::Sin, nullptr, nullptr}); }
    static Expr call(Kernel k, Expr x) { return make({NodeKind::Call, 0, 0, k, x.root_, nullptr}); }
    static Expr pow(Expr x, int n) { return make({NodeKind::Pow, 0, n, Kernel::Sin, x.root_, nullptr}); }

    friend Expr operator-(Expr x) { return make({NodeKind::Neg, 0, 0, Kernel::Sin, x.root_, nullptr}); }
    friend Expr operator+(Expr x, Expr y) { return make({NodeKind::Add, 0, 0, Kernel::Sin, x.root_, y.root_}); }
    friend Expr operator-(Expr x, Expr y) { return make({NodeKind::Sub, 0, 0, Kernel::Sin, x.root_, y.root_}); }
    friend Expr operator*(Expr x, Expr y) { return make({NodeKind::Mul, 0, 0, Kernel::Sin, x.root_, y.root_}); }
    friend Expr operator/(Expr x, Expr y) { return make({NodeKind::Div, 0, 0, Kernel::Sin, x.root_, y.root_}); }

    bool valid() const { return root_ != nullptr; }
    const NodePtr& root() const { return root_; }

    Jet eval_jet(double x0, int order) const;
    double eval_value(double x0) const { return eval_jet(x0, 0).value(); }

    std::string pretty(char var = 'u') const;

    // Symbolic derivative; the node set is closed under differentiation.
    Expr derivative() const;

    bool same_structure(const Expr& other) const { return same(root_, other.root_); }

private:
    explicit Expr(NodePtr r) : root_(std::move(r)) {}
    static Expr make(Node n) { return Expr(std::make_shared<const Node>(std::move(n))) ; }

    static bool same(const NodePtr& x, const NodePtr& y);

    NodePtr root_;
};

namespace detail {

inline std::optional<Kernel> kernel_by_name(std::string_view s) {
    static constexpr std::pair<std::string_view, Kernel> table[] = {
        {"sin", Kernel::Sin},   {"cos", Kernel::Cos},   {"tan", Kernel::Tan},
        {"sinh", Kernel::Sinh}, {"cosh", Kernel::Cosh}, {"tanh", Kernel::Tanh},
        {"exp", Kernel::Exp},   {"log", Kernel::Log},   {"sqrt", Kernel::Sqrt},
        {"asinh", Kernel::Asinh}, {"atan", Kernel::Atan},
    };
    for (auto [name, k] : table)
        if (name == s) return k;
    return std::nullopt;
}

inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), p);
}

// Recursive-descent parser. Precedence, loosest first:
//   + -  |  * /  |  unary -  |  ^  |  atoms
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr run() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("end of input or an operator");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& expected) {
        throw ParseError(pos_, expected,
                         "syntax error at offset " + std::to_string(pos_) + ": expected " + expected);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr parse_sum() {
        Expr e = parse_product();
        for (;;) {
            if (eat('+')) e = e + parse_product();
            else if (eat('-')) e = e - parse_product();
            else return e;
        }
    }

    Expr parse_product() {
        Expr e = parse_unary();
        for (;;) {
            skip_ws();
            if (eat('*')) e = e * parse_unary();
            else if (eat('/')) e = e / parse_unary();
            else {
                // implicit multiplication is rejected deliberately
                const char c = peek();
                if (std::isalnum(static_cast<unsigned char>(c)) || c == '(')
                    fail("an operator (implicit multiplication is not allowed; write '2*u')");
                return e;
            }
        }
    }

    Expr parse_unary() {
        if (eat('-')) return -parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr e = parse_atom();
        if (eat('^')) {
            skip_ws();
            const std::size_t at = pos_;
            bool neg = false;
            if (pos_ < text_.size() && text_[pos_] == '-') {
                neg = true;
                ++pos_;
            }
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == start) {
                pos_ = at;
                fail("an integer exponent");
            }
            if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
                pos_ = at;
                fail("an integer exponent (non-integer exponents are not supported)");
            }
            int n = 0;
            std::from_chars(text_.data() + start, text_.data() + pos_, n);
            e = Expr::pow(e, neg ? -n : n);
        }
        return e;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("a number, name, or '('");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            if (!eat(')')) fail("')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        fail("a number, name, or '('");
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            std::size_t dstart = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == dstart) pos_ = mark;  // 'e' was not an exponent; leave it for the caller
        }
        double v = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc{} || res.ptr != text_.data() + pos_) {
            pos_ = start;
            fail("a numeric literal");
        }
        return Expr::constant(v);
    }

    Expr parse_name() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "u" || name == "v" || name == "s") return Expr::var();
        if (name == "pi") return Expr::constant(M_PI);
        if (name == "e") return Expr::constant(M_E);
        if (auto k = detail::kernel_by_name(name)) {
            if (!eat('(')) fail("'(' after function name");
            Expr arg = parse_sum();
            if (!eat(')')) fail("')'");
            return Expr::call(*k, arg);
        }
        pos_ = start;
        fail("a known function name (sin, cos, tan, sinh, cosh, tanh, exp, log, sqrt, asinh, atan), 'pi', 'e', or a variable");
    }
};

inline int precedence(NodeKind k) {
    switch (k) {
        case NodeKind::Add:
        case NodeKind::Sub: return 1;
        case NodeKind::Mul:
        case NodeKind::Div: return 2;
        case NodeKind::Neg: return 3;
        case NodeKind::Pow: return 4;
        default: return 5;
    }
}

inline void pretty_rec(const NodePtr& n, std::string& out, int parent_prec, bool right_side,
                       char var = 'u') {
    const int prec = precedence(n->kind);
    const bool parens = prec < parent_prec || (prec == parent_prec && right_side && prec <= 2);
    if (parens) out += '(';
    switch (n->kind) {
        case NodeKind::Const: out += format_double(n->value); break;
        case NodeKind::Var: out += var; break;
        case NodeKind::Neg:
            out += '-';
            pretty_rec(n->a, out, prec, true, var);
            break;
        case NodeKind::Add:
            pretty_rec(n->a, out, prec, false, var);
            out += " + ";
            pretty_rec(n->b, out, prec, true, var);
            break;
        case NodeKind::Sub:
            pretty_rec(n->a, out, prec, false, var);
            out += " - ";
            pretty_rec(n->b, out, prec, true, var);
            break;
        case NodeKind::Mul:
            pretty_rec(n->a, out, prec, false, var);
            out += "*";
            pretty_rec(n->b, out, prec, true, var);
            break;
        case NodeKind::Div:
            pretty_rec(n->a, out, prec, false, var);
            out += "/";
            pretty_rec(n->b, out, prec, true, var);
            break;
        case NodeKind::Pow:
            pretty_rec(n->a, out, prec + 1, false, var);
            out += '^';
            if (n->exponent < 0) {
                // a negative exponent literal parses back as part of the power
                out += format_double(n->exponent);
            } else {
                out += std::to_string(n->exponent);
            }
            break;
        case NodeKind::Call:
            out += kernel_name(n->kernel);
            out += '(';
            pretty_rec(n->a, out, 0, false, var);
            out += ')';
            break;
    }
    if (parens) out += ')';
}

inline Jet eval_rec(const NodePtr& n, double x0, int order);

// Attach the offending subtree to the first error raised; outer frames pass it through.
inline Error annotated(const Error& e, const NodePtr& n, double x0) {
    if (std::string_view(e.what()).find("[in subexpression") != std::string_view::npos) return e;
    std::string sub;
    pretty_rec(n, sub, 0, false);
    return Error(e.kind(), std::string(e.what()) + " [in subexpression '" + sub + "' at " +
                               format_double(x0) + "]");
}

inline Jet eval_rec(const NodePtr& n, double x0, int order) {
    switch (n->kind) {
        case NodeKind::Const: return Jet::constant(n->value, x0, order);
        case NodeKind::Var: return Jet::variable(x0, order);
        case NodeKind::Neg: return jet_neg(eval_rec(n->a, x0, order));
        case NodeKind::Add: {
            Jet a = eval_rec(n->a, x0, order), b = eval_rec(n->b, x0, order);
            jet_align(a, b);
            return jet_add(a, b);
        }
        case NodeKind::Sub: {
            Jet a = eval_rec(n->a, x0, order), b = eval_rec(n->b, x0, order);
            jet_align(a, b);
            return jet_sub(a, b);
        }
        case NodeKind::Mul: {
            Jet a = eval_rec(n->a, x0, order), b = eval_rec(n->b, x0, order);
            jet_align(a, b);
            return jet_mul(a, b);
        }
        case NodeKind::Div: {
            Jet a = eval_rec(n->a, x0, order), b = eval_rec(n->b, x0, order);
            jet_align(a, b);
            try {
                return jet_div(a, b);
            } catch (const Error& e) {
                throw annotated(e, n, x0);
            }
        }
        case NodeKind::Pow: return jet_pow(eval_rec(n->a, x0, order), n->exponent);
        case NodeKind::Call:
            try {
                return jet_compose(n->kernel, eval_rec(n->a, x0, order));
            } catch (const Error& e) {
                throw annotated(e, n, x0);
            }
    }
    throw Error(ErrKind::Usage, "eval: bad node");
}

// Derivative construction with light simplification to keep trees small.
inline bool is_const(const NodePtr& n, double v) { return n->kind == NodeKind::Const && n->value == v; }

inline NodePtr mk(Node n) { return std::make_shared<const Node>(std::move(n)); }
inline NodePtr mk_const(double v) { return mk({NodeKind::Const, v, 0, Kernel::Sin, nullptr, nullptr}); }

inline NodePtr mk_add(NodePtr a, NodePtr b) {
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const) return mk_const(a->value + b->value);
    return mk({NodeKind::Add, 0, 0, Kernel::Sin, std::move(a), std::move(b)});
}

inline NodePtr mk_sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0)) return a;
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const) return mk_const(a->value - b->value);
    if (is_const(a, 0)) return mk({NodeKind::Neg, 0, 0, Kernel::Sin, std::move(b), nullptr});
    return mk({NodeKind::Sub, 0, 0, Kernel::Sin, std::move(a), std::move(b)});
}

inline NodePtr mk_mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0) || is_const(b, 0)) return mk_const(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    if (a->kind == NodeKind::Const && b->kind == NodeKind::Const) return mk_const(a->value * b->value);
    return mk({NodeKind::Mul, 0, 0, Kernel::Sin, std::move(a), std::move(b)});
}

inline NodePtr mk_div(NodePtr a, NodePtr b) {
    if (is_const(a, 0)) return mk_const(0);
    if (is_const(b, 1)) return a;
    return mk({NodeKind::Div, 0, 0, Kernel::Sin, std::move(a), std::move(b)});
}

inline NodePtr mk_neg(NodePtr a) {
    if (a->kind == NodeKind::Const) return mk_const(-a->value);
    return mk({NodeKind::Neg, 0, 0, Kernel::Sin, std::move(a), nullptr});
}

inline NodePtr mk_pow(NodePtr a, int n) {
    if (n == 0) return mk_const(1);
    if (n == 1) return a;
    return mk({NodeKind::Pow, 0, n, Kernel::Sin, std::move(a), nullptr});
}

inline NodePtr mk_call(Kernel k, NodePtr a) {
    return mk({NodeKind::Call, 0, 0, k, std::move(a), nullptr});
}

inline NodePtr derive_rec(const NodePtr& n) {
    switch (n->kind) {
        case NodeKind::Const: return mk_const(0);
        case NodeKind::Var: return mk_const(1);
        case NodeKind::Neg: return mk_neg(derive_rec(n->a));
        case NodeKind::Add: return mk_add(derive_rec(n->a), derive_rec(n->b));
        case NodeKind::Sub: return mk_sub(derive_rec(n->a), derive_rec(n->b));
        case NodeKind::Mul:
            return mk_add(mk_mul(derive_rec(n->a), n->b), mk_mul(n->a, derive_rec(n->b)));
        case NodeKind::Div:
            // (a/b)' = (a'b - ab')/b^2
            return mk_div(mk_sub(mk_mul(derive_rec(n->a), n->b), mk_mul(n->a, derive_rec(n->b))),
                          mk_pow(n->b, 2));
        case NodeKind::Pow:
            return mk_mul(mk_mul(mk_const(n->exponent), mk_pow(n->a, n->exponent - 1)),
                          derive_rec(n->a));
        case NodeKind::Call: {
            NodePtr inner = derive_rec(n->a);
            NodePtr outer;
            switch (n->kernel) {
                case Kernel::Sin: outer = mk_call(Kernel::Cos, n->a); break;
                case Kernel::Cos: outer = mk_neg(mk_call(Kernel::Sin, n->a)); break;
                case Kernel::Tan:
                    outer = mk_add(mk_const(1), mk_pow(mk_call(Kernel::Tan, n->a), 2));
                    break;
                case Kernel::Sinh: outer = mk_call(Kernel::Cosh, n->a); break;
                case Kernel::Cosh: outer = mk_call(Kernel::Sinh, n->a); break;
                case Kernel::Tanh:
                    outer = mk_sub(mk_const(1), mk_pow(mk_call(Kernel::Tanh, n->a), 2));
                    break;
                case Kernel::Exp: outer = mk_call(Kernel::Exp, n->a); break;
                case Kernel::Log: outer = mk_div(mk_const(1), n->a); break;
                case Kernel::Sqrt:
                    outer = mk_div(mk_const(0.5), mk_call(Kernel::Sqrt, n->a));
                    break;
                case Kernel::Asinh:
                    outer = mk_div(mk_const(1),
                                   mk_call(Kernel::Sqrt, mk_add(mk_const(1), mk_pow(n->a, 2))));
                    break;
                case Kernel::Atan:
                    outer = mk_div(mk_const(1), mk_add(mk_const(1), mk_pow(n->a, 2)));
                    break;
            }
            return mk_mul(outer, inner);
        }
    }
    throw Error(ErrKind::Usage, "derivative: bad node");
}

} // namespace detail

inline Expr Expr::parse(std::string_view text) { return detail::Parser(text).run(); }

inline std::string Expr::pretty(char var) const {
    if (!root_) return "";
    std::string out;
    detail::pretty_rec(root_, out, 0, false, var);
    return out;
}

inline Jet Expr::eval_jet(double x0, int order) const {
    if (!root_) throw Error(ErrKind::Usage, "eval_jet on empty expression");
    return detail::eval_rec(root_, x0, order);
}

inline Expr Expr::derivative() const {
    if (!root_) throw Error(ErrKind::Usage, "derivative of empty expression");
    return Expr(detail::derive_rec(root_));
}

inline bool Expr::same(const NodePtr& x, const NodePtr& y) {
    if (x == y) return true;
    if (!x || !y) return false;
    if (x->kind != y->kind) return false;
    switch (x->kind) {
        case NodeKind::Const: return x->value == y->value;
        case NodeKind::Var: return true;
        case NodeKind::Pow: return x->exponent == y->exponent && same(x->a, y->a);
        case NodeKind::Call: return x->kernel == y->kernel && same(x->a, y->a);
        case NodeKind::Neg: return same(x->a, y->a);
        default: return same(x->a, y->a) && same(x->b, y->b);
    }
}

} // namespace tmsurf
