#include "expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace meanquad::expr {

namespace {

std::shared_ptr<const Node> make_number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::number;
    n->value = v;
    return n;
}

std::shared_ptr<const Node> make_variable(std::size_t index) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::variable;
    n->var_index = index;
    return n;
}

std::shared_ptr<const Node> make_unary(NodeKind kind, std::shared_ptr<const Node> child) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(child);
    return n;
}

std::shared_ptr<const Node> make_binary(NodeKind kind, std::shared_ptr<const Node> lhs,
                                        std::shared_ptr<const Node> rhs) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

std::shared_ptr<const Node> make_call(Func f, std::shared_ptr<const Node> arg) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::call;
    n->func = f;
    n->lhs = std::move(arg);
    return n;
}

const char* func_name(Func f) {
    switch (f) {
        case Func::sin: return "sin";
        case Func::cos: return "cos";
        case Func::tan: return "tan";
        case Func::exp: return "exp";
        case Func::log: return "log";
        case Func::sqrt: return "sqrt";
        case Func::abs: return "abs";
        case Func::step: return "step";
    }
    return "?";
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Ast run() {
        auto root = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) throw parse_error("trailing input after expression", long(pos_));
        return Ast(std::move(root));
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw parse_error(std::string("expected ") + what, long(pos_));
    }

    std::shared_ptr<const Node> parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make_binary(NodeKind::add, std::move(lhs), parse_term());
            } else if (accept('-')) {
                lhs = make_binary(NodeKind::sub, std::move(lhs), parse_term());
            } else {
                return lhs;
            }
        }
    }

    std::shared_ptr<const Node> parse_term() {
        auto lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_binary(NodeKind::mul, std::move(lhs), parse_unary());
            } else if (accept('/')) {
                lhs = make_binary(NodeKind::div, std::move(lhs), parse_unary());
            } else {
                return lhs;
            }
        }
    }

    std::shared_ptr<const Node> parse_unary() {
        if (accept('-')) return make_unary(NodeKind::negate, parse_unary());
        return parse_power();
    }

    std::shared_ptr<const Node> parse_power() {
        auto base = parse_atom();
        if (accept('^')) return make_binary(NodeKind::pow, std::move(base), parse_unary());
        return base;
    }

    std::shared_ptr<const Node> parse_atom() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            expect(')', "')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        throw parse_error("expected a number, identifier or '('", long(pos_));
    }

    std::shared_ptr<const Node> parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        // scientific suffix only when a digit (or signed digit) follows
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        if (pos_ == start || (pos_ == start + 1 && src_[start] == '.'))
            throw parse_error("malformed number", long(start));
        const std::string text(src_.substr(start, pos_ - start));
        char* end = nullptr;
        const double v = std::strtod(text.c_str(), &end);
        if (end != text.c_str() + text.size() || !std::isfinite(v))
            throw parse_error("malformed number", long(start));
        return make_number(v);
    }

    std::shared_ptr<const Node> parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])))) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);

        if (name == "t") return make_variable(1);
        if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9')
            return make_variable(std::size_t(name[1] - '0'));
        if (name == "pi") return make_number(M_PI);
        if (name == "e") return make_number(M_E);

        Func f;
        if (name == "sin") f = Func::sin;
        else if (name == "cos") f = Func::cos;
        else if (name == "tan") f = Func::tan;
        else if (name == "exp") f = Func::exp;
        else if (name == "log") f = Func::log;
        else if (name == "sqrt") f = Func::sqrt;
        else if (name == "abs") f = Func::abs;
        else if (name == "step") f = Func::step;
        else throw parse_error("unknown identifier '" + std::string(name) + "'", long(start));

        expect('(', "'(' after function name");
        auto arg = parse_expr();
        expect(')', "')'");
        return make_call(f, std::move(arg));
    }
};

std::size_t max_var_index_rec(const Node& n) {
    std::size_t m = n.kind == NodeKind::variable ? n.var_index : 0;
    if (n.lhs) m = std::max(m, max_var_index_rec(*n.lhs));
    if (n.rhs) m = std::max(m, max_var_index_rec(*n.rhs));
    return m;
}

void print_rec(const Node& n, std::string& out) {
    char buf[40];
    switch (n.kind) {
        case NodeKind::number:
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            break;
        case NodeKind::variable:
            out += 'x';
            out += char('0' + n.var_index);
            break;
        case NodeKind::negate:
            out += "(-";
            print_rec(*n.lhs, out);
            out += ')';
            break;
        case NodeKind::add:
        case NodeKind::sub:
        case NodeKind::mul:
        case NodeKind::div:
        case NodeKind::pow: {
            const char op = n.kind == NodeKind::add   ? '+'
                            : n.kind == NodeKind::sub ? '-'
                            : n.kind == NodeKind::mul ? '*'
                            : n.kind == NodeKind::div ? '/'
                                                      : '^';
            out += '(';
            print_rec(*n.lhs, out);
            out += op;
            print_rec(*n.rhs, out);
            out += ')';
            break;
        }
        case NodeKind::call:
            out += func_name(n.func);
            out += '(';
            print_rec(*n.lhs, out);
            out += ')';
            break;
    }
}

double require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw eval_error(std::string("non-finite result in ") + what);
    return v;
}

double eval_rec(const Node& n, std::span<const double> coords) {
    switch (n.kind) {
        case NodeKind::number:
            return n.value;
        case NodeKind::variable:
            if (n.var_index > coords.size())
                throw eval_error("variable x" + std::to_string(n.var_index) +
                                 " exceeds the point dimension " + std::to_string(coords.size()));
            return coords[n.var_index - 1];
        case NodeKind::negate:
            return -eval_rec(*n.lhs, coords);
        case NodeKind::add:
            return require_finite(eval_rec(*n.lhs, coords) + eval_rec(*n.rhs, coords), "addition");
        case NodeKind::sub:
            return require_finite(eval_rec(*n.lhs, coords) - eval_rec(*n.rhs, coords), "subtraction");
        case NodeKind::mul:
            return require_finite(eval_rec(*n.lhs, coords) * eval_rec(*n.rhs, coords), "multiplication");
        case NodeKind::div: {
            const double num = eval_rec(*n.lhs, coords);
            const double den = eval_rec(*n.rhs, coords);
            if (den == 0.0) throw eval_error("division by zero");
            return require_finite(num / den, "division");
        }
        case NodeKind::pow: {
            const double base = eval_rec(*n.lhs, coords);
            const double expo = eval_rec(*n.rhs, coords);
            if (base < 0.0 && expo != std::floor(expo))
                throw eval_error("negative base with a non-integer exponent");
            if (base == 0.0 && expo < 0.0) throw eval_error("zero raised to a negative power");
            return require_finite(std::pow(base, expo), "power");
        }
        case NodeKind::call: {
            const double a = eval_rec(*n.lhs, coords);
            switch (n.func) {
                case Func::sin: return std::sin(a);
                case Func::cos: return std::cos(a);
                case Func::tan: return require_finite(std::tan(a), "tan");
                case Func::exp: return require_finite(std::exp(a), "exp");
                case Func::log:
                    if (a <= 0.0) throw eval_error("log of a nonpositive value");
                    return require_finite(std::log(a), "log");
                case Func::sqrt:
                    if (a < 0.0) throw eval_error("sqrt of a negative value");
                    return std::sqrt(a);
                case Func::abs: return std::abs(a);
                case Func::step: return a < 0.0 ? 0.0 : 1.0;
            }
            throw eval_error("unknown function");
        }
    }
    throw eval_error("malformed expression node");
}

}  // namespace

std::size_t Ast::max_var_index() const {
    return root_ ? max_var_index_rec(*root_) : 0;
}

std::string Ast::to_string() const {
    std::string out;
    if (root_) print_rec(*root_, out);
    return out;
}

Ast parse(std::string_view src) {
    return Parser(src).run();
}

double eval(const Ast& ast, std::span<const double> coords) {
    if (ast.empty()) throw eval_error("empty expression");
    return eval_rec(ast.root(), coords);
}

}  // namespace meanquad::expr
