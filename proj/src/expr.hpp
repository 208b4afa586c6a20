#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "error.hpp"

namespace meanquad::expr {

// Grammar accepted by parse():
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          right-associative, so 2^3^2 = 512
//   atom   := number | ident ['(' expr ')'] | '(' expr ')'
//
// Identifiers: variables t (alias for x1) and x1..x9, constants pi and e,
// functions sin cos tan exp log sqrt abs step. step(u) is 0 for u<0 and 1
// for u>=0. No implicit multiplication: "2t" is a parse error.

enum class NodeKind { number, variable, negate, add, sub, mul, div, pow, call };

enum class Func { sin, cos, tan, exp, log, sqrt, abs, step };

struct Node {
    NodeKind kind;
    double value = 0.0;        // number
    std::size_t var_index = 0; // variable, 1-based
    Func func = Func::sin;     // call
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

// Immutable after parsing; eval is pure, so a single Ast may be shared by
// any number of concurrent callers.
class Ast {
public:
    Ast() = default;
    explicit Ast(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    bool empty() const { return root_ == nullptr; }
    const Node& root() const { return *root_; }

    // Largest variable index referenced (0 for constant expressions).
    std::size_t max_var_index() const;

    // Fully parenthesized; round-trips through parse() to an equivalent tree.
    std::string to_string() const;

private:
    std::shared_ptr<const Node> root_;
};

// Throws Error(parse_error) carrying the character offset of the fault.
Ast parse(std::string_view src);

// Evaluates at a point given by coordinates (x1..xd). Domain faults
// (log of a nonpositive value, division by zero, negative base with a
// fractional exponent, overflow to non-finite) throw Error(eval_error);
// the result is always finite.
double eval(const Ast& ast, std::span<const double> coords);

}  // namespace meanquad::expr
