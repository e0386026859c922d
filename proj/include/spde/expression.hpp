#pragma once

// Closed-form scalar expressions in t and x used for coefficient and data
// fields in experiment configs.
//
// Grammar:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('-' | '+') unary | power
//   power  := atom ('^' unary)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
// Names: t, x (same as x1), x1 .. x9, pi.  Functions: sin, cos, exp.

#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace spde {

class ExpressionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Expression {
public:
    /// Parses `text`; throws ExpressionError with the offending position.
    static Expression parse(const std::string& text);
    static Expression constant(double value);

    double operator()(double t, std::span<const double> x) const;

    bool depends_on_x() const noexcept;
    bool depends_on_t() const noexcept;
    /// Highest spatial coordinate index referenced (0 when none).
    int max_axis() const noexcept;

    const std::string& text() const noexcept { return text_; }

    struct Node;

private:
    Expression(std::shared_ptr<const Node> root, std::string text);

    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace spde
