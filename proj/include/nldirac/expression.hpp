#pragma once

// Small complex-valued arithmetic language used in configuration files.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Built-in names: pi, e, i. Functions: exp, sin, cos, sqrt, abs, re, im,
// conj, const, exp_mode(k) = exp(i k pi x / L).

#include "nldirac/types.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace nldirac {

using Variables = std::map<std::string, Complex, std::less<>>;

class Expression {
public:
    static Expression parse(std::string_view text);

    Complex evaluate(const Variables& vars = {}) const;

    /// Evaluates and requires a real result (|imag| <= 1e-12 |value|).
    Real evaluate_real(const Variables& vars = {}) const;

    bool uses(std::string_view name) const;
    const std::string& text() const noexcept { return text_; }

    struct Node;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

}  // namespace nldirac
