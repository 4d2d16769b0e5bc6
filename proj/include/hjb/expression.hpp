#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hjb {

/// Arithmetic expression over the variables x, y and a.
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses,
/// numbers, the constant pi, sin cos sqrt abs of one argument and max min of
/// one or more arguments.
class Expression {
public:
    /// Throws ErrorCode::parse_error with the offending column.
    static Expression parse(std::string_view text);

    double operator()(double x, double y, double a) const;

    const std::string& text() const { return text_; }

private:
    enum class Op { constant, var_x, var_y, var_a, negate, add, sub, mul, div, pow, sin, cos, sqrt, abs, max, min };
    struct Instr {
        Op op;
        double value = 0.0;  ///< constant payload
        int argc = 0;        ///< argument count of max and min
    };
    class Parser;

    std::string text_;
    std::vector<Instr> program_;  ///< postfix order
    int depth_ = 0;
};

}  // namespace hjb
