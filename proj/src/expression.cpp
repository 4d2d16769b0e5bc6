#include "hjb/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "hjb/error.hpp"

namespace hjb {

class Expression::Parser {
public:
    Parser(std::string_view text, std::vector<Instr>& out) : text_(text), out_(out) {}

    void run() {
        expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    }

private:
    void expression() {
        term();
        for (;;) {
            if (accept('+')) {
                term();
                out_.push_back({Op::add});
            } else if (accept('-')) {
                term();
                out_.push_back({Op::sub});
            } else {
                return;
            }
        }
    }

    void term() {
        unary();
        for (;;) {
            if (accept('*')) {
                unary();
                out_.push_back({Op::mul});
            } else if (accept('/')) {
                unary();
                out_.push_back({Op::div});
            } else {
                return;
            }
        }
    }

    void unary() {
        if (accept('-')) {
            unary();
            out_.push_back({Op::negate});
        } else if (accept('+')) {
            unary();
        } else {
            power();
        }
    }

    void power() {
        primary();
        if (accept('^')) {
            unary();
            out_.push_back({Op::pow});
        }
    }

    void primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char ch = text_[pos_];
        if (ch == '(') {
            ++pos_;
            expression();
            expect(')');
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            identifier();
            return;
        }
        fail("unexpected '" + std::string(1, ch) + "'");
    }

    void number() {
        const std::string rest(text_.substr(pos_));
        char* end = nullptr;
        const double value = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str()) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - rest.c_str());
        out_.push_back({Op::constant, value});
    }

    void identifier() {
        const std::size_t begin = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name(text_.substr(begin, pos_ - begin));
        if (name == "x") return out_.push_back({Op::var_x});
        if (name == "y") return out_.push_back({Op::var_y});
        if (name == "a") return out_.push_back({Op::var_a});
        if (name == "pi") return out_.push_back({Op::constant, std::numbers::pi});

        Op op;
        if (name == "sin") {
            op = Op::sin;
        } else if (name == "cos") {
            op = Op::cos;
        } else if (name == "sqrt") {
            op = Op::sqrt;
        } else if (name == "abs") {
            op = Op::abs;
        } else if (name == "max") {
            op = Op::max;
        } else if (name == "min") {
            op = Op::min;
        } else {
            pos_ = begin;
            fail("unknown identifier '" + name + "'");
        }

        expect('(');
        int argc = 1;
        expression();
        while (accept(',')) {
            expression();
            ++argc;
        }
        expect(')');
        const bool variadic = op == Op::max || op == Op::min;
        if (!variadic && argc != 1) {
            pos_ = begin;
            fail(name + " takes one argument");
        }
        out_.push_back({op, 0.0, argc});
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char ch) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char ch) {
        if (!accept(ch)) fail(std::string("expected '") + ch + "'");
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::parse_error, "column " + std::to_string(pos_ + 1) + ": " + what);
    }

    std::string_view text_;
    std::vector<Instr>& out_;
    std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view text) {
    Expression expr;
    expr.text_ = std::string(text);
    Parser(text, expr.program_).run();

    int depth = 0;
    for (const Instr& ins : expr.program_) {
        switch (ins.op) {
            case Op::constant:
            case Op::var_x:
            case Op::var_y:
            case Op::var_a:
                ++depth;
                break;
            case Op::add:
            case Op::sub:
            case Op::mul:
            case Op::div:
            case Op::pow:
                --depth;
                break;
            case Op::max:
            case Op::min:
                depth -= ins.argc - 1;
                break;
            default:
                break;
        }
        expr.depth_ = std::max(expr.depth_, depth);
    }
    return expr;
}

double Expression::operator()(double x, double y, double a) const {
    thread_local std::vector<double> stack;
    stack.resize(static_cast<std::size_t>(depth_));
    std::size_t top = 0;
    for (const Instr& ins : program_) {
        switch (ins.op) {
            case Op::constant: stack[top++] = ins.value; break;
            case Op::var_x: stack[top++] = x; break;
            case Op::var_y: stack[top++] = y; break;
            case Op::var_a: stack[top++] = a; break;
            case Op::negate: stack[top - 1] = -stack[top - 1]; break;
            case Op::add: --top; stack[top - 1] += stack[top]; break;
            case Op::sub: --top; stack[top - 1] -= stack[top]; break;
            case Op::mul: --top; stack[top - 1] *= stack[top]; break;
            case Op::div: --top; stack[top - 1] /= stack[top]; break;
            case Op::pow: --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
            case Op::sin: stack[top - 1] = std::sin(stack[top - 1]); break;
            case Op::cos: stack[top - 1] = std::cos(stack[top - 1]); break;
            case Op::sqrt: stack[top - 1] = std::sqrt(stack[top - 1]); break;
            case Op::abs: stack[top - 1] = std::abs(stack[top - 1]); break;
            case Op::max:
            case Op::min: {
                const std::size_t first = top - static_cast<std::size_t>(ins.argc);
                double v = stack[first];
                for (std::size_t i = first + 1; i < top; ++i) {
                    v = ins.op == Op::max ? std::max(v, stack[i]) : std::min(v, stack[i]);
                }
                top = first;
                stack[top++] = v;
                break;
            }
        }
    }
    return stack[0];
}

}  // namespace hjb
