#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "hjb/control_problem.hpp"
#include "hjb/error.hpp"
#include "hjb/expression.hpp"
#include "hjb/problem_config.hpp"

using namespace hjb;

namespace {

double eval(const char* text, double x = 0.0, double y = 0.0, double a = 0.0) {
    return Expression::parse(text)(x, y, a);
}

ErrorCode parse_code(const std::string& text) {
    try {
        parse_problem_config(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a parse error");
    return ErrorCode::invalid_argument;
}

const char* kMinimal = R"(dim = 1
noise = 1
x_min = 0
x_max = 1
a_min = 0
a_max = 1
c = 1
f = 1
dirichlet = 0
)";

}  // namespace

TEST_SUITE("expression") {
    TEST_CASE("arithmetic and precedence") {
        CHECK(eval("1 + 2 * 3") == 7.0);
        CHECK(eval("(1 + 2) * 3") == 9.0);
        CHECK(eval("2 ^ 3 ^ 2") == 512.0);
        CHECK(eval("-2 ^ 2") == -4.0);
        CHECK(eval("8 / 4 / 2") == 1.0);
        CHECK(eval("1 - 2 - 3") == -4.0);
        CHECK(eval("--3") == 3.0);
        CHECK(eval("1.5e2 + .5") == 150.5);
    }

    TEST_CASE("variables, constants and functions") {
        CHECK(eval("x + 10 * y + 100 * a", 1.0, 2.0, 3.0) == 321.0);
        CHECK(eval("pi") == std::numbers::pi);
        CHECK(eval("sin(pi / 2)") == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(eval("cos(0)") == 1.0);
        CHECK(eval("sqrt(16)") == 4.0);
        CHECK(eval("abs(-3)") == 3.0);
        CHECK(eval("max(1, 5, 3)") == 5.0);
        CHECK(eval("min(4, -2, 3)") == -2.0);
        CHECK(eval("max(x)", 7.0) == 7.0);
        CHECK(eval("max(sin(x), min(y, a))", 0.0, 2.0, 1.0) == 1.0);
    }

    TEST_CASE("malformed expressions are parse errors") {
        for (const char* bad : {"", "1 +", "sin(", "foo(x)", "z", "sin(1, 2)", "max()", "2 $ 3", "(1", "1)", "3 4"}) {
            CAPTURE(bad);
            try {
                Expression::parse(bad);
                FAIL("expected a parse error");
            } catch (const Error& e) {
                CHECK(e.code() == ErrorCode::parse_error);
            }
        }
    }

    TEST_CASE("shipped case 1 config reproduces the built-in problem") {
        const ControlProblem cfg = load_problem_config(HJB_SOURCE_DIR "/problems/case1.cfg");
        const ControlProblem ref = test_case(1);
        CHECK(cfg.name == "case1_cfg");
        CHECK(cfg.dim == 2);
        CHECK(cfg.noise_dim == 2);
        CHECK(cfg.domain.lower == ref.domain.lower);
        CHECK(cfg.domain.upper == ref.domain.upper);
        CHECK(cfg.controls.lo == ref.controls.lo);
        CHECK(cfg.controls.hi == ref.controls.hi);
        CHECK(cfg.lambda == ref.lambda);

        std::mt19937_64 rng(47);
        std::uniform_real_distribution<double> pos(-0.5, 2.5);
        std::uniform_real_distribution<double> ctl(0.0, 1.0);
        std::vector<double> s1(4), s2(4), b1(2), b2(2);
        for (int trial = 0; trial < 500; ++trial) {
            const std::vector<double> x{pos(rng), pos(rng)};
            const double a = ctl(rng);
            cfg.sigma(a, x, s1);
            ref.sigma(a, x, s2);
            CHECK(s1 == s2);
            cfg.b(a, x, b1);
            ref.b(a, x, b2);
            CHECK(b1 == b2);
            CHECK(cfg.c(a, x) == ref.c(a, x));
            CHECK(std::abs(cfg.f(a, x) - ref.f(a, x)) <= 1e-12);
            CHECK(std::abs(cfg.exact(x) - ref.exact(x)) <= 1e-15);
            CHECK(std::abs(cfg.dirichlet(x) - ref.dirichlet(x)) <= 1e-15);
        }
    }

    TEST_CASE("one-dimensional config with defaults") {
        const ControlProblem p = parse_problem_config(kMinimal, "scalar");
        CHECK(p.name == "scalar");
        CHECK(p.dim == 1);
        CHECK_FALSE(p.has_exact());
        std::vector<double> sigma(1), b(1);
        const std::vector<double> x{0.5};
        p.sigma(0.5, x, sigma);
        p.b(0.5, x, b);
        CHECK(sigma[0] == 0.0);
        CHECK(b[0] == 0.0);
        CHECK(p.lambda == 1.0);
    }

    TEST_CASE("config errors") {
        const std::string base = kMinimal;
        CHECK(parse_code(base + "colour = 1\n") == ErrorCode::parse_error);
        CHECK(parse_code(base + "c = 2\n") == ErrorCode::parse_error);
        CHECK(parse_code(base + "b_2 = 1\n") == ErrorCode::parse_error);
        CHECK(parse_code(base + "sigma_12 = 1\n") == ErrorCode::parse_error);
        CHECK(parse_code(base + "exact = sin(\n") == ErrorCode::parse_error);
        CHECK(parse_code(base + "just text\n") == ErrorCode::parse_error);
        CHECK(parse_code("dim = 1\n") == ErrorCode::parse_error);
        CHECK(parse_code("dim = 3\n") == ErrorCode::parse_error);
        CHECK(parse_code(std::string(kMinimal).replace(base.find("c = 1"), 5, "c = -1")) ==
              ErrorCode::invalid_argument);
        try {
            parse_problem_config(base + "\n# comment\ncolour = 1\n");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("line 12") != std::string::npos);
        }
    }
}
