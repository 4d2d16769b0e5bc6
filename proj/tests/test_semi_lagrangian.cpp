#include <doctest.h>

#include <cmath>
#include <random>

#include "hjb/error.hpp"
#include "hjb/semi_lagrangian.hpp"
#include "support.hpp"

using namespace hjb;

namespace {

Field constant_field(double m) {
    return [m](std::span<const double>) { return m; };
}

ControlGrid single_control() { return ControlGrid{{0.5}}; }

}  // namespace

TEST_SUITE("semi_lagrangian") {
    TEST_CASE("G on constant and collapsed stencils") {
        const std::vector<double> y{0.3, 0.6};
        const auto zero_c = test::scalar_problem(1.0, 0.0);
        ControlProblem p = zero_c;
        p.c = [](double, std::span<const double>) { return 0.0; };
        CHECK(g_operator(p, 0.5, y, constant_field(2.5), 0.01) == doctest::Approx(2.5).epsilon(1e-15));
        CHECK(g_operator(zero_c, 0.5, y, constant_field(2.5), 0.01) == doctest::Approx(0.99 * 2.5).epsilon(1e-15));
        const Field phi = [](std::span<const double> z) { return z[0] * z[0] + 3.0 * z[1]; };
        CHECK(g_operator(p, 0.5, y, phi, 0.01) == doctest::Approx(phi(y)).epsilon(1e-15));
    }

    TEST_CASE("G averages the 2P characteristic feet") {
        const ControlProblem p = test::small_case1();
        const std::vector<double> y{0.4, 0.7};
        const double h = 0.01;
        const double a = 0.8;
        const Field phi = [](std::span<const double> z) { return std::exp(z[0]) * std::cos(2.0 * z[1]); };
        // sigma = a I, b = (0.3, 0.3), P = 2: feet y + h b +- sqrt(2h) a e_i.
        const double s = std::sqrt(2.0 * h) * a;
        const double bx = y[0] + 0.3 * h;
        const double by = y[1] + 0.3 * h;
        const double sum = phi(std::vector<double>{bx + s, by}) + phi(std::vector<double>{bx - s, by}) +
                           phi(std::vector<double>{bx, by + s}) + phi(std::vector<double>{bx, by - s});
        CHECK(g_operator(p, a, y, phi, h) == doctest::Approx((1.0 - 0.55 * h) * sum / 4.0).epsilon(1e-14));
    }

    TEST_CASE("step too large") {
        const auto p = test::scalar_problem(2.0, 1.0);
        try {
            g_operator(p, 0.0, std::vector<double>{0.5, 0.5}, constant_field(0.0), 0.5);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::step_too_large);
        }
    }

    TEST_CASE("S_hat on trivial inputs") {
        const std::vector<double> y{0.5, 0.5};
        ControlProblem p = test::scalar_problem(1.0, 0.7);
        p.c = [](double, std::span<const double>) { return 0.0; };
        CHECK(s_hat_sl(p, y, 1.3, constant_field(1.3), 0.01, single_control()) == doctest::Approx(-0.7));
        const auto zero = test::scalar_problem(1.0, 0.0);
        CHECK(s_hat_sl(zero, y, 0.0, constant_field(0.0), 0.01, single_control()) == 0.0);
    }

    TEST_CASE("shifting t and phi by m raises S_hat by at least 2 lambda m") {
        std::mt19937_64 rng(53);
        const ControlProblem p = test::small_case1();
        const auto controls = discretize_controls(p, 16);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            const double k1 = 4.0 * unit(rng);
            const double k2 = 4.0 * unit(rng);
            const Field phi = [=](std::span<const double> z) { return std::sin(k1 * z[0]) * std::cos(k2 * z[1]); };
            const double m = 3.0 * unit(rng);
            const Field shifted = [=](std::span<const double> z) { return phi(z) + m; };
            const std::vector<double> y{unit(rng), unit(rng)};
            const double t = unit(rng);
            const double base = s_hat_sl(p, y, t, phi, 0.01, controls);
            const double up = s_hat_sl(p, y, t + m, shifted, 0.01, controls);
            CHECK(up - base >= 2.0 * p.lambda * m - 1e-9);
        }
    }

    TEST_CASE("scalar recursion matches the geometric partial sums") {
        const double C = 0.8;
        const double F = 1.7;
        const double h = 0.05;
        const auto p = test::scalar_problem(C, F);
        const auto grid = test::square_grid(0.0, 1.0, 2, 2);
        const SLParams params{h, std::nullopt, single_control()};
        GridFunction u(grid);
        double partial = 0.0;
        for (int k = 1; k <= 60; ++k) {
            u = t_sweep_sl(p, params, u);
            partial = partial * (1.0 - h * C) + h * F;
            for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == doctest::Approx(partial).epsilon(1e-13));
        }
    }

    TEST_CASE("scalar residual at the fixed point") {
        // T's fixed point is t = F/C; S_hat = -((1-hC)t - t)/h + Ct - F = 2Ct - F.
        const double C = 0.8;
        const double F = 1.7;
        const double h = 0.05;
        const auto p = test::scalar_problem(C, F);
        const auto grid = test::square_grid(0.0, 1.0, 2, 2);
        const SLParams params{h, std::nullopt, single_control()};
        const double t = F / C;
        const GridFunction u = sample(grid, [t](auto) { return t; });
        const GridFunction tu = t_sweep_sl(p, params, u);
        for (std::size_t i = 0; i < u.size(); ++i) CHECK(tu[i] == doctest::Approx(t).epsilon(1e-14));
        CHECK(residual_sl(p, params, u) == doctest::Approx(std::abs(2.0 * C * t - F)).epsilon(1e-12));
    }

    TEST_CASE("zero data stays at zero") {
        const auto p = test::scalar_problem(1.0, 0.0);
        const auto grid = test::square_grid(0.0, 1.0, 3, 2);
        const SLParams params{0.01, std::nullopt, single_control()};
        const GridFunction u(grid);
        const GridFunction tu = t_sweep_sl(p, params, u);
        for (std::size_t i = 0; i < tu.size(); ++i) CHECK(tu[i] == 0.0);
        CHECK(residual_sl(p, params, u) == 0.0);
    }

    TEST_CASE("contraction in the scalar reduction") {
        std::mt19937_64 rng(59);
        const double h = 0.02;
        const auto p = test::scalar_problem(0.9, 0.3);
        const auto grid = test::square_grid(0.0, 1.0, 3, 3);
        const SLParams params{h, std::nullopt, single_control()};
        for (int trial = 0; trial < 20; ++trial) {
            const auto u = test::random_function(rng, grid);
            const auto v = test::random_function(rng, grid);
            const auto tu = t_sweep_sl(p, params, u);
            const auto tv = t_sweep_sl(p, params, v);
            double before = 0.0;
            double after = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                before = std::max(before, std::abs(u[i] - v[i]));
                after = std::max(after, std::abs(tu[i] - tv[i]));
            }
            CHECK(after <= (1.0 - p.lambda * h) * before + 1e-15);
        }
    }

    TEST_CASE("linear interpolation makes the sweep monotone") {
        std::mt19937_64 rng(61);
        const ControlProblem p = test::small_case1();
        const auto grid = test::square_grid(0.0, 1.0, 6, 1);
        const SLParams params{0.01, std::nullopt, discretize_controls(p, 8)};
        std::uniform_real_distribution<double> gap(0.0, 0.5);
        for (int trial = 0; trial < 10; ++trial) {
            const auto u = test::random_function(rng, grid);
            std::vector<double> larger(u.values().begin(), u.values().end());
            for (double& v : larger) v += gap(rng);
            const auto tu = t_sweep_sl(p, params, u);
            const auto tv = t_sweep_sl(p, params, GridFunction(grid, larger));
            for (std::size_t i = 0; i < tu.size(); ++i) CHECK(tu[i] <= tv[i] + 1e-12);
        }
    }

    TEST_CASE("engine paths agree bit for bit") {
        std::mt19937_64 rng(67);
        const ControlProblem p = test::small_case1();
        const auto grid = test::square_grid(0.0, 1.0, 4, 3);
        const SLParams params{0.01, std::nullopt, discretize_controls(p, 12)};
        const auto u = test::random_function(rng, grid);

        const auto cached = make_sl_engine(p, grid, params, {1, std::size_t{1} << 30});
        const auto rebuilt = make_sl_engine(p, grid, params, {1, 0});
        const auto threaded = make_sl_engine(p, grid, params, {4, std::size_t{1} << 30});
        CHECK(cached.cached());
        CHECK_FALSE(rebuilt.cached());
        std::vector<double> a(u.size()), b(u.size()), c(u.size());
        cached.sweep(u.values(), a);
        rebuilt.sweep(u.values(), b);
        threaded.sweep(u.values(), c);
        CHECK(a == b);
        CHECK(a == c);
        CHECK(cached.residual(u.values()) == rebuilt.residual(u.values()));
        CHECK(cached.residual(u.values()) == threaded.residual(u.values()));

        // Pointwise operators through the extended field give the same numbers.
        const Field phi = extended_field(p, u);
        double residual = 0.0;
        for (std::size_t id = 0; id < grid->point_count(); ++id) {
            const auto x = grid->point(id);
            double best = 1e300;
            for (double ctl : params.controls.values) {
                best = std::min(best, g_operator(p, ctl, x, phi, params.h) + params.h * p.f(ctl, x));
            }
            CHECK(a[id] == best);
            residual = std::max(residual, std::abs(s_hat_sl(p, x, u[id], phi, params.h, params.controls)));
        }
        CHECK(cached.residual(u.values()) == residual);
    }

    TEST_CASE("exact samples are nearly a fixed point") {
        const ControlProblem p = test::small_case1();
        const auto grid = test::square_grid(0.0, 1.0, 16, 2);
        const double h = 0.001;
        const SLParams params{h, std::nullopt, discretize_controls(p, 32)};
        const GridFunction u = sample(grid, p.exact);
        const GridFunction tu = t_sweep_sl(p, params, u);
        double diff = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) diff = std::max(diff, std::abs(tu[i] - u[i]));
        CHECK(diff <= 0.05 * h);
    }

    TEST_CASE("grid spacing must equal h^q when q is given") {
        const auto p = test::scalar_problem(1.0, 1.0);
        const auto grid = test::square_grid(0.0, 1.0, 4, 1);
        CHECK_NOTHROW(make_sl_engine(p, grid, SLParams{0.5, 2.0, single_control()}));
        CHECK_THROWS_AS(make_sl_engine(p, grid, SLParams{0.5, 3.0, single_control()}), Error);
    }

    TEST_CASE("analytic iteration counts") {
        CHECK(analytic_iterations_sl(2.0, 0.1, 0.5) == 45);
        CHECK(analytic_iterations_sl(3.0, 0.1, 0.5) == 90);
        CHECK(analytic_iterations_sl(1.0 + 1e-12, 0.1, 0.5) == 1);
        CHECK_THROWS_AS(analytic_iterations_sl(2.0, 0.5, 2.0), Error);
    }
}
