#include "hjb/control_problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hjb/error.hpp"

namespace hjb {

namespace {

constexpr double kPi = std::numbers::pi;

double sin_sin(std::span<const double> x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]); }

// Case parameters, named as in the benchmark definitions.
struct Case1 {
    static constexpr double b = 0.3;
    static constexpr double C = 0.55;
    static constexpr double sigma = 1.0;
};
struct Case2 {
    static constexpr double b = -1.0;
    static constexpr double C = 0.6;
    static constexpr double sigma = 1.0;
};
struct Case4 {
    static constexpr double b = 0.5;
    static constexpr double C = 0.7;
    static constexpr double sigma = 1.0;
};

// phi(a) = a A + sqrt(1-a^2) B; candidate maximizers are the interval ends and
// the stationary point A / sqrt(A^2 + B^2) (skipped when A = B = 0).
double phi(double a, double A, double B) { return a * A + std::sqrt(std::max(0.0, 1.0 - a * a)) * B; }

double stationary_control(double A, double B, bool& defined) {
    const double norm = std::sqrt(A * A + B * B);
    defined = norm > 0.0;
    return defined ? A / norm : 0.0;
}

double regular_k(std::span<const double> x) {
    const double A = std::sin(kPi * x[1]) * std::cos(kPi * x[0]);
    const double B = std::sin(kPi * x[0]) * std::cos(kPi * x[1]);
    double k = std::max(phi(-1.0, A, B), phi(1.0, A, B));
    bool defined = false;
    const double a_tilde = stationary_control(A, B, defined);
    if (defined && a_tilde >= -1.0 && a_tilde <= 1.0) k = std::max(k, phi(a_tilde, A, B));
    return k;
}

double half_k(std::span<const double> x) {
    const double A = 0.5 * std::sin(kPi * x[1]) * std::cos(0.5 * kPi * x[0]);
    const double B = std::sin(0.5 * kPi * x[0]) * std::cos(kPi * x[1]);
    double k = std::max(phi(-1.0, A, B), phi(1.0, A, B));
    bool defined = false;
    const double a_tilde = stationary_control(A, B, defined);
    if (defined) {
        const double a_hat = -a_tilde;
        if (a_tilde >= -1.0 && a_tilde <= 1.0) k = std::max(k, phi(a_tilde, A, B));
        if (a_hat >= -1.0 && a_hat <= 1.0) k = std::max(k, phi(a_hat, A, B));
    }
    return k;
}

double case3_v(std::span<const double> x) {
    const double sy = std::sin(kPi * x[1]);
    return x[0] <= 0.0 ? std::sin(kPi * x[0]) * sy : std::sin(0.5 * kPi * x[0]) * sy;
}

void isotropic_sigma(double scale, std::span<double> out) {
    out[0] = scale;
    out[1] = 0.0;
    out[2] = 0.0;
    out[3] = scale;
}

ControlProblem make_case1(Case1Exterior exterior) {
    using P = Case1;
    ControlProblem p;
    p.name = "case1";
    p.dim = 2;
    p.noise_dim = 2;
    p.sigma = [](double a, std::span<const double>, std::span<double> out) { isotropic_sigma(P::sigma * a, out); };
    p.b = [](double, std::span<const double>, std::span<double> out) {
        out[0] = P::b;
        out[1] = P::b;
    };
    p.c = [](double, std::span<const double>) { return P::C; };
    p.f = [](double, std::span<const double> x) {
        const double u = sin_sin(x);
        const double indicator = u > 0.0 ? 1.0 : 0.0;
        const double grad = std::cos(kPi * x[0]) * std::sin(kPi * x[1]) + std::sin(kPi * x[0]) * std::cos(kPi * x[1]);
        return (P::C + kPi * kPi * P::sigma * P::sigma * indicator) * u - P::b * kPi * grad;
    };
    p.controls = {0.0, 1.0};
    p.domain = {{0.0, 0.0}, {2.0, 2.0}};
    if (exterior == Case1Exterior::zero) {
        p.dirichlet = [](std::span<const double>) { return 0.0; };
    } else {
        p.dirichlet = sin_sin;
    }
    p.exact = sin_sin;
    return p;
}

ControlProblem make_case2(Case2Diffusion diffusion) {
    using P = Case2;
    ControlProblem p;
    p.name = "case2";
    p.dim = 2;
    p.noise_dim = 2;
    if (diffusion == Case2Diffusion::as_printed) {
        p.sigma = [](double a, std::span<const double>, std::span<double> out) { isotropic_sigma(P::sigma * a, out); };
    } else {
        p.sigma = [](double, std::span<const double>, std::span<double> out) { isotropic_sigma(P::sigma, out); };
    }
    p.b = [](double a, std::span<const double>, std::span<double> out) {
        out[0] = P::b * a;
        out[1] = P::b * std::sqrt(std::max(0.0, 1.0 - a * a));
    };
    p.c = [](double, std::span<const double>) { return P::C; };
    p.f = [](double, std::span<const double> x) {
        return (P::C + kPi * kPi * P::sigma * P::sigma) * sin_sin(x) - P::b * kPi * regular_k(x);
    };
    p.controls = {-1.0, 1.0};
    p.domain = {{0.0, 0.0}, {0.5, 0.5}};
    p.dirichlet = sin_sin;
    p.exact = sin_sin;
    return p;
}

ControlProblem make_case3(Case3Branch branch, Case2Diffusion diffusion) {
    using P = Case2;
    ControlProblem p = make_case2(diffusion);
    p.name = "case3";
    p.f = [branch](double, std::span<const double> x) {
        if (x[0] <= 0.0) {
            return (P::C + kPi * kPi * P::sigma * P::sigma) * case3_v(x) - P::b * kPi * regular_k(x);
        }
        const double tail = branch == Case3Branch::as_printed ? std::cos(kPi * x[0]) : std::sin(kPi * x[1]);
        return (P::C + kPi * kPi * P::sigma * P::sigma * 5.0 / 8.0) * std::sin(0.5 * kPi * x[0]) * tail -
               P::b * kPi * half_k(x);
    };
    p.domain = {{-1.0, -1.0}, {1.0, 1.0}};
    p.dirichlet = case3_v;
    p.exact = nullptr;
    return p;
}

ControlProblem make_case4() {
    using P = Case4;
    ControlProblem p;
    p.name = "case4";
    p.dim = 2;
    p.noise_dim = 1;
    p.sigma = [](double a, std::span<const double>, std::span<double> out) {
        out[0] = P::sigma;
        out[1] = P::sigma * a;
    };
    p.b = [](double a, std::span<const double>, std::span<double> out) {
        out[0] = P::b;
        out[1] = P::b * a;
    };
    p.c = [](double, std::span<const double>) { return P::C; };
    p.f = [](double, std::span<const double> x) {
        return case4_inner_sup(x) - P::b * kPi * std::cos(kPi * x[0]) * std::sin(kPi * x[1]);
    };
    p.controls = {-1.0, 1.0};
    p.domain = {{-1.0, -1.0}, {1.0, 1.0}};
    p.dirichlet = sin_sin;
    p.exact = sin_sin;
    return p;
}

}  // namespace

double case4_inner_sup(std::span<const double> x) {
    using P = Case4;
    const double u = sin_sin(x);
    const double s2 = P::sigma * P::sigma;
    // q(a) = c0 + c1 a + c2 a^2
    const double c0 = (P::C + kPi * kPi * s2) * u;
    const double c1 = -s2 * kPi * kPi *
                      (std::cos(kPi * x[0]) * std::cos(kPi * x[1]) +
                       kPi * P::b * std::sin(kPi * x[0]) * std::cos(kPi * x[1]));
    const double c2 = kPi * kPi * s2 * u;
    const auto q = [&](double a) { return c0 + c1 * a + c2 * a * a; };

    double best = std::max(q(-1.0), q(1.0));
    if (c2 != 0.0) {
        const double critical = -c1 / (2.0 * c2);
        if (critical > -1.0 && critical < 1.0) best = std::max(best, q(critical));
    }
    return best;
}

void finalize_problem(ControlProblem& problem) {
    problem.domain.validate();
    if (problem.dim != problem.domain.dim() || problem.dim == 0) {
        throw Error(ErrorCode::invalid_argument, problem.name + ": dimension does not match the domain");
    }
    if (problem.noise_dim == 0) throw Error(ErrorCode::invalid_argument, problem.name + ": sigma needs P >= 1");
    if (!problem.sigma || !problem.b || !problem.c || !problem.f || !problem.dirichlet) {
        throw Error(ErrorCode::invalid_argument, problem.name + ": missing coefficient");
    }
    if (!(problem.controls.lo <= problem.controls.hi)) {
        throw Error(ErrorCode::invalid_argument, problem.name + ": empty control interval");
    }

    const std::size_t n = problem.dim;
    const int per_axis = n <= 2 ? 50 : 10;
    const auto node = [per_axis](double lo, double hi, int i) {
        return i == per_axis - 1 ? hi : lo + (hi - lo) * i / (per_axis - 1);
    };

    double lambda = std::numeric_limits<double>::infinity();
    std::vector<int> idx(n, 0);
    std::vector<double> x(n);
    bool done = false;
    while (!done) {
        for (std::size_t k = 0; k < n; ++k) x[k] = node(problem.domain.lower[k], problem.domain.upper[k], idx[k]);
        for (int j = 0; j < per_axis; ++j) {
            const double a = node(problem.controls.lo, problem.controls.hi, j);
            lambda = std::min(lambda, problem.c(a, x));
        }
        done = true;
        for (std::size_t k = n; k-- > 0;) {
            if (++idx[k] < per_axis) {
                done = false;
                break;
            }
            idx[k] = 0;
        }
    }
    if (!(lambda > 0.0)) {
        throw Error(ErrorCode::invalid_argument,
                    problem.name + ": discount c must be positive, sampled min " + std::to_string(lambda));
    }
    problem.lambda = lambda;
}

std::vector<double> diffusion_matrix(const ControlProblem& problem, double control, std::span<const double> x) {
    const std::size_t n = problem.dim;
    const std::size_t p = problem.noise_dim;
    std::vector<double> sigma(n * p);
    problem.sigma(control, x, sigma);
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < p; ++k) s += sigma[i * p + k] * sigma[j * p + k];
            a[i * n + j] = 0.5 * s;
        }
    }
    return a;
}

ControlGrid discretize_controls(const ControlProblem& problem, int count) {
    if (count < 2) throw Error(ErrorCode::invalid_argument, "control grid needs at least 2 controls");
    ControlGrid grid;
    grid.values.resize(static_cast<std::size_t>(count));
    const double lo = problem.controls.lo;
    const double hi = problem.controls.hi;
    for (int i = 0; i < count; ++i) grid.values[static_cast<std::size_t>(i)] = lo + i * (hi - lo) / (count - 1);
    grid.values.back() = hi;
    return grid;
}

ControlProblem test_case(int id, const CaseOptions& options) {
    ControlProblem p;
    switch (id) {
        case 1: p = make_case1(options.case1_exterior); break;
        case 2: p = make_case2(options.case2_diffusion); break;
        case 3: p = make_case3(options.case3_branch, options.case2_diffusion); break;
        case 4: p = make_case4(); break;
        default: throw Error(ErrorCode::invalid_argument, "unknown test case " + std::to_string(id));
    }
    finalize_problem(p);
    return p;
}

}  // namespace hjb
