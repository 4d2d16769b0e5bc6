#pragma once

#include <memory>
#include <random>
#include <vector>

#include "hjb/gll.hpp"
#include "hjb/interpolation.hpp"
#include "hjb/tensor_grid.hpp"

namespace hjb::test {

inline std::shared_ptr<const TensorGrid> square_grid(double lo, double hi, int meshes, int order, std::size_t dim = 2) {
    BoxDomain box{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
    return std::make_shared<const TensorGrid>(box, std::vector<int>(dim, meshes), gll_rule(order));
}

inline std::vector<double> uniform_point(std::mt19937_64& rng, const BoxDomain& box) {
    std::vector<double> x(box.dim());
    for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = std::uniform_real_distribution<double>(box.lower[k], box.upper[k])(rng);
    }
    return x;
}

inline GridFunction random_function(std::mt19937_64& rng, std::shared_ptr<const TensorGrid> grid, double lo = -1.0,
                                    double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    return sample(std::move(grid), [&](auto) { return dist(rng); });
}

}  // namespace hjb::test

#include "hjb/control_problem.hpp"

namespace hjb::test {

/// sigma = b = 0, c = C, f = F on [0,1]^dim with Dirichlet data `outside`.
inline ControlProblem scalar_problem(double C, double F, std::size_t dim = 2, double outside = 0.0) {
    ControlProblem p;
    p.name = "scalar";
    p.dim = dim;
    p.noise_dim = dim;
    p.sigma = [](double, std::span<const double>, std::span<double> out) {
        for (double& v : out) v = 0.0;
    };
    p.b = [](double, std::span<const double>, std::span<double> out) {
        for (double& v : out) v = 0.0;
    };
    p.c = [C](double, std::span<const double>) { return C; };
    p.f = [F](double, std::span<const double>) { return F; };
    p.controls = {0.0, 1.0};
    p.domain = {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
    p.dirichlet = [outside](std::span<const double>) { return outside; };
    finalize_problem(p);
    return p;
}

/// Case 1 coefficients on [0,1]^2 with exterior data u; small enough for unit tests.
inline ControlProblem small_case1() {
    ControlProblem p = test_case(1);
    p.domain = {{0.0, 0.0}, {1.0, 1.0}};
    return p;
}

}  // namespace hjb::test
