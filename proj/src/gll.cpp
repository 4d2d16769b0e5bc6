#include "hjb/gll.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hjb/error.hpp"

namespace hjb {

LegendreValue legendre_eval(int n, double x) {
    if (n < 0) throw Error(ErrorCode::invalid_argument, "legendre_eval: negative degree");
    if (n == 0) return {1.0, 0.0};

    double prev = 1.0;  // L_{k-1}
    double cur = x;     // L_k
    double dprev = 0.0;
    double dcur = 1.0;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        // L'_{k+1} = L'_{k-1} + (2k+1) L_k
        const double dnext = dprev + (2.0 * k + 1.0) * cur;
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
    }
    return {cur, dcur};
}

namespace {

constexpr double kNewtonTolerance = 1e-14;
constexpr int kNewtonMaxSteps = 100;

// Newton on L_M' using L_M'' from the Legendre ODE, valid for |x| < 1.
double polish_interior_node(int order, double guess) {
    double x = guess;
    const double m = static_cast<double>(order);
    for (int step = 0; step < kNewtonMaxSteps; ++step) {
        const auto [value, derivative] = legendre_eval(order, x);
        const double second = (2.0 * x * derivative - m * (m + 1.0) * value) / (1.0 - x * x);
        const double delta = derivative / second;
        x -= delta;
        if (std::abs(delta) <= kNewtonTolerance) break;
    }
    return x;
}

}  // namespace

GllRule gll_rule(int order) {
    if (order < 1 || order > kMaxGllOrder) {
        throw Error(ErrorCode::invalid_order,
                    "gll_rule: order must lie in [1, " + std::to_string(kMaxGllOrder) +
                        "], got " + std::to_string(order));
    }

    GllRule rule;
    rule.order = order;
    const int count = order + 1;
    rule.nodes.assign(count, 0.0);
    rule.nodes.front() = -1.0;
    rule.nodes.back() = 1.0;

    // Chebyshev-Gauss-Lobatto guesses, ascending.
    for (int i = 1; i < order; ++i) {
        const double guess = -std::cos(std::numbers::pi * i / order);
        rule.nodes[i] = polish_interior_node(order, guess);
    }

    // Enforce exact symmetry about 0.
    for (int i = 0; i < count / 2; ++i) {
        const int mirror = count - 1 - i;
        const double sym = 0.5 * (rule.nodes[mirror] - rule.nodes[i]);
        rule.nodes[i] = -sym;
        rule.nodes[mirror] = sym;
    }
    if (count % 2 == 1) rule.nodes[count / 2] = 0.0;

    rule.weights.resize(count);
    const double scale = 2.0 / ((order + 1.0) * order);
    for (int i = 0; i < count; ++i) {
        const double lm = legendre_eval(order, rule.nodes[i]).value;
        rule.weights[i] = scale / (lm * lm);
    }

    rule.barycentric.resize(count);
    for (int j = 0; j < count; ++j) {
        double prod = 1.0;
        for (int k = 0; k < count; ++k) {
            if (k != j) prod *= rule.nodes[j] - rule.nodes[k];
        }
        rule.barycentric[j] = 1.0 / prod;
    }
    return rule;
}

}  // namespace hjb
