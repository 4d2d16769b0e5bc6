#include "hjb/semi_lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hjb/error.hpp"

namespace hjb {

namespace {

void check_step(double h, double c) {
    if (!(h * c < 1.0)) {
        throw Error(ErrorCode::step_too_large,
                    "semi-Lagrangian step too large: h c = " + std::to_string(h * c) + " must stay below 1");
    }
}

// Foot points y + h b +/- sqrt(hP) sigma_i, ordered (+ then -) per column.
void foot_points(const ControlProblem& problem, double control, std::span<const double> y, double h,
                 std::span<double> out, std::vector<double>& sigma, std::vector<double>& drift) {
    const std::size_t n = problem.dim;
    const std::size_t p = problem.noise_dim;
    problem.sigma(control, y, sigma);
    problem.b(control, y, drift);
    const double spread = std::sqrt(h * static_cast<double>(p));
    for (std::size_t i = 0; i < p; ++i) {
        double* plus = out.data() + (2 * i) * n;
        double* minus = out.data() + (2 * i + 1) * n;
        for (std::size_t k = 0; k < n; ++k) {
            const double centre = y[k] + h * drift[k];
            const double offset = spread * sigma[k * p + i];
            plus[k] = centre + offset;
            minus[k] = centre - offset;
        }
    }
}

class SlStencil final : public StencilSource {
public:
    SlStencil(const ControlProblem& problem, const SLParams& params)
        : problem_(problem), controls_(params.controls.values), h_(params.h) {}

    std::size_t samples_per_control() const override { return 2 * problem_.noise_dim; }

    void build(std::span<const double> x, std::size_t control, std::span<double> positions,
               std::span<double> coefficients, double& c, double& f) const override {
        const double a = controls_[control];
        c = problem_.c(a, x);
        f = problem_.f(a, x);
        check_step(h_, c);
        thread_local std::vector<double> sigma;
        thread_local std::vector<double> drift;
        sigma.resize(problem_.dim * problem_.noise_dim);
        drift.resize(problem_.dim);
        foot_points(problem_, a, x, h_, positions, sigma, drift);
        std::fill(coefficients.begin(), coefficients.end(), 1.0);
    }

private:
    const ControlProblem& problem_;
    std::vector<double> controls_;
    double h_;
};

void validate_params(const SLParams& params) {
    if (!(params.h > 0.0)) throw Error(ErrorCode::invalid_argument, "semi-Lagrangian step h must be positive");
    if (params.controls.size() == 0) throw Error(ErrorCode::invalid_argument, "empty control grid");
}

}  // namespace

double g_operator(const ControlProblem& problem, double control, std::span<const double> y, const Field& phi,
                  double h) {
    const double c = problem.c(control, y);
    check_step(h, c);
    const std::size_t n = problem.dim;
    const std::size_t samples = 2 * problem.noise_dim;
    std::vector<double> points(samples * n);
    std::vector<double> sigma(n * problem.noise_dim);
    std::vector<double> drift(n);
    foot_points(problem, control, y, h, points, sigma, drift);
    double sum = 0.0;
    for (std::size_t s = 0; s < samples; ++s) sum += phi(std::span<const double>(points.data() + s * n, n));
    return (1.0 - h * c) * (sum / static_cast<double>(samples));
}

double s_hat_sl(const ControlProblem& problem, std::span<const double> y, double t, const Field& phi, double h,
                const ControlGrid& controls) {
    double best = -std::numeric_limits<double>::infinity();
    for (double a : controls.values) {
        const double g = g_operator(problem, a, y, phi, h);
        const double value = -(g - t) / h + problem.c(a, y) * t - problem.f(a, y);
        best = std::max(best, value);
    }
    return best;
}

std::unique_ptr<StencilSource> make_sl_stencil(const ControlProblem& problem, const SLParams& params) {
    validate_params(params);
    return std::make_unique<SlStencil>(problem, params);
}

SweepEngine make_sl_engine(const ControlProblem& problem, std::shared_ptr<const TensorGrid> grid,
                           const SLParams& params, EngineOptions options) {
    validate_params(params);
    if (params.q) {
        const double expected = std::pow(params.h, *params.q);
        if (std::abs(grid->dx() - expected) > 1e-9 * expected) {
            throw Error(ErrorCode::invalid_argument, "grid spacing does not equal h^q");
        }
    }
    return SweepEngine(problem, std::move(grid), params.controls.size(), make_sl_stencil(problem, params),
                       SchemeKind::semi_lagrangian, params.h, options);
}

GridFunction t_sweep_sl(const ControlProblem& problem, const SLParams& params, const GridFunction& u) {
    const SweepEngine engine = make_sl_engine(problem, u.grid_ptr(), params);
    GridFunction out(u.grid_ptr());
    engine.sweep(u.values(), out.values());
    return out;
}

double residual_sl(const ControlProblem& problem, const SLParams& params, const GridFunction& u) {
    return make_sl_engine(problem, u.grid_ptr(), params).residual(u.values());
}

int analytic_iterations_sl(double q, double h, double lambda) {
    if (!(lambda * h < 1.0) || !(lambda > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "analytic iteration count needs 0 < lambda h < 1");
    }
    if (!(h > 0.0 && h < 1.0) || !(q > 1.0)) {
        throw Error(ErrorCode::invalid_argument, "analytic iteration count needs 0 < h < 1 and q > 1");
    }
    const double k = std::ceil((q - 1.0) * std::log(h) / std::log(1.0 - lambda * h));
    return std::max(1, static_cast<int>(k));
}

}  // namespace hjb
