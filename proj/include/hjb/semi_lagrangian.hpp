#pragma once

#include <memory>
#include <optional>
#include <span>

#include "hjb/control_problem.hpp"
#include "hjb/interpolation.hpp"
#include "hjb/sweep.hpp"

namespace hjb {

struct SLParams {
    double h = 0.0;
    /// When set, the grid spacing must equal h^q (relative 1e-9).
    std::optional<double> q;
    ControlGrid controls;
};

/// G = (1 - h c)/(2P) sum_i [phi(y + h b + sqrt(hP) sigma_i) + phi(y + h b - sqrt(hP) sigma_i)].
/// Throws ErrorCode::step_too_large when h c >= 1.
double g_operator(const ControlProblem& problem, double control, std::span<const double> y, const Field& phi,
                  double h);

/// S_hat(h, y, t, phi) = max_a { -(G - t)/h + c t - f }.
double s_hat_sl(const ControlProblem& problem, std::span<const double> y, double t, const Field& phi, double h,
                const ControlGrid& controls);

/// Stencil of the semi-Lagrangian scheme: the 2P characteristic foot points.
std::unique_ptr<StencilSource> make_sl_stencil(const ControlProblem& problem, const SLParams& params);

/// Engine for repeated sweeps; validates h c < 1 and the optional h^q link.
SweepEngine make_sl_engine(const ControlProblem& problem, std::shared_ptr<const TensorGrid> grid,
                           const SLParams& params, EngineOptions options = {});

/// (T U)(x) = min_a (1 - h c) Pi(U)(x) + h f, Pi the 2P-point average of I_hat U.
GridFunction t_sweep_sl(const ControlProblem& problem, const SLParams& params, const GridFunction& u);

/// max over grid points of |S_hat(h, y, U(y), I_hat U)|.
double residual_sl(const ControlProblem& problem, const SLParams& params, const GridFunction& u);

/// ceil((q - 1) ln h / ln(1 - lambda h)), at least 1.
int analytic_iterations_sl(double q, double h, double lambda);

}  // namespace hjb
