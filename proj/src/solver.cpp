#include "hjb/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>
#include <vector>

#include "hjb/error.hpp"
#include "hjb/finite_difference.hpp"
#include "hjb/gll.hpp"
#include "hjb/semi_lagrangian.hpp"
#include "hjb/sweep.hpp"

namespace hjb {

namespace {

void validate(const SolveConfig& config) {
    if (!(config.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be positive");
    if (config.max_iter < 1) throw Error(ErrorCode::invalid_argument, "max_iter must be at least 1");
    if (config.meshes_per_dim < 1) throw Error(ErrorCode::invalid_argument, "meshes per direction must be positive");
    if (!(config.h > 0.0)) throw Error(ErrorCode::invalid_argument, "h must be positive");
}

}  // namespace

double sup_difference(std::span<const double> u, std::span<const double> v) {
    double diff = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) diff = std::max(diff, std::abs(u[i] - v[i]));
    return diff;
}

double sup_error(const GridFunction& u, const SpatialFunction& exact) {
    const TensorGrid& grid = u.grid();
    double err = 0.0;
    for (std::size_t id = 0; id < grid.point_count(); ++id) {
        err = std::max(err, std::abs(u[id] - exact(grid.point(id))));
    }
    return err;
}

SolveReport solve(const ControlProblem& problem, const SolveConfig& config) {
    validate(config);
    const auto start = std::chrono::steady_clock::now();

    const ControlGrid controls = discretize_controls(problem, config.controls);
    auto grid = std::make_shared<const TensorGrid>(
        problem.domain, std::vector<int>(problem.dim, config.meshes_per_dim), gll_rule(config.order));
    const EngineOptions options{config.threads, config.memory_budget};

    ControlProblem scaled;
    const ControlProblem* active = &problem;
    std::optional<SweepEngine> engine;
    int analytic = 0;
    if (config.scheme == Scheme::semi_lagrangian) {
        engine.emplace(make_sl_engine(problem, grid, SLParams{config.h, std::nullopt, controls}, options));
        if (config.stopping == Stopping::analytic) {
            analytic = analytic_iterations_sl(config.q, config.h, config.lambda.value_or(problem.lambda));
        }
    } else {
        NormalizedProblem normalized = normalize_problem(problem, controls);
        scaled = std::move(normalized.problem);
        active = &scaled;
        const FDParams params{config.h, config.hhat.value_or(config.h), controls};
        engine.emplace(make_fd_engine(scaled, grid, params, options));
        if (config.stopping == Stopping::analytic) {
            const double lambda = config.lambda ? *config.lambda / normalized.kappa : scaled.lambda;
            analytic = analytic_iterations_fd(config.q, config.h, lambda);
        }
    }

    GridFunction current(grid);
    GridFunction next(grid);
    SolveReport report;
    while (report.iterations < config.max_iter) {
        engine->sweep(current.values(), next.values());
        ++report.iterations;
        report.final_diff = sup_difference(current.values(), next.values());
        if (config.record_history) report.diff_history.push_back(report.final_diff);
        std::swap(current, next);

        if (config.stopping == Stopping::sup_diff && report.final_diff <= config.tol) {
            report.converged = true;
        } else if (config.stopping == Stopping::analytic && report.iterations >= analytic) {
            report.converged = true;
        } else if (config.stopping == Stopping::residual && engine->residual(current.values()) <= config.tol) {
            report.converged = true;
        }
        if (report.converged) break;
    }

    report.residual = engine->residual(current.values());
    if (active->has_exact()) report.sup_error = sup_error(current, active->exact);
    report.solution = std::move(current);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace hjb
