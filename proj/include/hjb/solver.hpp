#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hjb/control_problem.hpp"
#include "hjb/interpolation.hpp"

namespace hjb {

enum class Scheme { semi_lagrangian, finite_difference };

enum class Stopping {
    sup_diff,   ///< stop once |U^{i+1} - U^i|_0 <= tol
    analytic,   ///< run the scheme's analytic iteration count for (q, lambda)
    residual,   ///< stop once the residual of the iterate is <= tol
};

struct SolveConfig {
    Scheme scheme = Scheme::semi_lagrangian;
    int order = 2;
    int meshes_per_dim = 10;
    double h = 0.001;
    /// First-order FD step; defaults to h.
    std::optional<double> hhat;
    int controls = 2000;
    Stopping stopping = Stopping::sup_diff;
    double tol = 1e-7;
    int max_iter = 100000;
    /// Exponent of the analytic stopping rule.
    double q = 3.0;
    /// Overrides the problem's sampled lambda for the analytic rule.
    std::optional<double> lambda;
    int threads = 0;
    std::size_t memory_budget = std::size_t{1} << 30;
    /// Keep |U^{i+1} - U^i|_0 of every sweep in SolveReport::diff_history.
    bool record_history = false;
};

struct SolveReport {
    GridFunction solution;
    int iterations = 0;
    double final_diff = 0.0;
    double residual = 0.0;
    double wall_seconds = 0.0;
    std::optional<double> sup_error;
    bool converged = false;
    std::vector<double> diff_history;
};

/// Iterates U <- T U from U = 0 with two swapped buffers until the stopping
/// rule fires or max_iter sweeps have run. FD solves the normalized problem.
SolveReport solve(const ControlProblem& problem, const SolveConfig& config);

/// max over grid points of |U(y) - exact(y)|.
double sup_error(const GridFunction& u, const SpatialFunction& exact);

/// max over grid points of |U(y) - V(y)|; both must live on the same grid.
double sup_difference(std::span<const double> u, std::span<const double> v);

}  // namespace hjb
