#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hjb/control_problem.hpp"
#include "hjb/interpolation.hpp"
#include "hjb/sweep.hpp"

namespace hjb {

/// a = sum_i d_i xi_i xi_i^T with orthonormal xi_i, d sorted descending.
struct EigenDecomposition {
    std::size_t dim = 0;
    std::vector<double> eigenvalues;
    /// directions[i * dim + k] is component k of xi_i.
    std::vector<double> directions;

    std::span<const double> direction(std::size_t i) const { return {directions.data() + i * dim, dim}; }
};

/// Cyclic Jacobi on a symmetric N x N row-major matrix. Eigenvalues in
/// [-1e-12, 0) are clamped to 0, more negative ones throw
/// ErrorCode::not_positive_semidefinite. Each direction's first nonzero
/// component is positive.
EigenDecomposition eigendecompose(std::span<const double> a, std::size_t n);

/// One decomposition per control; throws ErrorCode::x_dependent_diffusion when
/// a^a differs across a 3^N lattice of the box by more than 1e-12.
std::vector<EigenDecomposition> decompose_controls(const ControlProblem& problem, const ControlGrid& controls);

struct NormalizedProblem {
    ControlProblem problem;
    double kappa = 1.0;
};

/// Divides the operator by kappa = max(1, sup_{a,x} sum_i d_i + |b_i(x)|)
/// (sigma by sqrt(kappa), b, c, f by kappa) so the scaled problem satisfies
/// the bound with 1. The solution set is unchanged.
NormalizedProblem normalize_problem(const ControlProblem& problem, const ControlGrid& controls);

struct FDParams {
    double h = 0.0;     ///< second-order step
    double hhat = 0.0;  ///< first-order step
    ControlGrid controls;
};

struct StencilProbabilities {
    struct Entry {
        std::vector<double> offset;
        double p;
    };
    /// Order: 0, then +h xi_i, -h xi_i for each i, then +hhat e_i, -hhat e_i.
    std::vector<Entry> entries;
};

/// p(x,x) = 1 - sum_i (d_i + |b_i| h^2/hhat), p(x, x +/- hhat e_i) = b_i^{+/-} h^2/hhat,
/// p(x, x +/- h xi_i) = d_i / 2.
StencilProbabilities transition_probs(const EigenDecomposition& decomp, std::span<const double> b,
                                      const FDParams& params);

/// S_hat(h, y, t, phi) = max_a { -(sum_z p phi(y+z) - t)/h^2 + c t - f } on a normalized problem.
double s_hat_fd(const ControlProblem& problem, std::span<const double> y, double t, const Field& phi,
                const FDParams& params);

std::unique_ptr<StencilSource> make_fd_stencil(const ControlProblem& problem, const FDParams& params);

SweepEngine make_fd_engine(const ControlProblem& problem, std::shared_ptr<const TensorGrid> grid,
                           const FDParams& params, EngineOptions options = {});

/// (T U)(x) = min_a (sum_z p I_hat U(x+z) + h^2 f) / (1 + h^2 c) on a normalized problem.
GridFunction t_sweep_fd(const ControlProblem& problem, const FDParams& params, const GridFunction& u);

double residual_fd(const ControlProblem& problem, const FDParams& params, const GridFunction& u);

/// ceil(-(q - 2) ln h / ln(1 + lambda h^2)), at least 1.
int analytic_iterations_fd(double q, double h, double lambda);

}  // namespace hjb
