#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hjb/tensor_grid.hpp"

namespace hjb {

using ScalarCoefficient = std::function<double(double control, std::span<const double> x)>;
/// Writes into out: sigma is N x P row-major, the drift is an N-vector.
using VectorCoefficient = std::function<void(double control, std::span<const double> x, std::span<double> out)>;
using SpatialFunction = std::function<double(std::span<const double> x)>;

struct ControlInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Data of sup_a { -tr[a^a D^2u] - b^a.Du + c^a u - f^a } = 0 with
/// a^a = sigma^a sigma^a^T / 2, posed on a box with a globally defined
/// Dirichlet extension.
struct ControlProblem {
    std::string name;
    std::size_t dim = 0;        ///< N
    std::size_t noise_dim = 0;  ///< P, columns of sigma
    VectorCoefficient sigma;
    VectorCoefficient b;
    ScalarCoefficient c;
    ScalarCoefficient f;
    ControlInterval controls;
    BoxDomain domain;
    SpatialFunction dirichlet;
    SpatialFunction exact;  ///< empty when no closed form is known
    double lambda = 0.0;    ///< min of c over the sampling lattice, set by finalize_problem

    bool has_exact() const { return static_cast<bool>(exact); }
};

/// Checks the problem's shape and samples c on a lattice of the box and the
/// control interval (50 points per axis up to N = 2, fewer above) to record
/// lambda. Throws ErrorCode::invalid_argument if any sampled c <= 0.
void finalize_problem(ControlProblem& problem);

/// a^a(x) = sigma sigma^T / 2, N x N row-major.
std::vector<double> diffusion_matrix(const ControlProblem& problem, double control, std::span<const double> x);

struct ControlGrid {
    std::vector<double> values;
    std::size_t size() const { return values.size(); }
};

/// count >= 2 uniform controls covering [lo, hi] including both endpoints.
ControlGrid discretize_controls(const ControlProblem& problem, int count);

/// Second branch of the non-regular case for x >= 0.
enum class Case3Branch {
    as_printed,  ///< (C + 5/8 pi^2 sigma^2) sin(pi x / 2) cos(pi x)
    sin_pi_y,    ///< same with cos(pi x) replaced by sin(pi y)
};

/// Values of the first case's boundary function outside the box.
enum class Case1Exterior {
    exact_solution,  ///< sin(pi x) sin(pi y), zero on the boundary of Q
    zero,            ///< constant zero everywhere
};

/// Diffusion of the second and third cases.
enum class Case2Diffusion {
    constant,    ///< sigma I, under which the printed f makes u the solution
    as_printed,  ///< sigma a I
};

struct CaseOptions {
    Case3Branch case3_branch = Case3Branch::as_printed;
    Case1Exterior case1_exterior = Case1Exterior::exact_solution;
    Case2Diffusion case2_diffusion = Case2Diffusion::constant;
};

/// The four benchmark problems (ids 1..4); throws ErrorCode::invalid_argument otherwise.
ControlProblem test_case(int id, const CaseOptions& options = {});

/// Inner supremum of the degenerate-diffusion case's source term:
/// max over a in [-1,1] of (C + pi^2 sigma^2 (1+a^2)) u - sigma^2 pi^2 (cos cos + pi b sin cos) a,
/// solved exactly from the endpoints and the interior critical point.
double case4_inner_sup(std::span<const double> x);

}  // namespace hjb
