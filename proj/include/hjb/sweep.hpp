#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hjb/control_problem.hpp"
#include "hjb/interpolation.hpp"

namespace hjb {

/// Evaluable function of a point, the [phi]_x argument of the schemes.
using Field = std::function<double(std::span<const double>)>;

/// Truncated interpolant of u inside the box, Dirichlet extension outside.
Field extended_field(const ControlProblem& problem, const GridFunction& u);

enum class SchemeKind { semi_lagrangian, finite_difference };

/// Produces, for one grid point and one control, the scheme's sample
/// positions with their coefficients and the local c and f values.
class StencilSource {
public:
    virtual ~StencilSource() = default;
    virtual std::size_t samples_per_control() const = 0;
    /// positions: samples_per_control() * N, coefficients: samples_per_control().
    virtual void build(std::span<const double> x, std::size_t control, std::span<double> positions,
                       std::span<double> coefficients, double& c, double& f) const = 0;
};

struct EngineOptions {
    int threads = 0;                                   ///< 0: OpenMP default
    std::size_t memory_budget = std::size_t{1} << 30;  ///< bytes for cached stencils
};

/// Jacobi sweeps of a scheme over every grid point. Stencils are compiled to
/// (mesh, per-axis weights) once when they fit the memory budget and rebuilt
/// per sweep otherwise; both paths run the same arithmetic.
///
/// Semi-Lagrangian, with S the plain sum of the 2P samples:
///   T = min_a (1 - h c) S / (2P) + h f,   S_hat = max_a -(G - t)/h + c t - f.
/// Finite difference, with S the probability-weighted sum:
///   T = min_a (S + h^2 f) / (1 + h^2 c), S_hat = max_a -(S - t)/h^2 + c t - f.
class SweepEngine {
public:
    SweepEngine(const ControlProblem& problem, std::shared_ptr<const TensorGrid> grid, std::size_t control_count,
                std::unique_ptr<StencilSource> source, SchemeKind kind, double h, EngineOptions options = {});
    ~SweepEngine();
    SweepEngine(SweepEngine&&) noexcept;
    SweepEngine& operator=(SweepEngine&&) noexcept;

    /// out = T(in); in and out must not alias.
    void sweep(std::span<const double> in, std::span<double> out) const;
    /// max over grid points of |S_hat(h, y, u(y), I_hat u)|.
    double residual(std::span<const double> u) const;

    bool cached() const;
    const TensorGrid& grid() const;
    int threads() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Splits [0, count) into one contiguous block per thread and runs
/// body(begin, end) on each; the first exception thrown is rethrown on the
/// calling thread.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t, std::size_t)>& body);

int resolve_threads(int requested);

}  // namespace hjb
