#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hjb/tensor_grid.hpp"

namespace hjb {

/// Real values attached to every point of a TensorGrid.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(std::shared_ptr<const TensorGrid> grid);
    GridFunction(std::shared_ptr<const TensorGrid> grid, std::vector<double> values);

    const TensorGrid& grid() const { return *grid_; }
    const std::shared_ptr<const TensorGrid>& grid_ptr() const { return grid_; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

private:
    std::shared_ptr<const TensorGrid> grid_;
    std::vector<double> values_;
};

/// Samples fn at every grid point.
template <typename Fn>
GridFunction sample(std::shared_ptr<const TensorGrid> grid, Fn&& fn) {
    std::vector<double> values(grid->point_count());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = fn(grid->point(i));
    return GridFunction(std::move(grid), std::move(values));
}

/// Lagrange basis on the GLL nodes evaluated at xi in [-1,1] (barycentric
/// form). Returns a unit vector when xi is within 1e-13 of a node.
void lagrange_basis(const GllRule& rule, double xi, std::span<double> out);

/// Fills out (size N*(M+1), dimension-major) with the per-axis Lagrange
/// weights of x inside the given mesh.
void axis_weights_in_mesh(const TensorGrid& grid, std::span<const int> mesh, std::span<const double> x,
                          std::span<double> out);

/// Locates x (see TensorGrid::locate_mesh) and fills its per-axis weights.
std::size_t locate_with_weights(const TensorGrid& grid, std::span<const double> x, std::span<double> out);

struct MeshContraction {
    double raw;  ///< tensor-product Lagrange interpolant
    double lo;   ///< min of the mesh's nodal values
    double hi;   ///< max of the mesh's nodal values

    double truncated() const { return raw < lo ? lo : (raw > hi ? hi : raw); }
};

/// Contracts nodal values of one mesh against per-axis weights, innermost
/// dimension first. scratch must hold points_per_mesh() doubles.
MeshContraction contract_mesh(const TensorGrid& grid, std::size_t mesh, std::span<const double> axis_weights,
                              std::span<const double> values, std::span<double> scratch);

double interpolate_raw(const GridFunction& u, std::span<const double> x);
double interpolate_truncated(const GridFunction& u, std::span<const double> x);

/// Evaluates inside a caller-chosen mesh (x must lie in it); used to compare
/// the two sides of a shared face.
MeshContraction interpolate_in_mesh(const GridFunction& u, std::span<const int> mesh, std::span<const double> x);

struct InterpolationWeight {
    std::int32_t point;
    double weight;
};

/// Nonnegative weights over the points of the containing mesh, summing to one,
/// that reproduce interpolate_truncated(u, x). Mass sits on at most two nodes:
/// an argmin and an argmax of the nodal values (lowest point id on ties).
std::vector<InterpolationWeight> interpolation_weights(const GridFunction& u, std::span<const double> x);

}  // namespace hjb
