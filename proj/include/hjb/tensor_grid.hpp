#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hjb/gll.hpp"

namespace hjb {

/// Axis-aligned box Q = prod_k [lower_k, upper_k].
struct BoxDomain {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dim() const { return lower.size(); }
    /// Throws ErrorCode::invalid_domain unless dim >= 1 and lower_k < upper_k.
    void validate() const;
};

/// Hypercube meshes of common spacing dx over a box, each carrying the
/// tensorized GLL points. Points shared by neighbouring meshes are stored once;
/// global point ids are lexicographic with the last dimension fastest.
class TensorGrid {
public:
    TensorGrid(BoxDomain domain, std::vector<int> meshes_per_dim, GllRule rule);

    std::size_t dim() const { return domain_.dim(); }
    double dx() const { return dx_; }
    const BoxDomain& domain() const { return domain_; }
    const GllRule& rule() const { return rule_; }
    const std::vector<int>& meshes_per_dim() const { return meshes_per_dim_; }

    std::size_t point_count() const { return point_count_; }
    std::size_t mesh_count() const { return mesh_count_; }
    /// (M+1)^N
    std::size_t points_per_mesh() const { return points_per_mesh_; }

    std::span<const double> point(std::size_t id) const {
        return {coords_.data() + id * dim(), dim()};
    }
    /// Global ids of the points of a mesh, mesh-local lexicographic order
    /// (last dimension fastest).
    std::span<const std::int32_t> mesh_points(std::size_t mesh) const {
        return {mesh_to_points_.data() + mesh * points_per_mesh_, points_per_mesh_};
    }

    std::size_t mesh_flat_index(std::span<const int> multi) const;
    std::vector<int> mesh_multi_index(std::size_t mesh) const;

    /// Lower corner coordinate of mesh i along dimension k.
    double mesh_origin(std::size_t k, int i) const { return domain_.lower[k] + i * dx_; }

    /// True if x lies in Q up to dx * 1e-9 per component.
    bool contains(std::span<const double> x) const;

    /// Half-open cells [i dx, (i+1) dx) with the topmost cell closed.
    /// Throws ErrorCode::out_of_domain if x is outside Q by more than dx * 1e-9.
    std::vector<int> locate_mesh(std::span<const double> x) const;
    std::size_t locate_mesh_flat(std::span<const double> x) const;
    /// Mesh index along one axis, same convention and errors as locate_mesh.
    int locate_axis(std::size_t k, double xk) const;

private:

    BoxDomain domain_;
    std::vector<int> meshes_per_dim_;
    GllRule rule_;
    double dx_ = 0.0;
    std::size_t point_count_ = 0;
    std::size_t mesh_count_ = 0;
    std::size_t points_per_mesh_ = 0;
    std::vector<std::size_t> points_per_dim_;
    std::vector<double> coords_;
    std::vector<std::int32_t> mesh_to_points_;
};

TensorGrid build_grid(BoxDomain domain, std::vector<int> meshes_per_dim, GllRule rule);

}  // namespace hjb
