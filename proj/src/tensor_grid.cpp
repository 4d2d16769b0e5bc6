#include "hjb/tensor_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hjb/error.hpp"

namespace hjb {

namespace {
constexpr double kAxisTolerance = 1e-9;
constexpr double kIsotropyTolerance = 1e-12;
}  // namespace

void BoxDomain::validate() const {
    if (lower.empty() || lower.size() != upper.size()) {
        throw Error(ErrorCode::invalid_domain, "box domain needs matching, non-empty bounds");
    }
    for (std::size_t k = 0; k < lower.size(); ++k) {
        if (!(lower[k] < upper[k])) {
            throw Error(ErrorCode::invalid_domain,
                        "box domain: lower >= upper along dimension " + std::to_string(k));
        }
    }
}

TensorGrid::TensorGrid(BoxDomain domain, std::vector<int> meshes_per_dim, GllRule rule)
    : domain_(std::move(domain)), meshes_per_dim_(std::move(meshes_per_dim)), rule_(std::move(rule)) {
    domain_.validate();
    const std::size_t n = domain_.dim();
    if (meshes_per_dim_.size() != n) {
        throw Error(ErrorCode::invalid_argument, "meshes_per_dim size does not match the domain");
    }
    for (int m : meshes_per_dim_) {
        if (m <= 0) throw Error(ErrorCode::invalid_argument, "mesh count must be positive");
    }
    if (rule_.order < 1) throw Error(ErrorCode::invalid_order, "grid needs a GLL rule");

    dx_ = (domain_.upper[0] - domain_.lower[0]) / meshes_per_dim_[0];
    for (std::size_t k = 1; k < n; ++k) {
        const double dxk = (domain_.upper[k] - domain_.lower[k]) / meshes_per_dim_[k];
        if (std::abs(dxk - dx_) > kIsotropyTolerance * dx_) {
            throw Error(ErrorCode::invalid_domain, "mesh spacing differs across dimensions");
        }
    }

    const int order = rule_.order;
    const std::size_t per_mesh_axis = static_cast<std::size_t>(order) + 1;

    points_per_dim_.resize(n);
    point_count_ = 1;
    mesh_count_ = 1;
    points_per_mesh_ = 1;
    for (std::size_t k = 0; k < n; ++k) {
        points_per_dim_[k] = static_cast<std::size_t>(meshes_per_dim_[k]) * order + 1;
        point_count_ *= points_per_dim_[k];
        mesh_count_ *= static_cast<std::size_t>(meshes_per_dim_[k]);
        points_per_mesh_ *= per_mesh_axis;
    }
    if (point_count_ > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
        throw Error(ErrorCode::invalid_argument, "grid too large");
    }

    // Per-axis coordinates; the shared endpoint belongs to the lower mesh's
    // interior index range, so every global index has exactly one formula.
    std::vector<std::vector<double>> axis(n);
    for (std::size_t k = 0; k < n; ++k) {
        axis[k].resize(points_per_dim_[k]);
        for (std::size_t g = 0; g < points_per_dim_[k]; ++g) {
            int mesh = static_cast<int>(g / order);
            int local = static_cast<int>(g % order);
            if (mesh == meshes_per_dim_[k]) {
                mesh -= 1;
                local = order;
            }
            axis[k][g] = domain_.lower[k] + dx_ * (mesh + 0.5 * (1.0 + rule_.nodes[local]));
        }
    }

    coords_.resize(point_count_ * n);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t id = 0; id < point_count_; ++id) {
        for (std::size_t k = 0; k < n; ++k) coords_[id * n + k] = axis[k][idx[k]];
        for (std::size_t k = n; k-- > 0;) {
            if (++idx[k] < points_per_dim_[k]) break;
            idx[k] = 0;
        }
    }

    mesh_to_points_.resize(mesh_count_ * points_per_mesh_);
    std::vector<std::size_t> local(n, 0);
    for (std::size_t mesh = 0; mesh < mesh_count_; ++mesh) {
        const std::vector<int> multi = mesh_multi_index(mesh);
        std::fill(local.begin(), local.end(), 0);
        for (std::size_t j = 0; j < points_per_mesh_; ++j) {
            std::size_t id = 0;
            for (std::size_t k = 0; k < n; ++k) {
                id = id * points_per_dim_[k] + static_cast<std::size_t>(multi[k]) * order + local[k];
            }
            mesh_to_points_[mesh * points_per_mesh_ + j] = static_cast<std::int32_t>(id);
            for (std::size_t k = n; k-- > 0;) {
                if (++local[k] < per_mesh_axis) break;
                local[k] = 0;
            }
        }
    }
}

std::size_t TensorGrid::mesh_flat_index(std::span<const int> multi) const {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < dim(); ++k) {
        flat = flat * static_cast<std::size_t>(meshes_per_dim_[k]) + static_cast<std::size_t>(multi[k]);
    }
    return flat;
}

std::vector<int> TensorGrid::mesh_multi_index(std::size_t mesh) const {
    std::vector<int> multi(dim());
    for (std::size_t k = dim(); k-- > 0;) {
        const auto m = static_cast<std::size_t>(meshes_per_dim_[k]);
        multi[k] = static_cast<int>(mesh % m);
        mesh /= m;
    }
    return multi;
}

bool TensorGrid::contains(std::span<const double> x) const {
    const double tol = dx_ * kAxisTolerance;
    for (std::size_t k = 0; k < dim(); ++k) {
        if (x[k] < domain_.lower[k] - tol || x[k] > domain_.upper[k] + tol) return false;
    }
    return true;
}

int TensorGrid::locate_axis(std::size_t k, double xk) const {
    const double tol = dx_ * kAxisTolerance;
    if (xk < domain_.lower[k] - tol || xk > domain_.upper[k] + tol) {
        throw Error(ErrorCode::out_of_domain,
                    "point outside the domain along dimension " + std::to_string(k));
    }
    const int i = static_cast<int>(std::floor((xk - domain_.lower[k]) / dx_));
    return std::clamp(i, 0, meshes_per_dim_[k] - 1);
}

std::vector<int> TensorGrid::locate_mesh(std::span<const double> x) const {
    if (x.size() != dim()) throw Error(ErrorCode::invalid_argument, "locate_mesh: dimension mismatch");
    std::vector<int> multi(dim());
    for (std::size_t k = 0; k < dim(); ++k) multi[k] = locate_axis(k, x[k]);
    return multi;
}

std::size_t TensorGrid::locate_mesh_flat(std::span<const double> x) const {
    if (x.size() != dim()) throw Error(ErrorCode::invalid_argument, "locate_mesh: dimension mismatch");
    std::size_t flat = 0;
    for (std::size_t k = 0; k < dim(); ++k) {
        flat = flat * static_cast<std::size_t>(meshes_per_dim_[k]) +
               static_cast<std::size_t>(locate_axis(k, x[k]));
    }
    return flat;
}

TensorGrid build_grid(BoxDomain domain, std::vector<int> meshes_per_dim, GllRule rule) {
    return TensorGrid(std::move(domain), std::move(meshes_per_dim), std::move(rule));
}

}  // namespace hjb
