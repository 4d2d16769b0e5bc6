#include "hjb/interpolation.hpp"

#include <cmath>

#include "hjb/error.hpp"

namespace hjb {

namespace {
constexpr double kNodeSnap = 1e-13;
}

GridFunction::GridFunction(std::shared_ptr<const TensorGrid> grid)
    : grid_(std::move(grid)), values_(grid_->point_count(), 0.0) {}

GridFunction::GridFunction(std::shared_ptr<const TensorGrid> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->point_count()) {
        throw Error(ErrorCode::invalid_argument, "grid function size does not match the grid");
    }
}

void lagrange_basis(const GllRule& rule, double xi, std::span<double> out) {
    const std::size_t count = rule.nodes.size();
    for (std::size_t j = 0; j < count; ++j) {
        if (std::abs(xi - rule.nodes[j]) <= kNodeSnap) {
            for (std::size_t k = 0; k < count; ++k) out[k] = (k == j) ? 1.0 : 0.0;
            return;
        }
    }
    double total = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        out[j] = rule.barycentric[j] / (xi - rule.nodes[j]);
        total += out[j];
    }
    for (std::size_t j = 0; j < count; ++j) out[j] /= total;
}

namespace {

void axis_weights(const TensorGrid& grid, std::size_t k, int mesh, double xk, std::span<double> out) {
    const double xi = 2.0 * (xk - grid.mesh_origin(k, mesh)) / grid.dx() - 1.0;
    lagrange_basis(grid.rule(), xi, out);
}

}  // namespace

void axis_weights_in_mesh(const TensorGrid& grid, std::span<const int> mesh, std::span<const double> x,
                          std::span<double> out) {
    const std::size_t m1 = grid.rule().nodes.size();
    for (std::size_t k = 0; k < grid.dim(); ++k) {
        axis_weights(grid, k, mesh[k], x[k], out.subspan(k * m1, m1));
    }
}

std::size_t locate_with_weights(const TensorGrid& grid, std::span<const double> x, std::span<double> out) {
    if (x.size() != grid.dim()) throw Error(ErrorCode::invalid_argument, "locate: dimension mismatch");
    const std::size_t m1 = grid.rule().nodes.size();
    std::size_t flat = 0;
    for (std::size_t k = 0; k < grid.dim(); ++k) {
        const int i = grid.locate_axis(k, x[k]);
        axis_weights(grid, k, i, x[k], out.subspan(k * m1, m1));
        flat = flat * static_cast<std::size_t>(grid.meshes_per_dim()[k]) + static_cast<std::size_t>(i);
    }
    return flat;
}

MeshContraction contract_mesh(const TensorGrid& grid, std::size_t mesh, std::span<const double> axis_weights,
                              std::span<const double> values, std::span<double> scratch) {
    const auto points = grid.mesh_points(mesh);
    const std::size_t m1 = grid.rule().nodes.size();

    double lo = values[points[0]];
    double hi = lo;
    for (std::size_t j = 0; j < points.size(); ++j) {
        const double v = values[points[j]];
        scratch[j] = v;
        lo = v < lo ? v : lo;
        hi = v > hi ? v : hi;
    }

    std::size_t len = points.size();
    for (std::size_t d = grid.dim(); d-- > 0;) {
        const double* w = axis_weights.data() + d * m1;
        const std::size_t outer = len / m1;
        for (std::size_t o = 0; o < outer; ++o) {
            const double* row = scratch.data() + o * m1;
            double s = 0.0;
            for (std::size_t j = 0; j < m1; ++j) s += w[j] * row[j];
            scratch[o] = s;
        }
        len = outer;
    }
    return {scratch[0], lo, hi};
}

namespace {

MeshContraction evaluate(const GridFunction& u, std::span<const double> x) {
    const TensorGrid& grid = u.grid();
    if (x.size() != grid.dim()) throw Error(ErrorCode::invalid_argument, "interpolation: dimension mismatch");
    std::vector<double> weights(grid.dim() * grid.rule().nodes.size());
    std::vector<double> scratch(grid.points_per_mesh());
    const std::size_t mesh = locate_with_weights(grid, x, weights);
    return contract_mesh(grid, mesh, weights, u.values(), scratch);
}

}  // namespace

double interpolate_raw(const GridFunction& u, std::span<const double> x) { return evaluate(u, x).raw; }

double interpolate_truncated(const GridFunction& u, std::span<const double> x) {
    return evaluate(u, x).truncated();
}

MeshContraction interpolate_in_mesh(const GridFunction& u, std::span<const int> mesh, std::span<const double> x) {
    const TensorGrid& grid = u.grid();
    std::vector<double> weights(grid.dim() * grid.rule().nodes.size());
    std::vector<double> scratch(grid.points_per_mesh());
    axis_weights_in_mesh(grid, mesh, x, weights);
    return contract_mesh(grid, grid.mesh_flat_index(mesh), weights, u.values(), scratch);
}

std::vector<InterpolationWeight> interpolation_weights(const GridFunction& u, std::span<const double> x) {
    const TensorGrid& grid = u.grid();
    const std::vector<int> mesh = grid.locate_mesh(x);
    const std::size_t flat = grid.mesh_flat_index(mesh);
    const MeshContraction c = interpolate_in_mesh(u, mesh, x);
    const double value = c.truncated();

    const auto points = grid.mesh_points(flat);
    std::int32_t argmin = points[0];
    std::int32_t argmax = points[0];
    for (std::int32_t p : points) {
        const double v = u[static_cast<std::size_t>(p)];
        const double vmin = u[static_cast<std::size_t>(argmin)];
        const double vmax = u[static_cast<std::size_t>(argmax)];
        if (v < vmin || (v == vmin && p < argmin)) argmin = p;
        if (v > vmax || (v == vmax && p < argmax)) argmax = p;
    }

    double w_lo = 0.0;
    double w_hi = 0.0;
    if (c.hi == c.lo) {
        w_lo = 1.0;
    } else if (c.raw < c.lo) {
        w_lo = 1.0;
    } else if (c.raw > c.hi) {
        w_hi = 1.0;
    } else {
        w_lo = (value - c.hi) / (c.lo - c.hi);
        w_hi = 1.0 - w_lo;
    }

    std::vector<InterpolationWeight> out;
    out.reserve(points.size());
    for (std::int32_t p : points) {
        double w = 0.0;
        if (p == argmin) w += w_lo;
        if (p == argmax) w += w_hi;
        out.push_back({p, w});
    }
    return out;
}

}  // namespace hjb
