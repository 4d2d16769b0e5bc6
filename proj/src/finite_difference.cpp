#include "hjb/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hjb/error.hpp"

namespace hjb {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kNegativeClamp = 1e-12;
constexpr double kOffDiagonalTolerance = 1e-13;
constexpr int kMaxJacobiSweeps = 100;

void validate(const FDParams& params) {
    if (!(params.h > 0.0) || !(params.hhat > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "finite-difference steps must be positive");
    }
    if (params.h * params.h / params.hhat > 1.0 + 1e-12) {
        throw Error(ErrorCode::stencil_condition, "finite-difference stencil needs h^2 / hhat <= 1");
    }
    if (params.controls.size() == 0) throw Error(ErrorCode::invalid_argument, "empty control grid");
}

// Writes the 1 + 4N stencil (offsets row-major, probabilities) in the
// documented order.
void fill_stencil(const EigenDecomposition& decomp, std::span<const double> b, const FDParams& params,
                  std::span<double> offsets, std::span<double> probs) {
    const std::size_t n = decomp.dim;
    const double ratio = params.h * params.h / params.hhat;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += decomp.eigenvalues[i] + std::abs(b[i]) * ratio;
    double stay = 1.0 - total;
    if (stay < -kNegativeClamp) {
        throw Error(ErrorCode::normalization_violated,
                    "transition probability p(x,x) = " + std::to_string(stay) + " is negative; normalize first");
    }
    stay = std::max(stay, 0.0);

    std::fill(offsets.begin(), offsets.end(), 0.0);
    probs[0] = stay;
    std::size_t slot = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = decomp.direction(i);
        for (std::size_t k = 0; k < n; ++k) {
            offsets[slot * n + k] = params.h * xi[k];
            offsets[(slot + 1) * n + k] = -params.h * xi[k];
        }
        probs[slot] = 0.5 * decomp.eigenvalues[i];
        probs[slot + 1] = 0.5 * decomp.eigenvalues[i];
        slot += 2;
    }
    for (std::size_t i = 0; i < n; ++i) {
        offsets[slot * n + i] = params.hhat;
        offsets[(slot + 1) * n + i] = -params.hhat;
        probs[slot] = std::max(0.0, b[i]) * ratio;
        probs[slot + 1] = std::max(0.0, -b[i]) * ratio;
        slot += 2;
    }
}

class FdStencil final : public StencilSource {
public:
    FdStencil(const ControlProblem& problem, const FDParams& params)
        : problem_(problem), params_(params), decomps_(decompose_controls(problem, params.controls)) {}

    std::size_t samples_per_control() const override { return 1 + 4 * problem_.dim; }

    void build(std::span<const double> x, std::size_t control, std::span<double> positions,
               std::span<double> coefficients, double& c, double& f) const override {
        const std::size_t n = problem_.dim;
        const double a = params_.controls.values[control];
        c = problem_.c(a, x);
        f = problem_.f(a, x);
        thread_local std::vector<double> drift;
        drift.resize(n);
        problem_.b(a, x, drift);
        fill_stencil(decomps_[control], drift, params_, positions, coefficients);
        const std::size_t samples = samples_per_control();
        for (std::size_t s = 0; s < samples; ++s) {
            for (std::size_t k = 0; k < n; ++k) positions[s * n + k] += x[k];
        }
    }

private:
    const ControlProblem& problem_;
    FDParams params_;
    std::vector<EigenDecomposition> decomps_;
};

}  // namespace

EigenDecomposition eigendecompose(std::span<const double> a, std::size_t n) {
    if (a.size() != n * n || n == 0) throw Error(ErrorCode::invalid_argument, "eigendecompose: bad matrix shape");
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            scale = std::max(scale, std::abs(a[i * n + j]));
            if (std::abs(a[i * n + j] - a[j * n + i]) > kSymmetryTolerance) {
                throw Error(ErrorCode::invalid_argument, "eigendecompose: matrix is not symmetric");
            }
        }
    }

    std::vector<double> m(a.begin(), a.end());
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    const double tol = kOffDiagonalTolerance * std::max(1.0, scale);
    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(m[p * n + q]));
        }
        if (off <= tol) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m[p * n + q];
                if (std::abs(apq) <= tol) continue;
                const double theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cs = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * cs;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m[k * n + p];
                    const double mkq = m[k * n + q];
                    m[k * n + p] = cs * mkp - sn * mkq;
                    m[k * n + q] = sn * mkp + cs * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m[p * n + k];
                    const double mqk = m[q * n + k];
                    m[p * n + k] = cs * mpk - sn * mqk;
                    m[q * n + k] = sn * mpk + cs * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = cs * vkp - sn * vkq;
                    v[k * n + q] = sn * vkp + cs * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return m[i * n + i] > m[j * n + j]; });

    EigenDecomposition out;
    out.dim = n;
    out.eigenvalues.resize(n);
    out.directions.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t col = order[i];
        double d = m[col * n + col];
        if (d < -kNegativeClamp) {
            throw Error(ErrorCode::not_positive_semidefinite,
                        "diffusion matrix has negative eigenvalue " + std::to_string(d));
        }
        out.eigenvalues[i] = std::max(d, 0.0);
        double sign = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(v[k * n + col]) > 1e-12) {
                sign = v[k * n + col] > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
        for (std::size_t k = 0; k < n; ++k) out.directions[i * n + k] = sign * v[k * n + col];
    }
    return out;
}

std::vector<EigenDecomposition> decompose_controls(const ControlProblem& problem, const ControlGrid& controls) {
    const std::size_t n = problem.dim;
    std::size_t lattice = 1;
    for (std::size_t k = 0; k < n; ++k) lattice *= 3;

    std::vector<EigenDecomposition> out;
    out.reserve(controls.size());
    std::vector<double> x(n);
    for (double a : controls.values) {
        std::vector<double> reference;
        for (std::size_t id = 0; id < lattice; ++id) {
            std::size_t rest = id;
            for (std::size_t k = 0; k < n; ++k) {
                const double lo = problem.domain.lower[k];
                const double hi = problem.domain.upper[k];
                x[k] = lo + 0.5 * static_cast<double>(rest % 3) * (hi - lo);
                rest /= 3;
            }
            std::vector<double> diffusion = diffusion_matrix(problem, a, x);
            if (reference.empty()) {
                reference = std::move(diffusion);
                continue;
            }
            for (std::size_t e = 0; e < diffusion.size(); ++e) {
                if (std::abs(diffusion[e] - reference[e]) > 1e-12) {
                    throw Error(ErrorCode::x_dependent_diffusion,
                                problem.name + ": the finite-difference scheme needs a diffusion matrix "
                                               "independent of x, but a^a(x) varies at control " +
                                    std::to_string(a));
                }
            }
        }
        out.push_back(eigendecompose(reference, n));
    }
    return out;
}

NormalizedProblem normalize_problem(const ControlProblem& problem, const ControlGrid& controls) {
    const std::size_t n = problem.dim;
    const std::vector<EigenDecomposition> decomps = decompose_controls(problem, controls);

    constexpr int per_axis = 21;
    std::size_t lattice = 1;
    for (std::size_t k = 0; k < n; ++k) lattice *= per_axis;

    const auto bound = [&](const ControlProblem& p, const std::vector<EigenDecomposition>& ds) {
        double sup = 0.0;
        std::vector<double> x(n);
        std::vector<double> drift(n);
        for (std::size_t j = 0; j < controls.size(); ++j) {
            const double trace = std::accumulate(ds[j].eigenvalues.begin(), ds[j].eigenvalues.end(), 0.0);
            for (std::size_t id = 0; id < lattice; ++id) {
                std::size_t rest = id;
                for (std::size_t k = 0; k < n; ++k) {
                    const double lo = p.domain.lower[k];
                    const double hi = p.domain.upper[k];
                    const auto i = static_cast<int>(rest % per_axis);
                    x[k] = i == per_axis - 1 ? hi : lo + (hi - lo) * i / (per_axis - 1);
                    rest /= per_axis;
                }
                p.b(controls.values[j], x, drift);
                double total = trace;
                for (double bi : drift) total += std::abs(bi);
                sup = std::max(sup, total);
            }
        }
        return sup;
    };

    const double kappa = std::max(1.0, bound(problem, decomps));
    NormalizedProblem out{problem, kappa};
    if (kappa == 1.0) return out;

    ControlProblem& scaled = out.problem;
    const double root = std::sqrt(kappa);
    scaled.sigma = [inner = problem.sigma, root](double a, std::span<const double> x, std::span<double> o) {
        inner(a, x, o);
        for (double& v : o) v /= root;
    };
    scaled.b = [inner = problem.b, kappa](double a, std::span<const double> x, std::span<double> o) {
        inner(a, x, o);
        for (double& v : o) v /= kappa;
    };
    scaled.c = [inner = problem.c, kappa](double a, std::span<const double> x) { return inner(a, x) / kappa; };
    scaled.f = [inner = problem.f, kappa](double a, std::span<const double> x) { return inner(a, x) / kappa; };
    scaled.lambda = problem.lambda / kappa;

    const double check = bound(scaled, decompose_controls(scaled, controls));
    if (check > 1.0 + 1e-12) {
        throw Error(ErrorCode::normalization_violated,
                    "normalization failed: scaled bound " + std::to_string(check) + " exceeds 1");
    }
    return out;
}

StencilProbabilities transition_probs(const EigenDecomposition& decomp, std::span<const double> b,
                                      const FDParams& params) {
    if (!(params.h > 0.0) || !(params.hhat > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "finite-difference steps must be positive");
    }
    if (params.h * params.h / params.hhat > 1.0 + 1e-12) {
        throw Error(ErrorCode::stencil_condition, "finite-difference stencil needs h^2 / hhat <= 1");
    }
    const std::size_t n = decomp.dim;
    const std::size_t count = 1 + 4 * n;
    std::vector<double> offsets(count * n);
    std::vector<double> probs(count);
    fill_stencil(decomp, b, params, offsets, probs);

    StencilProbabilities out;
    out.entries.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        out.entries.push_back({std::vector<double>(offsets.begin() + s * n, offsets.begin() + (s + 1) * n), probs[s]});
    }
    return out;
}

double s_hat_fd(const ControlProblem& problem, std::span<const double> y, double t, const Field& phi,
                const FDParams& params) {
    validate(params);
    const std::vector<EigenDecomposition> decomps = decompose_controls(problem, params.controls);
    const std::size_t n = problem.dim;
    const double h2 = params.h * params.h;
    std::vector<double> drift(n);
    std::vector<double> point(n);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < params.controls.size(); ++j) {
        const double a = params.controls.values[j];
        problem.b(a, y, drift);
        const StencilProbabilities stencil = transition_probs(decomps[j], drift, params);
        double sum = 0.0;
        for (const auto& entry : stencil.entries) {
            for (std::size_t k = 0; k < n; ++k) point[k] = y[k] + entry.offset[k];
            sum += entry.p * phi(point);
        }
        best = std::max(best, -(sum - t) / h2 + problem.c(a, y) * t - problem.f(a, y));
    }
    return best;
}

std::unique_ptr<StencilSource> make_fd_stencil(const ControlProblem& problem, const FDParams& params) {
    validate(params);
    return std::make_unique<FdStencil>(problem, params);
}

SweepEngine make_fd_engine(const ControlProblem& problem, std::shared_ptr<const TensorGrid> grid,
                           const FDParams& params, EngineOptions options) {
    return SweepEngine(problem, std::move(grid), params.controls.size(), make_fd_stencil(problem, params),
                       SchemeKind::finite_difference, params.h, options);
}

GridFunction t_sweep_fd(const ControlProblem& problem, const FDParams& params, const GridFunction& u) {
    const SweepEngine engine = make_fd_engine(problem, u.grid_ptr(), params);
    GridFunction out(u.grid_ptr());
    engine.sweep(u.values(), out.values());
    return out;
}

double residual_fd(const ControlProblem& problem, const FDParams& params, const GridFunction& u) {
    return make_fd_engine(problem, u.grid_ptr(), params).residual(u.values());
}

int analytic_iterations_fd(double q, double h, double lambda) {
    if (!(h > 0.0 && h < 1.0) || !(q > 2.0) || !(lambda > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "analytic iteration count needs 0 < h < 1, q > 2, lambda > 0");
    }
    const double k = std::ceil(-(q - 2.0) * std::log(h) / std::log(1.0 + lambda * h * h));
    return std::max(1, static_cast<int>(k));
}

}  // namespace hjb
