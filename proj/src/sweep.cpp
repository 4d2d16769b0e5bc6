#include "hjb/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>

#include <omp.h>

#include "hjb/error.hpp"

namespace hjb {

int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t, std::size_t)>& body) {
    const int nthreads = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(count, 1))));
    if (nthreads == 1) {
        body(0, count);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel num_threads(nthreads)
    {
        const auto tid = static_cast<std::size_t>(omp_get_thread_num());
        const auto team = static_cast<std::size_t>(omp_get_num_threads());
        const std::size_t begin = count * tid / team;
        const std::size_t end = count * (tid + 1) / team;
        try {
            body(begin, end);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

Field extended_field(const ControlProblem& problem, const GridFunction& u) {
    return [&problem, &u](std::span<const double> x) {
        if (u.grid().contains(x)) return interpolate_truncated(u, x);
        return problem.dirichlet(x);
    };
}

namespace {

// Compiled samples of one (point, control) pair, stored structure-of-arrays.
// mesh < 0 marks a sample outside the box whose value sits in weights[0].
struct SampleBlock {
    std::vector<std::int32_t> mesh;
    std::vector<double> coefficient;
    std::vector<double> weights;
};

}  // namespace

struct SweepEngine::Impl {
    const ControlProblem* problem;
    std::shared_ptr<const TensorGrid> grid;
    std::size_t controls;
    std::unique_ptr<StencilSource> source;
    SchemeKind kind;
    double h;
    int threads;

    std::size_t samples;       // per (point, control)
    std::size_t weight_width;  // N (M+1)
    double sample_divisor;     // 2P for semi-Lagrangian

    bool is_cached = false;
    std::vector<double> c_cache;
    std::vector<double> f_cache;
    SampleBlock cache;

    struct Workspace {
        std::vector<double> positions;
        std::vector<double> coefficients;
        std::vector<double> scratch;
        SampleBlock block;
    };

    Workspace make_workspace() const {
        Workspace ws;
        ws.positions.resize(samples * grid->dim());
        ws.coefficients.resize(samples);
        ws.scratch.resize(grid->points_per_mesh());
        ws.block.mesh.resize(samples);
        ws.block.coefficient.resize(samples);
        ws.block.weights.resize(samples * weight_width);
        return ws;
    }

    // Compiles the stencil of (point, control) into the given slots.
    void compile(std::size_t point, std::size_t control, Workspace& ws, std::int32_t* mesh, double* coefficient,
                 double* weights, double& c, double& f) const {
        const std::size_t n = grid->dim();
        source->build(grid->point(point), control, ws.positions, ws.coefficients, c, f);
        for (std::size_t s = 0; s < samples; ++s) {
            const std::span<const double> x(ws.positions.data() + s * n, n);
            std::span<double> w(weights + s * weight_width, weight_width);
            coefficient[s] = ws.coefficients[s];
            if (grid->contains(x)) {
                mesh[s] = static_cast<std::int32_t>(locate_with_weights(*grid, x, w));
            } else {
                mesh[s] = -1;
                std::fill(w.begin(), w.end(), 0.0);
                w[0] = problem->dirichlet(x);
            }
        }
    }

    // Weighted sample sum S for one (point, control).
    double sample_sum(std::span<const double> values, const std::int32_t* mesh, const double* coefficient,
                      const double* weights, std::span<double> scratch) const {
        double sum = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            const double* w = weights + s * weight_width;
            double v;
            if (mesh[s] < 0) {
                v = w[0];
            } else {
                v = contract_mesh(*grid, static_cast<std::size_t>(mesh[s]), {w, weight_width}, values, scratch)
                        .truncated();
            }
            sum += coefficient[s] * v;
        }
        return sum;
    }

    double t_value(double sum, double c, double f) const {
        if (kind == SchemeKind::semi_lagrangian) return (1.0 - h * c) * (sum / sample_divisor) + h * f;
        const double h2 = h * h;
        return (sum + h2 * f) / (1.0 + h2 * c);
    }

    double s_hat_value(double sum, double t, double c, double f) const {
        if (kind == SchemeKind::semi_lagrangian) {
            const double g = (1.0 - h * c) * (sum / sample_divisor);
            return -(g - t) / h + c * t - f;
        }
        return -(sum - t) / (h * h) + c * t - f;
    }

    // Visits every control of a point with (S, c, f).
    template <typename Visit>
    void for_each_control(std::size_t point, std::span<const double> values, Workspace& ws, Visit&& visit) const {
        for (std::size_t k = 0; k < controls; ++k) {
            double c;
            double f;
            double sum;
            if (is_cached) {
                const std::size_t entry = point * controls + k;
                c = c_cache[entry];
                f = f_cache[entry];
                const std::size_t first = entry * samples;
                sum = sample_sum(values, cache.mesh.data() + first, cache.coefficient.data() + first,
                                 cache.weights.data() + first * weight_width, ws.scratch);
            } else {
                compile(point, k, ws, ws.block.mesh.data(), ws.block.coefficient.data(), ws.block.weights.data(), c,
                        f);
                sum = sample_sum(values, ws.block.mesh.data(), ws.block.coefficient.data(),
                                 ws.block.weights.data(), ws.scratch);
            }
            visit(sum, c, f);
        }
    }
};

SweepEngine::SweepEngine(const ControlProblem& problem, std::shared_ptr<const TensorGrid> grid,
                         std::size_t control_count, std::unique_ptr<StencilSource> source, SchemeKind kind, double h,
                         EngineOptions options)
    : impl_(std::make_unique<Impl>()) {
    if (!grid || !source) throw Error(ErrorCode::invalid_argument, "sweep engine needs a grid and a stencil source");
    if (grid->dim() != problem.dim) throw Error(ErrorCode::invalid_argument, "grid and problem dimensions differ");
    if (control_count == 0) throw Error(ErrorCode::invalid_argument, "sweep engine needs controls");
    if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "step h must be positive");

    Impl& im = *impl_;
    im.problem = &problem;
    im.grid = std::move(grid);
    im.controls = control_count;
    im.source = std::move(source);
    im.kind = kind;
    im.h = h;
    im.threads = resolve_threads(options.threads);
    im.samples = im.source->samples_per_control();
    im.weight_width = im.grid->dim() * im.grid->rule().nodes.size();
    im.sample_divisor = static_cast<double>(im.samples);

    const std::size_t entries = im.grid->point_count() * im.controls;
    const std::size_t bytes_per_entry =
        2 * sizeof(double) + im.samples * (sizeof(std::int32_t) + sizeof(double) * (1 + im.weight_width));
    if (entries * bytes_per_entry > options.memory_budget) {
        // Still validate every stencil once so scheme errors surface here.
        parallel_for(im.grid->point_count(), im.threads, [&](std::size_t begin, std::size_t end) {
            Impl::Workspace ws = im.make_workspace();
            for (std::size_t p = begin; p < end; ++p) {
                for (std::size_t k = 0; k < im.controls; ++k) {
                    double c;
                    double f;
                    im.compile(p, k, ws, ws.block.mesh.data(), ws.block.coefficient.data(),
                               ws.block.weights.data(), c, f);
                }
            }
        });
        return;
    }

    im.c_cache.resize(entries);
    im.f_cache.resize(entries);
    im.cache.mesh.resize(entries * im.samples);
    im.cache.coefficient.resize(entries * im.samples);
    im.cache.weights.resize(entries * im.samples * im.weight_width);
    parallel_for(im.grid->point_count(), im.threads, [&](std::size_t begin, std::size_t end) {
        Impl::Workspace ws = im.make_workspace();
        for (std::size_t p = begin; p < end; ++p) {
            for (std::size_t k = 0; k < im.controls; ++k) {
                const std::size_t entry = p * im.controls + k;
                const std::size_t first = entry * im.samples;
                im.compile(p, k, ws, im.cache.mesh.data() + first, im.cache.coefficient.data() + first,
                           im.cache.weights.data() + first * im.weight_width, im.c_cache[entry], im.f_cache[entry]);
            }
        }
    });
    im.is_cached = true;
}

SweepEngine::~SweepEngine() = default;
SweepEngine::SweepEngine(SweepEngine&&) noexcept = default;
SweepEngine& SweepEngine::operator=(SweepEngine&&) noexcept = default;

void SweepEngine::sweep(std::span<const double> in, std::span<double> out) const {
    const Impl& im = *impl_;
    if (in.size() != im.grid->point_count() || out.size() != in.size()) {
        throw Error(ErrorCode::invalid_argument, "sweep: buffer size does not match the grid");
    }
    parallel_for(im.grid->point_count(), im.threads, [&](std::size_t begin, std::size_t end) {
        Impl::Workspace ws = im.make_workspace();
        for (std::size_t p = begin; p < end; ++p) {
            double best = std::numeric_limits<double>::infinity();
            im.for_each_control(p, in, ws, [&](double sum, double c, double f) {
                const double candidate = im.t_value(sum, c, f);
                if (candidate < best) best = candidate;
            });
            out[p] = best;
        }
    });
}

double SweepEngine::residual(std::span<const double> u) const {
    const Impl& im = *impl_;
    if (u.size() != im.grid->point_count()) throw Error(ErrorCode::invalid_argument, "residual: size mismatch");
    std::vector<double> per_point(u.size());
    parallel_for(u.size(), im.threads, [&](std::size_t begin, std::size_t end) {
        Impl::Workspace ws = im.make_workspace();
        for (std::size_t p = begin; p < end; ++p) {
            double best = -std::numeric_limits<double>::infinity();
            im.for_each_control(p, u, ws, [&](double sum, double c, double f) {
                const double s = im.s_hat_value(sum, u[p], c, f);
                if (s > best) best = s;
            });
            per_point[p] = std::abs(best);
        }
    });
    return *std::max_element(per_point.begin(), per_point.end());
}

bool SweepEngine::cached() const { return impl_->is_cached; }
const TensorGrid& SweepEngine::grid() const { return *impl_->grid; }
int SweepEngine::threads() const { return impl_->threads; }

}  // namespace hjb
