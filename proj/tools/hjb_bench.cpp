#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hjb/control_problem.hpp"
#include "hjb/error.hpp"
#include "hjb/problem_config.hpp"
#include "hjb/solver.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

struct Options {
    std::optional<int> case_id;
    std::string problem_path;
    std::string case3_branch = "printed";
    std::string case1_exterior = "exact";
    std::string case2_diffusion = "constant";
    std::string scheme = "sl";
    int order = 2;
    int nbm = 10;
    double h = 0.001;
    std::optional<double> hhat;
    int controls = 2000;
    double tol = 1e-7;
    int max_iter = 100000;
    std::string stopping = "diff";
    double q = 3.0;
    std::optional<double> lambda;
    int threads = 0;
    std::string out;
    std::vector<int> orders;
    std::vector<int> nbms;
};

const char* kHeader = "case,scheme,order,nbm,h,hhat,controls,stopping,tol,err,iterations,residual,seconds,converged";

std::string number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

hjb::SolveConfig make_config(const Options& opt, int order, int nbm) {
    static const std::map<std::string, hjb::Stopping> stopping{
        {"diff", hjb::Stopping::sup_diff}, {"analytic", hjb::Stopping::analytic}, {"residual", hjb::Stopping::residual}};
    hjb::SolveConfig config;
    config.scheme = opt.scheme == "fd" ? hjb::Scheme::finite_difference : hjb::Scheme::semi_lagrangian;
    config.order = order;
    config.meshes_per_dim = nbm;
    config.h = opt.h;
    config.hhat = opt.hhat;
    config.controls = opt.controls;
    config.stopping = stopping.at(opt.stopping);
    config.tol = opt.tol;
    config.max_iter = opt.max_iter;
    config.q = opt.q;
    config.lambda = opt.lambda;
    config.threads = opt.threads;
    return config;
}

std::string row(const Options& opt, const hjb::ControlProblem& problem, const hjb::SolveConfig& config,
                const hjb::SolveReport& report) {
    const bool fd = config.scheme == hjb::Scheme::finite_difference;
    std::string line = opt.case_id ? std::to_string(*opt.case_id) : problem.name;
    line += ',' + opt.scheme;
    line += ',' + std::to_string(config.order);
    line += ',' + std::to_string(config.meshes_per_dim);
    line += ',' + number(config.h);
    line += ',' + (fd ? number(config.hhat.value_or(config.h)) : std::string("-"));
    line += ',' + std::to_string(config.controls);
    line += ',' + opt.stopping;
    line += ',' + (opt.stopping == "analytic" ? std::string("-") : number(config.tol));
    line += ',' + (report.sup_error ? number(*report.sup_error) : std::string("-"));
    line += ',' + std::to_string(report.iterations);
    line += ',' + number(report.residual);
    line += ',' + number(report.wall_seconds);
    line += ',' + std::string(report.converged ? "true" : "false");
    return line;
}

void add_solve_options(CLI::App& app, Options& opt) {
    auto* case_opt = app.add_option("--case", opt.case_id, "Built-in benchmark problem")->check(CLI::Range(1, 4));
    auto* problem_opt =
        app.add_option("--problem", opt.problem_path, "Problem config file (key = expression lines)")
            ->check(CLI::ExistingFile);
    case_opt->excludes(problem_opt);
    app.add_option("--case3-branch", opt.case3_branch, "Second branch of case 3's source term")
        ->check(CLI::IsMember({"printed", "sin-pi-y"}));
    app.add_option("--case1-exterior", opt.case1_exterior, "Case 1 values outside the box")
        ->check(CLI::IsMember({"exact", "zero"}));
    app.add_option("--case2-diffusion", opt.case2_diffusion, "Diffusion of cases 2 and 3: sigma I or sigma a I")
        ->check(CLI::IsMember({"constant", "printed"}));
    app.add_option("--scheme", opt.scheme, "Scheme")->check(CLI::IsMember({"sl", "fd"}));
    app.add_option("--h", opt.h, "Time-like step h")->check(CLI::PositiveNumber);
    app.add_option("--hhat", opt.hhat, "First-order FD step (default h)")->check(CLI::PositiveNumber);
    app.add_option("--controls", opt.controls, "Number of uniform controls")->check(CLI::Range(2, 1 << 24));
    app.add_option("--tol", opt.tol, "Stopping tolerance")->check(CLI::PositiveNumber);
    app.add_option("--max-iter", opt.max_iter, "Maximum number of sweeps")->check(CLI::Range(1, 1 << 30));
    app.add_option("--stopping", opt.stopping, "Stopping rule")
        ->check(CLI::IsMember({"diff", "analytic", "residual"}));
    app.add_option("--q", opt.q, "Exponent of the analytic stopping rule");
    app.add_option("--lambda", opt.lambda, "Lower bound of c for the analytic rule")->check(CLI::PositiveNumber);
    app.add_option("--threads", opt.threads, "Worker threads (0: all)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", opt.out, "Also write the CSV to this file");
}

hjb::ControlProblem load(const Options& opt) {
    if (opt.case_id) {
        hjb::CaseOptions options;
        if (opt.case3_branch == "sin-pi-y") options.case3_branch = hjb::Case3Branch::sin_pi_y;
        if (opt.case1_exterior == "zero") options.case1_exterior = hjb::Case1Exterior::zero;
        if (opt.case2_diffusion == "printed") options.case2_diffusion = hjb::Case2Diffusion::as_printed;
        return hjb::test_case(*opt.case_id, options);
    }
    return hjb::load_problem_config(opt.problem_path);
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"Solve stationary HJB benchmark problems and print CSV rows"};
    app.set_help_flag("--help", "Print this help message and exit");
    add_solve_options(app, opt);
    app.add_option("--order", opt.order, "GLL interpolation order M")->check(CLI::Range(1, 32));
    app.add_option("--nbm", opt.nbm, "Meshes per direction")->check(CLI::Range(1, 1 << 16));

    auto* study = app.add_subcommand("study", "Run every (order, nbm) pair");
    study->fallthrough();
    study->add_option("--orders", opt.orders, "GLL orders")->required()->check(CLI::Range(1, 32));
    study->add_option("--nbms", opt.nbms, "Meshes per direction")->required()->check(CLI::Range(1, 1 << 16));

    try {
        app.parse(argc, argv);
        if (!opt.case_id && opt.problem_path.empty()) throw CLI::RequiredError("--case or --problem");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    std::ofstream file;
    if (!opt.out.empty()) {
        file.open(opt.out);
        if (!file) {
            std::cerr << "cannot open " << opt.out << " for writing\n";
            return kExitUsage;
        }
    }
    const auto emit = [&](const std::string& line) {
        std::cout << line << '\n' << std::flush;
        if (file.is_open()) file << line << '\n' << std::flush;
    };

    std::vector<std::pair<int, int>> runs;
    if (study->parsed()) {
        for (int order : opt.orders) {
            for (int nbm : opt.nbms) runs.emplace_back(order, nbm);
        }
    } else {
        runs.emplace_back(opt.order, opt.nbm);
    }

    try {
        const hjb::ControlProblem problem = load(opt);
        bool header = false;
        for (const auto& [order, nbm] : runs) {
            const hjb::SolveConfig config = make_config(opt, order, nbm);
            const std::string line = row(opt, problem, config, hjb::solve(problem, config));
            if (!header) emit(kHeader);
            header = true;
            emit(line);
        }
    } catch (const hjb::Error& e) {
        std::cerr << "hjb_bench: " << e.what() << '\n';
        return e.code() == hjb::ErrorCode::parse_error ? kExitUsage : kExitSolver;
    }
    return 0;
}
