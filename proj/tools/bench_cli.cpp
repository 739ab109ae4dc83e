#include "qgm/bench.hpp"
#include "qgm/problem.hpp"
#include "qgm/rng.hpp"
#include "qgm/solver.hpp"
#include "qgm/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

int report_failures(const qgm::ResultTable& table, bool allow_failures) {
    long degenerate = 0, maxed = 0;
    for (const auto& row : table.rows)
        for (qgm::RunStatus status : row.statuses) {
            if (status == qgm::RunStatus::Degenerate) ++degenerate;
            if (status == qgm::RunStatus::MaxIter) ++maxed;
        }
    if (maxed > 0) std::cerr << "warning: " << maxed << " runs hit the iteration cap\n";
    if (degenerate > 0) {
        std::cerr << "error: " << degenerate << " degenerate runs\n";
        if (!allow_failures) return 1;
    }
    return 0;
}

int emit_tables(const qgm::ResultTable& table, const std::string& csv_path,
                const std::string& md_path, bool allow_failures) {
    std::ostringstream csv;
    qgm::emit_csv(table, csv);
    write_file(csv_path, csv.str());
    std::ostringstream md;
    qgm::emit_markdown(table, md);
    write_file(md_path, md.str());
    std::cout << md.str();
    return report_failures(table, allow_failures);
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-method benchmark harness for strictly convex quadratics"};
    app.require_subcommand(1);

    // bench run
    auto* run = app.add_subcommand("run", "Run a benchmark plan and emit CSV + markdown tables");
    std::string plan_path, run_csv = "results.csv", run_md = "results.md";
    int jobs = 1;
    bool run_allow = false;
    run->add_option("--plan", plan_path, "JSON plan file")->required();
    run->add_option("--out", run_csv, "CSV output path");
    run->add_option("--md", run_md, "Markdown output path");
    run->add_option("--jobs", jobs, "Parallel cells (1 pins timing runs to one thread)");
    run->add_flag("--allow-failures", run_allow, "Exit 0 even if runs end degenerate");

    // bench trace
    auto* trace_cmd = app.add_subcommand(
        "trace", "Emit a per-iteration series for one method on a fresh spectrum");
    std::string trace_method = "dai_yang", trace_quantity = "alpha_tilde_dev",
                trace_out = "trace.csv";
    int trace_n = 1000, trace_family = 1;
    long trace_iters = 100;
    double trace_kappa = 0.0;  // 0 = condition number n
    std::uint64_t trace_seed = 0;
    bool trace_allow = false;
    trace_cmd->add_option("--method", trace_method, "sd|mg|bb1|bb2|dai_yang|dy|psi|ac|ac_beta|ac_gamma");
    trace_cmd->add_option("--quantity", trace_quantity, "alpha_tilde_dev|alpha_dev|gnorm");
    trace_cmd->add_option("--out", trace_out, "CSV output path")->required();
    trace_cmd->add_option("--n", trace_n, "Problem dimension");
    trace_cmd->add_option("--iters", trace_iters, "Iteration count");
    trace_cmd->add_option("--family", trace_family, "Spectrum family 1-5");
    trace_cmd->add_option("--kappa", trace_kappa, "Condition number (default: n)");
    trace_cmd->add_option("--seed", trace_seed, "Spectrum seed");
    trace_cmd->add_flag("--allow-failures", trace_allow, "Exit 0 even if the run degenerates");

    // bench mm
    auto* mm = app.add_subcommand("mm", "Benchmark methods on a Matrix Market problem");
    std::string mm_matrix, mm_methods = "ac,bb1", mm_csv = "mm.csv", mm_md = "mm.md";
    double mm_epsilon = 1e-6, mm_tau = 0.1;
    int mm_runs = 10, mm_r = 5, mm_jobs = 1;
    std::uint64_t mm_seed = 0;
    bool mm_allow = false, mm_symmetrize = false;
    mm->add_option("--matrix", mm_matrix, "Matrix Market file (.mtx)")->required();
    mm->add_option("--methods", mm_methods, "Comma-separated method list");
    mm->add_option("--epsilon", mm_epsilon, "Relative gradient-norm stopping tolerance");
    mm->add_option("--runs", mm_runs, "Random starts per method");
    mm->add_option("--tau", mm_tau, "Adaptive ratio threshold");
    mm->add_option("--r", mm_r, "Short-step reuse cycle length");
    mm->add_option("--seed", mm_seed, "Base seed");
    mm->add_option("--jobs", mm_jobs, "Parallel cells");
    mm->add_option("--out", mm_csv, "CSV output path");
    mm->add_option("--md", mm_md, "Markdown output path");
    mm->add_flag("--symmetrize", mm_symmetrize, "Accept a general header as (A + A')/2");
    mm->add_flag("--allow-failures", mm_allow, "Exit 0 even if runs end degenerate");

    // bench verify
    auto* verify_cmd = app.add_subcommand("verify", "Run the canned verification suite");
    std::uint64_t verify_seed = 2026;
    verify_cmd->add_option("--seed", verify_seed, "Suite seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const qgm::ExperimentPlan plan = qgm::load_plan(plan_path);
            const qgm::ResultTable table = qgm::run_plan(plan, jobs);
            return emit_tables(table, run_csv, run_md, run_allow);
        }

        if (*trace_cmd) {
            qgm::SpectrumSpec spec;
            spec.family = trace_family;
            spec.kappa = trace_kappa > 0.0 ? trace_kappa : static_cast<double>(trace_n);
            spec.dim = trace_n;
            spec.seed = qgm::derive_seed(trace_seed, {4});
            const qgm::QuadraticProblem problem = qgm::generate_spectrum(spec);
            const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(trace_n);

            const qgm::MethodSpec method = qgm::parse_method(trace_method);
            const qgm::TraceQuantity quantity = qgm::parse_trace_quantity(trace_quantity);
            qgm::SolverConfig config;
            config.epsilon = 0.0;
            config.max_iter = trace_iters;
            config.record_alpha_tilde = quantity == qgm::TraceQuantity::AlphaTildeDev;
            const qgm::IterationTrace trace =
                method.fixed ? qgm::run_fixed_rule(problem, x0, *method.fixed, config)
                             : [&] {
                                   qgm::SolverConfig adaptive = config;
                                   adaptive.short_step = *method.short_step;
                                   return qgm::run_adaptive_cyclic(problem, x0, adaptive);
                               }();

            const auto extremes = problem.known_extremes();
            std::ostringstream out;
            qgm::emit_trace_series(trace, quantity, extremes->first, extremes->second, out);
            write_file(trace_out, out.str());
            std::cout << "wrote " << trace_out << " (" << trace.iterations << " iterations)\n";
            if (trace.status == qgm::RunStatus::Degenerate) {
                std::cerr << "error: run ended degenerate\n";
                if (!trace_allow) return 1;
            }
            return 0;
        }

        if (*mm) {
            qgm::ExperimentPlan plan;
            plan.matrices = {mm_matrix};
            plan.symmetrize_general = mm_symmetrize;
            plan.methods = split_list(mm_methods);
            plan.epsilons = {mm_epsilon};
            plan.runs = mm_runs;
            plan.seed = mm_seed;
            plan.tau = mm_tau;
            plan.r = mm_r;
            const qgm::ResultTable table = qgm::run_plan(plan, mm_jobs);
            return emit_tables(table, mm_csv, mm_md, mm_allow);
        }

        if (*verify_cmd) {
            int failures = 0;
            for (const auto& result : qgm::verify::run_theory_suite(verify_seed)) {
                std::printf("[%s] %-24s %s (%.2fs)\n", result.pass ? "PASS" : "FAIL",
                            result.name.c_str(), result.detail.c_str(), result.seconds);
                if (!result.pass) ++failures;
            }
            return failures == 0 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
